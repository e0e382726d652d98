#include <catch_amalgamated.hpp>

#include <random>

#include "oracles.hpp"
#include "pgsd/casci.hpp"
#include "pgsd/hamiltonian.hpp"

using namespace pgsd;

namespace {

const std::string kFixtures = PGSD_FIXTURE_DIR;

oracle::Mat dense(const PauliSum& h) {
  const std::size_t dim = std::size_t{1} << h.n_qubits();
  oracle::Mat m = oracle::Mat::Zero(dim, dim);
  for (const auto& [p, c] : h.terms()) {
    std::string ops;
    for (int q = 0; q < p.n_qubits; ++q) ops += p.op(q);
    m += c * oracle::pauli_dense(ops);
  }
  return m;
}

// Random real integrals with the full 8-fold symmetry.
FcidumpData random_integrals(int m, int ne, int ms2, std::uint32_t seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> g(0.0, 0.3);
  FcidumpData d(m, ne, ms2);
  d.set_e_core(g(rng));
  for (int p = 0; p < m; ++p)
    for (int q = 0; q <= p; ++q) d.set_h1(p, q, g(rng) - (p == q ? 1.0 + p : 0.0));
  for (int p = 0; p < m; ++p)
    for (int q = 0; q < m; ++q)
      for (int r = 0; r < m; ++r)
        for (int s = 0; s < m; ++s) d.set_g2(p, q, r, s, 0.1 * std::abs(g(rng)));
  return d;
}

}  // namespace

TEST_CASE("fold_core with an empty core restricts integrals", "[hamiltonian]") {
  const auto d = random_integrals(3, 2, 0, 1);
  auto spec = ActiveSpaceSpec::model(3, 1, 1);
  const auto ham = fold_core(d, spec);
  CHECK(ham.e_core == d.e_core());
  for (int p = 0; p < 3; ++p)
    for (int q = 0; q < 3; ++q) CHECK(ham.h1(p, q) == d.h1(p, q));
}

TEST_CASE("fold_core: a lone core orbital with h=-1 shifts the core energy by -2", "[hamiltonian]") {
  FcidumpData d(2, 2, 0);
  d.set_h1(0, 0, -1.0);
  const auto spec = ActiveSpaceSpec::from_orbitals(d, {1});
  REQUIRE(spec.core_orbitals == std::vector<int>{0});
  REQUIRE(spec.n_alpha == 0);
  const auto ham = fold_core(d, spec);
  CHECK(ham.e_core == Catch::Approx(-2.0).margin(1e-15));
}

TEST_CASE("overlapping core and active sets are rejected", "[hamiltonian][errors]") {
  ActiveSpaceSpec s = ActiveSpaceSpec::model(2, 1, 1);
  s.core_orbitals = {1};
  CHECK_THROWS_AS(s.validate(), ValidationError);
  FcidumpData d(3, 3, 1);
  CHECK_THROWS_AS(ActiveSpaceSpec::from_orbitals(d, {0, 2}), ValidationError);  // singly occupied 1 left out
}

TEST_CASE("alpha hopping maps to (t/2)(XX + YY)", "[hamiltonian][jw]") {
  const double t = 0.37;
  ActiveHamiltonian ham(2);
  ham.h1(0, 1) = ham.h1(1, 0) = t;
  // qubits 0,1 are the alpha orbitals; beta hopping lands on 2,3.
  const auto h = jw_map_hamiltonian(ham, ActiveSpaceSpec::model(2, 1, 1));
  const oracle::Mat ref = 0.5 * t *
                   (oracle::pauli_dense("XXII") + oracle::pauli_dense("YYII") + oracle::pauli_dense("IIXX") +
                    oracle::pauli_dense("IIYY"));
  CHECK((dense(h) - ref).norm() < 1e-12);
}

TEST_CASE("JW Hamiltonian equals the dense second-quantized operator", "[hamiltonian][jw]") {
  for (std::uint32_t seed : {2u, 3u, 4u}) {
    const auto d = random_integrals(3, 2, 0, seed);
    const auto spec = ActiveSpaceSpec::model(3, 1, 1);
    const auto ham = fold_core(d, spec);
    const auto h = jw_map_hamiltonian(ham, spec);
    const auto ref = oracle::fermion_hamiltonian(
        3, ham.e_core, [&](int p, int q) { return ham.h1(p, q); },
        [&](int p, int q, int r, int s) { return ham.g2(p, q, r, s); });
    CHECK((dense(h) - ref).norm() < 1e-10);
    for (const auto& [p, c] : h.terms()) CHECK(c.imag() == 0.0);
  }
}

TEST_CASE("JW Hamiltonian conserves both spin populations", "[hamiltonian][jw]") {
  const auto d = read_fcidump(kFixtures + "/h2o/h2o_2.4.fcidump");
  const auto spec = ActiveSpaceSpec::from_orbitals(d, {4, 5, 6});
  const auto h = dense(jw_map_hamiltonian(fold_core(d, spec), spec));
  for (int spin = 0; spin < 2; ++spin) {
    const auto n = dense(spin_number_operator(3, spin));
    CHECK((h * n - n * h).norm() < 1e-10);
  }
}

TEST_CASE("H2 sector ground state equals the CI oracle", "[hamiltonian][jw]") {
  const auto d = read_fcidump(kFixtures + "/h2/h2_0.735.fcidump");
  const auto spec = ActiveSpaceSpec::full(d);
  const auto ham = fold_core(d, spec);
  const double e_jw = oracle::sector_min_eigenvalue(dense(jw_map_hamiltonian(ham, spec)), 2, 1, 1);
  const double e_ci = ci_ground_state(ham, spec).energy;
  CHECK(std::abs(e_jw - e_ci) < 1e-9);
}

TEST_CASE("core folding matches the frozen-core block of the full CI matrix", "[hamiltonian]") {
  const auto d = read_fcidump(kFixtures + "/h2o/h2o_0.958.fcidump");
  const auto spec = ActiveSpaceSpec::from_orbitals(d, {1, 2, 3, 5, 6});
  REQUIRE(spec.core_orbitals == std::vector<int>{0, 4});
  const double folded = ci_ground_state(fold_core(d, spec), spec).energy;

  // Full-space CI matrix restricted to determinants with orbitals 0 and 4 doubly occupied.
  const auto full = ActiveSpaceSpec::full(d);
  const CiHamiltonian ci(fold_core(d, full), full.n_alpha, full.n_beta);
  const Eigen::MatrixXd hfull = ci.dense();
  const std::uint64_t core = (1u << 0) | (1u << 4);
  std::vector<std::size_t> keep;
  for (std::size_t k = 0; k < ci.dim(); ++k) {
    const auto det = ci.determinant(k);
    if ((det.alpha & core) == core && (det.beta & core) == core) keep.push_back(k);
  }
  REQUIRE(keep.size() == 100);
  Eigen::MatrixXd block(keep.size(), keep.size());
  for (std::size_t i = 0; i < keep.size(); ++i)
    for (std::size_t j = 0; j < keep.size(); ++j) block(i, j) = hfull(keep[i], keep[j]);
  const double restricted = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(block).eigenvalues()(0);
  CHECK(std::abs(folded - restricted) < 1e-9);
}
