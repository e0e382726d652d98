#include <catch_amalgamated.hpp>

#include <random>

#include "oracles.hpp"
#include "pgsd/ansatz.hpp"
#include "pgsd/casci.hpp"
#include "pgsd/simulator.hpp"

using namespace pgsd;

namespace {

const std::string kFixtures = PGSD_FIXTURE_DIR;

std::vector<double> random_params(std::size_t n, std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  std::vector<double> p(n);
  for (auto& x : p) x = u(rng);
  return p;
}

// The identity term is dropped: it shifts every energy equally and only adds
// cancellation error to the difference quotient.
std::vector<double> central_difference(const Circuit& c, std::vector<double> p, PauliSum h) {
  const double step = 1e-5;
  h -= PauliSum::constant(h.n_qubits(), h.coefficient(PauliString::identity(h.n_qubits())));
  h.simplify();
  std::vector<double> g(p.size());
  for (std::size_t k = 0; k < p.size(); ++k) {
    const double x = p[k];
    p[k] = x + step;
    const double up = expectation(evolve(c, p), h);
    p[k] = x - step;
    const double dn = expectation(evolve(c, p), h);
    p[k] = x;
    g[k] = (up - dn) / (2 * step);
  }
  return g;
}

// Relative error with an absolute floor for components that vanish.
double grad_error(const std::vector<double>& a, const std::vector<double>& b) {
  double worst = 0.0, scale = 0.0;
  for (double x : b) scale = std::max(scale, std::abs(x));
  for (std::size_t k = 0; k < a.size(); ++k)
    worst = std::max(worst, std::abs(a[k] - b[k]) / std::max(std::abs(b[k]), 1e-3 * scale));
  return worst;
}

struct Problem {
  ActiveSpaceSpec spec;
  PauliSum h;
};

Problem problem(const std::string& file, std::vector<int> orbitals) {
  const auto d = read_fcidump(kFixtures + file);
  const auto spec = ActiveSpaceSpec::from_orbitals(d, std::move(orbitals));
  return {spec, jw_map_hamiltonian(fold_core(d, spec), spec)};
}

}  // namespace

TEST_CASE("X flips a basis state", "[simulator]") {
  Circuit c(1);
  c.push_asap(gates::x(0));
  const auto v = evolve(c, {});
  CHECK(std::abs(v.amps[1] - 1.0) < 1e-15);
}

TEST_CASE("two-orbital Givens circuits give the closed-form amplitudes", "[simulator]") {
  const auto spec = ActiveSpaceSpec::model(2, 1, 1);
  std::mt19937 rng(1);
  for (int t = 0; t < 10; ++t) {
    const auto p = random_params(3, rng);
    const double c0 = std::cos(p[0]), c1 = std::cos(p[1]), c2 = std::cos(p[2]);
    const double s0 = std::sin(p[0]), s1 = std::sin(p[1]), s2 = std::sin(p[2]);
    // singles only
    Circuit a(4);
    append_reference_layer(a, hf_reference(spec));
    a.add_param("t0");
    a.add_param("t1");
    a.push_asap(gates::single_exc(0, 1, Angle::of(0)));
    a.push_asap(gates::single_exc(2, 3, Angle::of(1)));
    CHECK(std::abs(evolve(a, {p[0], p[1]}).amps[0b0101] - c0 * c1) < 1e-12);
    // singles and the double
    const Circuit b = build_pgsd(spec);
    const auto v = evolve(b, p);
    CHECK(std::abs(v.amps[0b0101] - (c0 * c1 * c2 + s0 * s1 * s2)) < 1e-12);
    CHECK(std::abs(v.amps[0b1010] + (c0 * c1 * s2 - s0 * s1 * c2)) < 1e-12);
  }
}

TEST_CASE("norm is preserved through deep circuits", "[simulator]") {
  std::mt19937 rng(2);
  const auto spec = ActiveSpaceSpec::model(5, 3, 3);
  for (const Circuit& c : {build_pgsd(spec), decompose(build_uccsd(spec))}) {
    const auto v = evolve(c, random_params(c.n_params(), rng));
    CHECK(std::abs(v.norm() - 1.0) < 1e-10);
  }
}

TEST_CASE("expectation values", "[simulator]") {
  Statevector one(1, 1);
  CHECK(expectation(one, PauliSum::term(PauliString::from_label("Z0", 1), 1.0)) == -1.0);

  SECTION("HF energy of H2 matches the closed-shell determinant formula") {
    const auto d = read_fcidump(kFixtures + "/h2/h2_0.735.fcidump");
    const auto spec = ActiveSpaceSpec::full(d);
    const auto h = jw_map_hamiltonian(fold_core(d, spec), spec);
    const double e = d.e_core() + 2 * d.h1(0, 0) + d.g2(0, 0, 0, 0);
    CHECK(std::abs(expectation(Statevector(4, hf_reference(spec)), h) - e) < 1e-12);
  }
  SECTION("an eigenvector returns its eigenvalue") {
    const auto pr = problem("/h2o/h2o_2.4.fcidump", {4, 5, 6});
    const std::size_t dim = 64;
    oracle::Mat m = oracle::Mat::Zero(dim, dim);
    for (const auto& [p, c] : pr.h.terms()) {
      std::string ops;
      for (int q = 0; q < 6; ++q) ops += p.op(q);
      m += c * oracle::pauli_dense(ops);
    }
    Eigen::SelfAdjointEigenSolver<oracle::Mat> es(m);
    for (int k : {0, 7, 40}) {
      Statevector v(6);
      for (std::size_t i = 0; i < dim; ++i) v.amps[i] = es.eigenvectors()(i, k);
      CHECK(std::abs(expectation(v, pr.h) - es.eigenvalues()(k)) < 1e-10);
      CHECK(std::abs(expectation(v, XBlockOperator(pr.h)) - es.eigenvalues()(k)) < 1e-10);
    }
  }
  SECTION("non-Hermitian operators are rejected") {
    PauliSum h(1);
    h.add(PauliString::from_label("X0", 1), {0.0, 1.0});
    CHECK_THROWS_AS(expectation(Statevector(1), h), ValidationError);
  }
}

TEST_CASE("adjoint gradient equals central differences", "[simulator][gradient]") {
  std::mt19937 rng(3);
  SECTION("PGSD on a molecular Hamiltonian") {
    const auto pr = problem("/h2o/h2o_2.4.fcidump", {4, 5, 6});
    const Circuit c = build_pgsd(pr.spec);
    for (int t = 0; t < 3; ++t) {
      const auto p = random_params(c.n_params(), rng);
      CHECK(grad_error(gradient(c, p, pr.h), central_difference(c, p, pr.h)) < 1e-6);
    }
  }
  SECTION("UCCSD and its lowering") {
    const auto pr = problem("/h2o/h2o_2.4.fcidump", {4, 5, 6});
    const Circuit c = build_uccsd(pr.spec);
    const auto p = random_params(c.n_params(), rng);
    const auto fd = central_difference(c, p, pr.h);
    CHECK(grad_error(gradient(c, p, pr.h), fd) < 1e-6);
    for (BasisSet b : {BasisSet::RzSxXCx, BasisSet::RzRyHXCx})
      CHECK(grad_error(gradient(decompose(c, b), p, pr.h), fd) < 1e-6);
  }
  SECTION("constant Hamiltonian has zero gradient") {
    const Circuit c = build_pgsd(ActiveSpaceSpec::model(3, 1, 1));
    for (double g : gradient(c, random_params(c.n_params(), rng), PauliSum::constant(6, 2.0)))
      CHECK(std::abs(g) < 1e-14);
  }
}

TEST_CASE("singles gradient at the reference is twice the HF coupling", "[simulator][gradient]") {
  const auto pr = problem("/h2o/h2o_1.4.fcidump", {1, 2, 4, 5, 6});
  const Circuit c = build_pgsd(pr.spec);
  const std::vector<double> zero(c.n_params(), 0.0);
  const auto g = gradient(c, zero, pr.h);
  const auto fd = central_difference(c, zero, pr.h);
  const auto hf = hf_reference(pr.spec);
  const auto hv = pauli_matvec(pr.h, Statevector(c.n_qubits(), hf));
  const auto ex = enumerate_excitations(pr.spec);
  for (std::size_t k = 0; k < ex.size(); ++k) {
    CHECK(std::abs(g[k] - fd[k]) < 1e-8);
    if (ex[k].order != 1) continue;
    const auto target = hf ^ (std::uint64_t{1} << ex[k].from[0]) ^ (std::uint64_t{1} << ex[k].to[0]);
    // d/dt (c|HF> - s|X>) = -|X> at t = 0
    CHECK(std::abs(g[k] - (-2.0 * hv.amps[target].real())) < 1e-10);
  }
}

TEST_CASE("parameter length mismatch is rejected", "[simulator][errors]") {
  const Circuit c = build_pgsd(ActiveSpaceSpec::model(2, 1, 1));
  CHECK_THROWS_AS(evolve(c, {0.1}), ValidationError);
}
