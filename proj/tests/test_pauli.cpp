#include <catch_amalgamated.hpp>

#include <random>

#include "oracles.hpp"
#include "pgsd/pauli.hpp"

using namespace pgsd;

namespace {

std::string ops_of(const PauliString& p) {
  std::string s;
  for (int q = 0; q < p.n_qubits; ++q) s += p.op(q);
  return s;
}

oracle::Mat dense(const PauliSum& h) {
  const std::size_t dim = std::size_t{1} << h.n_qubits();
  oracle::Mat m = oracle::Mat::Zero(dim, dim);
  for (const auto& [p, c] : h.terms()) m += c * oracle::pauli_dense(ops_of(p));
  return m;
}

Statevector random_state(int n, std::mt19937& rng) {
  std::normal_distribution<double> g;
  Statevector v(n);
  double norm = 0.0;
  for (auto& a : v.amps) {
    a = {g(rng), g(rng)};
    norm += std::norm(a);
  }
  for (auto& a : v.amps) a /= std::sqrt(norm);
  return v;
}

PauliSum random_sum(int n, int terms, std::mt19937& rng) {
  std::uniform_int_distribution<std::uint64_t> mask(0, (std::uint64_t{1} << n) - 1);
  std::normal_distribution<double> g;
  PauliSum h(n);
  for (int k = 0; k < terms; ++k) h.add(PauliString(n, mask(rng), mask(rng)), {g(rng), 0.0});
  return h.simplify();
}

}  // namespace

TEST_CASE("label parsing and printing", "[pauli]") {
  const auto p = PauliString::from_label("X0 Z2 Y5", 6);
  CHECK(p.op(0) == 'X');
  CHECK(p.op(1) == 'I');
  CHECK(p.op(2) == 'Z');
  CHECK(p.op(5) == 'Y');
  CHECK(p.label() == "X0 Z2 Y5");
  CHECK(p.qubits() == std::vector<int>{0, 2, 5});
  CHECK(PauliString::from_label("I", 3).is_identity());
  CHECK_THROWS_AS(PauliString::from_label("X7", 3), ValidationError);
  CHECK_THROWS_AS(PauliString::from_label("X0 Z0", 3), ValidationError);
}

TEST_CASE("single-qubit products carry exact phases", "[pauli]") {
  const auto x = PauliString::from_label("X0", 1), y = PauliString::from_label("Y0", 1),
             z = PauliString::from_label("Z0", 1);
  auto [ph1, p1] = multiply(x, y);
  CHECK(p1 == z);
  CHECK(ph1 == cplx(0, 1));
  auto [ph2, p2] = multiply(y, x);
  CHECK(p2 == z);
  CHECK(ph2 == cplx(0, -1));
  auto [ph3, p3] = multiply(z, z);
  CHECK(p3.is_identity());
  CHECK(ph3 == cplx(1, 0));
}

TEST_CASE("products match dense multiplication", "[pauli]") {
  std::mt19937 rng(3);
  std::uniform_int_distribution<std::uint64_t> mask(0, 15);
  for (int t = 0; t < 100; ++t) {
    const PauliString a(4, mask(rng), mask(rng)), b(4, mask(rng), mask(rng));
    auto [ph, c] = multiply(a, b);
    const oracle::Mat lhs = oracle::pauli_dense(ops_of(a)) * oracle::pauli_dense(ops_of(b));
    CHECK((lhs - ph * oracle::pauli_dense(ops_of(c))).norm() < 1e-12);
    const oracle::Mat ab = lhs, ba = oracle::pauli_dense(ops_of(b)) * oracle::pauli_dense(ops_of(a));
    CHECK(commutes(a, b) == ((ab - ba).norm() < 1e-12));
  }
}

TEST_CASE("qubit-wise commutation", "[pauli]") {
  CHECK(qubitwise_commutes(PauliString::from_label("Z0", 2), PauliString::from_label("Z0 Z1", 2)));
  CHECK_FALSE(qubitwise_commutes(PauliString::from_label("X0 X1", 2), PauliString::from_label("Y0 Y1", 2)));
  CHECK(commutes(PauliString::from_label("X0 X1", 2), PauliString::from_label("Y0 Y1", 2)));
}

TEST_CASE("simplification drops cancelled terms", "[pauli]") {
  PauliSum h(2);
  h.add(PauliString::from_label("X0", 2), 1.0);
  h.add(PauliString::from_label("X0", 2), -1.0);
  h.add(PauliString::from_label("Z1", 2), 1e-16);
  h.simplify();
  CHECK(h.empty());
}

TEST_CASE("matvec: trivial cases", "[pauli]") {
  Statevector one(1, 1);
  const auto r = pauli_matvec(PauliSum::term(PauliString::from_label("Z0", 1), 1.0), one);
  CHECK(std::abs(r.amps[1] + 1.0) < 1e-15);
  std::mt19937 rng(5);
  const auto v = random_state(3, rng);
  const auto w = pauli_matvec(PauliSum::constant(3, 2.5), v);
  for (std::size_t i = 0; i < v.dim(); ++i) CHECK(std::abs(w.amps[i] - 2.5 * v.amps[i]) < 1e-15);
}

TEST_CASE("matvec and the X-block operator agree with dense products", "[pauli]") {
  std::mt19937 rng(7);
  for (int t = 0; t < 10; ++t) {
    const auto h = random_sum(4, 12, rng);
    const auto v = random_state(4, rng);
    Eigen::VectorXcd ev(16);
    for (int i = 0; i < 16; ++i) ev(i) = v.amps[i];
    const Eigen::VectorXcd ref = dense(h) * ev;
    const auto a = pauli_matvec(h, v);
    const auto b = XBlockOperator(h).apply(v);
    for (int i = 0; i < 16; ++i) {
      CHECK(std::abs(a.amps[i] - ref(i)) < 1e-12);
      CHECK(std::abs(b.amps[i] - ref(i)) < 1e-12);
    }
  }
}

TEST_CASE("dimension mismatch is rejected", "[pauli][errors]") {
  Statevector v(2);
  CHECK_THROWS_AS(pauli_matvec(PauliSum::constant(3, 1.0), v), ValidationError);
  CHECK_THROWS_AS(PauliSum(2) + PauliSum(3), ValidationError);
}

TEST_CASE("Jordan-Wigner ladder operators", "[pauli][jw]") {
  const int n = 4;
  for (int p = 0; p < n; ++p) {
    CHECK((dense(jw::annihilation(p, n)) - oracle::annihilator(p, n)).norm() < 1e-12);
    PauliSum half_i_minus_z = PauliSum::constant(n, 0.5) - PauliSum::term(PauliString::single(n, p, 'Z'), 0.5);
    const auto num = jw::number(p, n);
    CHECK((dense(num) - dense(half_i_minus_z)).norm() < 1e-12);
  }
  // canonical anticommutation {a_p, a_q^dagger} = delta_pq
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q) {
      const auto ac = jw::annihilation(p, n) * jw::creation(q, n) + jw::creation(q, n) * jw::annihilation(p, n);
      const auto expected = p == q ? PauliSum::constant(n, 1.0) : PauliSum(n);
      CHECK((dense(ac) - dense(expected)).norm() < 1e-12);
    }
}

TEST_CASE("text form", "[pauli]") {
  PauliSum h(3);
  h.add(PauliString::from_label("Z0 X2", 3), -0.25);
  h.add(PauliString::identity(3), 1.0);
  CHECK(h.to_text() == "1.000000000000  I\n-0.250000000000  Z0 X2\n");
}
