#include <catch_amalgamated.hpp>

#include <numbers>
#include <random>

#include "oracles.hpp"
#include "pgsd/circuit.hpp"
#include "pgsd/simulator.hpp"

using namespace pgsd;
using oracle::Mat;

namespace {

// Reference actions written in terms of which qubits are occupied.
// Single excitation on (i=q0, a=q1): |i> -> c|i> - s|a>, |a> -> s|i> + c|a>.
Mat single_reference(double t) {
  const double c = std::cos(t), s = std::sin(t);
  Mat u = Mat::Identity(4, 4);
  const int occ_i = 0b01, occ_a = 0b10;
  u(occ_i, occ_i) = c;
  u(occ_a, occ_i) = -s;
  u(occ_i, occ_a) = s;
  u(occ_a, occ_a) = c;
  return u;
}

// Double excitation with qubit roles (a, i, b, j) = (q0, q1, q2, q3):
// |ij> -> c|ij> - s|ab>, |ab> -> c|ab> + s|ij>.
Mat double_reference(double t) {
  const double c = std::cos(t), s = std::sin(t);
  Mat u = Mat::Identity(16, 16);
  const int ij = 0b1010, ab = 0b0101;
  u(ij, ij) = c;
  u(ab, ij) = -s;
  u(ab, ab) = c;
  u(ij, ab) = s;
  return u;
}

Mat expm_pauli(const std::string& ops, double t) {
  const Mat p = oracle::pauli_dense(ops);
  return std::cos(t / 2) * Mat::Identity(p.rows(), p.cols()) - std::complex<double>(0, std::sin(t / 2)) * p;
}

Circuit one_gate(int n, Gate g) {
  Circuit c(n);
  if (g.angle.param >= 0) c.add_param("t");
  c.push_asap(std::move(g));
  return c;
}

std::size_t count_cx(const Circuit& c) {
  std::size_t n = 0;
  for (const auto& l : c.layers())
    for (const auto& g : l) n += g.kind == GateKind::Cx;
  return n;
}

bool only_basis(const Circuit& c, BasisSet b) {
  for (const auto& l : c.layers())
    for (const auto& g : l) {
      const bool common = g.kind == GateKind::Rz || g.kind == GateKind::PauliX || g.kind == GateKind::Cx;
      const bool extra = b == BasisSet::RzSxXCx ? g.kind == GateKind::Sx
                                                : (g.kind == GateKind::Ry || g.kind == GateKind::Hadamard);
      if (!common && !extra) return false;
    }
  return true;
}

}  // namespace

TEST_CASE("single excitation matrix", "[circuit][gates]") {
  CHECK((single_exc_matrix(0.0) - Mat::Identity(4, 4)).norm() < 1e-15);
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(4);
  v(1) = 1.0;  // |01>: qubit 0 occupied
  const Eigen::VectorXcd w = single_exc_matrix(std::numbers::pi / 2) * v;
  CHECK(std::abs(w(2) + 1.0) < 1e-15);
  std::mt19937 rng(1);
  std::uniform_real_distribution<double> ang(-std::numbers::pi, std::numbers::pi);
  for (int k = 0; k < 50; ++k) {
    const double t = ang(rng);
    const Mat u = single_exc_matrix(t);
    CHECK((u - single_reference(t)).norm() < 1e-12);
    CHECK((u * single_exc_matrix(-t) - Mat::Identity(4, 4)).norm() < 1e-12);
    CHECK((u.adjoint() * u - Mat::Identity(4, 4)).norm() < 1e-12);
  }
}

TEST_CASE("double excitation matrix", "[circuit][gates]") {
  CHECK((double_exc_matrix(0.0) - Mat::Identity(16, 16)).norm() < 1e-15);
  const Mat u = double_exc_matrix(std::numbers::pi / 4);
  const double r = 1.0 / std::numbers::sqrt2;
  for (int row = 0; row < 16; ++row) {
    const double expect = (row == 5 || row == 10) ? r : 0.0;
    CHECK(std::abs(u(row, 5) - expect) < 1e-15);
  }
  std::mt19937 rng(2);
  std::uniform_real_distribution<double> ang(-std::numbers::pi, std::numbers::pi);
  for (int k = 0; k < 50; ++k) {
    const double t = ang(rng);
    const Mat d = double_exc_matrix(t);
    CHECK((d - double_reference(t)).norm() < 1e-12);
    CHECK((d.adjoint() * d - Mat::Identity(16, 16)).norm() < 1e-12);
  }
}

TEST_CASE("excitation gates preserve occupation on their support", "[circuit][gates]") {
  for (const Mat& u : {single_exc_matrix(0.7), double_exc_matrix(-1.3)})
    for (Eigen::Index c = 0; c < u.cols(); ++c)
      for (Eigen::Index r = 0; r < u.rows(); ++r)
        if (std::abs(u(r, c)) > 1e-15) CHECK(std::popcount(std::uint64_t(r)) == std::popcount(std::uint64_t(c)));
}

TEST_CASE("decomposed gates reproduce their matrices", "[circuit][decompose]") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> ang(-std::numbers::pi, std::numbers::pi);
  for (BasisSet b : {BasisSet::RzSxXCx, BasisSet::RzRyHXCx}) {
    const Circuit se = one_gate(2, gates::single_exc(0, 1, Angle::of(0)));
    const Circuit de = one_gate(4, gates::double_exc(1, 3, 0, 2, Angle::of(0)));
    const Circuit lse = decompose(se, b), lde = decompose(de, b);
    CHECK(only_basis(lse, b));
    CHECK(only_basis(lde, b));
    CHECK(count_cx(lse) <= 4);
    CHECK(count_cx(lde) <= 16);
    for (double t : {0.3, -1.1, 2.7}) {
      CHECK(oracle::phase_distance(circuit_unitary(lse, {t}), single_reference(t)) < 1e-10);
    }
    for (int k = 0; k < 20; ++k) {
      const double t = ang(rng);
      CHECK(oracle::phase_distance(circuit_unitary(lse, {t}), single_reference(t)) < 1e-10);
      CHECK(oracle::phase_distance(circuit_unitary(lde, {t}), double_reference(t)) < 1e-10);
    }
    CHECK(oracle::phase_distance(circuit_unitary(lde, {0.0}), Mat::Identity(16, 16)) < 1e-10);
  }
}

TEST_CASE("Pauli rotations", "[circuit][decompose]") {
  SECTION("Z axis is a single Rz") {
    const auto seq = pauli_rotation_circuit(PauliString::from_label("Z0", 1), Angle::fixed(0.4));
    REQUIRE(seq.size() == 1);
    CHECK(seq[0].kind == GateKind::Rz);
  }
  SECTION("X axis at pi is X up to phase") {
    Circuit c = one_gate(1, gates::pauli_rot(PauliString::from_label("X0", 1), Angle::fixed(std::numbers::pi)));
    CHECK(oracle::phase_distance(circuit_unitary(decompose(c), {}), oracle::pauli_dense("X")) < 1e-10);
  }
  SECTION("random axes match the closed-form exponential") {
    std::mt19937 rng(4);
    std::uniform_int_distribution<int> op(0, 3);
    std::uniform_real_distribution<double> ang(-std::numbers::pi, std::numbers::pi);
    const char names[] = "IXYZ";
    for (int k = 0; k < 20; ++k) {
      std::string ops = "III";
      while (ops == "III")
        for (auto& ch : ops) ch = names[op(rng)];
      PauliString p(3, 0, 0);
      for (int q = 0; q < 3; ++q) p.set(q, ops[q]);
      const double t = k == 0 ? 0.77 : ang(rng);
      Circuit c = one_gate(3, gates::pauli_rot(p, Angle::of(0)));
      const Mat ref = expm_pauli(ops, t);
      for (BasisSet b : {BasisSet::RzSxXCx, BasisSet::RzRyHXCx}) {
        const Circuit low = decompose(c, b);
        CHECK(only_basis(low, b));
        CHECK(count_cx(low) == 2 * static_cast<std::size_t>(p.weight() - 1));
        CHECK(oracle::phase_distance(circuit_unitary(low, {t}), ref) < 1e-10);
      }
      CHECK((circuit_unitary(c, {t}) - ref).norm() < 1e-12);
    }
  }
  CHECK_THROWS_AS(pauli_rotation_circuit(PauliString::identity(2), Angle::fixed(1.0)), ValidationError);
}

TEST_CASE("decomposition keeps parameters linear", "[circuit][decompose]") {
  Circuit c(4);
  c.add_param("a");
  c.add_param("b");
  c.push_asap(gates::double_exc(0, 1, 2, 3, Angle::of(1)));
  c.push_asap(gates::single_exc(0, 2, Angle::of(0)));
  const Circuit low = decompose(c);
  low.validate();
  // shifting one parameter by d must equal the high-level circuit shifted by d
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> ang(-2, 2);
  for (int k = 0; k < 5; ++k) {
    const std::vector<double> p{ang(rng), ang(rng)};
    CHECK(oracle::phase_distance(circuit_unitary(low, p), circuit_unitary(c, p)) < 1e-10);
  }
}

TEST_CASE("bare gates pass through lowering", "[circuit][decompose]") {
  Circuit c = one_gate(1, gates::x(0));
  const Circuit low = decompose(c);
  REQUIRE(low.gate_count() == 1);
  CHECK(low.layers()[0][0].kind == GateKind::PauliX);
}

TEST_CASE("resource reports", "[circuit][resources]") {
  const auto empty = resource_report(Circuit(3));
  CHECK(empty.depth_basis == 0);
  CHECK(empty.n_two_qubit == 0);
  CHECK(empty.n_total_gates == 0);
  CHECK(empty.n_params == 0);
  CHECK(empty.depth_excitation_level == 0);
  const auto one = resource_report(one_gate(2, gates::cx(0, 1)));
  CHECK(one.depth_basis == 1);
  CHECK(one.n_two_qubit == 1);
  CHECK(one.n_total_gates == 1);
}

TEST_CASE("layers reject overlapping supports", "[circuit][layers]") {
  Circuit c(4);
  c.add_param("t");
  CHECK_THROWS_AS(c.append_layer({gates::cx(0, 1), gates::x(1)}), ValidationError);
  c.append_layer({gates::cx(0, 1), gates::x(2)});
  c.push_first_fit(gates::single_exc(2, 3, Angle::of(0)), 0);
  CHECK(c.depth() == 2);  // qubit 2 busy in layer 0
  c.push_first_fit(gates::x(3), 0);
  CHECK(c.depth() == 2);
  c.validate();
}

TEST_CASE("gate validation", "[circuit][errors]") {
  Circuit c(3);
  CHECK_THROWS_AS(c.push_asap(gates::cx(1, 1)), ValidationError);
  CHECK_THROWS_AS(c.push_asap(gates::x(3)), ValidationError);
  CHECK_THROWS_AS(c.push_asap(gates::rz(0, Angle::of(0))), ValidationError);  // unknown parameter
  c.add_param("unused");
  CHECK_THROWS_AS(c.validate(), ValidationError);
}

TEST_CASE("text dump", "[circuit]") {
  Circuit c(4);
  c.add_param("t");
  c.append_layer({gates::x(0), gates::x(2)});
  c.push_asap(gates::single_exc(0, 1, Angle::of(0)));
  c.push_asap(gates::rz(3, Angle::of(0, -0.5)));
  CHECK(c.to_text() == "0: X[0] X[2] Rz[3](-0.5*t)\n1: SingleExc[0,1](t)\n");
}
