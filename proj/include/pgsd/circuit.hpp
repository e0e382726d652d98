/**
 * @file circuit.hpp
 * @brief Layered gate programs, Givens excitation gates and their lowering
 *        to a small basis gate set.
 *
 * Conventions
 *  - Local gate matrices are little-endian over the gate's support: bit k of
 *    the local index is qubits[k].
 *  - SingleExc has support (i, a), occupied qubit first. Acting on |01>
 *    (i occupied) it gives cos t |01> - sin t |10>.
 *  - DoubleExc has support (a, i, b, j) for the excitation ij -> ab. Written as
 *    |q_j q_b q_i q_a>, the reference pattern is |1010> and the excited one
 *    |0101>; U|0101> = c|0101> + s|1010>, U|1010> = c|1010> - s|0101>.
 *  - PauliRot(P, t) = exp(-i t/2 P).
 *  - Gate angles are affine in at most one circuit parameter, which keeps
 *    shift rules and adjoint gradients valid after lowering.
 */
#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>
#include <vector>

#include "pgsd/error.hpp"
#include "pgsd/pauli.hpp"

namespace pgsd {

enum class GateKind { PauliX, SingleExc, DoubleExc, Rz, Ry, Sx, Hadamard, Cx, PauliRot };

inline const char* gate_name(GateKind k) noexcept {
  switch (k) {
    case GateKind::PauliX: return "X";
    case GateKind::SingleExc: return "SingleExc";
    case GateKind::DoubleExc: return "DoubleExc";
    case GateKind::Rz: return "Rz";
    case GateKind::Ry: return "Ry";
    case GateKind::Sx: return "Sx";
    case GateKind::Hadamard: return "H";
    case GateKind::Cx: return "CX";
    case GateKind::PauliRot: return "PauliRot";
  }
  return "?";
}

inline bool is_parametric(GateKind k) noexcept {
  return k == GateKind::SingleExc || k == GateKind::DoubleExc || k == GateKind::Rz ||
         k == GateKind::Ry || k == GateKind::PauliRot;
}

/// offset + scale * params[param]; a fixed angle has param = -1.
struct Angle {
  int param = -1;
  double offset = 0.0;
  double scale = 0.0;

  static Angle fixed(double v) { return {-1, v, 0.0}; }
  static Angle of(int k, double scale = 1.0, double offset = 0.0) { return {k, offset, scale}; }

  bool is_fixed() const noexcept { return param < 0; }

  double value(const std::vector<double>& params) const {
    if (param < 0) return offset;
    return offset + scale * params.at(static_cast<std::size_t>(param));
  }

  /// The angle multiplied by a constant, still affine in the same parameter.
  Angle times(double k) const { return {param, offset * k, scale * k}; }
};

struct Gate {
  GateKind kind = GateKind::PauliX;
  std::vector<int> qubits;
  Angle angle;
  std::string axis;  // PauliRot only, one of XYZ per support qubit

  std::uint64_t support_mask() const noexcept {
    std::uint64_t m = 0;
    for (int q : qubits) m |= std::uint64_t{1} << q;
    return m;
  }
  bool is_two_qubit() const noexcept { return qubits.size() == 2; }
};

namespace gates {

inline Gate x(int q) { return {GateKind::PauliX, {q}, {}, {}}; }
inline Gate h(int q) { return {GateKind::Hadamard, {q}, {}, {}}; }
inline Gate sx(int q) { return {GateKind::Sx, {q}, {}, {}}; }
inline Gate cx(int control, int target) { return {GateKind::Cx, {control, target}, {}, {}}; }
inline Gate rz(int q, Angle a) { return {GateKind::Rz, {q}, a, {}}; }
inline Gate ry(int q, Angle a) { return {GateKind::Ry, {q}, a, {}}; }

inline Gate single_exc(int i, int a, Angle t) { return {GateKind::SingleExc, {i, a}, t, {}}; }

/// Excitation ij -> ab; stored with support (a, i, b, j).
inline Gate double_exc(int i, int j, int a, int b, Angle t) {
  return {GateKind::DoubleExc, {a, i, b, j}, t, {}};
}

inline Gate pauli_rot(const PauliString& p, Angle t) {
  Gate g{GateKind::PauliRot, p.qubits(), t, {}};
  for (int q : g.qubits) g.axis += p.op(q);
  return g;
}

}  // namespace gates

inline void validate_gate(const Gate& g, int n_qubits) {
  const std::size_t n = g.qubits.size();
  std::size_t want = 0;
  switch (g.kind) {
    case GateKind::PauliX:
    case GateKind::Rz:
    case GateKind::Ry:
    case GateKind::Sx:
    case GateKind::Hadamard: want = 1; break;
    case GateKind::SingleExc:
    case GateKind::Cx: want = 2; break;
    case GateKind::DoubleExc: want = 4; break;
    case GateKind::PauliRot:
      want = g.axis.size();
      if (want == 0) throw ValidationError("PauliRot with empty axis");
      for (char c : g.axis)
        if (c != 'X' && c != 'Y' && c != 'Z') throw ValidationError("PauliRot axis must use X, Y, Z");
      break;
  }
  if (n != want) throw ValidationError(std::string(gate_name(g.kind)) + ": wrong support size");
  if (std::popcount(g.support_mask()) != static_cast<int>(n))
    throw ValidationError(std::string(gate_name(g.kind)) + ": repeated qubit in support");
  for (int q : g.qubits)
    if (q < 0 || q >= n_qubits) throw ValidationError("gate qubit outside circuit");
}

class Circuit {
 public:
  Circuit() = default;
  explicit Circuit(int n_qubits) : n_qubits_(n_qubits), frontier_(static_cast<std::size_t>(n_qubits), 0) {
    if (n_qubits < 0 || n_qubits > 30) throw ValidationError("circuit qubit count out of range");
  }

  int n_qubits() const noexcept { return n_qubits_; }
  const std::vector<std::vector<Gate>>& layers() const noexcept { return layers_; }
  std::size_t depth() const noexcept { return layers_.size(); }

  std::size_t n_params() const noexcept { return param_names_.size(); }
  const std::vector<std::string>& param_names() const noexcept { return param_names_; }
  const std::vector<double>& param_values() const noexcept { return param_values_; }
  void set_param_values(std::vector<double> v) {
    if (v.size() != param_names_.size()) throw ValidationError("parameter vector length mismatch");
    param_values_ = std::move(v);
  }

  int add_param(std::string name, double value = 0.0) {
    param_names_.push_back(std::move(name));
    param_values_.push_back(value);
    return static_cast<int>(param_names_.size()) - 1;
  }

  /// Copies the parameter table (names and values) of another circuit.
  void copy_params_from(const Circuit& o) {
    param_names_ = o.param_names_;
    param_values_ = o.param_values_;
  }

  /// Appends a whole layer; supports must be pairwise disjoint.
  void append_layer(std::vector<Gate> layer) {
    std::uint64_t used = 0;
    for (const auto& g : layer) {
      check(g);
      if (used & g.support_mask()) throw ValidationError("overlapping supports within a layer");
      used |= g.support_mask();
    }
    const int idx = static_cast<int>(layers_.size());
    for (const auto& g : layer)
      for (int q : g.qubits) frontier_[q] = idx + 1;
    layers_.push_back(std::move(layer));
  }

  /// Places the gate right after the last layer touching its support.
  void push_asap(Gate g) {
    check(g);
    int at = 0;
    for (int q : g.qubits) at = std::max(at, frontier_[q]);
    place(std::move(g), at);
  }

  /// Places the gate in the earliest layer >= first whose supports are disjoint from it.
  void push_first_fit(Gate g, std::size_t first) {
    check(g);
    const std::uint64_t m = g.support_mask();
    std::size_t at = first;
    for (; at < layers_.size(); ++at) {
      std::uint64_t used = 0;
      for (const auto& o : layers_[at]) used |= o.support_mask();
      if (!(used & m)) break;
    }
    place(std::move(g), static_cast<int>(at));
  }

  std::size_t gate_count() const noexcept {
    std::size_t n = 0;
    for (const auto& l : layers_) n += l.size();
    return n;
  }

  /// Structural checks: disjoint layers, valid supports, every parameter used.
  void validate() const {
    std::vector<bool> used(param_names_.size(), false);
    for (const auto& l : layers_) {
      std::uint64_t seen = 0;
      for (const auto& g : l) {
        validate_gate(g, n_qubits_);
        if (seen & g.support_mask()) throw ValidationError("overlapping supports within a layer");
        seen |= g.support_mask();
        if (g.angle.param >= 0) {
          if (static_cast<std::size_t>(g.angle.param) >= used.size())
            throw ValidationError("gate references unknown parameter");
          used[static_cast<std::size_t>(g.angle.param)] = true;
        }
      }
    }
    for (std::size_t k = 0; k < used.size(); ++k)
      if (!used[k]) throw ValidationError("parameter " + param_names_[k] + " is not referenced");
  }

  /// One layer per line: `k: Kind[q,..](angle) ...`.
  std::string to_text() const {
    std::string out;
    for (std::size_t k = 0; k < layers_.size(); ++k) {
      out += std::to_string(k) + ':';
      for (const auto& g : layers_[k]) {
        out += ' ';
        out += gate_name(g.kind);
        if (!g.axis.empty()) out += '_' + g.axis;
        out += '[';
        for (std::size_t i = 0; i < g.qubits.size(); ++i) {
          if (i) out += ',';
          out += std::to_string(g.qubits[i]);
        }
        out += ']';
        if (is_parametric(g.kind)) out += '(' + angle_text(g.angle) + ')';
      }
      out += '\n';
    }
    return out;
  }

 private:
  std::string angle_text(const Angle& a) const {
    char buf[64];
    if (a.is_fixed()) {
      std::snprintf(buf, sizeof(buf), "%.10g", a.offset);
      return buf;
    }
    const std::string& name = param_names_.at(static_cast<std::size_t>(a.param));
    if (a.offset == 0.0 && a.scale == 1.0) return name;
    if (a.offset == 0.0) {
      std::snprintf(buf, sizeof(buf), "%.10g*", a.scale);
      return buf + name;
    }
    std::snprintf(buf, sizeof(buf), "%.10g%+.10g*", a.offset, a.scale);
    return buf + name;
  }

  void check(const Gate& g) const {
    validate_gate(g, n_qubits_);
    if (g.angle.param >= 0 && static_cast<std::size_t>(g.angle.param) >= param_names_.size())
      throw ValidationError("gate references unknown parameter");
  }

  void place(Gate g, int at) {
    if (at >= static_cast<int>(layers_.size())) layers_.resize(static_cast<std::size_t>(at) + 1);
    for (int q : g.qubits) frontier_[q] = std::max(frontier_[q], at + 1);
    layers_[static_cast<std::size_t>(at)].push_back(std::move(g));
  }

  int n_qubits_ = 0;
  std::vector<std::vector<Gate>> layers_;
  std::vector<std::string> param_names_;
  std::vector<double> param_values_;
  std::vector<int> frontier_;
};

// ---------------------------------------------------------------------------
// Dense matrices

using Matrix = Eigen::MatrixXcd;

inline Matrix single_exc_matrix(double theta) {
  const double c = std::cos(theta), s = std::sin(theta);
  Matrix u = Matrix::Identity(4, 4);
  u(1, 1) = c;
  u(2, 1) = -s;
  u(1, 2) = s;
  u(2, 2) = c;
  return u;
}

/// Local basis |q_j q_b q_i q_a>; index 5 = |0101> (a, b occupied), 10 = |1010>.
inline Matrix double_exc_matrix(double theta) {
  const double c = std::cos(theta), s = std::sin(theta);
  Matrix u = Matrix::Identity(16, 16);
  u(5, 5) = c;
  u(10, 5) = s;
  u(5, 10) = -s;
  u(10, 10) = c;
  return u;
}

/// Dense matrix of a Pauli string (little-endian, 2^n x 2^n).
inline Matrix pauli_matrix(const PauliString& p) {
  const std::size_t dim = std::size_t{1} << p.n_qubits;
  Matrix m = Matrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (std::uint64_t i = 0; i < dim; ++i)
    m(static_cast<Eigen::Index>(i ^ p.x), static_cast<Eigen::Index>(i)) = pauli_phase(p, i);
  return m;
}

/// Local matrix of a gate at a given angle, over its own support.
inline Matrix gate_matrix(const Gate& g, double angle) {
  using namespace std::complex_literals;
  const double r = 1.0 / std::numbers::sqrt2;
  Matrix m;
  switch (g.kind) {
    case GateKind::PauliX: m = Matrix(2, 2); m << 0, 1, 1, 0; return m;
    case GateKind::Hadamard: m = Matrix(2, 2); m << r, r, r, -r; return m;
    case GateKind::Sx:
      m = Matrix(2, 2);
      m << cplx(0.5, 0.5), cplx(0.5, -0.5), cplx(0.5, -0.5), cplx(0.5, 0.5);
      return m;
    case GateKind::Rz:
      m = Matrix::Zero(2, 2);
      m(0, 0) = std::exp(-0.5i * angle);
      m(1, 1) = std::exp(0.5i * angle);
      return m;
    case GateKind::Ry:
      m = Matrix(2, 2);
      m << std::cos(angle / 2), -std::sin(angle / 2), std::sin(angle / 2), std::cos(angle / 2);
      return m;
    case GateKind::Cx:
      // control = bit 0, target = bit 1
      m = Matrix::Zero(4, 4);
      m(0, 0) = m(2, 2) = 1.0;
      m(3, 1) = m(1, 3) = 1.0;
      return m;
    case GateKind::SingleExc: return single_exc_matrix(angle);
    case GateKind::DoubleExc: return double_exc_matrix(angle);
    case GateKind::PauliRot: {
      const int k = static_cast<int>(g.axis.size());
      PauliString p(k, 0, 0);
      for (int i = 0; i < k; ++i) p.set(i, g.axis[static_cast<std::size_t>(i)]);
      const Matrix pm = pauli_matrix(p);
      return std::cos(angle / 2) * Matrix::Identity(pm.rows(), pm.cols()) - 1i * std::sin(angle / 2) * pm;
    }
  }
  throw ValidationError("unknown gate kind");
}

/// Max-overlap phase alignment, then Frobenius distance.
inline double phase_aligned_distance(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw ValidationError("matrix size mismatch");
  const cplx ov = (b.adjoint() * a).trace();
  const cplx ph = std::abs(ov) > 0 ? ov / std::abs(ov) : cplx{1.0, 0.0};
  return (a - ph * b).norm();
}

// ---------------------------------------------------------------------------
// Lowering

enum class BasisSet {
  RzSxXCx,     // {Rz, Sx, X, CX}
  RzRyHXCx,    // {Rz, Ry, H, X, CX}
};

namespace detail {

/// Emits exp(-i t/2 P) for P given as (qubit, op) pairs, in time order.
inline void emit_pauli_rotation(std::vector<Gate>& out, const std::vector<int>& qs, const std::string& axis,
                                Angle t) {
  const std::size_t w = qs.size();
  for (std::size_t k = 0; k < w; ++k) {
    if (axis[k] == 'X') out.push_back(gates::h(qs[k]));
    if (axis[k] == 'Y') out.push_back(gates::sx(qs[k]));  // Rx(pi/2) up to phase
  }
  for (std::size_t k = 0; k + 1 < w; ++k) out.push_back(gates::cx(qs[k], qs[k + 1]));
  out.push_back(gates::rz(qs[w - 1], t));
  for (std::size_t k = w - 1; k-- > 0;) out.push_back(gates::cx(qs[k], qs[k + 1]));
  for (std::size_t k = 0; k < w; ++k) {
    if (axis[k] == 'X') out.push_back(gates::h(qs[k]));
    if (axis[k] == 'Y') {
      // Sx^dagger = X Sx exactly
      out.push_back(gates::sx(qs[k]));
      out.push_back(gates::x(qs[k]));
    }
  }
}

/// CX fan-out from a, then a 3-control uniformly controlled Ry (Gray code),
/// then the fan-out again. 14 CX in total.
inline void emit_double_exc(std::vector<Gate>& out, const std::vector<int>& s, Angle t) {
  const int a = s[0];
  const int ctrl[3] = {s[1], s[2], s[3]};
  for (int c : ctrl) out.push_back(gates::cx(a, c));
  // target pattern of (ctrl0, ctrl1, ctrl2) is (1, 0, 1)
  const unsigned jstar = 0b101;
  const Angle phi = t.times(-2.0);
  for (unsigned l = 0; l < 8; ++l) {
    const unsigned gray = l ^ (l >> 1);
    const double sign = (std::popcount(jstar & gray) & 1) ? -1.0 : 1.0;
    out.push_back(gates::ry(a, phi.times(sign / 8.0)));
    const int flip = l == 7 ? 2 : std::countr_zero(l + 1);
    out.push_back(gates::cx(ctrl[flip], a));
  }
  for (int k = 2; k >= 0; --k) out.push_back(gates::cx(a, ctrl[k]));
}

inline void lower_1q(std::vector<Gate>& out, const Gate& g, BasisSet basis) {
  const int q = g.qubits[0];
  const double half_pi = std::numbers::pi / 2;
  if (basis == BasisSet::RzSxXCx) {
    switch (g.kind) {
      case GateKind::Hadamard:
        out.push_back(gates::rz(q, Angle::fixed(half_pi)));
        out.push_back(gates::sx(q));
        out.push_back(gates::rz(q, Angle::fixed(half_pi)));
        return;
      case GateKind::Ry:
        out.push_back(gates::sx(q));
        out.push_back(gates::rz(q, g.angle));
        out.push_back(gates::sx(q));
        out.push_back(gates::x(q));
        return;
      default: out.push_back(g); return;
    }
  }
  if (g.kind == GateKind::Sx) {
    out.push_back(gates::h(q));
    out.push_back(gates::rz(q, Angle::fixed(half_pi)));
    out.push_back(gates::h(q));
    return;
  }
  out.push_back(g);
}

}  // namespace detail

/// Gate sequence (time order) for exp(-i angle/2 P) over the basis-change/CX-ladder/Rz scheme.
inline std::vector<Gate> pauli_rotation_circuit(const PauliString& axis, Angle angle) {
  if (axis.is_identity()) throw ValidationError("Pauli rotation needs a nonempty axis");
  std::vector<Gate> out;
  std::string ops;
  const auto qs = axis.qubits();
  for (int q : qs) ops += axis.op(q);
  detail::emit_pauli_rotation(out, qs, ops, angle);
  return out;
}

/// Gate in high-level form to a time-ordered list over the chosen basis.
inline std::vector<Gate> decompose_gate(const Gate& g, BasisSet basis) {
  std::vector<Gate> mid;
  switch (g.kind) {
    case GateKind::SingleExc: {
      // U = exp(i t/2 X_i Y_a) exp(-i t/2 Y_i X_a)
      detail::emit_pauli_rotation(mid, g.qubits, "XY", g.angle.times(-1.0));
      detail::emit_pauli_rotation(mid, g.qubits, "YX", g.angle);
      break;
    }
    case GateKind::DoubleExc: detail::emit_double_exc(mid, g.qubits, g.angle); break;
    case GateKind::PauliRot: detail::emit_pauli_rotation(mid, g.qubits, g.axis, g.angle); break;
    default: mid.push_back(g); break;
  }
  std::vector<Gate> out;
  for (const auto& m : mid) {
    if (m.qubits.size() == 1)
      detail::lower_1q(out, m, basis);
    else
      out.push_back(m);
  }
  return out;
}

/// Whole-circuit lowering, rescheduled as-soon-as-possible.
inline Circuit decompose(const Circuit& c, BasisSet basis = BasisSet::RzSxXCx) {
  Circuit out(c.n_qubits());
  out.copy_params_from(c);
  for (const auto& layer : c.layers())
    for (const auto& g : layer)
      for (auto& d : decompose_gate(g, basis)) out.push_asap(std::move(d));
  return out;
}

struct ResourceReport {
  std::size_t depth_excitation_level = 0;
  std::size_t depth_basis = 0;
  std::size_t n_two_qubit = 0;
  std::size_t n_total_gates = 0;
  std::size_t n_params = 0;
};

/**
 * Counts on the high-level circuit and on its lowering to {Rz, Sx, X, CX}
 * with all-to-all connectivity. Layers consisting only of X gates (the
 * reference preparation) do not count toward the excitation-level depth.
 */
inline ResourceReport resource_report(const Circuit& c, BasisSet basis = BasisSet::RzSxXCx) {
  ResourceReport r;
  for (const auto& l : c.layers()) {
    const bool only_x =
        std::all_of(l.begin(), l.end(), [](const Gate& g) { return g.kind == GateKind::PauliX; });
    if (!l.empty() && !only_x) ++r.depth_excitation_level;
  }
  const Circuit low = decompose(c, basis);
  r.depth_basis = low.depth();
  r.n_total_gates = low.gate_count();
  for (const auto& l : low.layers())
    for (const auto& g : l)
      if (g.is_two_qubit()) ++r.n_two_qubit;
  r.n_params = c.n_params();
  return r;
}

}  // namespace pgsd
