/**
 * @file simulator.hpp
 * @brief Exact statevector evolution, energies and adjoint gradients.
 */
#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "pgsd/circuit.hpp"
#include "pgsd/pauli.hpp"
#include "pgsd/statevector.hpp"

namespace pgsd {

namespace detail {

inline void apply_1q_matrix(Statevector& v, int q, const Matrix& m) {
  const std::uint64_t b = std::uint64_t{1} << q;
  const cplx m00 = m(0, 0), m01 = m(0, 1), m10 = m(1, 0), m11 = m(1, 1);
  for (std::uint64_t i = 0; i < v.dim(); ++i) {
    if (i & b) continue;
    const cplx a0 = v.amps[i], a1 = v.amps[i | b];
    v.amps[i] = m00 * a0 + m01 * a1;
    v.amps[i | b] = m10 * a0 + m11 * a1;
  }
}

/// exp(-i t/2 P) in place.
inline void apply_pauli_rotation(Statevector& v, const PauliString& p, double t) {
  const double c = std::cos(t / 2), s = std::sin(t / 2);
  const cplx base = i_pow(std::popcount(p.x & p.z));
  const cplx mis{0.0, -s};
  if (p.x == 0) {
    for (std::uint64_t i = 0; i < v.dim(); ++i) {
      const double sign = (std::popcount(i & p.z) & 1) ? -1.0 : 1.0;
      v.amps[i] *= c + mis * base * sign;
    }
    return;
  }
  const std::uint64_t pivot = std::uint64_t{1} << std::countr_zero(p.x);
  for (std::uint64_t i = 0; i < v.dim(); ++i) {
    if (i & pivot) continue;
    const std::uint64_t j = i ^ p.x;
    const cplx pi = base * ((std::popcount(i & p.z) & 1) ? -1.0 : 1.0);  // P|i> = pi |j>
    const cplx pj = base * ((std::popcount(j & p.z) & 1) ? -1.0 : 1.0);
    const cplx ai = v.amps[i], aj = v.amps[j];
    v.amps[i] = c * ai + mis * pj * aj;
    v.amps[j] = c * aj + mis * pi * ai;
  }
}

inline PauliString axis_string(const Gate& g, int n) {
  PauliString p(n, 0, 0);
  for (std::size_t k = 0; k < g.qubits.size(); ++k) p.set(g.qubits[k], g.axis[k]);
  return p;
}

/// Rotation in the plane (lo, hi): lo' = c lo + s hi, hi' = -s lo + c hi.
inline void apply_plane_rotation(Statevector& v, std::uint64_t need, std::uint64_t mask, std::uint64_t flip,
                                 double t) {
  const double c = std::cos(t), s = std::sin(t);
  for (std::uint64_t i = 0; i < v.dim(); ++i) {
    if ((i & mask) != need) continue;
    const std::uint64_t j = i ^ flip;
    const cplx lo = v.amps[i], hi = v.amps[j];
    v.amps[i] = c * lo + s * hi;
    v.amps[j] = -s * lo + c * hi;
  }
}

}  // namespace detail

/// Applies one gate at the given (already resolved) angle.
inline void apply_gate(Statevector& v, const Gate& g, double angle) {
  const auto bit = [&](std::size_t k) { return std::uint64_t{1} << g.qubits[k]; };
  switch (g.kind) {
    case GateKind::PauliX: {
      const std::uint64_t b = bit(0);
      for (std::uint64_t i = 0; i < v.dim(); ++i)
        if (!(i & b)) std::swap(v.amps[i], v.amps[i | b]);
      return;
    }
    case GateKind::Cx: {
      const std::uint64_t c = bit(0), t = bit(1);
      for (std::uint64_t i = 0; i < v.dim(); ++i)
        if ((i & c) && !(i & t)) std::swap(v.amps[i], v.amps[i | t]);
      return;
    }
    case GateKind::Rz: {
      const std::uint64_t b = bit(0);
      const cplx p0 = std::polar(1.0, -angle / 2), p1 = std::polar(1.0, angle / 2);
      for (std::uint64_t i = 0; i < v.dim(); ++i) v.amps[i] *= (i & b) ? p1 : p0;
      return;
    }
    case GateKind::Ry:
    case GateKind::Sx:
    case GateKind::Hadamard: detail::apply_1q_matrix(v, g.qubits[0], gate_matrix(g, angle)); return;
    case GateKind::SingleExc: {
      // |01> (i occupied) is the "lo" member of the plane, |10> the "hi" one
      const std::uint64_t i = bit(0), a = bit(1);
      detail::apply_plane_rotation(v, i, i | a, i | a, angle);
      return;
    }
    case GateKind::DoubleExc: {
      // support (a, i, b, j): reference |1010> = {i, j}, excited |0101> = {a, b}
      const std::uint64_t a = bit(0), i = bit(1), b = bit(2), j = bit(3);
      const std::uint64_t all = a | i | b | j;
      detail::apply_plane_rotation(v, i | j, all, all, angle);
      return;
    }
    case GateKind::PauliRot: detail::apply_pauli_rotation(v, detail::axis_string(g, v.n_qubits), angle); return;
  }
}

/// Applies the inverse of a gate.
inline void apply_gate_inverse(Statevector& v, const Gate& g, double angle) {
  switch (g.kind) {
    case GateKind::Sx: detail::apply_1q_matrix(v, g.qubits[0], gate_matrix(g, 0.0).adjoint()); return;
    case GateKind::PauliX:
    case GateKind::Cx:
    case GateKind::Hadamard: apply_gate(v, g, angle); return;
    default: apply_gate(v, g, -angle); return;
  }
}

/**
 * K with dU/dt = K U for a parametric gate, applied to v (new vector).
 * Excitation gates use the real plane generator; rotations use -i/2 P.
 */
inline Statevector apply_generator(const Statevector& v, const Gate& g) {
  Statevector out(v.n_qubits);
  out.amps.assign(v.dim(), cplx{0.0, 0.0});
  const auto bit = [&](std::size_t k) { return std::uint64_t{1} << g.qubits[k]; };
  const cplx mhalf_i{0.0, -0.5};
  switch (g.kind) {
    case GateKind::SingleExc: {
      // K|01> = -|10>, K|10> = |01>
      const std::uint64_t i = bit(0), a = bit(1), m = i | a;
      for (std::uint64_t k = 0; k < v.dim(); ++k) {
        if ((k & m) == i) out.amps[k ^ m] = -v.amps[k];
        else if ((k & m) == a) out.amps[k ^ m] = v.amps[k];
      }
      return out;
    }
    case GateKind::DoubleExc: {
      // local K|1010> = -|0101>, K|0101> = |1010>
      const std::uint64_t a = bit(0), i = bit(1), b = bit(2), j = bit(3), m = a | i | b | j;
      for (std::uint64_t k = 0; k < v.dim(); ++k) {
        if ((k & m) == (i | j)) out.amps[k ^ m] = -v.amps[k];
        else if ((k & m) == (a | b)) out.amps[k ^ m] = v.amps[k];
      }
      return out;
    }
    case GateKind::Rz: {
      const std::uint64_t b = bit(0);
      for (std::uint64_t k = 0; k < v.dim(); ++k) out.amps[k] = mhalf_i * ((k & b) ? -v.amps[k] : v.amps[k]);
      return out;
    }
    case GateKind::Ry: {
      out = v;
      apply_pauli(out, PauliString::single(v.n_qubits, g.qubits[0], 'Y'));
      for (auto& x : out.amps) x *= mhalf_i;
      return out;
    }
    case GateKind::PauliRot: {
      out = v;
      apply_pauli(out, detail::axis_string(g, v.n_qubits));
      for (auto& x : out.amps) x *= mhalf_i;
      return out;
    }
    default: throw ValidationError(std::string("gate has no generator: ") + gate_name(g.kind));
  }
}

inline void check_params(const Circuit& c, const std::vector<double>& params) {
  if (params.size() != c.n_params())
    throw ValidationError("parameter vector has " + std::to_string(params.size()) + " entries, circuit needs " +
                          std::to_string(c.n_params()));
}

inline void evolve_in_place(Statevector& v, const Circuit& c, const std::vector<double>& params) {
  check_params(c, params);
  if (v.n_qubits != c.n_qubits()) throw ValidationError("statevector/circuit qubit mismatch");
  for (const auto& layer : c.layers())
    for (const auto& g : layer) apply_gate(v, g, g.angle.value(params));
}

inline Statevector evolve(const Circuit& c, const std::vector<double>& params, std::uint64_t initial = 0) {
  Statevector v(c.n_qubits(), initial);
  evolve_in_place(v, c, params);
  return v;
}

inline Statevector evolve(const Circuit& c) { return evolve(c, c.param_values()); }

/// Dense circuit unitary, column k = U|k>. Test-scale circuits only.
inline Matrix circuit_unitary(const Circuit& c, const std::vector<double>& params) {
  if (c.n_qubits() > 12) throw ValidationError("circuit_unitary limited to 12 qubits");
  const std::size_t dim = std::size_t{1} << c.n_qubits();
  Matrix u(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (std::size_t k = 0; k < dim; ++k) {
    const Statevector v = evolve(c, params, k);
    for (std::size_t r = 0; r < dim; ++r) u(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k)) = v.amps[r];
  }
  return u;
}

/// <v|H|v>; the imaginary residue must vanish.
inline double expectation(const Statevector& v, const PauliSum& h) {
  if (!h.is_hermitian()) throw ValidationError("expectation of a non-Hermitian operator");
  const cplx e = inner(v, pauli_matvec(h, v));
  if (std::abs(e.imag()) > 1e-10 * std::max(1.0, std::abs(e.real())))
    throw NumericalError("expectation has an imaginary part");
  return e.real();
}

inline double expectation(const Statevector& v, const XBlockOperator& h) {
  const cplx e = inner(v, h.apply(v));
  if (std::abs(e.imag()) > 1e-10 * std::max(1.0, std::abs(e.real())))
    throw NumericalError("expectation has an imaginary part");
  return e.real();
}

/// Energy and its gradient by one forward and one reverse sweep.
inline double energy_and_gradient(const Circuit& c, const std::vector<double>& params, const XBlockOperator& h,
                                  std::vector<double>& grad) {
  Statevector phi = evolve(c, params);
  Statevector lambda = h.apply(phi);
  const double e = inner(phi, lambda).real();
  grad.assign(params.size(), 0.0);
  const auto& layers = c.layers();
  for (auto l = layers.rbegin(); l != layers.rend(); ++l)
    for (auto g = l->rbegin(); g != l->rend(); ++g) {
      const double angle = g->angle.value(params);
      if (g->angle.param >= 0 && g->angle.scale != 0.0) {
        const Statevector mu = apply_generator(phi, *g);
        grad[static_cast<std::size_t>(g->angle.param)] += 2.0 * g->angle.scale * inner(lambda, mu).real();
      }
      apply_gate_inverse(phi, *g, angle);
      apply_gate_inverse(lambda, *g, angle);
    }
  return e;
}

inline std::vector<double> gradient(const Circuit& c, const std::vector<double>& params, const XBlockOperator& h) {
  std::vector<double> g;
  energy_and_gradient(c, params, h, g);
  return g;
}

inline std::vector<double> gradient(const Circuit& c, const std::vector<double>& params, const PauliSum& h) {
  if (!h.is_hermitian()) throw ValidationError("gradient of a non-Hermitian operator");
  return gradient(c, params, XBlockOperator(h));
}

/// Probability mass outside the (n_alpha, n_beta) sector of a 2M-qubit state.
inline double out_of_sector_probability(const Statevector& v, int m, int n_alpha, int n_beta) {
  const std::uint64_t amask = (std::uint64_t{1} << m) - 1;
  double p = 0.0;
  for (std::uint64_t i = 0; i < v.dim(); ++i)
    if (std::popcount(i & amask) != n_alpha || std::popcount(i >> m) != n_beta) p += std::norm(v.amps[i]);
  return p;
}

}  // namespace pgsd
