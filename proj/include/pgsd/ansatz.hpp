/**
 * @file ansatz.hpp
 * @brief HF reference, excitation enumeration and the two ansatz builders.
 */
#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <tuple>
#include <vector>

#include "pgsd/circuit.hpp"
#include "pgsd/hamiltonian.hpp"

namespace pgsd {

/// Spin-orbital (qubit) indices; from/to ascending.
struct Excitation {
  int order = 1;
  std::vector<int> from;
  std::vector<int> to;
  SpinPattern spin = SpinPattern::Alpha;

  std::string label() const {
    std::string s = spin_pattern_name(spin);
    s += ':';
    for (int f : from) s += std::to_string(f) + ',';
    s.back() = '>';
    for (std::size_t k = 0; k < to.size(); ++k) s += (k ? "," : "") + std::to_string(to[k]);
    return s;
  }
};

struct ExcitationCount {
  long long K = 0;
  long long S = 0;
  long long D = 0;
  long long T = 0;
};

inline long long binomial(long long n, long long k) {
  if (k < 0 || n < 0 || k > n) return 0;
  long long r = 1;
  for (long long i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

/// Per-spin generalization of the configuration/excitation counts.
inline ExcitationCount counting_formulas(int occ_a, int vir_a, int occ_b, int vir_b) {
  if (occ_a < 0 || vir_a < 0 || occ_b < 0 || vir_b < 0)
    throw ValidationError("negative orbital count");
  auto c = [](int n, int k) { return binomial(n, k); };
  const long long sa = 1LL * occ_a * vir_a, sb = 1LL * occ_b * vir_b;
  const long long da = c(occ_a, 2) * c(vir_a, 2), db = c(occ_b, 2) * c(vir_b, 2);
  ExcitationCount n;
  n.K = c(occ_a + vir_a, occ_a) * c(occ_b + vir_b, occ_b);
  n.S = sa + sb;
  n.D = da + db + sa * sb;
  n.T = c(occ_a, 3) * c(vir_a, 3) + c(occ_b, 3) * c(vir_b, 3) + da * sb + sa * db;
  return n;
}

/// Closed-shell form: N_occ occupied and N_vir virtual orbitals per spin.
inline ExcitationCount counting_formulas(int occ, int vir) { return counting_formulas(occ, vir, occ, vir); }

inline ExcitationCount counting_formulas(const ActiveSpaceSpec& s) {
  return counting_formulas(s.n_alpha, s.n_spatial - s.n_alpha, s.n_beta, s.n_spatial - s.n_beta);
}

/// Occupation bits of the reference determinant.
inline std::uint64_t hf_reference(const ActiveSpaceSpec& s) {
  if (s.n_alpha < 0 || s.n_beta < 0 || s.n_alpha > s.n_spatial || s.n_beta > s.n_spatial)
    throw ValidationError("more electrons than orbitals in one spin block");
  if (2 * s.n_spatial > 62) throw ValidationError("active space too large for a basis index");
  const std::uint64_t a = (std::uint64_t{1} << s.n_alpha) - 1;
  const std::uint64_t b = (std::uint64_t{1} << s.n_beta) - 1;
  return a | (b << s.n_spatial);
}

/**
 * Singles ordered by (spin, i, a), alpha first; then doubles ordered by the
 * sorted (from, to) qubit key.
 */
inline std::vector<Excitation> enumerate_excitations(const ActiveSpaceSpec& s) {
  const int m = s.n_spatial;
  std::vector<Excitation> singles, doubles;
  for (int spin = 0; spin < 2; ++spin) {
    const int n = s.occupied(spin), off = spin * m;
    for (int i = 0; i < n; ++i)
      for (int a = n; a < m; ++a)
        singles.push_back({1, {i + off}, {a + off}, spin ? SpinPattern::Beta : SpinPattern::Alpha});
  }
  // same spin
  for (int spin = 0; spin < 2; ++spin) {
    const int n = s.occupied(spin), off = spin * m;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        for (int a = n; a < m; ++a)
          for (int b = a + 1; b < m; ++b)
            doubles.push_back({2, {i + off, j + off}, {a + off, b + off},
                               spin ? SpinPattern::BetaBeta : SpinPattern::AlphaAlpha});
  }
  for (int i = 0; i < s.n_alpha; ++i)
    for (int j = 0; j < s.n_beta; ++j)
      for (int a = s.n_alpha; a < m; ++a)
        for (int b = s.n_beta; b < m; ++b)
          doubles.push_back({2, {i, j + m}, {a, b + m}, SpinPattern::AlphaBeta});
  std::sort(doubles.begin(), doubles.end(), [](const Excitation& x, const Excitation& y) {
    return std::tie(x.from, x.to) < std::tie(y.from, y.to);
  });
  singles.insert(singles.end(), doubles.begin(), doubles.end());
  return singles;
}

inline std::string param_name(const Excitation& e) {
  std::string s = e.order == 1 ? "s" : "d";
  for (int f : e.from) s += '_' + std::to_string(f);
  for (int t : e.to) s += '_' + std::to_string(t);
  return s;
}

inline void append_reference_layer(Circuit& c, std::uint64_t hf) {
  std::vector<Gate> xs;
  for (std::uint64_t b = hf; b; b &= b - 1) xs.push_back(gates::x(std::countr_zero(b)));
  if (!xs.empty()) c.append_layer(std::move(xs));
}

/**
 * Reference X layer, then singles packed first-fit into as few layers as
 * possible, then doubles packed the same way after the last singles layer.
 * One parameter per gate.
 */
inline Circuit build_pgsd(const ActiveSpaceSpec& s) {
  Circuit c(s.n_qubits());
  append_reference_layer(c, hf_reference(s));
  const auto ex = enumerate_excitations(s);
  std::size_t section = c.depth();
  bool in_doubles = false;
  for (const auto& e : ex) {
    if (e.order == 2 && !in_doubles) {
      section = c.depth();
      in_doubles = true;
    }
    const int k = c.add_param(param_name(e));
    if (e.order == 1)
      c.push_first_fit(gates::single_exc(e.from[0], e.to[0], Angle::of(k)), section);
    else
      c.push_first_fit(gates::double_exc(e.from[0], e.from[1], e.to[0], e.to[1], Angle::of(k)), section);
  }
  return c;
}

struct UccsdConfig {
  int trotter_steps = 1;
};

/// JW image of T - T^dagger for one excitation; purely imaginary coefficients.
inline PauliSum excitation_generator(const Excitation& e, int n_qubits) {
  PauliSum t = PauliSum::constant(n_qubits, 1.0);
  // T = a+_a (a+_b) (a_j) a_i
  for (int q : e.to) t = t * jw::creation(q, n_qubits);
  for (auto it = e.from.rbegin(); it != e.from.rend(); ++it) t = t * jw::annihilation(*it, n_qubits);
  PauliSum g = t - t.adjoint();
  return g.simplify(1e-12);
}

/**
 * Single-step Trotterized exp(sum_k theta_k (T_k - T_k^dagger)). The strings
 * of one excitation commute, so each becomes one Pauli rotation whose angle
 * is -2 c theta_k for the coefficient i*c.
 */
inline Circuit build_uccsd(const ActiveSpaceSpec& s, const UccsdConfig& cfg = {}) {
  if (cfg.trotter_steps != 1) throw ValidationError("only a single Trotter step is supported");
  Circuit c(s.n_qubits());
  append_reference_layer(c, hf_reference(s));
  for (const auto& e : enumerate_excitations(s)) {
    const int k = c.add_param(param_name(e));
    const PauliSum g = excitation_generator(e, s.n_qubits());
    for (const auto& [p, coeff] : g.terms()) {
      if (std::abs(coeff.real()) > 1e-12) throw ValidationError("excitation generator is not anti-Hermitian");
      c.push_asap(gates::pauli_rot(p, Angle::of(k, -2.0 * coeff.imag())));
    }
  }
  return c;
}

}  // namespace pgsd
