/**
 * @file hamiltonian.hpp
 * @brief Active-space reduction and the Jordan-Wigner qubit Hamiltonian.
 *
 * Qubit layout: qubits 0..M-1 are the alpha spin orbitals of the active
 * space in ascending order, M..2M-1 the beta ones. All contractions use
 * chemists' notation (pq|rs).
 */
#pragma once

#include <algorithm>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "pgsd/error.hpp"
#include "pgsd/fcidump.hpp"
#include "pgsd/pauli.hpp"

namespace pgsd {

enum class SpinPattern { Alpha, Beta, AlphaAlpha, BetaBeta, AlphaBeta };

inline const char* spin_pattern_name(SpinPattern s) noexcept {
  switch (s) {
    case SpinPattern::Alpha: return "a";
    case SpinPattern::Beta: return "b";
    case SpinPattern::AlphaAlpha: return "aa";
    case SpinPattern::BetaBeta: return "bb";
    case SpinPattern::AlphaBeta: return "ab";
  }
  return "?";
}

struct ActiveSpaceSpec {
  int n_spatial = 0;  // M
  int n_alpha = 0;
  int n_beta = 0;
  std::vector<int> active_orbitals;  // indices into the parent integrals, ascending
  std::vector<int> core_orbitals;    // doubly occupied, folded into the core energy

  int n_qubits() const noexcept { return 2 * n_spatial; }
  int n_electrons() const noexcept { return n_alpha + n_beta; }
  int occupied(int spin) const noexcept { return spin == 0 ? n_alpha : n_beta; }
  int virtual_count(int spin) const noexcept { return n_spatial - occupied(spin); }
  int qubit(int orbital, int spin) const noexcept { return orbital + spin * n_spatial; }

  void validate() const {
    if (n_spatial < 0) throw ValidationError("negative active orbital count");
    if (n_alpha < 0 || n_beta < 0) throw ValidationError("negative electron count");
    if (n_alpha > n_spatial || n_beta > n_spatial)
      throw ValidationError("more active electrons of one spin than active orbitals");
    if (static_cast<int>(active_orbitals.size()) != n_spatial)
      throw ValidationError("active orbital list does not have M entries");
    std::set<int> seen;
    for (int o : active_orbitals)
      if (!seen.insert(o).second) throw ValidationError("active orbital listed twice");
    for (int o : core_orbitals)
      if (!seen.insert(o).second) throw ValidationError("core and active orbital sets overlap");
  }

  /// A bare model space: active orbitals 0..M-1, no core.
  static ActiveSpaceSpec model(int m, int n_alpha, int n_beta) {
    ActiveSpaceSpec s;
    s.n_spatial = m;
    s.n_alpha = n_alpha;
    s.n_beta = n_beta;
    s.active_orbitals.resize(static_cast<std::size_t>(std::max(m, 0)));
    std::iota(s.active_orbitals.begin(), s.active_orbitals.end(), 0);
    s.validate();
    return s;
  }

  /**
   * Active space over the given orbitals of an aufbau-ordered reference
   * (alpha occupies 0..n_alpha-1, beta 0..n_beta-1). Every occupied orbital
   * outside the list becomes core and must be doubly occupied.
   */
  static ActiveSpaceSpec from_orbitals(const FcidumpData& data, std::vector<int> active) {
    std::sort(active.begin(), active.end());
    ActiveSpaceSpec s;
    s.n_spatial = static_cast<int>(active.size());
    s.active_orbitals = active;
    const int na = data.n_alpha();
    const int nb = data.n_beta();
    for (int o : active)
      if (o < 0 || o >= data.norb()) throw ValidationError("active orbital outside [0, norb)");
    for (int o = 0; o < na; ++o) {
      if (std::binary_search(active.begin(), active.end(), o)) continue;
      if (o >= nb)
        throw ValidationError("singly occupied orbital " + std::to_string(o) + " must be active");
      s.core_orbitals.push_back(o);
    }
    const int ncore = static_cast<int>(s.core_orbitals.size());
    s.n_alpha = na - ncore;
    s.n_beta = nb - ncore;
    s.validate();
    return s;
  }

  /// The whole orbital space as active (no core).
  static ActiveSpaceSpec full(const FcidumpData& data) {
    std::vector<int> all(static_cast<std::size_t>(data.norb()));
    std::iota(all.begin(), all.end(), 0);
    return from_orbitals(data, all);
  }
};

/// Integrals over the active orbitals with the core folded in.
struct ActiveHamiltonian {
  int n_orb = 0;
  double e_core = 0.0;
  std::vector<double> h;  // n_orb^2, row-major
  std::vector<double> g;  // n_orb^4, (pq|rs) at ((p*n+q)*n+r)*n+s

  explicit ActiveHamiltonian(int n = 0)
      : n_orb(n),
        h(static_cast<std::size_t>(n) * n, 0.0),
        g(static_cast<std::size_t>(n) * n * n * n, 0.0) {}

  double& h1(int p, int q) { return h[static_cast<std::size_t>(p) * n_orb + q]; }
  double h1(int p, int q) const { return h[static_cast<std::size_t>(p) * n_orb + q]; }
  double& g2(int p, int q, int r, int s) { return g[index(p, q, r, s)]; }
  double g2(int p, int q, int r, int s) const { return g[index(p, q, r, s)]; }

 private:
  std::size_t index(int p, int q, int r, int s) const noexcept {
    const std::size_t n = static_cast<std::size_t>(n_orb);
    return ((static_cast<std::size_t>(p) * n + q) * n + r) * n + s;
  }
};

/// Folds the doubly occupied core into an effective one-body operator.
inline ActiveHamiltonian fold_core(const FcidumpData& data, const ActiveSpaceSpec& spec) {
  spec.validate();
  for (int o : spec.active_orbitals)
    if (o < 0 || o >= data.norb()) throw ValidationError("active orbital outside [0, norb)");
  for (int o : spec.core_orbitals)
    if (o < 0 || o >= data.norb()) throw ValidationError("core orbital outside [0, norb)");

  const auto& core = spec.core_orbitals;
  const auto& act = spec.active_orbitals;
  const int m = spec.n_spatial;
  ActiveHamiltonian out(m);

  double e = data.e_core();
  for (int i : core) {
    e += 2.0 * data.h1(i, i);
    for (int j : core) e += 2.0 * data.g2(i, i, j, j) - data.g2(i, j, j, i);
  }
  out.e_core = e;

  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      const int p = act[a], q = act[b];
      double v = data.h1(p, q);
      for (int i : core) v += 2.0 * data.g2(p, q, i, i) - data.g2(p, i, i, q);
      out.h1(a, b) = v;
    }
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      for (int c = 0; c < m; ++c)
        for (int d = 0; d < m; ++d) out.g2(a, b, c, d) = data.g2(act[a], act[b], act[c], act[d]);
  return out;
}

/**
 * JW image of  sum h_pq a+_p a_q + 1/2 sum (pq|rs) a+_p a+_r a_s a_q + e_core,
 * spin-summed, on 2M qubits. The two-body product is assembled as
 * E_PQ E_RS - delta_QR E_PS with E_PQ = a+_P a_Q.
 */
inline PauliSum jw_map_hamiltonian(const ActiveHamiltonian& ham, const ActiveSpaceSpec& spec) {
  if (ham.n_orb != spec.n_spatial)
    throw ValidationError("Hamiltonian orbital count does not match active space");
  const int m = spec.n_spatial;
  const int nq = 2 * m;

  std::vector<PauliSum> cre, ann;
  for (int k = 0; k < nq; ++k) {
    cre.push_back(jw::creation(k, nq));
    ann.push_back(jw::annihilation(k, nq));
  }
  std::vector<PauliSum> e_op(static_cast<std::size_t>(nq) * nq);
  for (int p = 0; p < nq; ++p)
    for (int q = 0; q < nq; ++q) e_op[static_cast<std::size_t>(p) * nq + q] = cre[p] * ann[q];
  auto E = [&](int p, int q) -> const PauliSum& { return e_op[static_cast<std::size_t>(p) * nq + q]; };

  PauliSum h = PauliSum::constant(nq, ham.e_core);
  for (int s = 0; s < 2; ++s)
    for (int p = 0; p < m; ++p)
      for (int q = 0; q < m; ++q) {
        const double v = ham.h1(p, q);
        if (v != 0.0) h += E(p + s * m, q + s * m) * cplx{v, 0.0};
      }

  for (int sig = 0; sig < 2; ++sig)
    for (int p = 0; p < m; ++p)
      for (int q = 0; q < m; ++q) {
        const int P = p + sig * m, Q = q + sig * m;
        PauliSum inner(nq);
        for (int tau = 0; tau < 2; ++tau)
          for (int r = 0; r < m; ++r)
            for (int s = 0; s < m; ++s) {
              const double v = 0.5 * ham.g2(p, q, r, s);
              if (v == 0.0) continue;
              const int R = r + tau * m, S = s + tau * m;
              inner += E(R, S) * cplx{v, 0.0};
              if (Q == R) h -= E(P, S) * cplx{v, 0.0};
            }
        if (!inner.empty()) h += E(P, Q) * inner;
      }
  h.simplify();
  h.make_real(1e-10);
  return h;
}

/// Sum of (I - Z_k)/2 over one spin block.
inline PauliSum spin_number_operator(int m, int spin) {
  PauliSum n(2 * m);
  for (int k = 0; k < m; ++k) n += jw::number(k + spin * m, 2 * m);
  return n.simplify();
}

}  // namespace pgsd
