/**
 * @file casci.hpp
 * @brief Determinant CI in an active space, CI amplitudes, the correlation
 *        factor and active-space ranking.
 *
 * Determinants are pairs of alpha/beta occupation strings. Phases follow
 * the ordering a+_{p1} a+_{p2} ... |0> with orbitals ascending and the whole
 * alpha block before the beta block, the same ordering the Jordan-Wigner
 * qubit layout uses, so a CI vector and the matching statevector agree
 * element by element (basis index = alpha | beta << M).
 *
 * The Hamiltonian is applied in the spin-summed form
 *   H = sum k_pq E_pq + 1/2 sum (pq|rs) E_pq E_rs,  k_pq = h_pq - 1/2 sum_r (pr|rq)
 * with E = E^a + E^b, so only single replacements on each string are needed.
 */
#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "pgsd/error.hpp"
#include "pgsd/fcidump.hpp"
#include "pgsd/hamiltonian.hpp"

namespace pgsd {

struct Determinant {
  std::uint64_t alpha = 0;
  std::uint64_t beta = 0;

  std::uint64_t basis_index(int m) const noexcept { return alpha | (beta << m); }
  friend bool operator==(const Determinant&, const Determinant&) = default;
  friend auto operator<=>(const Determinant&, const Determinant&) = default;
};

/// (-1)^(number of set bits strictly below position p).
inline double parity_below(std::uint64_t s, int p) noexcept {
  return (std::popcount(s & ((std::uint64_t{1} << p) - 1)) & 1) ? -1.0 : 1.0;
}

/// All occupation strings of n electrons in m orbitals with their single replacements.
class StringSpace {
 public:
  struct Single {
    int target;  // index of E_pq |source>
    int p, q;
    double sign;
  };

  StringSpace(int m, int n) : m_(m), n_(n) {
    if (m < 0 || m > 24 || n < 0 || n > m) throw ValidationError("string space out of range");
    index_.assign(std::size_t{1} << m, -1);
    for (std::uint64_t s = 0; s < (std::uint64_t{1} << m); ++s)
      if (std::popcount(s) == n) {
        index_[s] = static_cast<int>(strings_.size());
        strings_.push_back(s);
      }
    singles_.resize(strings_.size());
    for (std::size_t k = 0; k < strings_.size(); ++k) {
      const std::uint64_t s = strings_[k];
      for (int q = 0; q < m; ++q) {
        if (!((s >> q) & 1u)) continue;
        const std::uint64_t t = s ^ (std::uint64_t{1} << q);
        const double sq = parity_below(s, q);
        for (int p = 0; p < m; ++p) {
          if ((t >> p) & 1u) continue;
          const std::uint64_t u = t | (std::uint64_t{1} << p);
          singles_[k].push_back({index_[u], p, q, sq * parity_below(t, p)});
        }
      }
    }
  }

  int n_orbitals() const noexcept { return m_; }
  int n_electrons() const noexcept { return n_; }
  std::size_t size() const noexcept { return strings_.size(); }
  std::uint64_t string(std::size_t k) const { return strings_[k]; }
  int index(std::uint64_t s) const { return s < index_.size() ? index_[s] : -1; }
  const std::vector<Single>& singles(std::size_t k) const { return singles_[k]; }

 private:
  int m_, n_;
  std::vector<std::uint64_t> strings_;
  std::vector<int> index_;
  std::vector<std::vector<Single>> singles_;
};

/// The CI Hamiltonian over all determinants of an active space; index = ia * n_beta_strings + ib.
class CiHamiltonian {
 public:
  CiHamiltonian(const ActiveHamiltonian& h, int n_alpha, int n_beta)
      : h_(h), alpha_(h.n_orb, n_alpha), beta_(h.n_orb, n_beta) {
    const int m = h.n_orb;
    k_.assign(static_cast<std::size_t>(m) * m, 0.0);
    for (int p = 0; p < m; ++p)
      for (int q = 0; q < m; ++q) {
        double v = h.h1(p, q);
        for (int r = 0; r < m; ++r) v -= 0.5 * h.g2(p, r, r, q);
        k_[static_cast<std::size_t>(p) * m + q] = v;
      }
    ha_ = same_spin(alpha_);
    hb_ = same_spin(beta_);
    diag_.resize(dim());
    for (std::size_t ia = 0; ia < alpha_.size(); ++ia)
      for (std::size_t ib = 0; ib < beta_.size(); ++ib) {
        double d = ha_(static_cast<Eigen::Index>(ia), static_cast<Eigen::Index>(ia)) +
                   hb_(static_cast<Eigen::Index>(ib), static_cast<Eigen::Index>(ib)) + h.e_core;
        for (std::uint64_t a = alpha_.string(ia); a; a &= a - 1)
          for (std::uint64_t b = beta_.string(ib); b; b &= b - 1) {
            const int p = std::countr_zero(a), r = std::countr_zero(b);
            d += h.g2(p, p, r, r);
          }
        diag_[ia * beta_.size() + ib] = d;
      }
  }

  std::size_t dim() const noexcept { return alpha_.size() * beta_.size(); }
  const StringSpace& alpha() const noexcept { return alpha_; }
  const StringSpace& beta() const noexcept { return beta_; }
  const std::vector<double>& diagonal() const noexcept { return diag_; }

  Determinant determinant(std::size_t idx) const {
    return {alpha_.string(idx / beta_.size()), beta_.string(idx % beta_.size())};
  }
  std::optional<std::size_t> index_of(const Determinant& d) const {
    const int ia = alpha_.index(d.alpha), ib = beta_.index(d.beta);
    if (ia < 0 || ib < 0) return std::nullopt;
    return static_cast<std::size_t>(ia) * beta_.size() + static_cast<std::size_t>(ib);
  }

  /// sigma = H c.
  void apply(const Eigen::VectorXd& c, Eigen::VectorXd& sigma) const {
    const std::size_t na = alpha_.size(), nb = beta_.size();
    const auto cm = Eigen::Map<const Eigen::MatrixXd>(c.data(), static_cast<Eigen::Index>(nb),
                                                      static_cast<Eigen::Index>(na));
    sigma.resize(c.size());
    auto sm = Eigen::Map<Eigen::MatrixXd>(sigma.data(), static_cast<Eigen::Index>(nb), static_cast<Eigen::Index>(na));
    // columns are alpha strings, rows beta strings
    sm.noalias() = cm * ha_.transpose();
    sm.noalias() += hb_ * cm;
    sm.array() += h_.e_core * cm.array();
    const int m = h_.n_orb;
    for (std::size_t ja = 0; ja < na; ++ja)
      for (const auto& ea : alpha_.singles(ja)) {
        const double* g = &h_.g[(static_cast<std::size_t>(ea.p) * m + ea.q) * m * m];
        for (std::size_t jb = 0; jb < nb; ++jb) {
          const double cj = ea.sign * cm(static_cast<Eigen::Index>(jb), static_cast<Eigen::Index>(ja));
          if (cj == 0.0) continue;
          for (const auto& eb : beta_.singles(jb))
            sm(eb.target, ea.target) += eb.sign * g[eb.p * m + eb.q] * cj;
        }
      }
  }

  Eigen::MatrixXd dense() const {
    const std::size_t n = dim();
    if (n > 5000) throw ValidationError("dense CI matrix too large");
    Eigen::MatrixXd h(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    Eigen::VectorXd e = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n)), col;
    for (std::size_t k = 0; k < n; ++k) {
      e.setZero();
      e(static_cast<Eigen::Index>(k)) = 1.0;
      apply(e, col);
      h.col(static_cast<Eigen::Index>(k)) = col;
    }
    return h;
  }

 private:
  Eigen::MatrixXd same_spin(const StringSpace& s) const {
    const int m = h_.n_orb;
    const auto n = static_cast<Eigen::Index>(s.size());
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t j = 0; j < s.size(); ++j)
      for (const auto& e1 : s.singles(j)) {
        out(e1.target, static_cast<Eigen::Index>(j)) += e1.sign * k_[static_cast<std::size_t>(e1.p) * m + e1.q];
        for (const auto& e2 : s.singles(static_cast<std::size_t>(e1.target)))
          out(e2.target, static_cast<Eigen::Index>(j)) += 0.5 * e1.sign * e2.sign * h_.g2(e2.p, e2.q, e1.p, e1.q);
      }
    return out;
  }

  ActiveHamiltonian h_;
  StringSpace alpha_, beta_;
  std::vector<double> k_;
  Eigen::MatrixXd ha_, hb_;
  std::vector<double> diag_;
};

struct CiResult {
  double energy = 0.0;
  int n_orb = 0, n_alpha = 0, n_beta = 0;
  std::vector<Determinant> dets;
  std::vector<double> coeffs;
  std::size_t iterations = 0;
  double residual = 0.0;

  Determinant hf() const {
    return {(std::uint64_t{1} << n_alpha) - 1, (std::uint64_t{1} << n_beta) - 1};
  }
  double coefficient(const Determinant& d) const {
    auto it = std::lower_bound(dets.begin(), dets.end(), d);
    return it != dets.end() && *it == d ? coeffs[static_cast<std::size_t>(it - dets.begin())] : 0.0;
  }
};

struct CiOptions {
  std::size_t dense_limit = 2000;
  double residual_tol = 1e-9;
  std::size_t max_iter = 500;
  std::size_t max_subspace = 40;
};

namespace detail {

inline double davidson(const CiHamiltonian& h, Eigen::VectorXd& x, const CiOptions& opt, std::size_t& iters,
                       double& residual) {
  const auto n = static_cast<Eigen::Index>(h.dim());
  const auto& d = h.diagonal();
  Eigen::MatrixXd v(n, 0), hv(n, 0);
  auto add = [&](Eigen::VectorXd t) {
    for (int pass = 0; pass < 2; ++pass)
      for (Eigen::Index k = 0; k < v.cols(); ++k) t -= v.col(k).dot(t) * v.col(k);
    const double nt = t.norm();
    if (nt < 1e-12) return false;
    t /= nt;
    Eigen::VectorXd ht;
    h.apply(t, ht);
    v.conservativeResize(n, v.cols() + 1);
    hv.conservativeResize(n, hv.cols() + 1);
    v.col(v.cols() - 1) = t;
    hv.col(hv.cols() - 1) = ht;
    return true;
  };
  add(x);
  double theta = 0.0;
  for (iters = 1; iters <= opt.max_iter; ++iters) {
    const Eigen::MatrixXd s = v.transpose() * hv;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (s + s.transpose()));
    theta = es.eigenvalues()(0);
    const Eigen::VectorXd y = es.eigenvectors().col(0);
    x = v * y;
    Eigen::VectorXd r = hv * y - theta * x;
    residual = r.norm();
    if (residual < opt.residual_tol) return theta;
    for (Eigen::Index i = 0; i < n; ++i) {
      double den = d[static_cast<std::size_t>(i)] - theta;
      if (std::abs(den) < 1e-8) den = den < 0 ? -1e-8 : 1e-8;
      r(i) /= den;
    }
    if (static_cast<std::size_t>(v.cols()) >= opt.max_subspace) {
      // restart from the current Ritz vector
      v.resize(n, 0);
      hv.resize(n, 0);
      add(x);
    }
    if (!add(r)) {
      // preconditioned residual already in the span: fall back to the raw residual
      Eigen::VectorXd raw = hv * y - theta * x;
      if (!add(raw)) return theta;
    }
  }
  throw NumericalError("CI eigensolver did not converge, residual " + std::to_string(residual));
}

}  // namespace detail

/// Lowest eigenpair of the active-space Hamiltonian; HF coefficient made non-negative.
inline CiResult ci_ground_state(const ActiveHamiltonian& ham, int n_alpha, int n_beta, const CiOptions& opt = {}) {
  if (n_alpha < 0 || n_beta < 0 || n_alpha > ham.n_orb || n_beta > ham.n_orb)
    throw ValidationError("CI electron counts do not fit the orbitals");
  CiHamiltonian h(ham, n_alpha, n_beta);
  const std::size_t n = h.dim();
  if (n > 200000) throw ValidationError("CI space too large");
  CiResult res;
  res.n_orb = ham.n_orb;
  res.n_alpha = n_alpha;
  res.n_beta = n_beta;
  Eigen::VectorXd x;
  if (n <= opt.dense_limit) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h.dense());
    if (es.info() != Eigen::Success) throw NumericalError("dense CI diagonalization failed");
    res.energy = es.eigenvalues()(0);
    x = es.eigenvectors().col(0);
  } else {
    const auto& d = h.diagonal();
    const auto lo = std::min_element(d.begin(), d.end()) - d.begin();
    x = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    x(lo) = 1.0;
    res.energy = detail::davidson(h, x, opt, res.iterations, res.residual);
  }
  x.normalize();
  // sort determinants so lookups can bisect
  std::vector<std::pair<Determinant, double>> rows(n);
  for (std::size_t k = 0; k < n; ++k) rows[k] = {h.determinant(k), x(static_cast<Eigen::Index>(k))};
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  for (auto& [det, c] : rows) {
    res.dets.push_back(det);
    res.coeffs.push_back(c);
  }
  if (res.coefficient(res.hf()) < 0)
    for (auto& c : res.coeffs) c = -c;
  return res;
}

inline CiResult ci_ground_state(const ActiveHamiltonian& ham, const ActiveSpaceSpec& spec, const CiOptions& opt = {}) {
  return ci_ground_state(ham, spec.n_alpha, spec.n_beta, opt);
}

/// Diagonal Slater-Condon element of one determinant.
inline double determinant_energy(const ActiveHamiltonian& h, const Determinant& d) {
  std::vector<std::pair<int, int>> occ;  // (orbital, spin)
  for (std::uint64_t a = d.alpha; a; a &= a - 1) occ.emplace_back(std::countr_zero(a), 0);
  for (std::uint64_t b = d.beta; b; b &= b - 1) occ.emplace_back(std::countr_zero(b), 1);
  double e = h.e_core;
  for (const auto& [p, sp] : occ) {
    e += h.h1(p, p);
    for (const auto& [q, sq] : occ) {
      e += 0.5 * h.g2(p, p, q, q);
      if (sp == sq) e -= 0.5 * h.g2(p, q, q, p);
    }
  }
  return e;
}

/// Reference determinant energy of the full orbital space.
inline double hf_energy(const FcidumpData& data) {
  const auto spec = ActiveSpaceSpec::full(data);
  const auto h = fold_core(data, spec);
  return determinant_energy(h, {(std::uint64_t{1} << data.n_alpha()) - 1, (std::uint64_t{1} << data.n_beta()) - 1});
}

// ---------------------------------------------------------------------------
// Amplitudes

enum class AmplitudeSource { InternalCi, ExternalFile };

/// Same-spin doubles keep i<j, a<b; mixed doubles store (i alpha, j beta, a alpha, b beta).
struct DoubleKey {
  int i, j, a, b;
  SpinPattern spin;
  friend auto operator<=>(const DoubleKey&, const DoubleKey&) = default;
};

struct AmplitudeSet {
  std::map<std::tuple<int, int, int>, double> singles;  // (i, a, spin 0/1)
  std::map<DoubleKey, double> doubles;
  AmplitudeSource source = AmplitudeSource::InternalCi;

  bool empty() const noexcept { return singles.empty() && doubles.empty(); }
};

/**
 * Intermediate-normalized amplitudes t = c_excited / c_HF for every single
 * and double replacement of the reference, in parent orbital numbering.
 */
inline AmplitudeSet extract_amplitudes(const CiResult& ci, const ActiveSpaceSpec& spec) {
  if (ci.n_orb != spec.n_spatial) throw ValidationError("CI result and active space differ in size");
  const Determinant hf = ci.hf();
  const double c0 = ci.coefficient(hf);
  if (std::abs(c0) <= 1e-6)
    throw NumericalError("reference weight vanishes; multi-reference wavefunctions are not supported");
  const auto& orb = spec.active_orbitals;
  AmplitudeSet out;
  out.source = AmplitudeSource::InternalCi;
  const int m = ci.n_orb;

  // E_ai on a string: returns (new string, sign)
  auto excite = [](std::uint64_t s, int i, int a) {
    const std::uint64_t t = s ^ (std::uint64_t{1} << i);
    const double sign = parity_below(s, i) * parity_below(t, a);
    return std::pair{t | (std::uint64_t{1} << a), sign};
  };
  const int occ[2] = {ci.n_alpha, ci.n_beta};
  const std::uint64_t ref[2] = {hf.alpha, hf.beta};

  for (int spin = 0; spin < 2; ++spin)
    for (int i = 0; i < occ[spin]; ++i)
      for (int a = occ[spin]; a < m; ++a) {
        auto [s, sg] = excite(ref[spin], i, a);
        const Determinant d = spin == 0 ? Determinant{s, hf.beta} : Determinant{hf.alpha, s};
        out.singles[{orb[i], orb[a], spin}] = sg * ci.coefficient(d) / c0;
      }
  for (int spin = 0; spin < 2; ++spin)
    for (int i = 0; i < occ[spin]; ++i)
      for (int j = i + 1; j < occ[spin]; ++j)
        for (int a = occ[spin]; a < m; ++a)
          for (int b = a + 1; b < m; ++b) {
            auto [s1, g1] = excite(ref[spin], j, b);
            auto [s2, g2] = excite(s1, i, a);
            const Determinant d = spin == 0 ? Determinant{s2, hf.beta} : Determinant{hf.alpha, s2};
            out.doubles[{orb[i], orb[j], orb[a], orb[b], spin ? SpinPattern::BetaBeta : SpinPattern::AlphaAlpha}] =
                g1 * g2 * ci.coefficient(d) / c0;
          }
  for (int i = 0; i < occ[0]; ++i)
    for (int a = occ[0]; a < m; ++a) {
      auto [sa, ga] = excite(ref[0], i, a);
      for (int j = 0; j < occ[1]; ++j)
        for (int b = occ[1]; b < m; ++b) {
          auto [sb, gb] = excite(ref[1], j, b);
          out.doubles[{orb[i], orb[j], orb[a], orb[b], SpinPattern::AlphaBeta}] =
              ga * gb * ci.coefficient({sa, sb}) / c0;
        }
    }
  return out;
}

/// Sum of squared amplitudes whose orbitals all lie in the candidate set.
inline double correlation_factor(const AmplitudeSet& amps, const std::vector<int>& orbitals) {
  std::vector<int> set = orbitals;
  std::sort(set.begin(), set.end());
  auto in = [&](int o) { return std::binary_search(set.begin(), set.end(), o); };
  double eps = 0.0;
  for (const auto& [k, t] : amps.singles)
    if (in(std::get<0>(k)) && in(std::get<1>(k))) eps += t * t;
  for (const auto& [k, t] : amps.doubles)
    if (in(k.i) && in(k.j) && in(k.a) && in(k.b)) eps += t * t;
  return eps;
}

/**
 * Amplitude CSV: `kind,i,a,t` or `kind,i,j,a,b,t`, 0-based spatial indices.
 * Kinds: s|sa (alpha single), sb, d|dab (i,a alpha; j,b beta), daa, dbb.
 * Closed-shell files give only the representative `s` / `d` entries; they
 * are stored once and not mirrored into the other spin.
 * Blank lines and lines starting with '#' are skipped.
 */
inline AmplitudeSet ingest_amplitudes(std::istream& in) {
  AmplitudeSet out;
  out.source = AmplitudeSource::ExternalFile;
  std::string line;
  std::size_t no = 0;
  while (std::getline(in, line)) {
    ++no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::vector<std::string> f;
    std::stringstream ss(line.substr(first));
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      const auto b = tok.find_first_not_of(" \t\r"), e = tok.find_last_not_of(" \t\r");
      f.push_back(b == std::string::npos ? std::string{} : tok.substr(b, e - b + 1));
    }
    if (f.empty()) continue;
    const std::string& kind = f[0];
    const bool single = kind == "s" || kind == "sa" || kind == "sb";
    const bool dbl = kind == "d" || kind == "dab" || kind == "daa" || kind == "dbb";
    if (!single && !dbl) throw ParseError("unknown amplitude kind '" + kind + "'", no);
    const std::size_t want = single ? 4 : 6;
    if (f.size() != want) throw ParseError("expected " + std::to_string(want) + " fields", no);
    std::vector<int> idx;
    for (std::size_t k = 1; k + 1 < want; ++k) {
      std::size_t used = 0;
      int v = 0;
      try {
        v = std::stoi(f[k], &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != f[k].size() || f[k].empty() || v < 0) throw ParseError("bad orbital index '" + f[k] + "'", no);
      idx.push_back(v);
    }
    double t = 0.0;
    {
      std::size_t used = 0;
      try {
        t = std::stod(f.back(), &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != f.back().size() || f.back().empty() || !std::isfinite(t))
        throw ParseError("bad amplitude value '" + f.back() + "'", no);
    }
    if (single) {
      out.singles[{idx[0], idx[1], kind == "sb" ? 1 : 0}] = t;
    } else {
      SpinPattern sp = SpinPattern::AlphaBeta;
      int i = idx[0], j = idx[1], a = idx[2], b = idx[3];
      if (kind == "daa" || kind == "dbb") {
        sp = kind == "daa" ? SpinPattern::AlphaAlpha : SpinPattern::BetaBeta;
        if (i == j || a == b) throw ParseError("same-spin double with a repeated orbital", no);
        // antisymmetric images collapse onto i<j, a<b
        double sign = 1.0;
        if (i > j) std::swap(i, j), sign = -sign;
        if (a > b) std::swap(a, b), sign = -sign;
        t *= sign;
      }
      out.doubles[{i, j, a, b, sp}] = t;
    }
  }
  return out;
}

inline AmplitudeSet read_amplitudes(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ValidationError("cannot open amplitude file " + path);
  return ingest_amplitudes(f);
}

struct AsCandidate {
  std::vector<int> orbitals;
  double epsilon = 0.0;
  std::optional<double> e_tot;   // Hartree
  std::optional<double> e_corr;  // mHa
};

struct RankOptions {
  bool attach_energies = false;
};

namespace detail {

inline void combinations(int n, int k, std::vector<std::vector<int>>& out) {
  out.clear();
  if (k < 0 || k > n) return;
  std::vector<int> c(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) c[static_cast<std::size_t>(i)] = i;
  while (true) {
    out.push_back(c);
    int i = k - 1;
    while (i >= 0 && c[static_cast<std::size_t>(i)] == n - k + i) --i;
    if (i < 0) return;
    ++c[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < k; ++j) c[static_cast<std::size_t>(j)] = c[static_cast<std::size_t>(j - 1)] + 1;
  }
}

}  // namespace detail

/// Ground-state amplitudes of the whole orbital space.
inline AmplitudeSet internal_amplitudes(const FcidumpData& data, const CiOptions& opt = {}) {
  const auto spec = ActiveSpaceSpec::full(data);
  const auto h = fold_core(data, spec);
  return extract_amplitudes(ci_ground_state(h, spec, opt), spec);
}

/**
 * Every active set holding the singly occupied orbitals, the right number of
 * doubly occupied ones and virtuals to fill n_orbitals; ranked by epsilon
 * (descending), ties by orbital list.
 */
inline std::vector<AsCandidate> rank_active_spaces(const FcidumpData& data, int n_electrons, int n_orbitals,
                                                   const AmplitudeSet& amps, const RankOptions& opt = {}) {
  const int na = data.n_alpha(), nb = data.n_beta(), norb = data.norb();
  if (n_electrons < 0 || n_orbitals < 0 || n_electrons > 2 * n_orbitals)
    throw ValidationError("more active electrons than twice the active orbitals");
  if (n_orbitals > norb || n_electrons > data.nelec())
    throw ValidationError("active space larger than the orbital space");
  if ((data.nelec() - n_electrons) % 2 != 0) throw ValidationError("inactive electrons must pair into core orbitals");
  const int n_core = (data.nelec() - n_electrons) / 2;
  const int n_open = na - nb;
  const int pick_docc = nb - n_core;
  const int pick_virt = n_orbitals - n_open - pick_docc;
  if (n_core > nb || pick_docc < 0 || pick_virt < 0 || pick_virt > norb - na)
    throw ValidationError("no active space with these electron and orbital counts");

  std::vector<std::vector<int>> docc, virt;
  detail::combinations(nb, pick_docc, docc);
  detail::combinations(norb - na, pick_virt, virt);
  std::vector<AsCandidate> out;
  const double e_hf = opt.attach_energies ? hf_energy(data) : 0.0;
  for (const auto& d : docc)
    for (const auto& v : virt) {
      AsCandidate c;
      for (int o : d) c.orbitals.push_back(o);
      for (int o = nb; o < na; ++o) c.orbitals.push_back(o);
      for (int o : v) c.orbitals.push_back(na + o);
      c.epsilon = correlation_factor(amps, c.orbitals);
      if (opt.attach_energies) {
        const auto spec = ActiveSpaceSpec::from_orbitals(data, c.orbitals);
        const auto ci = ci_ground_state(fold_core(data, spec), spec);
        c.e_tot = ci.energy;
        c.e_corr = (ci.energy - e_hf) * 1000.0;
      }
      out.push_back(std::move(c));
    }
  std::stable_sort(out.begin(), out.end(), [](const AsCandidate& a, const AsCandidate& b) {
    if (a.epsilon != b.epsilon) return a.epsilon > b.epsilon;
    return a.orbitals < b.orbitals;
  });
  return out;
}

inline std::string orbital_list(const std::vector<int>& o, char sep = ' ') {
  std::string s;
  for (std::size_t k = 0; k < o.size(); ++k) {
    if (k) s += sep;
    s += std::to_string(o[k]);
  }
  return s;
}

/// `orbitals,epsilon,e_tot,e_corr_mha`; orbitals space-separated, absent energies left empty.
inline std::string ranking_csv(const std::vector<AsCandidate>& cands) {
  std::string out = "orbitals,epsilon,e_tot,e_corr_mha\n";
  char buf[64];
  for (const auto& c : cands) {
    out += orbital_list(c.orbitals);
    std::snprintf(buf, sizeof(buf), ",%.10f,", c.epsilon);
    out += buf;
    if (c.e_tot) {
      std::snprintf(buf, sizeof(buf), "%.10f", *c.e_tot);
      out += buf;
    }
    out += ',';
    if (c.e_corr) {
      std::snprintf(buf, sizeof(buf), "%.6f", *c.e_corr);
      out += buf;
    }
    out += '\n';
  }
  return out;
}

}  // namespace pgsd
