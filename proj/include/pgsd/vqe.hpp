/**
 * @file vqe.hpp
 * @brief Variational loops, dissociation scans with parameter continuation
 *        and curve error metrics.
 */
#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "pgsd/ansatz.hpp"
#include "pgsd/casci.hpp"
#include "pgsd/hamiltonian.hpp"
#include "pgsd/noise.hpp"
#include "pgsd/simulator.hpp"

namespace pgsd {

struct VqeResult {
  double energy = 0.0;
  std::vector<double> params;
  std::size_t n_iterations = 0;
  std::size_t n_evaluations = 0;
  bool converged = false;
  std::vector<double> trace;  // best-so-far energy after each iteration
  std::string message;
};

struct GradientOptions {
  double tol = 1e-9;        // stop when an iteration improves the energy by less
  double gtol = 1e-7;       // or when the largest gradient component is below
  std::size_t max_iter = 2000;
  std::size_t memory = 10;
};

namespace detail {

inline void require_finite(double f, const char* where) {
  if (!std::isfinite(f)) throw NumericalError(std::string("non-finite energy during ") + where);
}

inline double inf_norm(const std::vector<double>& g) {
  double m = 0.0;
  for (double x : g) m = std::max(m, std::abs(x));
  return m;
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace detail

using EnergyGradientFn = std::function<double(const std::vector<double>&, std::vector<double>&)>;

/// Limited-memory BFGS with backtracking (Armijo) line search.
inline VqeResult lbfgs(const EnergyGradientFn& fg, std::vector<double> x, const GradientOptions& opt = {}) {
  for (double v : x)
    if (!std::isfinite(v)) throw ValidationError("initial parameters must be finite");
  VqeResult r;
  std::vector<double> g;
  double f = fg(x, g);
  ++r.n_evaluations;
  detail::require_finite(f, "L-BFGS");
  r.trace.push_back(f);
  std::deque<std::pair<std::vector<double>, std::vector<double>>> mem;  // (s, y)
  const std::size_t n = x.size();

  if (n == 0 || detail::inf_norm(g) < opt.gtol) {
    r.converged = true;
    r.message = "gradient below tolerance";
  }
  while (!r.converged && r.n_iterations < opt.max_iter) {
    // two-loop recursion
    std::vector<double> q = g;
    std::vector<double> alpha(mem.size());
    for (std::size_t k = mem.size(); k-- > 0;) {
      const auto& [s, y] = mem[k];
      alpha[k] = detail::dot(s, q) / detail::dot(y, s);
      for (std::size_t i = 0; i < n; ++i) q[i] -= alpha[k] * y[i];
    }
    if (!mem.empty()) {
      const auto& [s, y] = mem.back();
      const double gamma = detail::dot(s, y) / detail::dot(y, y);
      for (auto& v : q) v *= gamma;
    }
    for (std::size_t k = 0; k < mem.size(); ++k) {
      const auto& [s, y] = mem[k];
      const double beta = detail::dot(y, q) / detail::dot(y, s);
      for (std::size_t i = 0; i < n; ++i) q[i] += (alpha[k] - beta) * s[i];
    }
    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i) d[i] = -q[i];
    double slope = detail::dot(g, d);
    if (!(slope < 0.0)) {
      mem.clear();
      for (std::size_t i = 0; i < n; ++i) d[i] = -g[i];
      slope = detail::dot(g, d);
    }
    double step = mem.empty() ? std::min(1.0, 1.0 / std::sqrt(detail::dot(g, g))) : 1.0;

    std::vector<double> xn(n), gn;
    double fn = f;
    bool accepted = false;
    for (int bt = 0; bt < 50; ++bt) {
      for (std::size_t i = 0; i < n; ++i) xn[i] = x[i] + step * d[i];
      fn = fg(xn, gn);
      ++r.n_evaluations;
      detail::require_finite(fn, "L-BFGS line search");
      if (fn <= f + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    ++r.n_iterations;
    if (!accepted) {
      if (!mem.empty()) {
        mem.clear();
        r.trace.push_back(f);
        continue;
      }
      r.converged = true;
      r.message = "line search cannot decrease the energy";
      r.trace.push_back(f);
      break;
    }
    std::vector<double> s(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = xn[i] - x[i];
      y[i] = gn[i] - g[i];
    }
    if (detail::dot(s, y) > 1e-14) {
      mem.emplace_back(std::move(s), std::move(y));
      if (mem.size() > opt.memory) mem.pop_front();
    }
    const double improvement = f - fn;
    x = std::move(xn);
    g = std::move(gn);
    f = fn;
    r.trace.push_back(f);
    if (detail::inf_norm(g) < opt.gtol) {
      r.converged = true;
      r.message = "gradient below tolerance";
    } else if (improvement < opt.tol) {
      r.converged = true;
      r.message = "energy change below tolerance";
    }
  }
  if (!r.converged) r.message = "iteration limit";
  r.energy = f;
  r.params = std::move(x);
  return r;
}

inline VqeResult minimize_gradient(const Circuit& c, const XBlockOperator& h, std::vector<double> theta0,
                                   const GradientOptions& opt = {}) {
  check_params(c, theta0);
  return lbfgs([&](const std::vector<double>& x, std::vector<double>& g) { return energy_and_gradient(c, x, h, g); },
               std::move(theta0), opt);
}

inline VqeResult minimize_gradient(const Circuit& c, const PauliSum& h, std::vector<double> theta0,
                                   const GradientOptions& opt = {}) {
  if (!h.is_hermitian()) throw ValidationError("Hamiltonian must be Hermitian");
  return minimize_gradient(c, XBlockOperator(h), std::move(theta0), opt);
}

struct DerivativeFreeOptions {
  double rho_begin = 0.05;
  double rho_end = 1e-3;
  double tol = 0.0;            // minimum decrease that counts as progress
  std::size_t max_iter = 200;  // objective evaluations
};

/**
 * Linear-model trust region in the spirit of COBYLA, unconstrained: the
 * model gradient is interpolated from n points around the best point, a
 * step of length rho is taken against it, and rho halves after repeated
 * failures. Only function values are used.
 *
 * The best noisy value seen is biased low, so the reported energy is a fresh
 * evaluation at the returned parameters (the last one of the budget). The
 * trace keeps the best-so-far search values.
 */
inline VqeResult minimize_derivative_free(const std::function<double(const std::vector<double>&)>& f,
                                          std::vector<double> x0, const DerivativeFreeOptions& opt = {}) {
  for (double v : x0)
    if (!std::isfinite(v)) throw ValidationError("initial parameters must be finite");
  const std::size_t n = x0.size();
  VqeResult r;
  auto eval = [&](const std::vector<double>& x) {
    const double v = f(x);
    ++r.n_evaluations;
    detail::require_finite(v, "derivative-free search");
    return v;
  };
  std::vector<double> xc = std::move(x0);
  double fc = eval(xc);
  r.trace.push_back(fc);
  // one evaluation is held back for the final estimate
  const std::size_t budget = opt.max_iter >= 2 ? opt.max_iter - 1 : 1;
  auto done = [&] { return r.n_evaluations >= budget; };

  double rho = opt.rho_begin;
  // interpolation points stored as offsets from the current centre
  std::vector<std::vector<double>> pts;
  std::vector<double> vals;
  auto record = [&] { r.trace.push_back(std::min(r.trace.back(), fc)); };
  auto rebuild = [&] {
    pts.clear();
    vals.clear();
    for (std::size_t i = 0; i < n && !done(); ++i) {
      std::vector<double> d(n, 0.0);
      d[i] = rho;
      std::vector<double> x = xc;
      x[i] += rho;
      const double v = eval(x);
      pts.push_back(d);
      vals.push_back(v);
      if (v < fc - opt.tol) {
        // move the centre at once; offsets shift accordingly
        for (std::size_t k = 0; k < pts.size(); ++k)
          for (std::size_t j = 0; j < n; ++j) pts[k][j] -= d[j];
        pts.back() = std::vector<double>(n, 0.0);
        pts.back()[i] = -rho;
        vals.back() = fc;
        xc = x;
        fc = v;
      }
      record();
    }
  };

  if (n == 0 || opt.max_iter == 0) {
    r.converged = true;
  } else {
    rebuild();
    int fails = 0;
    while (!done() && rho > opt.rho_end) {
      ++r.n_iterations;
      if (pts.size() < n) break;
      Eigen::MatrixXd y(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
      Eigen::VectorXd df(static_cast<Eigen::Index>(n));
      for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t j = 0; j < n; ++j) y(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) = pts[k][j];
        df(static_cast<Eigen::Index>(k)) = vals[k] - fc;
      }
      Eigen::VectorXd g = y.colPivHouseholderQr().solve(df);
      const double gn = g.norm();
      if (!(gn > 0.0) || !g.allFinite()) {
        rho *= 0.5;
        rebuild();
        continue;
      }
      std::vector<double> step(n), xt = xc;
      for (std::size_t j = 0; j < n; ++j) {
        step[j] = -rho * g(static_cast<Eigen::Index>(j)) / gn;
        xt[j] += step[j];
      }
      const double ft = eval(xt);
      // the trial point replaces the interpolation point farthest from the new centre
      if (ft < fc - opt.tol) {
        for (auto& p : pts)
          for (std::size_t j = 0; j < n; ++j) p[j] -= step[j];
        std::vector<double> old(n);
        for (std::size_t j = 0; j < n; ++j) old[j] = -step[j];
        std::size_t far = 0;
        double dmax = -1.0;
        for (std::size_t k = 0; k < n; ++k) {
          const double d = std::sqrt(detail::dot(pts[k], pts[k]));
          if (d > dmax) dmax = d, far = k;
        }
        pts[far] = old;
        vals[far] = fc;
        xc = xt;
        fc = ft;
        fails = 0;
      } else {
        std::size_t far = 0;
        double dmax = -1.0;
        for (std::size_t k = 0; k < n; ++k) {
          const double d = std::sqrt(detail::dot(pts[k], pts[k]));
          if (d > dmax) dmax = d, far = k;
        }
        pts[far] = step;
        vals[far] = ft;
        if (++fails >= 2) {
          rho *= 0.5;
          fails = 0;
          if (rho > opt.rho_end) rebuild();
        }
      }
      record();
    }
    r.converged = rho <= opt.rho_end;
  }
  r.message = r.converged ? "trust radius below rho_end" : "evaluation limit";
  r.energy = r.n_evaluations > 1 ? eval(xc) : fc;
  r.params = std::move(xc);
  return r;
}

/// Derivative-free VQE on shot-based noisy energies; each evaluation gets its own seed.
inline VqeResult minimize_derivative_free(const Circuit& c, const PauliSum& h, std::vector<double> theta0,
                                          const NoiseModel& noise, const EstimatorOptions& est,
                                          const DerivativeFreeOptions& opt = {}) {
  check_params(c, theta0);
  const auto groups = qwc_groups(h);
  std::uint64_t k = 0;
  return minimize_derivative_free(
      [&](const std::vector<double>& x) {
        NoiseModel nm = noise;
        nm.seed = noise.seed * 1000003ULL + (k++);
        return noisy_expectation(c, x, h, nm, est, &groups).energy;
      },
      std::move(theta0), opt);
}

// ---------------------------------------------------------------------------
// Problems and scans

enum class AnsatzKind { Pgsd, Uccsd };

inline const char* ansatz_name(AnsatzKind k) noexcept { return k == AnsatzKind::Pgsd ? "pgsd" : "uccsd"; }

inline Circuit build_ansatz(AnsatzKind k, const ActiveSpaceSpec& s) {
  return k == AnsatzKind::Pgsd ? build_pgsd(s) : build_uccsd(s);
}

/// Everything needed to run VQE in one active space of one geometry.
struct ActiveProblem {
  ActiveSpaceSpec spec;
  ActiveHamiltonian integrals;
  PauliSum hamiltonian;
  double casci_energy = 0.0;

  static ActiveProblem build(const FcidumpData& data, const ActiveSpaceSpec& spec) {
    ActiveProblem p;
    p.spec = spec;
    p.integrals = fold_core(data, spec);
    p.hamiltonian = jw_map_hamiltonian(p.integrals, spec);
    p.casci_energy = ci_ground_state(p.integrals, spec).energy;
    return p;
  }
};

/// The frontier choice: highest doubly occupied orbitals, open shells, lowest virtuals.
inline std::vector<int> default_active_orbitals(const FcidumpData& data, int n_electrons, int n_orbitals) {
  const int na = data.n_alpha(), nb = data.n_beta();
  if ((data.nelec() - n_electrons) % 2 != 0 || n_electrons > data.nelec() || n_electrons < 0)
    throw ValidationError("inactive electrons must pair into core orbitals");
  const int n_core = (data.nelec() - n_electrons) / 2;
  const int docc = nb - n_core, open = na - nb, virt = n_orbitals - docc - open;
  if (docc < 0 || virt < 0 || na + virt > data.norb()) throw ValidationError("infeasible active space");
  std::vector<int> o;
  for (int k = n_core; k < na + virt; ++k) o.push_back(k);
  return o;
}

struct Geometry {
  std::string label;
  double bond = 0.0;  // Angstrom
  FcidumpData data;
};

enum class SpacePolicy { Fixed, Dynamic };

struct ScanConfig {
  AnsatzKind ansatz = AnsatzKind::Pgsd;
  SpacePolicy policy = SpacePolicy::Fixed;
  int n_electrons = 2;
  int n_orbitals = 2;
  std::vector<int> orbitals;              // fixed policy; empty = frontier orbitals
  std::optional<double> equilibrium;      // bond length of the zero-start point
  GradientOptions optimizer;
};

struct ScanPoint {
  std::string label;
  double bond = 0.0;
  VqeResult result;
  double reference = 0.0;  // CASCI energy of the same active space
  std::vector<int> orbitals;
  ResourceReport resources;
  bool ok = false;
  std::string error;
};

struct ScanResult {
  std::vector<ScanPoint> points;  // ascending bond length
  std::size_t equilibrium_index = 0;
};

/**
 * Zero start at the equilibrium geometry (given, or else the lowest HF
 * energy), then outward sweeps: first toward shorter bonds, then toward
 * longer ones, each point warm-started from its already optimized
 * neighbour. A failed point is recorded and the sweep carries on from the
 * last good parameters.
 */
inline ScanResult scan(std::vector<Geometry> geoms, const ScanConfig& cfg,
                       const std::function<void(const ScanPoint&)>& progress = {}) {
  if (geoms.empty()) throw ValidationError("scan needs at least one geometry");
  std::stable_sort(geoms.begin(), geoms.end(), [](const Geometry& a, const Geometry& b) { return a.bond < b.bond; });
  ScanResult out;
  out.points.resize(geoms.size());
  std::size_t eq = 0;
  if (cfg.equilibrium) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < geoms.size(); ++k)
      if (std::abs(geoms[k].bond - *cfg.equilibrium) < best) best = std::abs(geoms[k].bond - *cfg.equilibrium), eq = k;
  } else {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < geoms.size(); ++k) {
      const double e = hf_energy(geoms[k].data);
      if (e < best) best = e, eq = k;
    }
  }
  out.equilibrium_index = eq;

  auto run = [&](std::size_t k, const std::vector<double>* warm) -> const std::vector<double>* {
    auto& pt = out.points[k];
    const auto& g = geoms[k];
    pt.label = g.label;
    pt.bond = g.bond;
    try {
      std::vector<int> orb;
      if (cfg.policy == SpacePolicy::Dynamic) {
        const auto ranked = rank_active_spaces(g.data, cfg.n_electrons, cfg.n_orbitals, internal_amplitudes(g.data));
        orb = ranked.front().orbitals;
      } else {
        orb = cfg.orbitals.empty() ? default_active_orbitals(g.data, cfg.n_electrons, cfg.n_orbitals) : cfg.orbitals;
      }
      const auto spec = ActiveSpaceSpec::from_orbitals(g.data, orb);
      if (spec.n_electrons() != cfg.n_electrons || spec.n_spatial != cfg.n_orbitals)
        throw ValidationError("orbital set does not give the requested active space");
      pt.orbitals = orb;
      const auto prob = ActiveProblem::build(g.data, spec);
      pt.reference = prob.casci_energy;
      const Circuit c = build_ansatz(cfg.ansatz, spec);
      pt.resources = resource_report(c);
      std::vector<double> x0(c.n_params(), 0.0);
      if (warm && warm->size() == x0.size()) x0 = *warm;
      pt.result = minimize_gradient(c, prob.hamiltonian, x0, cfg.optimizer);
      pt.ok = true;
    } catch (const std::exception& e) {
      pt.ok = false;
      pt.error = e.what();
    }
    if (progress) progress(pt);
    return pt.ok ? &pt.result.params : warm;
  };

  const std::vector<double>* eq_params = run(eq, nullptr);
  const std::vector<double>* warm = eq_params;
  for (std::size_t k = eq; k-- > 0;) warm = run(k, warm);
  warm = eq_params;
  for (std::size_t k = eq + 1; k < geoms.size(); ++k) warm = run(k, warm);
  return out;
}

struct ErrorMetrics {
  double rmse = 0.0;         // mHa
  double npe = 0.0;          // mHa, max minus min signed deviation
  double max_abs_dev = 0.0;  // mHa
  double min_abs_dev = 0.0;  // mHa
};

/// Deviations (computed - reference) in Hartree in, metrics in mHa out.
inline ErrorMetrics error_metrics(const std::vector<double>& computed, const std::vector<double>& reference) {
  if (computed.size() != reference.size()) throw ValidationError("curve lengths differ");
  if (computed.empty()) throw ValidationError("error metrics need at least one point");
  ErrorMetrics m;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  double alo = lo, ahi = 0.0, ss = 0.0;
  for (std::size_t k = 0; k < computed.size(); ++k) {
    const double d = (computed[k] - reference[k]) * 1000.0;
    ss += d * d;
    lo = std::min(lo, d);
    hi = std::max(hi, d);
    alo = std::min(alo, std::abs(d));
    ahi = std::max(ahi, std::abs(d));
  }
  m.rmse = std::sqrt(ss / static_cast<double>(computed.size()));
  m.npe = hi - lo;
  m.max_abs_dev = ahi;
  m.min_abs_dev = alo;
  return m;
}

/// Over the successful points of a scan.
inline ErrorMetrics error_metrics(const ScanResult& s) {
  std::vector<double> c, r;
  for (const auto& p : s.points)
    if (p.ok) {
      c.push_back(p.result.energy);
      r.push_back(p.reference);
    }
  return error_metrics(c, r);
}

}  // namespace pgsd
