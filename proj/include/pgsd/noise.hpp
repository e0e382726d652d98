/**
 * @file noise.hpp
 * @brief Shot sampling, Monte Carlo Pauli-trajectory noise and grouped
 *        energy estimation.
 *
 * Noise attaches to the lowered circuit: after every 1q (2q) basis gate a
 * uniformly random non-identity Pauli on its support is inserted with
 * probability p1 (p2); each measured bit then flips with p_readout.
 *
 * Random streams are split by purpose (fault placement, measurement,
 * readout), each an mt19937_64 seeded from (seed, stream). With all rates at
 * zero the fault and readout streams are never consulted, so a noisy run
 * draws the same measurement outcomes as the noiseless one.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "pgsd/circuit.hpp"
#include "pgsd/pauli.hpp"
#include "pgsd/simulator.hpp"

namespace pgsd {

struct NoiseModel {
  double p1 = 0.001;
  double p2 = 0.01;
  double p_readout = 0.01;
  std::uint64_t seed = 0;

  void validate() const {
    for (double p : {p1, p2, p_readout})
      if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("noise probability outside [0, 1]");
  }
  bool is_zero() const noexcept { return p1 == 0.0 && p2 == 0.0 && p_readout == 0.0; }
  static NoiseModel none(std::uint64_t seed = 0) { return {0.0, 0.0, 0.0, seed}; }
};

struct SampleHistogram {
  int n_qubits = 0;
  std::map<std::uint64_t, std::uint64_t> counts;  // basis index -> count
  std::uint64_t shots = 0;

  /// Bitstring of a basis index, q_{n-1} first.
  std::string bitstring(std::uint64_t idx) const {
    std::string s(static_cast<std::size_t>(n_qubits), '0');
    for (int q = 0; q < n_qubits; ++q)
      if ((idx >> q) & 1u) s[static_cast<std::size_t>(n_qubits - 1 - q)] = '1';
    return s;
  }

  double frequency(std::uint64_t idx) const {
    auto it = counts.find(idx);
    return it == counts.end() || shots == 0 ? 0.0 : static_cast<double>(it->second) / static_cast<double>(shots);
  }

  std::uint64_t modal() const {
    std::uint64_t best = 0, n = 0;
    for (const auto& [k, c] : counts)
      if (c > n) {
        best = k;
        n = c;
      }
    return best;
  }

  /// `bitstring,count`, one row per observed outcome, ascending basis index.
  std::string to_csv() const {
    std::string out = "bitstring,count\n";
    for (const auto& [k, c] : counts) out += bitstring(k) + ',' + std::to_string(c) + '\n';
    return out;
  }
};

class Rng {
 public:
  enum Stream : std::uint64_t { kFaults = 1, kMeasure = 2, kReadout = 3 };

  Rng(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream)};
    eng_.seed(seq);
  }

  /// Uniform in [0, 1), identical on every platform.
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
  std::uint64_t below(std::uint64_t n) { return static_cast<std::uint64_t>(uniform() * static_cast<double>(n)); }

 private:
  std::mt19937_64 eng_;
};

namespace detail {

/// Draws an outcome index from a cumulative distribution.
inline std::uint64_t draw(const std::vector<double>& cdf, double u) {
  const double target = u * cdf.back();
  auto it = std::upper_bound(cdf.begin(), cdf.end(), target);
  if (it == cdf.end()) --it;
  return static_cast<std::uint64_t>(it - cdf.begin());
}

inline std::vector<double> cumulative(const Statevector& v) {
  std::vector<double> cdf(v.dim());
  double acc = 0.0;
  for (std::size_t i = 0; i < v.dim(); ++i) cdf[i] = acc += std::norm(v.amps[i]);
  return cdf;
}

/// A random non-identity Pauli on one or two qubits.
inline void apply_random_pauli(Statevector& v, const std::vector<int>& qs, Rng& rng) {
  static constexpr char ops[] = {'I', 'X', 'Y', 'Z'};
  const std::uint64_t choices = qs.size() == 1 ? 3 : 15;
  std::uint64_t r = rng.below(choices) + 1;
  PauliString p(v.n_qubits, 0, 0);
  for (int q : qs) {
    p.set(q, ops[r & 3u]);
    r >>= 2;
  }
  apply_pauli(v, p);
}

}  // namespace detail

/**
 * A circuit lowered once with its angles bound, plus the ideal state after
 * every gate so that a trajectory can resume from its first fault.
 */
class TrajectorySimulator {
 public:
  TrajectorySimulator(const Circuit& c, const std::vector<double>& params, const NoiseModel& noise,
                      BasisSet basis = BasisSet::RzSxXCx)
      : noise_(noise), n_(c.n_qubits()) {
    noise_.validate();
    check_params(c, params);
    const Circuit low = decompose(c, basis);
    for (const auto& l : low.layers())
      for (const auto& g : l) {
        gates_.push_back(g);
        angles_.push_back(g.angle.value(params));
      }
    // ideal reference comes from the native circuit; lowered states only differ by a global phase
    ideal_ = evolve(c, params);
    const std::size_t bytes = (gates_.size() + 1) * (std::size_t{1} << n_) * sizeof(cplx);
    if (bytes <= (std::size_t{256} << 20)) {
      Statevector v(n_);
      prefix_.reserve(gates_.size() + 1);
      prefix_.push_back(v);
      for (std::size_t k = 0; k < gates_.size(); ++k) {
        apply_gate(v, gates_[k], angles_[k]);
        prefix_.push_back(v);
      }
    }
  }

  int n_qubits() const noexcept { return n_; }
  const Statevector& ideal() const noexcept { return ideal_; }
  std::size_t n_gates() const noexcept { return gates_.size(); }

  /// One trajectory of the state-preparation circuit. Fault-free runs return
  /// the stored ideal state; otherwise the result is built in `scratch`.
  const Statevector& run(Rng& faults, Statevector& scratch) const {
    std::vector<std::size_t> at;
    if (noise_.p1 > 0.0 || noise_.p2 > 0.0)
      for (std::size_t k = 0; k < gates_.size(); ++k) {
        const double p = gates_[k].qubits.size() == 1 ? noise_.p1 : noise_.p2;
        if (p > 0.0 && faults.uniform() < p) at.push_back(k);
      }
    if (at.empty()) return ideal_;
    Statevector& v = scratch;
    v = prefix_.empty() ? Statevector(n_) : prefix_[at.front()];
    std::size_t start = prefix_.empty() ? 0 : at.front();
    std::size_t next = 0;
    for (std::size_t k = start; k < gates_.size(); ++k) {
      apply_gate(v, gates_[k], angles_[k]);
      if (next < at.size() && at[next] == k) {
        detail::apply_random_pauli(v, gates_[k].qubits, faults);
        ++next;
      }
    }
    return v;
  }

  /// Noisy single-qubit gate sequence (measurement basis changes).
  void apply_noisy(Statevector& v, const std::vector<Gate>& seq, Rng& faults) const {
    for (const auto& g : seq) {
      apply_gate(v, g, g.angle.value({}));
      const double p = g.qubits.size() == 1 ? noise_.p1 : noise_.p2;
      if (p > 0.0 && faults.uniform() < p) detail::apply_random_pauli(v, g.qubits, faults);
    }
  }

  std::uint64_t readout(std::uint64_t outcome, Rng& rng) const {
    if (noise_.p_readout <= 0.0) return outcome;
    for (int q = 0; q < n_; ++q)
      if (rng.uniform() < noise_.p_readout) outcome ^= std::uint64_t{1} << q;
    return outcome;
  }

 private:
  NoiseModel noise_;
  int n_;
  std::vector<Gate> gates_;
  std::vector<double> angles_;
  Statevector ideal_;
  std::vector<Statevector> prefix_;
};

/**
 * Computational-basis samples. Without a noise model the exact
 * distribution is sampled; with one, each shot is its own trajectory.
 */
inline SampleHistogram sample(const Circuit& c, const std::vector<double>& params, std::uint64_t shots,
                              const std::optional<NoiseModel>& noise = std::nullopt, std::uint64_t seed = 0) {
  if (shots == 0) throw ValidationError("shots must be positive");
  SampleHistogram h;
  h.n_qubits = c.n_qubits();
  h.shots = shots;
  const std::uint64_t s = noise ? noise->seed : seed;
  Rng meas(s, Rng::kMeasure);
  if (!noise || (noise->p1 == 0.0 && noise->p2 == 0.0)) {
    const Statevector v = evolve(c, params);
    const auto cdf = detail::cumulative(v);
    Rng ro(s, Rng::kReadout);
    const NoiseModel nm = noise.value_or(NoiseModel::none());
    nm.validate();
    for (std::uint64_t k = 0; k < shots; ++k) {
      std::uint64_t out = detail::draw(cdf, meas.uniform());
      if (nm.p_readout > 0.0)
        for (int q = 0; q < c.n_qubits(); ++q)
          if (ro.uniform() < nm.p_readout) out ^= std::uint64_t{1} << q;
      ++h.counts[out];
    }
    return h;
  }
  TrajectorySimulator sim(c, params, *noise);
  Rng faults(s, Rng::kFaults), ro(s, Rng::kReadout);
  const auto ideal_cdf = detail::cumulative(sim.ideal());
  Statevector scratch;
  for (std::uint64_t k = 0; k < shots; ++k) {
    const Statevector& v = sim.run(faults, scratch);
    const double u = meas.uniform();
    const std::uint64_t out = &v == &sim.ideal() ? detail::draw(ideal_cdf, u) : detail::draw(detail::cumulative(v), u);
    ++h.counts[sim.readout(out, ro)];
  }
  return h;
}

/// Greedy qubit-wise commuting partition of the non-identity terms, in canonical term order.
struct MeasurementGroup {
  PauliString basis;                                 // one op per measured qubit
  std::vector<std::pair<PauliString, double>> terms;
};

inline std::vector<MeasurementGroup> qwc_groups(const PauliSum& h) {
  std::vector<MeasurementGroup> groups;
  for (const auto& [p, c] : h.terms()) {
    if (p.is_identity()) continue;
    bool placed = false;
    for (auto& g : groups)
      if (qubitwise_commutes(g.basis, p)) {
        g.basis = PauliString(p.n_qubits, g.basis.x | p.x, g.basis.z | p.z);
        g.terms.emplace_back(p, c.real());
        placed = true;
        break;
      }
    if (!placed) groups.push_back({p, {{p, c.real()}}});
  }
  return groups;
}

/// Gates rotating each measured qubit's Pauli onto Z.
inline std::vector<Gate> measurement_basis_change(const PauliString& basis, BasisSet bs = BasisSet::RzSxXCx) {
  std::vector<Gate> out;
  for (int q : basis.qubits()) {
    const char op = basis.op(q);
    std::vector<Gate> one;
    if (op == 'X') one = decompose_gate(gates::h(q), bs);
    if (op == 'Y') one = decompose_gate(gates::sx(q), bs);  // Rx(pi/2) up to phase
    out.insert(out.end(), one.begin(), one.end());
  }
  return out;
}

struct EnergyEstimate {
  double energy = 0.0;
  double std_error = 0.0;
};

struct EstimatorOptions {
  std::uint64_t shots = 10000;           // per measurement group
  std::uint64_t trajectories = 0;        // 0: one trajectory per shot
};

/**
 * Shot-based energy of the prepared state. Each group is measured with
 * `shots` samples; prepared-state trajectories are shared between groups
 * (shots / trajectories samples per trajectory and group), which correlates
 * groups but leaves every group estimate unbiased.
 */
inline EnergyEstimate noisy_expectation(const Circuit& c, const std::vector<double>& params, const PauliSum& h,
                                        const NoiseModel& noise, const EstimatorOptions& opt = {},
                                        const std::vector<MeasurementGroup>* groups_in = nullptr) {
  if (opt.shots == 0) throw ValidationError("shots must be positive");
  if (!h.is_hermitian()) throw ValidationError("expectation of a non-Hermitian operator");
  const std::vector<MeasurementGroup> own = groups_in ? std::vector<MeasurementGroup>{} : qwc_groups(h);
  const auto& groups = groups_in ? *groups_in : own;

  TrajectorySimulator sim(c, params, noise);
  Rng faults(noise.seed, Rng::kFaults), meas(noise.seed, Rng::kMeasure), ro(noise.seed, Rng::kReadout);

  const std::uint64_t n_traj =
      opt.trajectories == 0 || opt.trajectories > opt.shots ? opt.shots : opt.trajectories;
  std::vector<std::vector<Gate>> changes;
  for (const auto& g : groups) changes.push_back(measurement_basis_change(g.basis));

  // per group: sum and sum of squares of the per-shot group energy
  std::vector<double> sum(groups.size(), 0.0), sq(groups.size(), 0.0);
  Statevector scratch;
  for (std::uint64_t t = 0; t < n_traj; ++t) {
    const Statevector& base = sim.run(faults, scratch);
    const std::uint64_t per = opt.shots / n_traj + (t < opt.shots % n_traj ? 1 : 0);
    for (std::size_t gi = 0; gi < groups.size(); ++gi) {
      Statevector v = base;
      sim.apply_noisy(v, changes[gi], faults);
      const auto cdf = detail::cumulative(v);
      for (std::uint64_t k = 0; k < per; ++k) {
        const std::uint64_t out = sim.readout(detail::draw(cdf, meas.uniform()), ro);
        double e = 0.0;
        for (const auto& [p, coeff] : groups[gi].terms)
          e += (std::popcount(out & p.support()) & 1) ? -coeff : coeff;
        sum[gi] += e;
        sq[gi] += e * e;
      }
    }
  }
  EnergyEstimate est;
  est.energy = h.coefficient(PauliString::identity(h.n_qubits())).real();
  double var = 0.0;
  const double n = static_cast<double>(opt.shots);
  for (std::size_t gi = 0; gi < groups.size(); ++gi) {
    const double mean = sum[gi] / n;
    est.energy += mean;
    var += std::max(0.0, sq[gi] / n - mean * mean) / n;
  }
  est.std_error = std::sqrt(var);
  return est;
}

}  // namespace pgsd
