/**
 * @file cli.hpp
 * @brief Command drivers behind the `pgsd` tool: scan, select-as, resources
 *        and noise-compare. Each writes CSV with `#` metadata lines.
 *
 * Configuration is a flat key/value schema shared by config files
 * (`key = value`, `#` comments) and command-line flags (`--key value`);
 * flags override the file. Keys:
 *   fcidump        path, repeatable (file) or comma-separated
 *   ansatz         pgsd | uccsd | both
 *   electrons, orbitals, ms2
 *   orbital-set    comma-separated orbital indices
 *   policy         auto (re-rank per geometry) | fixed
 *   equilibrium    bond length (Angstrom) of the zero-start geometry
 *   amplitudes     external amplitude CSV for select-as
 *   energies       true | false, attach CASCI energies in select-as
 *   tol, max-iter  gradient optimizer
 *   df-max-iter, rho-begin, rho-end   derivative-free optimizer
 *   shots, noise (p1,p2,pr), trajectories, seed, seeds
 *   out            output path (stdout when absent)
 */
#pragma once

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "pgsd/ansatz.hpp"
#include "pgsd/casci.hpp"
#include "pgsd/circuit.hpp"
#include "pgsd/fcidump.hpp"
#include "pgsd/noise.hpp"
#include "pgsd/vqe.hpp"

namespace pgsd {

inline constexpr const char* kVersion = "0.1.0";

/// Exit status contract.
enum ExitCode : int { kOk = 0, kConfigError = 1, kPartialFailure = 2 };

/// Bad or inconsistent configuration (maps to exit code 1).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string command;
  std::vector<std::string> fcidumps;
  std::string ansatz = "pgsd";
  std::optional<int> electrons;
  std::optional<int> orbitals;
  int ms2 = 0;
  std::vector<int> orbital_set;
  std::string policy = "fixed";
  std::optional<double> equilibrium;
  std::string amplitudes;
  bool energies = false;
  double tol = 1e-9;
  std::size_t max_iter = 2000;
  std::size_t df_max_iter = 200;
  double rho_begin = 0.05;
  double rho_end = 1e-3;
  std::uint64_t shots = 10000;
  double p1 = 0.001, p2 = 0.01, p_readout = 0.01;
  std::uint64_t trajectories = 1000;
  std::uint64_t seed = 7;
  std::size_t seeds = 5;
  std::string out;
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string t;
  while (std::getline(ss, t, sep)) {
    t = trim(t);
    if (!t.empty()) out.push_back(t);
  }
  return out;
}

template <class T>
T parse_number(const std::string& key, const std::string& v) {
  T x{};
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || ptr != v.data() + v.size() || v.empty())
    throw ConfigError("bad value for " + key + ": '" + v + "'");
  return x;
}

inline std::string fmt(double v, int prec = 10) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", prec, v);
  return buf;
}

}  // namespace detail

/// Applies one key/value pair; unknown keys and malformed values raise ConfigError.
inline void apply_setting(RunConfig& c, const std::string& key_in, const std::string& value_in) {
  const std::string key = detail::trim(key_in);
  const std::string v = detail::trim(value_in);
  using detail::parse_number;
  if (key == "fcidump") {
    for (auto& p : detail::split(v, ',')) c.fcidumps.push_back(p);
  } else if (key == "ansatz") {
    if (v != "pgsd" && v != "uccsd" && v != "both") throw ConfigError("ansatz must be pgsd, uccsd or both");
    c.ansatz = v;
  } else if (key == "electrons") {
    c.electrons = parse_number<int>(key, v);
  } else if (key == "orbitals") {
    c.orbitals = parse_number<int>(key, v);
  } else if (key == "ms2") {
    c.ms2 = parse_number<int>(key, v);
  } else if (key == "orbital-set") {
    c.orbital_set.clear();
    for (auto& t : detail::split(v, ',')) c.orbital_set.push_back(parse_number<int>(key, t));
  } else if (key == "policy") {
    if (v != "auto" && v != "fixed") throw ConfigError("policy must be auto or fixed");
    c.policy = v;
  } else if (key == "equilibrium") {
    c.equilibrium = parse_number<double>(key, v);
  } else if (key == "amplitudes") {
    c.amplitudes = v;
  } else if (key == "energies") {
    if (v != "true" && v != "false") throw ConfigError("energies must be true or false");
    c.energies = v == "true";
  } else if (key == "tol") {
    c.tol = parse_number<double>(key, v);
  } else if (key == "max-iter") {
    c.max_iter = parse_number<std::size_t>(key, v);
  } else if (key == "df-max-iter") {
    c.df_max_iter = parse_number<std::size_t>(key, v);
  } else if (key == "rho-begin") {
    c.rho_begin = parse_number<double>(key, v);
  } else if (key == "rho-end") {
    c.rho_end = parse_number<double>(key, v);
  } else if (key == "shots") {
    c.shots = parse_number<std::uint64_t>(key, v);
  } else if (key == "noise") {
    const auto parts = detail::split(v, ',');
    if (parts.size() != 3) throw ConfigError("noise takes three probabilities p1,p2,pr");
    c.p1 = parse_number<double>(key, parts[0]);
    c.p2 = parse_number<double>(key, parts[1]);
    c.p_readout = parse_number<double>(key, parts[2]);
    for (double q : {c.p1, c.p2, c.p_readout})
      if (!(q >= 0.0 && q <= 1.0)) throw ConfigError("noise probabilities must lie in [0, 1]");
  } else if (key == "trajectories") {
    c.trajectories = parse_number<std::uint64_t>(key, v);
  } else if (key == "seed") {
    c.seed = parse_number<std::uint64_t>(key, v);
  } else if (key == "seeds") {
    c.seeds = parse_number<std::size_t>(key, v);
  } else if (key == "out") {
    c.out = v;
  } else {
    throw ConfigError("unknown configuration key '" + key + "'");
  }
}

inline void load_config(RunConfig& c, std::istream& in) {
  std::string line;
  std::size_t no = 0;
  while (std::getline(in, line)) {
    ++no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(no) + ": expected key = value");
    apply_setting(c, line.substr(0, eq), line.substr(eq + 1));
  }
}

inline void load_config_file(RunConfig& c, const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file " + path);
  load_config(c, f);
}

/// The resolved configuration as `key=value` pairs in a fixed order.
inline std::vector<std::pair<std::string, std::string>> config_echo(const RunConfig& c) {
  using detail::fmt;
  std::vector<std::pair<std::string, std::string>> kv;
  std::string f;
  for (std::size_t k = 0; k < c.fcidumps.size(); ++k) f += (k ? "," : "") + c.fcidumps[k];
  kv.emplace_back("fcidump", f);
  kv.emplace_back("ansatz", c.ansatz);
  kv.emplace_back("electrons", c.electrons ? std::to_string(*c.electrons) : "");
  kv.emplace_back("orbitals", c.orbitals ? std::to_string(*c.orbitals) : "");
  kv.emplace_back("ms2", std::to_string(c.ms2));
  kv.emplace_back("orbital-set", orbital_list(c.orbital_set, ','));
  kv.emplace_back("policy", c.policy);
  kv.emplace_back("equilibrium", c.equilibrium ? fmt(*c.equilibrium, 6) : "");
  kv.emplace_back("amplitudes", c.amplitudes);
  kv.emplace_back("energies", c.energies ? "true" : "false");
  kv.emplace_back("tol", fmt(c.tol, 12));
  kv.emplace_back("max-iter", std::to_string(c.max_iter));
  kv.emplace_back("df-max-iter", std::to_string(c.df_max_iter));
  kv.emplace_back("rho-begin", fmt(c.rho_begin, 6));
  kv.emplace_back("rho-end", fmt(c.rho_end, 6));
  kv.emplace_back("shots", std::to_string(c.shots));
  kv.emplace_back("noise", fmt(c.p1, 6) + "," + fmt(c.p2, 6) + "," + fmt(c.p_readout, 6));
  kv.emplace_back("trajectories", std::to_string(c.trajectories));
  kv.emplace_back("seed", std::to_string(c.seed));
  kv.emplace_back("seeds", std::to_string(c.seeds));
  return kv;
}

inline std::string metadata_header(const RunConfig& c) {
  std::string h = "# pgsd " + std::string(kVersion) + "\n# command: " + c.command + "\n";
  for (const auto& [k, v] : config_echo(c)) h += "# config: " + k + "=" + v + "\n";
  h += "# seed: " + std::to_string(c.seed) + "\n";
  return h;
}

/// Label = file stem; bond length = last decimal number in the stem (h2o_0.958 -> 0.958).
inline Geometry load_geometry(const std::string& path) {
  namespace fs = std::filesystem;
  if (!fs::exists(path)) throw ConfigError("missing FCIDUMP file " + path);
  Geometry g;
  g.label = fs::path(path).stem().string();
  static const std::regex num(R"(([0-9]+(\.[0-9]+)?))");
  std::string last;
  for (auto it = std::sregex_iterator(g.label.begin(), g.label.end(), num); it != std::sregex_iterator(); ++it)
    last = (*it)[1].str();
  if (last.empty()) throw ConfigError("cannot read a bond length from file name " + path);
  g.bond = std::stod(last);
  g.data = read_fcidump(path);
  return g;
}

inline void write_output(const RunConfig& c, const std::string& text, std::ostream& fallback,
                         const std::string& suffix = "") {
  if (c.out.empty()) {
    fallback << text;
    return;
  }
  const std::string path = c.out + suffix;
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write " + path);
  f << text;
}

namespace detail {

inline void require_space(const RunConfig& c) {
  if (!c.electrons || !c.orbitals) throw ConfigError("--electrons and --orbitals are required");
  if (*c.electrons < 0 || *c.orbitals <= 0 || *c.electrons > 2 * *c.orbitals)
    throw ConfigError("infeasible active space");
}

inline std::vector<AnsatzKind> ansatz_list(const RunConfig& c) {
  if (c.ansatz == "both") return {AnsatzKind::Pgsd, AnsatzKind::Uccsd};
  return {c.ansatz == "uccsd" ? AnsatzKind::Uccsd : AnsatzKind::Pgsd};
}

inline std::vector<Geometry> load_geometries(const RunConfig& c) {
  if (c.fcidumps.empty()) throw ConfigError("at least one --fcidump is required");
  std::vector<Geometry> g;
  for (const auto& p : c.fcidumps) g.push_back(load_geometry(p));
  return g;
}

/// Active space of one geometry under the configured policy.
inline ActiveSpaceSpec choose_space(const RunConfig& c, const FcidumpData& d) {
  std::vector<int> orb;
  if (c.policy == "auto")
    orb = rank_active_spaces(d, *c.electrons, *c.orbitals, internal_amplitudes(d)).front().orbitals;
  else
    orb = c.orbital_set.empty() ? default_active_orbitals(d, *c.electrons, *c.orbitals) : c.orbital_set;
  auto spec = ActiveSpaceSpec::from_orbitals(d, orb);
  if (spec.n_electrons() != *c.electrons || spec.n_spatial != *c.orbitals)
    throw ConfigError("orbital set does not hold the requested active space");
  return spec;
}

}  // namespace detail

/// Dissociation scan; rows per geometry and ansatz, then a metrics block per ansatz.
inline int cmd_scan(const RunConfig& c, std::ostream& out) {
  detail::require_space(c);
  const auto geoms = detail::load_geometries(c);
  std::string csv = metadata_header(c);
  csv += "geometry,bond_angstrom,method,energy_ha,reference_ha,deviation_mha,iterations,evaluations,"
         "depth_basis,n_two_qubit,n_params,active_orbitals\n";
  std::string summary;
  bool failed = false;
  for (AnsatzKind kind : detail::ansatz_list(c)) {
    ScanConfig sc;
    sc.ansatz = kind;
    sc.policy = c.policy == "auto" ? SpacePolicy::Dynamic : SpacePolicy::Fixed;
    sc.n_electrons = *c.electrons;
    sc.n_orbitals = *c.orbitals;
    sc.orbitals = c.orbital_set;
    sc.equilibrium = c.equilibrium;
    sc.optimizer.tol = c.tol;
    sc.optimizer.max_iter = c.max_iter;
    const ScanResult r = scan(geoms, sc);
    for (const auto& p : r.points) {
      csv += p.label + ',' + detail::fmt(p.bond, 4) + ',' + ansatz_name(kind) + ',';
      if (p.ok) {
        csv += detail::fmt(p.result.energy) + ',' + detail::fmt(p.reference) + ',' +
               detail::fmt((p.result.energy - p.reference) * 1000.0, 6) + ',' +
               std::to_string(p.result.n_iterations) + ',' + std::to_string(p.result.n_evaluations) + ',' +
               std::to_string(p.resources.depth_basis) + ',' + std::to_string(p.resources.n_two_qubit) + ',' +
               std::to_string(p.resources.n_params) + ',' + orbital_list(p.orbitals) + '\n';
      } else {
        failed = true;
        csv += ",,,,,,,,\n";
        summary += "# failed: " + p.label + " " + ansatz_name(kind) + ": " + p.error + "\n";
      }
    }
    const bool any = std::any_of(r.points.begin(), r.points.end(), [](const ScanPoint& p) { return p.ok; });
    if (any) {
      const auto m = error_metrics(r);
      summary += std::string("# metrics ") + ansatz_name(kind) + ": rmse_mha=" + detail::fmt(m.rmse, 6) +
                 " npe_mha=" + detail::fmt(m.npe, 6) + " max_abs_dev_mha=" + detail::fmt(m.max_abs_dev, 6) +
                 " min_abs_dev_mha=" + detail::fmt(m.min_abs_dev, 6) + "\n";
    }
  }
  write_output(c, csv + summary, out);
  return failed ? kPartialFailure : kOk;
}

/// Active-space ranking of the first FCIDUMP.
inline int cmd_select_as(const RunConfig& c, std::ostream& out) {
  detail::require_space(c);
  if (c.fcidumps.size() != 1) throw ConfigError("select-as takes exactly one --fcidump");
  const Geometry g = load_geometry(c.fcidumps.front());
  const AmplitudeSet amps = c.amplitudes.empty() ? internal_amplitudes(g.data) : read_amplitudes(c.amplitudes);
  RankOptions ro;
  ro.attach_energies = c.energies;
  const auto ranked = rank_active_spaces(g.data, *c.electrons, *c.orbitals, amps, ro);
  std::string csv = metadata_header(c);
  csv += std::string("# amplitudes: ") + (c.amplitudes.empty() ? "internal-ci" : "external-file") + "\n";
  csv += ranking_csv(ranked);
  write_output(c, csv, out);
  return kOk;
}

/// Resource report for both ansatzes. Without an FCIDUMP the model space (electrons, orbitals, ms2) is used.
inline int cmd_resources(const RunConfig& c, std::ostream& out) {
  detail::require_space(c);
  ActiveSpaceSpec spec;
  if (c.fcidumps.empty()) {
    const int ne = *c.electrons, m = *c.orbitals;
    if ((ne + c.ms2) % 2 != 0 || std::abs(c.ms2) > ne) throw ConfigError("electrons and ms2 disagree in parity");
    const int na = (ne + c.ms2) / 2, nb = (ne - c.ms2) / 2;
    if (na > m || nb > m || nb < 0) throw ConfigError("infeasible active space");
    spec = ActiveSpaceSpec::model(m, na, nb);
  } else {
    spec = detail::choose_space(c, load_geometry(c.fcidumps.front()).data);
  }
  const auto rp = resource_report(build_pgsd(spec));
  const auto ru = resource_report(build_uccsd(spec));
  auto pct = [](std::size_t a, std::size_t b) { return b ? detail::fmt(100.0 * (1.0 - double(a) / double(b)), 2) : ""; };
  std::string csv = metadata_header(c);
  csv += "# connectivity: all-to-all, basis: rz,sx,x,cx (not device-routed)\n";
  csv += "ansatz,electrons,orbitals,n_params,depth_excitation_level,depth_basis,n_two_qubit,n_total_gates,"
         "depth_reduction_pct,two_qubit_reduction_pct\n";
  auto row = [&](const char* name, const ResourceReport& r, const std::string& dr, const std::string& tr) {
    csv += std::string(name) + ',' + std::to_string(spec.n_electrons()) + ',' + std::to_string(spec.n_spatial) + ',' +
           std::to_string(r.n_params) + ',' + std::to_string(r.depth_excitation_level) + ',' +
           std::to_string(r.depth_basis) + ',' + std::to_string(r.n_two_qubit) + ',' +
           std::to_string(r.n_total_gates) + ',' + dr + ',' + tr + '\n';
  };
  row("pgsd", rp, pct(rp.depth_basis, ru.depth_basis), pct(rp.n_two_qubit, ru.n_two_qubit));
  row("uccsd", ru, "", "");
  write_output(c, csv, out);
  return kOk;
}

struct NoiseRunRow {
  std::string geometry;
  double bond = 0.0;
  AnsatzKind ansatz = AnsatzKind::Pgsd;
  std::uint64_t seed = 0;
  double noiseless = 0.0;
  EnergyEstimate single;
  double converged = 0.0;
  double casci = 0.0;
  double hf_frequency = 0.0;
  std::size_t evaluations = 0;
  SampleHistogram histogram;
};

/// One geometry, one ansatz, one seed of the noisy protocol.
inline NoiseRunRow noisy_run(const Geometry& g, const ActiveProblem& prob, AnsatzKind kind,
                             const std::vector<double>& optimum, double noiseless, const NoiseModel& nm,
                             const RunConfig& c) {
  NoiseRunRow row;
  row.geometry = g.label;
  row.bond = g.bond;
  row.ansatz = kind;
  row.seed = nm.seed;
  row.noiseless = noiseless;
  row.casci = prob.casci_energy;
  const Circuit circ = build_ansatz(kind, prob.spec);
  EstimatorOptions est;
  est.shots = c.shots;
  est.trajectories = c.trajectories;
  row.single = noisy_expectation(circ, optimum, prob.hamiltonian, nm, est);
  DerivativeFreeOptions df;
  df.max_iter = c.df_max_iter;
  df.rho_begin = c.rho_begin;
  df.rho_end = c.rho_end;
  const VqeResult r = minimize_derivative_free(circ, prob.hamiltonian, optimum, nm, est, df);
  row.converged = r.energy;
  row.evaluations = r.n_evaluations;
  row.histogram = sample(circ, optimum, c.shots, nm, nm.seed);
  row.hf_frequency = row.histogram.frequency(hf_reference(prob.spec));
  return row;
}

inline double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

/// Noisy A/B comparison of both ansatzes from their noiseless optima.
inline int cmd_noise_compare(const RunConfig& c, std::ostream& out) {
  detail::require_space(c);
  if (c.shots == 0) throw ConfigError("shots must be positive");
  if (c.seeds == 0) throw ConfigError("seeds must be positive");
  NoiseModel base{c.p1, c.p2, c.p_readout, c.seed};
  try {
    base.validate();
  } catch (const ValidationError& e) {
    throw ConfigError(e.what());
  }
  const auto geoms = detail::load_geometries(c);
  std::string csv = metadata_header(c);
  csv += "geometry,bond_angstrom,ansatz,seed,noiseless_ha,single_eval_ha,single_eval_stderr_ha,converged_ha,"
         "casci_ha,single_dev_mha,converged_dev_mha,hf_frequency,evaluations\n";
  std::string hist = metadata_header(c) + "geometry,ansatz,mode,seed,bitstring,count\n";
  std::string summary;
  for (const auto& g : geoms) {
    const auto spec = detail::choose_space(c, g.data);
    const auto prob = ActiveProblem::build(g.data, spec);
    std::map<AnsatzKind, std::pair<std::vector<double>, std::vector<double>>> stats;  // (dev, hf freq)
    for (AnsatzKind kind : {AnsatzKind::Pgsd, AnsatzKind::Uccsd}) {
      const Circuit circ = build_ansatz(kind, spec);
      GradientOptions go;
      go.tol = c.tol;
      go.max_iter = c.max_iter;
      const VqeResult opt = minimize_gradient(circ, prob.hamiltonian, std::vector<double>(circ.n_params(), 0.0), go);
      const SampleHistogram ideal = sample(circ, opt.params, c.shots, std::nullopt, c.seed);
      for (const auto& [k, n] : ideal.counts)
        hist += g.label + ',' + ansatz_name(kind) + ",noiseless," + std::to_string(c.seed) + ',' + ideal.bitstring(k) +
                ',' + std::to_string(n) + '\n';
      for (std::size_t s = 0; s < c.seeds; ++s) {
        NoiseModel nm = base;
        nm.seed = c.seed + s;
        const NoiseRunRow r = noisy_run(g, prob, kind, opt.params, opt.energy, nm, c);
        const double dev1 = std::abs(r.single.energy - r.casci) * 1000.0;
        const double dev2 = std::abs(r.converged - r.casci) * 1000.0;
        stats[kind].first.push_back(dev2);
        stats[kind].second.push_back(r.hf_frequency);
        csv += g.label + ',' + detail::fmt(g.bond, 4) + ',' + ansatz_name(kind) + ',' + std::to_string(nm.seed) + ',' +
               detail::fmt(r.noiseless) + ',' + detail::fmt(r.single.energy) + ',' + detail::fmt(r.single.std_error) +
               ',' + detail::fmt(r.converged) + ',' + detail::fmt(r.casci) + ',' + detail::fmt(dev1, 6) + ',' +
               detail::fmt(dev2, 6) + ',' + detail::fmt(r.hf_frequency, 6) + ',' + std::to_string(r.evaluations) +
               '\n';
        for (const auto& [k, n] : r.histogram.counts)
          hist += g.label + ',' + ansatz_name(kind) + ",noisy," + std::to_string(nm.seed) + ',' +
                  r.histogram.bitstring(k) + ',' + std::to_string(n) + '\n';
      }
    }
    for (auto& [kind, st] : stats)
      summary += "# median " + g.label + " " + ansatz_name(kind) +
                 ": converged_dev_mha=" + detail::fmt(median(st.first), 6) +
                 " hf_frequency=" + detail::fmt(median(st.second), 6) + "\n";
  }
  write_output(c, csv + summary, out);
  if (c.out.empty())
    out << "\n" << hist;
  else
    write_output(c, hist, out, ".histograms.csv");
  return kOk;
}

/// Dispatch by command name; exceptions from bad input become exit code 1.
inline int run_command(const RunConfig& c, std::ostream& out, std::ostream& err) {
  try {
    if (c.command == "scan") return cmd_scan(c, out);
    if (c.command == "select-as") return cmd_select_as(c, out);
    if (c.command == "resources") return cmd_resources(c, out);
    if (c.command == "noise-compare") return cmd_noise_compare(c, out);
    err << "unknown command '" << c.command << "'\n";
    return kConfigError;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  }
}

}  // namespace pgsd
