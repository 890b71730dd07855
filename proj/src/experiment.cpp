// Copyright 2026 The vcool Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "vcool/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "vcool/correlator.hpp"
#include "vcool/linalg.hpp"
#include "vcool/model.hpp"
#include "vcool/protocol.hpp"
#include "vcool/quench.hpp"
#include "vcool/replica.hpp"
#include "vcool/thermal.hpp"

#ifndef VCOOL_VERSION
#define VCOOL_VERSION "unknown"
#endif

namespace vcool {

namespace {

using nlohmann::json;

// Dense single-copy states are kept below this dimension.
constexpr std::size_t kDenseStateLimit = 2000;
// Two-copy dense work (transformed-state diagonals) is kept below this.
constexpr std::size_t kJointLimit = 20000;

const json& require(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw ConfigError(where + ": missing required field '" + key + "'");
  }
  return obj.at(key);
}

template <typename T>
T get_as(const json& obj, const std::string& key, const std::string& where) {
  const json& v = require(obj, key, where);
  try {
    return v.get<T>();
  } catch (const json::exception&) {
    throw ConfigError(where + ": field '" + key + "' has the wrong type");
  }
}

template <typename T>
T get_or(const json& obj, const std::string& key, T fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  return get_as<T>(obj, key, where);
}

std::uint64_t get_seed(const json& c, const std::string& where) {
  const json& v = require(c, "seed", where);
  if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<long long>() < 0)) {
    throw ConfigError(where + ": 'seed' must be a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

struct ModelSpec {
  Statistics statistics = Statistics::boson;
  ModelParams params;
  int N = 0;
};

ModelSpec parse_model(const json& c, const std::string& where) {
  const json& m = require(c, "model", where);
  if (!m.is_object()) throw ConfigError(where + ": 'model' must be an object");
  const std::string w = where + ".model";
  ModelSpec s;
  const std::string stats = get_or<std::string>(m, "statistics", "boson", w);
  if (stats == "boson") {
    s.statistics = Statistics::boson;
  } else if (stats == "fermion") {
    s.statistics = Statistics::fermion;
  } else {
    throw ConfigError(w + ": statistics must be 'boson' or 'fermion'");
  }
  s.params.L = get_as<int>(m, "L", w);
  s.N = get_as<int>(m, "N", w);
  s.params.J = get_or<double>(m, "J", 1.0, w);
  s.params.U = get_or<double>(m, "U", 0.0, w);
  const std::string bc = get_or<std::string>(m, "boundary", "open", w);
  if (bc == "open") {
    s.params.boundary = Boundary::open;
  } else if (bc == "periodic") {
    s.params.boundary = Boundary::periodic;
  } else {
    throw ConfigError(w + ": boundary must be 'open' or 'periodic'");
  }
  if (s.params.L < 1 || s.params.L > 24) throw ConfigError(w + ": L must lie in [1, 24]");
  if (s.N < 0) throw ConfigError(w + ": N must be >= 0");
  if (s.statistics == Statistics::fermion && s.N > s.params.L) {
    throw ConfigError(w + ": more fermions than sites");
  }
  return s;
}

std::uint64_t single_dim(const ModelSpec& s) {
  if (s.statistics == Statistics::fermion) return binomial(s.params.L, s.N);
  return binomial(s.N + s.params.L - 1, s.N);
}

void check_dim(std::uint64_t dim, std::uint64_t limit, const std::string& what) {
  if (dim > limit) {
    throw ConfigError(what + " dimension " + std::to_string(dim) + " exceeds the limit " +
                      std::to_string(limit));
  }
}

void check_single(const ModelSpec& s, const std::string& where) {
  check_dim(single_dim(s), kDenseStateLimit, where + ": single-copy");
}

void check_joint(const ModelSpec& s, int n, const std::string& where) {
  check_single(s, where);
  const int modes = n * s.params.L;
  const int particles = n * s.N;
  const std::uint64_t joint = s.statistics == Statistics::fermion
                                  ? binomial(modes, particles)
                                  : binomial(particles + modes - 1, particles);
  check_dim(joint, kJointLimit, where + ": joint " + std::to_string(n) + "-copy");
}

BasisPtr model_basis(const ModelSpec& s) {
  return enumerate_basis(s.statistics, s.params.L, Sector::fixed(s.N));
}

Operator model_hamiltonian(const ModelSpec& s, const BasisPtr& basis) {
  return s.statistics == Statistics::boson ? bose_hubbard(basis, s.params)
                                           : fermi_hopping(basis, s.params);
}

std::vector<int> int_list(const json& c, const std::string& key, const std::string& where) {
  const json& v = require(c, key, where);
  if (!v.is_array()) throw ConfigError(where + ": '" + key + "' must be an array");
  std::vector<int> out;
  for (const json& e : v) {
    if (!e.is_number_integer()) throw ConfigError(where + ": '" + key + "' must hold integers");
    out.push_back(e.get<int>());
  }
  return out;
}

std::vector<double> real_list(const json& c, const std::string& key, const std::string& where) {
  const json& v = require(c, key, where);
  if (!v.is_array() || v.empty()) {
    throw ConfigError(where + ": '" + key + "' must be a non-empty array");
  }
  std::vector<double> out;
  for (const json& e : v) {
    if (!e.is_number()) throw ConfigError(where + ": '" + key + "' must hold numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

void check_sites(const std::vector<int>& sites, int L, const std::string& where) {
  for (int s : sites) {
    if (s < 0 || s >= L) throw ConfigError(where + ": site " + std::to_string(s) + " outside [0, L)");
  }
}

double positive(const json& c, const std::string& key, const std::string& where) {
  const double v = get_as<double>(c, key, where);
  if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(where + ": '" + key + "' must be > 0");
  return v;
}

std::size_t shots_of(const json& c, const std::string& where) {
  const json& v = require(c, "shots", where);
  if (!v.is_number_integer() || v.get<long long>() <= 0) {
    throw ConfigError(where + ": 'shots' must be a positive integer");
  }
  return v.get<std::size_t>();
}

// ---------------------------------------------------------------------------
// CSV assembly

class Csv {
 public:
  Csv(const std::string& hash, const std::string& header) {
    out_ << "# config_hash: " << hash << "\n" << header << "\n";
  }
  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
    out_ << "\n";
  }
  std::string str() const { return out_.str(); }

 private:
  std::ostringstream out_;
};

std::string num(double v) { return format_number(v); }
std::string integer(long long v) { return std::to_string(v); }

// ---------------------------------------------------------------------------
// Validation per kind

void validate_kind(const json& c, const std::string& kind) {
  const std::string w = kind;
  if (kind == "identity_checks") {
    const ModelSpec s = parse_model(c, w);
    const int n = get_or<int>(c, "n", 2, w);
    if (n < 2 || n > 4) throw ConfigError(w + ": n must lie in [2, 4]");
    if (s.statistics == Statistics::fermion && n != 2) {
      throw ConfigError(w + ": fermionic checks are two-copy only");
    }
    check_joint(s, n, w);
    if (c.contains("beta") && !(get_as<double>(c, "beta", w) >= 0.0)) {
      throw ConfigError(w + ": 'beta' must be >= 0");
    }
  } else if (kind == "virtual_density") {
    const ModelSpec s = parse_model(c, w);
    const int n = get_or<int>(c, "n", 2, w);
    if (n < 2 || n > 4) throw ConfigError(w + ": n must lie in [2, 4]");
    if (s.statistics == Statistics::fermion && n != 2) {
      throw ConfigError(w + ": fermionic estimation is two-copy only");
    }
    positive(c, "beta", w);
    shots_of(c, w);
    get_seed(c, w);
    check_joint(s, n, w);
    if (c.contains("sites")) check_sites(int_list(c, "sites", w), s.params.L, w);
  } else if (kind == "correlator_study") {
    const ModelSpec s = parse_model(c, w);
    if (s.statistics != Statistics::boson) throw ConfigError(w + ": bosonic chains only");
    check_dim(single_dim(s), 20000, w + ": single-copy");
    for (double t : real_list(c, "temperatures", w)) {
      if (!(t > 0.0)) throw ConfigError(w + ": temperatures must be > 0");
    }
    const int dmax = get_or<int>(c, "max_distance", s.params.L / 2, w);
    if (dmax < 1 || dmax >= s.params.L) throw ConfigError(w + ": max_distance must lie in [1, L)");
  } else if (kind == "appendix2") {
    // All parameters default to the published grid; overrides are optional.
    if (c.contains("model")) parse_model(c, w);
    if (c.contains("temperatures")) real_list(c, "temperatures", w);
  } else if (kind == "ancilla") {
    const ModelSpec s = parse_model(c, w);
    check_single(s, w);
    positive(c, "beta", w);
    shots_of(c, w);
    get_seed(c, w);
    check_sites({get_as<int>(c, "site", w)}, s.params.L, w);
  } else if (kind == "distill") {
    const ModelSpec s = parse_model(c, w);
    check_single(s, w);
    positive(c, "beta", w);
    const int it = get_as<int>(c, "iterations", w);
    if (it < 1 || it > 200) throw ConfigError(w + ": iterations must lie in [1, 200]");
  } else if (kind == "buffered") {
    const ModelSpec s = parse_model(c, w);
    check_single(s, w);
    positive(c, "beta", w);
    const std::vector<int> region = int_list(c, "region", w);
    if (region.empty()) throw ConfigError(w + ": empty region");
    check_sites(region, s.params.L, w);
    const int site = get_as<int>(c, "site", w);
    if (std::find(region.begin(), region.end(), site) == region.end()) {
      throw ConfigError(w + ": 'site' must lie in the region");
    }
    for (int b : int_list(c, "buffers", w)) {
      if (b < 0 || region.front() - b < 0 || region.back() + b >= s.params.L) {
        throw ConfigError(w + ": buffer " + std::to_string(b) + " exceeds the chain");
      }
    }
  } else if (kind == "scaling") {
    const ModelSpec s = parse_model(c, w);
    check_single(s, w);
    for (double b : real_list(c, "betas", w)) {
      if (!(b >= 0.0)) throw ConfigError(w + ": betas must be >= 0");
    }
    const std::vector<int> sizes = int_list(c, "region_sizes", w);
    for (int r : sizes) {
      if (r < 1 || r > s.params.L) throw ConfigError(w + ": region size outside [1, L]");
    }
    positive(c, "target_precision", w);
    get_seed(c, w);
  } else if (kind == "fig2") {
    const std::string preset = get_or<std::string>(c, "preset", "A", w);
    QuenchConfig q;
    try {
      q = quench_preset(preset);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(w + ": " + e.what());
    }
    if (c.contains("sampled")) q.sampled = get_as<bool>(c, "sampled", w);
    if (q.sampled) {
      shots_of(c, w);
      get_seed(c, w);
    }
    if (c.contains("times")) {
      for (double t : real_list(c, "times", w)) {
        if (!(t > 0.0)) throw ConfigError(w + ": times must be > 0");
      }
    }
    if (c.contains("U")) get_as<double>(c, "U", w);
  } else {
    std::string known;
    for (const auto& k : experiment_kinds()) known += (known.empty() ? "" : ", ") + k;
    throw ConfigError("unknown experiment kind '" + kind + "' (expected one of: " + known + ")");
  }
}

// ---------------------------------------------------------------------------
// Experiments. Each returns CSV text and adds results to the manifest.

std::string run_identity_checks(const json& c, const std::string& hash, json& results) {
  const ModelSpec s = parse_model(c, "identity_checks");
  const int n = get_or<int>(c, "n", 2, "identity_checks");
  const double beta = get_or<double>(c, "beta", 1.0, "identity_checks");
  const BasisPtr basis = model_basis(s);
  const ReplicaPtr replica = make_replica(basis, n);
  Csv csv(hash, "check,value,tolerance,passed");
  double worst = 0.0;
  auto record = [&](const std::string& name, double value, double tol) {
    csv.row({name, num(value), num(tol), value < tol ? "true" : "false"});
    results[name] = value;
    worst = std::max(worst, value);
  };
  const DensityMatrix rho = thermal_state(model_hamiltonian(s, basis), beta);
  const double z = purity(rho, n);
  if (s.statistics == Statistics::boson) {
    record("swap_identity_max_deviation", verify_swap_identity(replica).max_deviation, 1e-9);
    const OutcomeDistribution d = transformed_outcomes(replica, rho);
    const Vector r = outcome_phases(replica);
    const Complex trace = d.probabilities.cast<Complex>().dot(r);
    record("phase_trace_deviation", std::abs(std::conj(trace) - z), 1e-10);
  } else {
    const OutcomeDistribution d = transformed_outcomes(replica, rho);
    const RealVector v = fermion_v_op(replica).real_diagonal();
    record("v_trace_deviation", std::abs(d.probabilities.dot(v) - z), 1e-10);
  }
  results["max_deviation"] = worst;
  results["joint_dim"] = replica->joint_basis()->dim();
  return csv.str();
}

std::string run_virtual_density(const json& c, const std::string& hash, json& results,
                                const RunOptions& opt) {
  const std::string w = "virtual_density";
  const ModelSpec s = parse_model(c, w);
  const int n = get_or<int>(c, "n", 2, w);
  const double beta = get_as<double>(c, "beta", w);
  const BasisPtr basis = model_basis(s);
  const DensityMatrix rho = thermal_state(model_hamiltonian(s, basis), beta);
  const ReplicaPtr replica = make_replica(basis, n);
  const OutcomeDistribution dist = transformed_outcomes(replica, rho);
  std::vector<int> sites;
  if (c.contains("sites")) {
    sites = int_list(c, "sites", w);
  } else {
    for (int j = 0; j < s.params.L; ++j) sites.push_back(j);
  }
  Csv csv(hash, EstimateReport::csv_header() + ",exact");
  json rows = json::array();
  for (int j : sites) {
    EstimateOptions eo;
    eo.observable = "n_" + std::to_string(j);
    eo.sampling.shots = shots_of(c, w);
    eo.sampling.seed = get_seed(c, w) + static_cast<std::uint64_t>(j);
    eo.sampling.workers = opt.workers;
    const auto x = [j](OccupationSpan o) { return static_cast<double>(o[static_cast<std::size_t>(j)]); };
    EstimateReport rep = s.statistics == Statistics::boson
                             ? interferometric_estimate(dist, x, eo)
                             : fermionic_estimate(dist, x, eo);
    rep.beta = beta;
    const double exact = virtual_expectation_exact(rho, number_op(basis, j), n);
    csv.row({rep.csv_row(), num(exact)});
    json r = rep.to_json();
    r["exact"] = exact;
    rows.push_back(r);
  }
  results["estimates"] = rows;
  return csv.str();
}

std::string correlator_csv(const CorrelatorTable& t, const std::string& hash, json& results) {
  Csv csv(hash, CorrelatorTable::csv_header());
  for (const auto& r : t.rows) {
    csv.row({num(r.t_over_j), integer(r.d), num(r.first_term), num(r.second_term), num(r.total)});
  }
  results["basis_dim"] = t.basis_dim;
  results["rows"] = t.rows.size();
  json ratios = json::object();
  for (double T : t.params.temperatures) {
    const double first = t.range(T, false);
    ratios[num(T)] = first > 0 ? t.range(T, true) / first : 0.0;
  }
  results["second_over_first_range"] = ratios;
  return csv.str();
}

std::string run_correlator(const json& c, const std::string& hash, json& results, bool defaults) {
  CorrelatorStudyParams p;
  const std::string w = defaults ? "appendix2" : "correlator_study";
  if (c.contains("model")) {
    const ModelSpec s = parse_model(c, w);
    p.L = s.params.L;
    p.N = s.N;
    p.U = s.params.U;
    p.J = s.params.J;
    p.boundary = s.params.boundary;
    p.max_distance = p.L / 2;
  }
  if (c.contains("temperatures")) p.temperatures = real_list(c, "temperatures", w);
  p.max_distance = get_or<int>(c, "max_distance", p.max_distance, w);
  return correlator_csv(appendix2_study(p), hash, results);
}

std::string run_ancilla(const json& c, const std::string& hash, json& results) {
  const std::string w = "ancilla";
  const ModelSpec s = parse_model(c, w);
  const BasisPtr basis = model_basis(s);
  const DensityMatrix rho = thermal_state(model_hamiltonian(s, basis), get_as<double>(c, "beta", w));
  const int j = get_as<int>(c, "site", w);
  SamplingOptions so;
  so.shots = shots_of(c, w);
  so.seed = get_seed(c, w);
  const auto x = [j](OccupationSpan o) { return static_cast<double>(o[static_cast<std::size_t>(j)]); };
  const AncillaStep step = ancilla_step(rho);
  const Operator nj = number_op(basis, j);
  const double combined = ancilla_combine(expectation(step.rho1, nj), expectation(rho, nj), step.p_plus);
  const AncillaSampledReport rep = ancilla_sampled_estimate(rho, x, so);
  Csv csv(hash,
          "observable,exact,combined_exact,p_plus,p_plus_hat,estimate_shared,se_shared,"
          "estimate_independent,se_independent");
  csv.row({"n_" + std::to_string(j), num(rep.exact), num(combined), num(step.p_plus),
           num(rep.p_plus_hat), num(rep.estimate_shared), num(rep.se_shared),
           num(rep.estimate_independent), num(rep.se_independent)});
  results["exact"] = rep.exact;
  results["p_plus"] = step.p_plus;
  return csv.str();
}

std::string run_distill(const json& c, const std::string& hash, json& results) {
  const std::string w = "distill";
  const ModelSpec s = parse_model(c, w);
  const BasisPtr basis = model_basis(s);
  const DensityMatrix rho = thermal_state(model_hamiltonian(s, basis), get_as<double>(c, "beta", w));
  const DistillResult d = distill(rho, get_as<int>(c, "iterations", w));
  Csv csv(hash, "iteration,p_plus,ground_fidelity,top_eigenvalue");
  for (std::size_t k = 0; k < d.steps.size(); ++k) {
    csv.row({integer(static_cast<long long>(k + 1)), num(d.steps[k].p_plus),
             num(d.steps[k].ground_fidelity), num(d.steps[k].top_eigenvalue)});
  }
  results["degenerate_ground_state"] = d.degenerate;
  results["final_fidelity"] = d.steps.back().ground_fidelity;
  return csv.str();
}

std::string run_buffered(const json& c, const std::string& hash, json& results) {
  const std::string w = "buffered";
  const ModelSpec s = parse_model(c, w);
  const BasisPtr basis = model_basis(s);
  const DensityMatrix rho = thermal_state(model_hamiltonian(s, basis), get_as<double>(c, "beta", w));
  const std::vector<int> region = int_list(c, "region", w);
  const int site = get_as<int>(c, "site", w);
  const auto offset = static_cast<std::size_t>(site - region.front());
  const auto x = [offset](OccupationSpan o) { return static_cast<double>(o[offset]); };
  Csv csv(hash, "buffer,approx,exact,error");
  json errors = json::array();
  for (int b : int_list(c, "buffers", w)) {
    const BufferedResult r = buffered_estimate(rho, region, b, x);
    csv.row({integer(b), num(r.approx), num(r.exact), num(r.error)});
    errors.push_back(r.error);
  }
  results["errors"] = errors;
  return csv.str();
}

std::string run_scaling(const json& c, const std::string& hash, json& results) {
  const std::string w = "scaling";
  const ModelSpec s = parse_model(c, w);
  const BasisPtr basis = model_basis(s);
  ScalingOptions so;
  so.target_precision = get_as<double>(c, "target_precision", w);
  so.repetitions = get_or<int>(c, "repetitions", so.repetitions, w);
  so.seed = get_seed(c, w);
  const ScalingStudy st = shots_scaling_study(model_hamiltonian(s, basis), real_list(c, "betas", w),
                                              int_list(c, "region_sizes", w), so);
  Csv csv(hash, "beta,region_size,z2,empirical_shots,predicted_shots");
  for (const auto& r : st.rows) {
    csv.row({num(r.beta), integer(r.region_size), num(r.z2), num(r.empirical_shots),
             num(r.predicted_shots)});
  }
  results["slope"] = st.slope;
  results["intercept"] = st.intercept;
  return csv.str();
}

std::string run_fig2(const json& c, const std::string& hash, json& results, const RunOptions& opt) {
  const std::string w = "fig2";
  QuenchConfig q = quench_preset(get_or<std::string>(c, "preset", "A", w));
  if (c.contains("sampled")) q.sampled = get_as<bool>(c, "sampled", w);
  if (q.sampled) {
    q.shots = shots_of(c, w);
    q.seed = get_seed(c, w);
  }
  if (c.contains("times")) q.times = real_list(c, "times", w);
  if (c.contains("U")) q.U = get_as<double>(c, "U", w);
  q.workers = opt.workers;
  const Fig2Report r = fig2_experiment(q);
  Csv csv(hash, Fig2Report::csv_header());
  for (const auto& row : r.rows) {
    csv.row({integer(row.site), num(row.raw_density), num(row.vc_estimate), num(row.vc_se),
             num(row.halfT_prediction)});
  }
  results["fit_T_over_J"] = r.fit.beta > 0 ? 1.0 / r.fit.beta : INFINITY;
  results["fit_mu_over_J"] = r.fit.mu;
  results["fit_converged"] = r.fit.converged;
  results["fit_particle_cap"] = r.fit_particle_cap;
  results["joint_dim"] = r.joint_dim;
  results["raw_average"] = r.raw_average;
  results["vc_average"] = r.vc_average;
  results["vc_average_se"] = r.vc_average_se;
  results["halfT_average"] = r.halfT_average;
  results["renyi2"] = r.thermalization.renyi2;
  results["entropy_saturated"] = r.thermalization.saturated;
  return csv.str();
}

}  // namespace

const std::vector<std::string>& experiment_kinds() {
  static const std::vector<std::string> kinds{"identity_checks", "virtual_density",
                                              "correlator_study", "ancilla",
                                              "distill", "buffered",
                                              "scaling", "fig2",
                                              "appendix2"};
  return kinds;
}

json load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
  try {
    return json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ConfigError("config '" + path.string() + "' is not valid JSON: " + e.what());
  }
}

std::string config_hash(const json& config) {
  const std::string text = config.dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void validate_config(const json& config) {
  if (!config.is_object()) throw ConfigError("config must be a JSON object");
  const std::string kind = get_as<std::string>(config, "kind", "config");
  if (config.contains("output") && !config.at("output").is_string()) {
    throw ConfigError("config: 'output' must be a string");
  }
  validate_kind(config, kind);
}

RunResult execute_experiment(json config, const RunOptions& options) {
  if (options.seed_override) config["seed"] = *options.seed_override;
  validate_config(config);
  if (options.workers < 1) throw ConfigError("workers must be >= 1");

  const auto start = std::chrono::steady_clock::now();
  const std::string kind = config.at("kind").get<std::string>();
  const std::string hash = config_hash(config);
  const std::string stem = config.value("output", kind);
  json results = json::object();
  std::string csv;
  if (kind == "identity_checks") {
    csv = run_identity_checks(config, hash, results);
  } else if (kind == "virtual_density") {
    csv = run_virtual_density(config, hash, results, options);
  } else if (kind == "correlator_study") {
    csv = run_correlator(config, hash, results, false);
  } else if (kind == "appendix2") {
    csv = run_correlator(config, hash, results, true);
  } else if (kind == "ancilla") {
    csv = run_ancilla(config, hash, results);
  } else if (kind == "distill") {
    csv = run_distill(config, hash, results);
  } else if (kind == "buffered") {
    csv = run_buffered(config, hash, results);
  } else if (kind == "scaling") {
    csv = run_scaling(config, hash, results);
  } else {
    csv = run_fig2(config, hash, results, options);
  }
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  RunResult out;
  out.files.push_back({stem + ".csv", csv});
  json manifest;
  manifest["config"] = config;
  manifest["config_hash"] = hash;
  manifest["kind"] = kind;
  manifest["version"] = VCOOL_VERSION;
  manifest["eigensolver"] = eigh_backend();
  manifest["workers"] = options.workers;
  manifest["seed"] = config.contains("seed") ? config.at("seed") : json(nullptr);
  manifest["wall_time_seconds"] = wall;
  manifest["outputs"] = json::array({stem + ".csv"});
  manifest["results"] = results;
  out.manifest = manifest;
  out.files.push_back({stem + ".manifest.json", manifest.dump(2) + "\n"});
  return out;
}

std::vector<std::filesystem::path> write_outputs(const RunResult& result, const RunOptions& options) {
  namespace fs = std::filesystem;
  fs::create_directories(options.output_dir);
  std::vector<fs::path> staged, final_paths;
  try {
    for (const auto& f : result.files) {
      const fs::path target = options.output_dir / f.name;
      const fs::path tmp = options.output_dir / (f.name + ".partial");
      std::ofstream out(tmp, std::ios::binary);
      out << f.contents;
      out.close();
      if (!out) throw std::runtime_error("failed writing '" + tmp.string() + "'");
      staged.push_back(tmp);
      final_paths.push_back(target);
    }
  } catch (...) {
    for (const auto& p : staged) fs::remove(p);
    throw;
  }
  for (std::size_t i = 0; i < staged.size(); ++i) fs::rename(staged[i], final_paths[i]);
  return final_paths;
}

}  // namespace vcool
