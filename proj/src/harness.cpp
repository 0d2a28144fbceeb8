#include "sbbp/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "sbbp/instances.hpp"
#include "sbbp/solver.hpp"

namespace sbbp {

namespace {

using nlohmann::json;

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

const std::map<std::string, ExperimentKind>& kind_names() {
  static const std::map<std::string, ExperimentKind> names = {
      {"lfp_params", ExperimentKind::LfpParams},
      {"lfp_blocksize", ExperimentKind::LfpBlocksize},
      {"lfp_compare", ExperimentKind::LfpCompare},
      {"sfp_noise", ExperimentKind::SfpNoise},
      {"custom", ExperimentKind::Custom},
  };
  return names;
}

std::string kind_to_string(ExperimentKind kind) {
  for (const auto& [name, value] : kind_names()) {
    if (value == kind) return name;
  }
  return "custom";
}

std::set<std::string> allowed_keys(ExperimentKind kind) {
  std::set<std::string> keys = {"experiment", "trials",     "base_seed",
                                "output",     "lambda",     "record_every",
                                "max_iters",  "tol_rel_err"};
  auto add = [&keys](std::initializer_list<const char*> more) {
    for (const char* k : more) keys.insert(k);
  };
  switch (kind) {
    case ExperimentKind::LfpParams:
      add({"m", "n", "s", "tau", "vary", "c", "gamma_b"});
      break;
    case ExperimentKind::LfpBlocksize:
      add({"m", "n", "s", "c", "gamma_b"});
      break;
    case ExperimentKind::LfpCompare:
      add({"m", "n", "s", "tau", "c", "gamma_b"});
      break;
    case ExperimentKind::SfpNoise:
      add({"M", "xi", "n", "s", "sigma", "consistent", "tau", "c", "gamma_b",
           "schedule"});
      break;
    case ExperimentKind::Custom:
      add({"family", "stepsize", "kernel", "sampling", "schedule", "m", "n",
           "s", "M", "xi", "sigma", "consistent", "tau", "c", "gamma_b"});
      break;
  }
  return keys;
}

double get_number(const json& j, const std::string& key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number()) {
    throw ConfigError("config key '" + key + "': expected a number");
  }
  return j[key].get<double>();
}

long get_integer(const json& j, const std::string& key, long fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number_integer()) {
    throw ConfigError("config key '" + key + "': expected an integer");
  }
  return j[key].get<long>();
}

bool get_bool(const json& j, const std::string& key, bool fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_boolean()) {
    throw ConfigError("config key '" + key + "': expected a boolean");
  }
  return j[key].get<bool>();
}

std::string get_string(const json& j, const std::string& key,
                       const std::string& fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_string()) {
    throw ConfigError("config key '" + key + "': expected a string");
  }
  return j[key].get<std::string>();
}

void require_one_of(const std::string& key, const std::string& value,
                    std::initializer_list<const char*> options) {
  for (const char* opt : options) {
    if (value == opt) return;
  }
  std::string msg = "config key '" + key + "': got '" + value + "', expected one of";
  for (const char* opt : options) msg += std::string(" ") + opt;
  throw ConfigError(msg);
}

Schedule parse_schedule(const std::string& name, bool consistent) {
  if (name == "constant") return Schedule::Constant;
  if (name == "invsqrt") return Schedule::InvSqrt;
  return consistent ? Schedule::Constant : Schedule::InvSqrt;  // "auto"
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& err) {
    throw ConfigError(std::string("config parse error: ") + err.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  if (!j.contains("experiment")) {
    throw ConfigError(
        "missing required key 'experiment' (one of lfp_params, lfp_blocksize, "
        "lfp_compare, sfp_noise, custom); lfp kinds also require 'm' and 'n'");
  }

  ExperimentConfig cfg;
  const std::string kind_name = get_string(j, "experiment", "");
  const auto kind_it = kind_names().find(kind_name);
  if (kind_it == kind_names().end()) {
    throw ConfigError("unknown experiment kind '" + kind_name + "'");
  }
  cfg.kind = kind_it->second;

  const std::set<std::string> keys = allowed_keys(cfg.kind);
  for (const auto& item : j.items()) {
    if (!keys.count(item.key())) {
      throw ConfigError("unknown config key '" + item.key() + "' for experiment '" +
                        kind_name + "'");
    }
  }

  const bool is_lfp = cfg.kind != ExperimentKind::SfpNoise &&
                      (cfg.kind != ExperimentKind::Custom ||
                       get_string(j, "family", "lfp") == "lfp");
  if (cfg.kind == ExperimentKind::Custom) {
    cfg.family = get_string(j, "family", "lfp");
    require_one_of("family", cfg.family, {"lfp", "sfp"});
    cfg.stepsize = get_string(j, "stepsize", "exact");
    require_one_of("stepsize", cfg.stepsize, {"decmsps", "exact", "block"});
    cfg.kernel_name = get_string(j, "kernel", "elastic");
    require_one_of("kernel", cfg.kernel_name, {"elastic", "euclidean"});
    cfg.sampling = get_string(j, "sampling", "uniform");
    require_one_of("sampling", cfg.sampling, {"uniform", "partition"});
  } else if (cfg.kind == ExperimentKind::SfpNoise) {
    cfg.family = "sfp";
  }

  if (is_lfp) {
    if (!j.contains("m") || !j.contains("n")) {
      throw ConfigError("missing required key(s): lfp experiments need 'm' and 'n'");
    }
    cfg.m = static_cast<int>(get_integer(j, "m", 0));
    cfg.n = static_cast<int>(get_integer(j, "n", 0));
  } else {
    cfg.total_rows = static_cast<int>(get_integer(j, "M", 800));
    cfg.xi = static_cast<int>(get_integer(j, "xi", 10));
    cfg.n = static_cast<int>(get_integer(j, "n", 200));
    cfg.sigma = get_number(j, "sigma", 0.1);
    cfg.consistent = get_bool(j, "consistent", true);
    if (cfg.xi < 1 || cfg.total_rows < cfg.xi || cfg.total_rows % cfg.xi != 0) {
      throw ConfigError("config: 'M' must be a positive multiple of 'xi'");
    }
    cfg.m = cfg.total_rows / cfg.xi;
    if (cfg.sigma < 0.0) throw ConfigError("config key 'sigma': must be >= 0");
  }
  if (cfg.m < 1 || cfg.n < 1) {
    throw ConfigError("config: dimensions must be positive");
  }

  cfg.s = static_cast<int>(get_integer(j, "s", std::min(20, cfg.n)));
  if (cfg.s < 1 || cfg.s > cfg.n) {
    throw ConfigError("config key 's': must lie in [1, n]");
  }

  const int default_tau =
      std::min(cfg.kind == ExperimentKind::LfpParams ? 50 : 20,
               is_lfp ? cfg.m : cfg.total_rows / cfg.xi);
  cfg.tau = static_cast<int>(get_integer(j, "tau", default_tau));
  const int tau_limit = is_lfp ? cfg.m : cfg.total_rows / cfg.xi;
  if (cfg.tau < 1 || cfg.tau > tau_limit) {
    throw ConfigError("config key 'tau': must lie in [1, m]");
  }

  cfg.lambda = get_number(j, "lambda", 1.0);
  if (cfg.lambda < 0.0) throw ConfigError("config key 'lambda': must be >= 0");

  const double default_c =
      (cfg.kind == ExperimentKind::LfpBlocksize)
          ? 0.5
          : (cfg.kind == ExperimentKind::SfpNoise && !cfg.consistent ? 0.1 : 0.2);
  cfg.c = get_number(j, "c", default_c);
  cfg.gamma_b = get_number(j, "gamma_b", 100.0);
  if (!(cfg.c > 0.0) || !(cfg.gamma_b > 0.0)) {
    throw ConfigError("config keys 'c' and 'gamma_b' must be positive");
  }

  cfg.schedule = get_string(j, "schedule", "auto");
  require_one_of("schedule", cfg.schedule, {"constant", "invsqrt", "auto"});
  if (cfg.kind == ExperimentKind::LfpParams) {
    cfg.vary = get_string(j, "vary", "c");
    require_one_of("vary", cfg.vary, {"c", "gamma_b"});
  }

  cfg.trials = static_cast<int>(get_integer(j, "trials", 50));
  if (cfg.trials < 1) throw ConfigError("config key 'trials': must be >= 1");
  cfg.base_seed = static_cast<std::uint64_t>(get_integer(j, "base_seed", 1));
  cfg.max_iters = get_integer(j, "max_iters", 20000);
  if (cfg.max_iters < 1) throw ConfigError("config key 'max_iters': must be >= 1");
  cfg.tol_rel_err = get_number(j, "tol_rel_err", 1e-10);
  if (cfg.tol_rel_err < 0.0) {
    throw ConfigError("config key 'tol_rel_err': must be >= 0");
  }
  cfg.record_every = get_integer(j, "record_every", 10);
  if (cfg.record_every < 1) {
    throw ConfigError("config key 'record_every': must be >= 1");
  }
  cfg.output = get_string(j, "output", "out");
  return cfg;
}

std::string canonical_config(const ExperimentConfig& cfg) {
  json j;
  j["experiment"] = kind_to_string(cfg.kind);
  j["trials"] = cfg.trials;
  j["base_seed"] = cfg.base_seed;
  j["output"] = cfg.output;
  j["lambda"] = cfg.lambda;
  j["record_every"] = cfg.record_every;
  j["max_iters"] = cfg.max_iters;
  j["tol_rel_err"] = cfg.tol_rel_err;
  j["s"] = cfg.s;

  const bool is_lfp = cfg.kind != ExperimentKind::SfpNoise &&
                      (cfg.kind != ExperimentKind::Custom || cfg.family == "lfp");
  if (is_lfp) {
    j["m"] = cfg.m;
    j["n"] = cfg.n;
  } else {
    j["M"] = cfg.total_rows;
    j["xi"] = cfg.xi;
    j["n"] = cfg.n;
    j["sigma"] = cfg.sigma;
    j["consistent"] = cfg.consistent;
  }
  if (cfg.kind != ExperimentKind::LfpBlocksize) j["tau"] = cfg.tau;
  j["c"] = cfg.c;
  j["gamma_b"] = cfg.gamma_b;
  if (cfg.kind == ExperimentKind::LfpParams) j["vary"] = cfg.vary;
  if (cfg.kind == ExperimentKind::SfpNoise || cfg.kind == ExperimentKind::Custom) {
    j["schedule"] = cfg.schedule;
  }
  if (cfg.kind == ExperimentKind::Custom) {
    j["family"] = cfg.family;
    j["stepsize"] = cfg.stepsize;
    j["kernel"] = cfg.kernel_name;
    j["sampling"] = cfg.sampling;
  }
  return j.dump(2) + "\n";
}

std::vector<CurveSpec> build_curves(const ExperimentConfig& cfg) {
  std::vector<CurveSpec> curves;
  const Kernel elastic = Kernel::elastic_net(cfg.lambda);
  const Schedule schedule = parse_schedule(cfg.schedule, cfg.consistent);

  auto trim_number = [](double v) {
    std::string s = std::to_string(v);
    s.erase(s.find_last_not_of('0') + 1);
    if (!s.empty() && s.back() == '.') s.pop_back();
    return s;
  };

  switch (cfg.kind) {
    case ExperimentKind::LfpParams: {
      const bool vary_c = cfg.vary == "c";
      const std::vector<double> values =
          vary_c ? std::vector<double>{0.1, 0.2, 0.5, 1.0}
                 : std::vector<double>{2.0, 20.0, 50.0, 100.0};
      for (double v : values) {
        CurveSpec curve;
        curve.name = vary_c ? "decmsps_c" + trim_number(v)
                            : "decmsps_gb" + trim_number(v);
        curve.rule = StepsizeRule::decmsps(vary_c ? v : cfg.c,
                                           vary_c ? cfg.gamma_b : v,
                                           Schedule::Constant);
        curve.kernel = elastic;
        curve.tau = cfg.tau;
        curves.push_back(std::move(curve));
      }
      break;
    }
    case ExperimentKind::LfpBlocksize: {
      struct Rule {
        const char* name;
        StepsizeRule rule;
      };
      const Rule rules[] = {
          {"decmsps", StepsizeRule::decmsps(cfg.c, cfg.gamma_b, Schedule::Constant)},
          {"block", StepsizeRule::block_adaptive()},
          {"exact", StepsizeRule::exact()},
      };
      for (const Rule& r : rules) {
        std::vector<int> taus;
        for (int tau : {20, 100, 200}) {
          tau = std::min(tau, cfg.m);
          if (std::find(taus.begin(), taus.end(), tau) == taus.end()) {
            taus.push_back(tau);
          }
        }
        for (int tau : taus) {
          CurveSpec curve;
          curve.name = std::string(r.name) + "_tau" + std::to_string(tau);
          curve.rule = r.rule;
          curve.kernel = elastic;
          curve.sampling = SamplingMode::Partition;
          curve.tau = tau;
          curves.push_back(std::move(curve));
        }
        CurveSpec star;
        star.name = std::string(r.name) + "_taustar";
        star.rule = r.rule;
        star.kernel = elastic;
        star.sampling = SamplingMode::Partition;
        star.tau = 0;  // resolved per instance
        curves.push_back(std::move(star));
      }
      break;
    }
    case ExperimentKind::LfpCompare: {
      CurveSpec sbp{"sbp_block", StepsizeRule::block_adaptive(),
                    Kernel::euclidean(), SamplingMode::UniformNoReplacement,
                    cfg.tau};
      CurveSpec block{"sbbp_block", StepsizeRule::block_adaptive(), elastic,
                      SamplingMode::UniformNoReplacement, cfg.tau};
      CurveSpec exact{"sbbp_exact", StepsizeRule::exact(), elastic,
                      SamplingMode::UniformNoReplacement, cfg.tau};
      CurveSpec decmsps{"sbbp_decmsps",
                        StepsizeRule::decmsps(cfg.c, cfg.gamma_b, Schedule::Constant),
                        elastic, SamplingMode::UniformNoReplacement, cfg.tau};
      curves = {sbp, block, exact, decmsps};
      break;
    }
    case ExperimentKind::SfpNoise: {
      CurveSpec decmsps{"sbbp_decmsps",
                        StepsizeRule::decmsps(cfg.c, cfg.gamma_b, schedule),
                        elastic, SamplingMode::UniformNoReplacement, cfg.tau};
      CurveSpec exact{"sbbp_exact", StepsizeRule::exact(), elastic,
                      SamplingMode::UniformNoReplacement, cfg.tau};
      CurveSpec block{"sbbp_block", StepsizeRule::block_adaptive(), elastic,
                      SamplingMode::UniformNoReplacement, cfg.tau};
      CurveSpec single{"sbbp_exact_tau1", StepsizeRule::exact(), elastic,
                       SamplingMode::UniformNoReplacement, 1};
      curves = {decmsps, exact, block, single};
      break;
    }
    case ExperimentKind::Custom: {
      CurveSpec curve;
      curve.name = "custom";
      if (cfg.stepsize == "decmsps") {
        curve.rule = StepsizeRule::decmsps(cfg.c, cfg.gamma_b, schedule);
      } else if (cfg.stepsize == "block") {
        curve.rule = StepsizeRule::block_adaptive();
      } else {
        curve.rule = StepsizeRule::exact();
      }
      curve.kernel = cfg.kernel_name == "euclidean" ? Kernel::euclidean() : elastic;
      curve.sampling = cfg.sampling == "partition" ? SamplingMode::Partition
                                                   : SamplingMode::UniformNoReplacement;
      curve.tau = cfg.tau;
      curves.push_back(std::move(curve));
    }
  }
  return curves;
}

namespace {

struct CondensedRow {
  long k;
  double rel_error;
  double residual;
  double rel_residual;  // NaN when unavailable
};

struct CurveTrialResult {
  std::vector<CondensedRow> rows;
  long iterations = 0;
  bool converged = false;
  double seconds = 0.0;
  bool aborted = false;
  std::string error;
};

template <typename ProblemT>
CurveTrialResult run_curve(const ExperimentConfig& cfg, const CurveSpec& curve,
                           const ProblemT& problem, const Eigen::VectorXd& xhat,
                           int tau, std::uint64_t sampler_seed) {
  SolverConfig solver_cfg;
  solver_cfg.kernel = curve.kernel;
  solver_cfg.rule = curve.rule;
  solver_cfg.sampler.mode = curve.sampling;
  solver_cfg.sampler.tau = tau;
  solver_cfg.sampler.seed = sampler_seed;
  solver_cfg.max_iters = cfg.max_iters;
  solver_cfg.tol_rel_err = cfg.tol_rel_err;
  solver_cfg.record_every = cfg.record_every;

  const auto start = std::chrono::steady_clock::now();
  const RunRecord record = run(solver_cfg, problem, &xhat);
  const auto stop = std::chrono::steady_clock::now();

  CurveTrialResult result;
  result.seconds = std::chrono::duration<double>(stop - start).count();
  result.iterations = record.iterations_used;
  result.converged = record.stop_reason == StopReason::RelErr;
  result.rows.reserve(record.rows.size());
  for (const RecordRow& row : record.rows) {
    result.rows.push_back(
        {row.k, row.rel_error, row.residual, row.rel_residual});
  }
  return result;
}

std::vector<CurveTrialResult> run_trial(const ExperimentConfig& cfg,
                                        const std::vector<CurveSpec>& curves,
                                        int trial) {
  const std::uint64_t seed = cfg.base_seed + static_cast<std::uint64_t>(trial);
  std::vector<CurveTrialResult> results(curves.size());
  const bool is_lfp = cfg.kind != ExperimentKind::SfpNoise &&
                      (cfg.kind != ExperimentKind::Custom || cfg.family == "lfp");
  if (is_lfp) {
    const LfpInstance instance = gen_lfp({cfg.m, cfg.n, cfg.s, {}, seed});
    for (std::size_t ci = 0; ci < curves.size(); ++ci) {
      const int tau = curves[ci].tau > 0
                          ? curves[ci].tau
                          : optimal_block_size(instance.problem.matrix());
      results[ci] = run_curve(cfg, curves[ci], instance.problem, instance.xhat,
                              tau, seed);
    }
  } else {
    SfpSpec spec;
    spec.total_rows = cfg.total_rows;
    spec.blocks = cfg.m;
    spec.n = cfg.n;
    spec.xi = cfg.xi;
    spec.s = cfg.s;
    spec.sigma = cfg.sigma;
    spec.consistent = cfg.consistent;
    spec.seed = seed;
    const SfpInstance instance = gen_sfp(spec);
    for (std::size_t ci = 0; ci < curves.size(); ++ci) {
      const int tau = curves[ci].tau > 0 ? curves[ci].tau : 1;
      results[ci] = run_curve(cfg, curves[ci], instance.problem, instance.xhat,
                              tau, seed);
    }
  }
  return results;
}

}  // namespace

double median(std::vector<double> values) {
  if (values.empty()) {
    throw std::invalid_argument("median: empty input");
  }
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  if (values.size() % 2 == 1) return values[mid];
  return 0.5 * (values[mid - 1] + values[mid]);
}

ExperimentOutcome run_experiment(const ExperimentConfig& cfg, int threads) {
  namespace fs = std::filesystem;
  const std::vector<CurveSpec> curves = build_curves(cfg);
  fs::create_directories(cfg.output);

  std::vector<std::vector<CurveTrialResult>> all(cfg.trials);
  const int worker_count =
      threads > 0 ? threads
                  : std::max(1u, std::thread::hardware_concurrency());
  std::atomic<int> next_trial{0};
  auto worker = [&]() {
    for (;;) {
      const int trial = next_trial.fetch_add(1);
      if (trial >= cfg.trials) return;
      try {
        all[trial] = run_trial(cfg, curves, trial);
      } catch (const std::exception& err) {
        all[trial].assign(curves.size(), CurveTrialResult{});
        for (CurveTrialResult& r : all[trial]) {
          r.aborted = true;
          r.error = err.what();
        }
      }
    }
  };
  if (worker_count == 1 || cfg.trials == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < worker_count; ++w) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }

  ExperimentOutcome outcome;
  for (int trial = 0; trial < cfg.trials; ++trial) {
    if (!all[trial].empty() && all[trial].front().aborted) {
      ++outcome.aborted_trials;
      outcome.abort_messages.push_back("trial " + std::to_string(trial) + ": " +
                                       all[trial].front().error);
    }
  }

  {
    std::ofstream config_out(fs::path(cfg.output) / "config.json");
    config_out << canonical_config(cfg);
  }
  {
    std::ofstream long_out(fs::path(cfg.output) / "long.csv");
    long_out << "curve,trial,k,metric,value\n";
    for (std::size_t ci = 0; ci < curves.size(); ++ci) {
      for (int trial = 0; trial < cfg.trials; ++trial) {
        const CurveTrialResult& result = all[trial][ci];
        if (result.aborted) continue;
        for (const CondensedRow& row : result.rows) {
          long_out << curves[ci].name << ',' << trial << ',' << row.k
                   << ",rel_error," << fmt17(row.rel_error) << '\n';
          long_out << curves[ci].name << ',' << trial << ',' << row.k
                   << ",residual," << fmt17(row.residual) << '\n';
          if (!std::isnan(row.rel_residual)) {
            long_out << curves[ci].name << ',' << trial << ',' << row.k
                     << ",rel_residual," << fmt17(row.rel_residual) << '\n';
          }
        }
      }
    }
  }
  {
    std::ofstream summary(fs::path(cfg.output) / "summary.csv");
    summary << "curve,trials,converged_trials,median_iters,median_cpu_seconds\n";
    for (std::size_t ci = 0; ci < curves.size(); ++ci) {
      std::vector<double> iters;
      std::vector<double> seconds;
      int converged = 0;
      for (int trial = 0; trial < cfg.trials; ++trial) {
        const CurveTrialResult& result = all[trial][ci];
        if (result.aborted) continue;
        iters.push_back(static_cast<double>(result.iterations));
        seconds.push_back(result.seconds);
        if (result.converged) ++converged;
      }
      if (iters.empty()) continue;
      summary << curves[ci].name << ',' << iters.size() << ',' << converged
              << ',' << fmt17(median(iters)) << ',' << fmt17(median(seconds))
              << '\n';
    }
  }
  if (!outcome.abort_messages.empty()) {
    std::ofstream errors(fs::path(cfg.output) / "errors.txt");
    for (const std::string& msg : outcome.abort_messages) errors << msg << '\n';
  }
  return outcome;
}

namespace {

struct LongRow {
  std::string curve;
  int trial;
  long k;
  std::string metric;
  double value;
};

std::vector<LongRow> read_long_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("report: cannot open " + path);
  std::vector<LongRow> rows;
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    LongRow row;
    std::stringstream ss(line);
    std::string field;
    std::getline(ss, row.curve, ',');
    std::getline(ss, field, ',');
    row.trial = std::stoi(field);
    std::getline(ss, field, ',');
    row.k = std::stol(field);
    std::getline(ss, row.metric, ',');
    std::getline(ss, field, ',');
    row.value = std::stod(field);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

std::string report(const std::vector<std::string>& out_dirs) {
  namespace fs = std::filesystem;
  struct SummaryRow {
    std::string label;
    long trials;
    long converged;
    double median_iters;
    double median_cpu;
  };
  std::vector<SummaryRow> table;

  for (const std::string& dir : out_dirs) {
    // Plot data: pointwise medians over trials at each recorded k, with each
    // trial's final value carried forward past its stopping iteration.
    const auto rows = read_long_csv((fs::path(dir) / "long.csv").string());
    std::map<std::pair<std::string, std::string>,
             std::map<int, std::vector<std::pair<long, double>>>>
        series;
    for (const LongRow& row : rows) {
      series[{row.curve, row.metric}][row.trial].push_back({row.k, row.value});
    }
    fs::create_directories(fs::path(dir) / "plots");
    for (const auto& [key, trials] : series) {
      std::set<long> grid;
      for (const auto& [trial, points] : trials) {
        for (const auto& [k, value] : points) grid.insert(k);
      }
      std::ofstream plot(fs::path(dir) / "plots" /
                         (key.first + "__" + key.second + ".csv"));
      plot << "k,median_value\n";
      std::map<int, std::size_t> cursor;
      std::map<int, double> current;
      for (long k : grid) {
        std::vector<double> values;
        for (const auto& [trial, points] : trials) {
          std::size_t& at = cursor[trial];
          while (at < points.size() && points[at].first <= k) {
            current[trial] = points[at].second;
            ++at;
          }
          if (current.count(trial)) values.push_back(current[trial]);
        }
        if (values.empty()) continue;
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.17g", median(values));
        plot << k << ',' << buf << '\n';
      }
    }

    std::ifstream summary(fs::path(dir) / "summary.csv");
    if (!summary) {
      throw std::runtime_error("report: cannot open summary.csv in " + dir);
    }
    std::string line;
    std::getline(summary, line);
    while (std::getline(summary, line)) {
      if (line.empty()) continue;
      std::stringstream ss(line);
      std::string curve, field;
      SummaryRow row;
      std::getline(ss, curve, ',');
      row.label = out_dirs.size() > 1 ? dir + "/" + curve : curve;
      std::getline(ss, field, ',');
      row.trials = std::stol(field);
      std::getline(ss, field, ',');
      row.converged = std::stol(field);
      std::getline(ss, field, ',');
      row.median_iters = std::stod(field);
      std::getline(ss, field, ',');
      row.median_cpu = std::stod(field);
      table.push_back(std::move(row));
    }
  }

  std::sort(table.begin(), table.end(),
            [](const SummaryRow& a, const SummaryRow& b) { return a.label < b.label; });

  std::size_t label_width = 5;
  for (const SummaryRow& row : table) {
    label_width = std::max(label_width, row.label.size());
  }
  std::ostringstream out;
  out << std::left;
  out.width(static_cast<std::streamsize>(label_width));
  out << "curve";
  out << "  trials  converged  median_IT  median_CPU_s\n";
  for (const SummaryRow& row : table) {
    out.width(static_cast<std::streamsize>(label_width));
    out << row.label;
    char line[128];
    // "-" marks curves whose median trial did not meet the stopping criterion.
    const bool met = 2 * row.converged > row.trials;
    if (met) {
      std::snprintf(line, sizeof(line), "  %6ld  %9ld  %9.0f  %12.4f\n",
                    row.trials, row.converged, row.median_iters, row.median_cpu);
    } else {
      std::snprintf(line, sizeof(line), "  %6ld  %9ld  %9s  %12.4f\n",
                    row.trials, row.converged, "-", row.median_cpu);
    }
    out << line;
  }
  return out.str();
}

}  // namespace sbbp
