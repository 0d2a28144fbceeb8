#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "sbbp/harness.hpp"
#include "sbbp/instances.hpp"

namespace {

constexpr int kExitConfigError = 2;
constexpr int kExitTrialAbort = 3;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw sbbp::ConfigError("cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Instance spec for `generate`: {"family": "lfp"|"sfp", dims, "seed", ...}.
int run_generate(const std::string& spec_path, const std::string& out_path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(spec_path));
  } catch (const nlohmann::json::parse_error& err) {
    throw sbbp::ConfigError(std::string("spec parse error: ") + err.what());
  }
  if (!j.is_object() || !j.contains("family")) {
    throw sbbp::ConfigError("instance spec needs a 'family' key (lfp or sfp)");
  }
  const std::string family = j["family"].get<std::string>();
  std::ofstream out(out_path);
  if (!out) throw std::runtime_error("cannot write '" + out_path + "'");
  Eigen::VectorXd xhat;
  if (family == "lfp") {
    sbbp::LfpSpec spec;
    spec.m = j.value("m", 0);
    spec.n = j.value("n", 0);
    spec.s = j.value("s", 1);
    spec.seed = j.value("seed", 0ull);
    if (j.contains("kinds")) {
      for (char c : j["kinds"].get<std::string>()) {
        spec.kinds.push_back(c == 'E' ? sbbp::ConstraintKind::Equality
                                      : sbbp::ConstraintKind::Inequality);
      }
    }
    const sbbp::LfpInstance instance = sbbp::gen_lfp(spec);
    save_problem(out, instance.problem);
    xhat = instance.xhat;
  } else if (family == "sfp") {
    sbbp::SfpSpec spec;
    spec.total_rows = j.value("M", 0);
    spec.xi = j.value("xi", 1);
    spec.blocks = spec.xi > 0 ? spec.total_rows / spec.xi : 0;
    spec.n = j.value("n", 0);
    spec.s = j.value("s", 1);
    spec.sigma = j.value("sigma", 0.0);
    spec.consistent = j.value("consistent", true);
    spec.seed = j.value("seed", 0ull);
    const sbbp::SfpInstance instance = sbbp::gen_sfp(spec);
    save_problem(out, instance.problem);
    xhat = instance.xhat;
  } else {
    throw sbbp::ConfigError("unknown family '" + family + "'");
  }
  std::ofstream xhat_out(out_path + ".xhat");
  for (Eigen::Index i = 0; i < xhat.size(); ++i) {
    xhat_out << (i ? " " : "") << fmt17(xhat[i]);
  }
  xhat_out << '\n';
  std::cout << "wrote " << out_path << " and " << out_path << ".xhat\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SBBP experiment driver"};
  app.require_subcommand(1);

  std::string spec_path, config_path, out_path = "out";
  std::vector<std::string> report_dirs;
  int threads = 0;
  long trials_override = -1;
  long long seed_override = -1;

  CLI::App* generate = app.add_subcommand("generate", "generate a problem instance");
  generate->add_option("spec", spec_path, "instance spec (JSON)")->required();
  generate->add_option("-o,--output", out_path, "output problem file")->required();

  CLI::App* run_cmd = app.add_subcommand("run", "run an experiment config");
  run_cmd->add_option("config", config_path, "experiment config (JSON)")->required();
  run_cmd->add_option("-o,--output", out_path, "output directory (overrides config)");
  run_cmd->add_option("--seed", seed_override, "override base_seed");
  run_cmd->add_option("--trials", trials_override, "override trial count");
  run_cmd->add_option("--threads", threads, "worker threads (0 = hardware)");

  CLI::App* report_cmd = app.add_subcommand("report", "summarize experiment outputs");
  report_cmd->add_option("dirs", report_dirs, "output directories")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (generate->parsed()) {
      return run_generate(spec_path, out_path);
    }
    if (run_cmd->parsed()) {
      sbbp::ExperimentConfig config = sbbp::parse_config(read_file(config_path));
      if (run_cmd->count("-o") || run_cmd->count("--output")) {
        config.output = out_path;
      }
      if (seed_override >= 0) {
        config.base_seed = static_cast<std::uint64_t>(seed_override);
      }
      if (trials_override >= 1) config.trials = static_cast<int>(trials_override);
      const sbbp::ExperimentOutcome outcome = sbbp::run_experiment(config, threads);
      if (config.kind == sbbp::ExperimentKind::Custom ||
          outcome.aborted_trials == 0) {
        std::cout << sbbp::report({config.output});
      }
      for (const std::string& msg : outcome.abort_messages) {
        std::cerr << "aborted: " << msg << '\n';
      }
      return outcome.aborted_trials > 0 ? kExitTrialAbort : 0;
    }
    if (report_cmd->parsed()) {
      std::cout << sbbp::report(report_dirs);
      return 0;
    }
  } catch (const sbbp::ConfigError& err) {
    std::cerr << "config error: " << err.what() << '\n';
    return kExitConfigError;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return 1;
  }
  return 0;
}
