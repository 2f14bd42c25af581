// Command-line entry point: calibrate, detect-eval, train, eval.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "cogman/config.hpp"
#include "cogman/errors.hpp"
#include "cogman/harness.hpp"

namespace {

struct Args {
  std::string config;
  std::uint64_t seed = 0;
  int trials = -1;
  std::string baseline;
  std::string out;
  std::string checkpoint;
  std::vector<std::string> overrides;
};

int run(cogman::Scenario scenario, const Args& a, CLI::App& app) {
  using namespace cogman;
  ExperimentConfig cfg;
  if (!a.config.empty()) cfg = load_config(a.config);
  for (const std::string& kv : a.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
    set_field(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (app.count("--seed")) cfg.seed = a.seed;
  if (a.trials >= 0) cfg.trials = a.trials;
  if (!a.baseline.empty()) cfg.baseline = parse_baseline(a.baseline);
  cfg.scenario = scenario;
  cfg.finalize();

  RunOptions opts;
  if (!a.out.empty()) opts.out_dir = std::filesystem::path(a.out);
  if (!a.checkpoint.empty()) opts.checkpoint = std::filesystem::path(a.checkpoint);
  opts.log = [](const std::string& line) { std::cerr << line << '\n'; };

  const ScenarioResult res = run_scenario(cfg, opts);
  std::cout << res.summary.to_csv();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Skill-graph peg-in-hole experiments"};
  app.require_subcommand(1);
  app.fallthrough();
  Args a;
  app.add_option("--config", a.config, "flat key = value config file")->check(CLI::ExistingFile);
  app.add_option("--seed", a.seed, "master seed");
  app.add_option("--trials", a.trials, "number of trials");
  app.add_option("--baseline", a.baseline, "ours, b1, b2, b3, b4 or b5");
  app.add_option("--out", a.out, "output directory");
  app.add_option("--checkpoint", a.checkpoint, "policy checkpoint to write (train) or read (eval)");
  app.add_option("--set", a.overrides, "config override key=value (repeatable)");

  auto* calibrate = app.add_subcommand("calibrate", "collect samples, fit the camera maps, label the dataset");
  auto* detect = app.add_subcommand("detect-eval", "detector and board-pose accuracy on random scenes");
  auto* train = app.add_subcommand("train", "train a residual policy in the classroom");
  auto* eval = app.add_subcommand("eval", "semi-structured insertion trials");

  CLI11_PARSE(app, argc, argv);
  try {
    if (calibrate->parsed()) return run(cogman::Scenario::Calibrate, a, app);
    if (detect->parsed()) return run(cogman::Scenario::DetectEval, a, app);
    if (train->parsed()) return run(cogman::Scenario::TrainResidual, a, app);
    if (eval->parsed()) return run(cogman::Scenario::EvalSemiStructured, a, app);
  } catch (const cogman::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const cogman::MissingCheckpoint& e) {
    std::cerr << "missing checkpoint: " << e.what() << '\n';
    return 3;
  } catch (const cogman::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
