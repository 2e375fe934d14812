// focklab <experiment> --config <path> [--out <dir>] [--seed <u64>] [--threads <k>]

#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>

#include "focklab/error.hpp"
#include "focklab/harness.hpp"
#include "focklab/parallel.hpp"

using namespace focklab;

int main(int argc, char** argv) {
  CLI::App app{"Bargmann-Fock block experiments"};
  std::string experiment;
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  app.add_option("experiment", experiment, "Experiment id")->required()->check(CLI::IsMember(experiment_names()));
  app.add_option("--config", config_path, "JSON config; omitted keys keep their defaults")
      ->check(CLI::ExistingFile);
  auto* out_opt = app.add_option("--out", out_dir, std::string("Output directory (default: config output.dir, else $") +
                                                       kOutDirEnv + ", else focklab-out)");
  auto* seed_opt = app.add_option("--seed", seed, "Seed for sampled-point corpora");
  app.add_option("--threads", threads, "Worker threads")->check(CLI::Range(1u, 1024u));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitPass : kExitConfig;
  }

  try {
    ExperimentConfig cfg = config_path.empty() ? parse_config(nlohmann::json::object(), experiment)
                                               : load_config(config_path, experiment);
    if (*out_opt) cfg.out_dir = out_dir;
    if (*seed_opt) cfg.seed = seed;
    cfg.validate();
    set_thread_count(threads);

    const Report report = run_experiment(cfg);
    const auto csv = write_report(report, cfg);
    for (const Contract& c : report.contracts)
      std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << " margin=" << c.margin << "  " << c.detail << '\n';
    std::cout << report.rows.size() << " rows -> " << csv.string() << '\n';
    return report.pass() ? kExitPass : kExitContract;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const BudgetError& e) {
    std::cerr << "budget refusal: " << e.what() << '\n';
    return kExitBudget;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitContract;
  }
}
