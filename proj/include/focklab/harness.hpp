#pragma once

// Experiment orchestration: configuration, the nine experiments, and report
// emission (CSV rows plus a JSON summary).

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "focklab/blocks.hpp"

namespace focklab {

enum ExitCode : int { kExitPass = 0, kExitContract = 1, kExitConfig = 2, kExitBudget = 3 };

/// Environment variable naming the default output directory.
inline constexpr const char* kOutDirEnv = "FOCKLAB_OUT_DIR";

const std::vector<std::string>& experiment_names();

struct MomentConfig {
  std::vector<double> R_values{1.0, 2.0, 4.0};
  std::vector<int> N_values{1, 2, 3, 4};
  std::vector<double> rho_values{0.5, 1.0, 2.0};
};

struct ExperimentConfig {
  std::string experiment;
  int n = 1;
  std::uint64_t seed = 20240601;
  ScheduleMode mode = ScheduleMode::tame;
  int M = 5;
  TameParams tame;
  AdaptiveSpec quad{16, 8, 1e-9};
  std::vector<double> R_values{1.0, 2.0, 4.0, 8.0};
  std::vector<double> weyl_R_values{1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0};
  std::vector<int> N_ladder{16, 32, 48};
  std::vector<int> grid_levels{0, 1, 2};
  int berezin_N = 48;
  MomentConfig moments;
  int paper_M = 6;
  std::vector<int> paper_N_values{1, 2, 3};
  std::filesystem::path out_dir = "focklab-out";

  void validate() const;
};

/// Parses one JSON document. Unknown keys, wrong types and out-of-range
/// values raise ConfigError. Missing keys keep their defaults.
ExperimentConfig parse_config(const nlohmann::json& j, const std::string& experiment);
ExperimentConfig load_config(const std::filesystem::path& path, const std::string& experiment);
nlohmann::json config_to_json(const ExperimentConfig& c);

using Cell = std::variant<std::string, double, long long, bool>;

struct Contract {
  std::string name;
  bool pass = false;
  /// Signed slack of the asserted inequality (positive when it holds).
  double margin = 0.0;
  std::string detail;
};

struct Report {
  std::string experiment;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  std::vector<Contract> contracts;
  nlohmann::json extra = nlohmann::json::object();

  bool pass() const;
  void add_row(std::vector<Cell> row);
  void add_contract(std::string name, bool pass, double margin, std::string detail = {});
};

/// RFC 4180 CSV; doubles in shortest round-trip form.
std::string to_csv(const Report& r);
nlohmann::json summary_json(const Report& r, const ExperimentConfig& c);
/// Writes <out>/<experiment>.csv and <out>/<experiment>.json; returns the CSV path.
std::filesystem::path write_report(const Report& r, const ExperimentConfig& c);

/// sum_{m <= M} g_m; refuses paper schedules.
Symbol sum_symbol(const BlockFamily& family, const BlockSchedule& schedule, int M);

/// Runs one experiment. Throws ConfigError or BudgetError on refusal.
Report run_experiment(const ExperimentConfig& c);

}  // namespace focklab
