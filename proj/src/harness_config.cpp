#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "focklab/error.hpp"
#include "focklab/harness.hpp"

namespace focklab {

using nlohmann::json;

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{"hs-identity", "block-decay",   "bridge",        "berezin",   "star",
                                              "offdiag",     "counterexample", "bounds-ledger", "invariants"};
  return names;
}

namespace {

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [key, _] : obj.items())
    if (!allowed.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
}

template <class T>
void read(const json& obj, const char* key, T& out, const std::string& where) {
  if (!obj.contains(key)) return;
  const json& v = obj.at(key);
  try {
    if constexpr (std::is_same_v<T, double>) {
      if (!v.is_number()) throw ConfigError("");
      out = v.get<double>();
    } else if constexpr (std::is_same_v<T, int>) {
      if (!v.is_number_integer()) throw ConfigError("");
      out = v.get<int>();
    } else if constexpr (std::is_same_v<T, std::uint64_t>) {
      if (!v.is_number_unsigned()) throw ConfigError("");
      out = v.get<std::uint64_t>();
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) throw ConfigError("");
      out = v.get<std::string>();
    } else if constexpr (std::is_same_v<T, std::vector<double>>) {
      if (!v.is_array() || v.empty()) throw ConfigError("");
      out.clear();
      for (const json& e : v) {
        if (!e.is_number()) throw ConfigError("");
        out.push_back(e.get<double>());
      }
    } else {
      static_assert(std::is_same_v<T, std::vector<int>>);
      if (!v.is_array() || v.empty()) throw ConfigError("");
      out.clear();
      for (const json& e : v) {
        if (!e.is_number_integer()) throw ConfigError("");
        out.push_back(e.get<int>());
      }
    }
  } catch (const ConfigError&) {
    throw ConfigError(where + "." + key + ": wrong type");
  } catch (const json::exception&) {
    throw ConfigError(where + "." + key + ": value out of range");
  }
}

void require(bool ok, const std::string& msg) {
  if (!ok) throw ConfigError(msg);
}

template <class T>
bool all_of(const std::vector<T>& v, auto pred) {
  return std::all_of(v.begin(), v.end(), pred);
}

template <class T>
bool strictly_increasing(const std::vector<T>& v) {
  return std::adjacent_find(v.begin(), v.end(), [](T a, T b) { return !(a < b); }) == v.end();
}

}  // namespace

void ExperimentConfig::validate() const {
  const auto& names = experiment_names();
  require(std::find(names.begin(), names.end(), experiment) != names.end(),
          "experiment: unknown id '" + experiment + "'");
  require(n == 1, "n: only n = 1 is supported by the Weyl side and the acceptance experiments");
  require(M >= 1 && M <= 64, "schedule.M: must lie in [1, 64]");
  require(tame.r0 > 0.0 && tame.R_cap >= tame.r0 && tame.R_cap <= BlockFamily::kMaxInverseHeatR,
          "schedule: need 0 < r0 <= R_cap <= 64");
  require(tame.s > tame.r0 / std::sqrt(2.0), "schedule.s: must exceed r0 / sqrt(2)");
  require(quad.initial_resolution >= 2 && quad.max_refinements >= 0 && quad.max_refinements <= 16,
          "quadrature: initial_resolution >= 2 and 0 <= max_refinements <= 16");
  require(quad.rel_tol > 0.0 && quad.rel_tol < 1.0, "quadrature.rel_tol: must lie in (0, 1)");
  const auto positive = [](double v) { return v > 0.0; };
  require(all_of(R_values, positive) && strictly_increasing(R_values) &&
              all_of(R_values, [](double R) { return R <= 16.0; }),
          "R_values: increasing, positive, at most 16");
  require(all_of(weyl_R_values, positive) && strictly_increasing(weyl_R_values) &&
              all_of(weyl_R_values, [](double R) { return R <= BlockFamily::kMaxInverseHeatR; }),
          "weyl_R_values: increasing, positive, at most 64");
  require(strictly_increasing(N_ladder) && all_of(N_ladder, [](int N) { return N >= 1 && N <= 96; }),
          "N_ladder: increasing, in [1, 96]");
  require(strictly_increasing(grid_levels) && all_of(grid_levels, [](int l) { return l >= 0 && l <= 4; }),
          "grid_levels: increasing, in [0, 4]");
  require(berezin_N >= 1 && berezin_N <= 96, "berezin_N: must lie in [1, 96]");
  require(all_of(moments.R_values, positive) && strictly_increasing(moments.R_values) &&
              all_of(moments.R_values, [](double R) { return R <= BlockFamily::kMaxInverseHeatR; }),
          "moments.R_values: increasing, positive, at most 64");
  require(strictly_increasing(moments.N_values) &&
              all_of(moments.N_values, [](int N) { return N >= 1 && N <= 4; }),
          "moments.N_values: increasing, in [1, 4]");
  require(all_of(moments.rho_values, positive), "moments.rho_values: positive");
  require(paper_M >= 1 && paper_M <= 12, "paper.M: must lie in [1, 12]");
  require(all_of(paper_N_values, [](int N) { return N >= 1 && N <= 8; }), "paper.N_values: in [1, 8]");
  require(!out_dir.empty(), "output.dir: must not be empty");
}

ExperimentConfig parse_config(const json& j, const std::string& experiment) {
  ExperimentConfig c;
  c.experiment = experiment;
  if (const char* env = std::getenv(kOutDirEnv); env && *env) c.out_dir = env;
  reject_unknown(j, {"experiment", "n", "seed", "schedule", "quadrature", "R_values", "weyl_R_values", "N_ladder",
                     "grid_levels", "berezin_N", "moments", "paper", "output"},
                 "config");
  if (j.contains("experiment")) {
    std::string named;
    read(j, "experiment", named, "config");
    if (!experiment.empty() && named != experiment)
      throw ConfigError("config.experiment: '" + named + "' does not match the requested '" + experiment + "'");
    c.experiment = named;
  }
  read(j, "n", c.n, "config");
  read(j, "seed", c.seed, "config");
  if (j.contains("schedule")) {
    const json& s = j.at("schedule");
    reject_unknown(s, {"mode", "M", "r0", "R_cap", "s"}, "schedule");
    std::string mode = "tame";
    read(s, "mode", mode, "schedule");
    if (mode == "tame")
      c.mode = ScheduleMode::tame;
    else if (mode == "paper")
      c.mode = ScheduleMode::paper;
    else
      throw ConfigError("schedule.mode: expected 'tame' or 'paper'");
    read(s, "M", c.M, "schedule");
    read(s, "r0", c.tame.r0, "schedule");
    read(s, "R_cap", c.tame.R_cap, "schedule");
    read(s, "s", c.tame.s, "schedule");
  }
  if (j.contains("quadrature")) {
    const json& q = j.at("quadrature");
    reject_unknown(q, {"initial_resolution", "max_refinements", "rel_tol"}, "quadrature");
    read(q, "initial_resolution", c.quad.initial_resolution, "quadrature");
    read(q, "max_refinements", c.quad.max_refinements, "quadrature");
    read(q, "rel_tol", c.quad.rel_tol, "quadrature");
  }
  read(j, "R_values", c.R_values, "config");
  read(j, "weyl_R_values", c.weyl_R_values, "config");
  read(j, "N_ladder", c.N_ladder, "config");
  read(j, "grid_levels", c.grid_levels, "config");
  read(j, "berezin_N", c.berezin_N, "config");
  if (j.contains("moments")) {
    const json& m = j.at("moments");
    reject_unknown(m, {"R_values", "N_values", "rho_values"}, "moments");
    read(m, "R_values", c.moments.R_values, "moments");
    read(m, "N_values", c.moments.N_values, "moments");
    read(m, "rho_values", c.moments.rho_values, "moments");
  }
  if (j.contains("paper")) {
    const json& p = j.at("paper");
    reject_unknown(p, {"M", "N_values"}, "paper");
    read(p, "M", c.paper_M, "paper");
    read(p, "N_values", c.paper_N_values, "paper");
  }
  if (j.contains("output")) {
    const json& o = j.at("output");
    reject_unknown(o, {"dir"}, "output");
    std::string dir = c.out_dir.string();
    read(o, "dir", dir, "output");
    c.out_dir = dir;
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path, const std::string& experiment) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return parse_config(j, experiment);
}

json config_to_json(const ExperimentConfig& c) {
  return json{
      {"experiment", c.experiment},
      {"n", c.n},
      {"seed", c.seed},
      {"schedule",
       {{"mode", c.mode == ScheduleMode::tame ? "tame" : "paper"},
        {"M", c.M},
        {"r0", c.tame.r0},
        {"R_cap", c.tame.R_cap},
        {"s", c.tame.s}}},
      {"quadrature",
       {{"initial_resolution", c.quad.initial_resolution},
        {"max_refinements", c.quad.max_refinements},
        {"rel_tol", c.quad.rel_tol}}},
      {"R_values", c.R_values},
      {"weyl_R_values", c.weyl_R_values},
      {"N_ladder", c.N_ladder},
      {"grid_levels", c.grid_levels},
      {"berezin_N", c.berezin_N},
      {"moments",
       {{"R_values", c.moments.R_values}, {"N_values", c.moments.N_values}, {"rho_values", c.moments.rho_values}}},
      {"paper", {{"M", c.paper_M}, {"N_values", c.paper_N_values}}},
      {"output", {{"dir", c.out_dir.string()}}},
  };
}

}  // namespace focklab
