#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <fstream>

#include "doctest.h"
#include "focklab/error.hpp"
#include "focklab/harness.hpp"
#include "focklab/heat.hpp"
#include "focklab/parallel.hpp"

using namespace focklab;
using nlohmann::json;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

int cli(const std::string& args) {
  const std::string cmd = std::string(FOCKLAB_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::current_path() / "harness-scratch" / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("config: defaults and overrides") {
  const ExperimentConfig d = parse_config(json::object(), "star");
  CHECK(d.experiment == "star");
  CHECK(d.M == 5);
  CHECK(d.tame.s == 20.0);
  CHECK(d.quad.rel_tol == 1e-9);
  CHECK(d.N_ladder == std::vector<int>{16, 32, 48});

  const json j = json::parse(R"({"experiment": "star", "seed": 7, "schedule": {"M": 3, "s": 40},
                                 "moments": {"N_values": [1, 2]}, "output": {"dir": "x"}})");
  const ExperimentConfig c = parse_config(j, "star");
  CHECK(c.seed == 7);
  CHECK(c.M == 3);
  CHECK(c.tame.s == 40.0);
  CHECK(c.tame.r0 == 4.0);
  CHECK(c.moments.N_values == std::vector<int>{1, 2});
  CHECK(c.out_dir == "x");
  // the echoed config parses back to itself
  CHECK(config_to_json(parse_config(config_to_json(c), "star")) == config_to_json(c));
}

TEST_CASE("config: schema violations are ConfigError") {
  for (const char* text : {
           R"({"bogus": 1})",
           R"({"schedule": {"M": "five"}})",
           R"({"schedule": {"mode": "wild"}})",
           R"({"schedule": {"s": 2.0}})",
           R"({"n": 2})",
           R"({"R_values": [4, 2]})",
           R"({"R_values": [32]})",
           R"({"N_ladder": []})",
           R"({"grid_levels": [0, 9]})",
           R"({"quadrature": {"rel_tol": 0}})",
           R"({"moments": {"N_values": [5]}})",
           R"({"seed": -1})",
           R"({"experiment": "bridge"})",
           R"([1, 2])",
       })
    CHECK_THROWS_AS(parse_config(json::parse(text), "star"), ConfigError);
  CHECK_THROWS_AS(parse_config(json::object(), "nonsense"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/config.json", "star"), ConfigError);
}

TEST_CASE("config: output directory from the environment") {
  ::setenv(kOutDirEnv, "from-env", 1);
  CHECK(parse_config(json::object(), "star").out_dir == "from-env");
  CHECK(parse_config(json::parse(R"({"output": {"dir": "from-config"}})"), "star").out_dir == "from-config");
  ::unsetenv(kOutDirEnv);
  CHECK(parse_config(json::object(), "star").out_dir == "focklab-out");
}

TEST_CASE("report: RFC 4180 quoting and round-trip doubles") {
  Report r;
  r.experiment = "t";
  r.columns = {"a", "b", "c", "d"};
  r.add_row({std::string("x,y"), 0.1, 42LL, true});
  r.add_row({std::string("say \"hi\""), 1.0 / 3.0, -1LL, false});
  r.add_row({std::string("two\nlines"), std::nan(""), 0LL, false});
  CHECK_THROWS_AS(r.add_row({1.0}), std::logic_error);
  const std::string csv = to_csv(r);
  CHECK(csv ==
        "a,b,c,d\r\n"
        "\"x,y\",0.1,42,true\r\n"
        "\"say \"\"hi\"\"\",0.3333333333333333,-1,false\r\n"
        "\"two\nlines\",nan,0,false\r\n");
  CHECK(std::stod("0.3333333333333333") == 1.0 / 3.0);
  CHECK(r.pass());
  r.add_contract("c1", true, 0.5);
  r.add_contract("c2", false, -0.1, "broken");
  CHECK_FALSE(r.pass());
  const json s = summary_json(r, parse_config(json::object(), "star"));
  CHECK(s.at("pass") == false);
  CHECK(s.at("contracts").size() == 2);
  CHECK(s.at("contracts")[1].at("margin") == -0.1);
  CHECK(s.at("fingerprint").contains("compiler"));
  CHECK(s.at("fingerprint").contains("fft"));
}

TEST_CASE("sum_symbol: single block, linearity, paper refusal") {
  static const BlockFamily fam;
  const auto sch = BlockSchedule::tame(3);
  const Symbol s1 = sum_symbol(fam, sch, 1);
  const Symbol g1 = block_symbol(fam, sch, 1);
  for (const Point& z : {Point{20.0, 0.0}, Point{20.3, -0.2}, Point{0.0, 0.0}}) CHECK(s1(z) == g1(z));
  const Symbol s3 = sum_symbol(fam, sch, 3);
  const Point z{40.1, 0.05};
  cplx direct{};
  for (int m = 1; m <= 3; ++m) direct += block_symbol(fam, sch, m)(z);
  CHECK(std::abs(s3(z) - direct) <= 1e-12 * std::abs(direct));
  CHECK_THROWS_AS(sum_symbol(fam, BlockSchedule::paper(3), 2), BudgetError);
  CHECK_THROWS_AS(sum_symbol(fam, sch, 4), std::out_of_range);
}

TEST_CASE("run: paper schedules are refused where numbers are needed") {
  ExperimentConfig c = parse_config(json::parse(R"({"schedule": {"mode": "paper"}})"), "counterexample");
  CHECK_THROWS_AS(run_experiment(c), BudgetError);
  c.experiment = "offdiag";
  CHECK_THROWS_AS(run_experiment(c), BudgetError);
  // star in paper mode reports symbolic rows only
  c.experiment = "star";
  const Report r = run_experiment(c);
  CHECK(r.pass());
  for (const auto& row : r.rows) {
    CHECK(std::get<std::string>(row[0]) == "paper");
    CHECK(std::get<bool>(row[11]));
  }
}

TEST_CASE("run: output does not depend on the thread count") {
  ExperimentConfig c = parse_config(json::parse(R"({"R_values": [1, 2]})"), "hs-identity");
  set_thread_count(1);
  const std::string one = to_csv(run_experiment(c));
  set_thread_count(3);
  const std::string three = to_csv(run_experiment(c));
  set_thread_count(1);
  CHECK(one == three);
}

TEST_CASE("cli: exit codes") {
  const auto dir = scratch("cli");
  CHECK(cli("offdiag --out " + dir.string()) == kExitPass);
  CHECK(std::filesystem::exists(dir / "offdiag.csv"));
  const json summary = json::parse(slurp(dir / "offdiag.json"));
  CHECK(summary.at("pass") == true);
  CHECK(summary.at("rows") == 5);

  // a spacing too tight for the off-diagonal ledger is a contract violation
  {
    std::ofstream(dir / "tight.json") << R"({"schedule": {"r0": 1, "R_cap": 1, "s": 1}})";
  }
  CHECK(cli("offdiag --config " + (dir / "tight.json").string() + " --out " + (dir / "tight").string()) == kExitContract);

  {
    std::ofstream(dir / "bad.json") << R"({"schedule": {"M": 0}})";
  }
  CHECK(cli("offdiag --config " + (dir / "bad.json").string()) == kExitConfig);
  CHECK(cli("no-such-experiment") == kExitConfig);

  {
    std::ofstream(dir / "paper.json") << R"({"schedule": {"mode": "paper"}})";
  }
  CHECK(cli("counterexample --config " + (dir / "paper.json").string() + " --out " + dir.string()) == kExitBudget);

  CHECK(cli("offdiag --seed 99 --threads 2 --out " + (dir / "b").string()) == kExitPass);
  CHECK(slurp(dir / "b" / "offdiag.csv") == slurp(dir / "offdiag.csv"));
}

TEST_CASE("published schema matches the parser defaults") {
  const json schema = json::parse(slurp(std::filesystem::path(FOCKLAB_DOCS) / "config.schema.json"));
  const json echo = config_to_json(parse_config(json::object(), "star"));
  const json& props = schema.at("properties");
  CHECK(props.size() == echo.size());
  for (const auto& [key, value] : echo.items()) {
    REQUIRE_MESSAGE(props.contains(key), key);
    if (key == "experiment" || key == "output") continue;
    const json& p = props.at(key);
    if (p.contains("default")) {
      CHECK_MESSAGE(p.at("default") == value, key);
    } else {
      for (const auto& [sub, v] : value.items()) CHECK_MESSAGE(p.at("properties").at(sub).at("default") == v, sub);
    }
  }
}
