// Runs every acceptance criterion through the harness with default
// configuration and prints one PASS/FAIL line per criterion.

#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <fstream>
#include <sstream>

#include "focklab/harness.hpp"

using namespace focklab;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

class Runner {
 public:
  explicit Runner(std::filesystem::path out) : out_(std::move(out)) {}

  const Report& get(const std::string& experiment) {
    auto it = reports_.find(experiment);
    if (it != reports_.end()) return it->second;
    ExperimentConfig c = parse_config(nlohmann::json::object(), experiment);
    c.out_dir = out_;
    Report r = run_experiment(c);
    write_report(r, c);
    return reports_.emplace(experiment, std::move(r)).first->second;
  }

  const std::filesystem::path& out() const { return out_; }

 private:
  std::filesystem::path out_;
  std::map<std::string, Report> reports_;
};

Outcome contracts(const Report& r, std::initializer_list<const char*> names) {
  Outcome o;
  std::ostringstream os;
  os.precision(8);
  for (const char* name : names) {
    const Contract* hit = nullptr;
    for (const Contract& c : r.contracts)
      if (c.name == name) hit = &c;
    if (!hit) {
      o.pass = false;
      os << name << "=missing ";
      continue;
    }
    o.pass = o.pass && hit->pass;
    os << name << (hit->pass ? " ok" : " VIOLATED") << " (margin " << hit->margin << ") ";
  }
  o.detail = r.experiment + ": " + os.str();
  return o;
}

Outcome determinism(const std::filesystem::path& out) {
  Outcome o;
  int identical = 0;
  for (const std::string& e : experiment_names()) {
    std::string csv[2];
    for (int k = 0; k < 2; ++k) {
      ExperimentConfig c = parse_config(nlohmann::json::object(), e);
      c.out_dir = out / ("determinism-" + std::to_string(k));
      const auto path = write_report(run_experiment(c), c);
      std::ifstream in(path, std::ios::binary);
      csv[k].assign(std::istreambuf_iterator<char>(in), {});
    }
    if (csv[0] == csv[1] && !csv[0].empty())
      ++identical;
    else {
      o.pass = false;
      o.detail += e + " differs; ";
    }
  }
  o.detail += std::to_string(identical) + "/" + std::to_string(experiment_names().size()) +
              " experiments byte-identical across two runs";
  return o;
}

}  // namespace

int main() {
  Runner run("acceptance-out");
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"Hilbert-Schmidt identity", [&] { return contracts(run.get("hs-identity"), {"hs_identity_finest"}); }},
      {"block envelope",
       [&] {
         return contracts(run.get("block-decay"), {"toeplitz_envelope", "compression_monotone", "weyl_envelope"});
       }},
      {"bridge agreement", [&] { return contracts(run.get("bridge"), {"bridge_agreement"}); }},
      {"borderline round trip",
       [&] { return contracts(run.get("invariants"), {"heat_round_trip", "anchor_center", "anchor_sup"}); }},
      {"Berezin consistency",
       [&] { return contracts(run.get("berezin"), {"berezin_paths_agree", "norm_dominates"}); }},
      {"heat-quarter bound",
       [&] {
         const Report& r = run.get("invariants");
         Outcome o = contracts(r, {"heat_quarter_bound"});
         const int pairs = r.extra.value("quarter_bound_pairs", 0);
         o.pass = o.pass && pairs >= 20;
         o.detail += "pairs=" + std::to_string(pairs);
         return o;
       }},
      {"peak ledger", [&] { return contracts(run.get("invariants"), {"peaks"}); }},
      {"off-diagonal ledger",
       [&] { return contracts(run.get("offdiag"), {"offdiag_below_half", "offdiag_decreases_with_spacing"}); }},
      {"star evidence",
       [&] {
         return contracts(run.get("star"),
                          {"star_ratio_past_m2", "paper_exponent_negative", "paper_exponent_decreasing"});
       }},
      {"counterexample demonstration",
       [&] {
         return contracts(run.get("counterexample"),
                          {"peak_at_last_center", "norm_sum_bound", "ratio_monotone", "heat_linearity"});
       }},
      {"Chebyshev and moment ledger",
       [&] { return contracts(run.get("bounds-ledger"), {"chebyshev", "moment_envelope"}); }},
      {"determinism", [&] { return determinism(run.out()); }},
  };

  int passed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = Outcome{false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    passed += o.pass;
    std::printf("criterion %2zu %s  %-30s %6.1fs  %s\n", k + 1, o.pass ? "PASS" : "FAIL", criteria[k].first.c_str(),
                secs, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("acceptance: %d/%zu criteria pass\n", passed, criteria.size());
  return passed == static_cast<int>(criteria.size()) ? 0 : 1;
}
