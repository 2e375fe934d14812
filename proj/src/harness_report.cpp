#include <Eigen/Core>
#include <boost/version.hpp>
#include <charconv>
#include <cmath>
#include <fstream>

#include "focklab/harness.hpp"
#include "focklab/weyl.hpp"

#ifndef FOCKLAB_VERSION
#define FOCKLAB_VERSION "unknown"
#endif

namespace focklab {

using nlohmann::json;

bool Report::pass() const {
  return std::all_of(contracts.begin(), contracts.end(), [](const Contract& c) { return c.pass; });
}

void Report::add_row(std::vector<Cell> row) {
  if (row.size() != columns.size())
    throw std::logic_error(experiment + ": row has " + std::to_string(row.size()) + " cells, expected " +
                           std::to_string(columns.size()));
  rows.push_back(std::move(row));
}

void Report::add_contract(std::string name, bool ok, double margin, std::string detail) {
  contracts.push_back(Contract{std::move(name), ok, margin, std::move(detail)});
}

namespace {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

std::string format_cell(const Cell& c) {
  if (auto s = std::get_if<std::string>(&c)) return *s;
  if (auto d = std::get_if<double>(&c)) return format_double(*d);
  if (auto i = std::get_if<long long>(&c)) return std::to_string(*i);
  return std::get<bool>(c) ? "true" : "false";
}

std::string quote(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char ch : field) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + '"';
}

void append_line(std::string& out, const std::vector<std::string>& fields) {
  for (std::size_t k = 0; k < fields.size(); ++k) {
    if (k) out += ',';
    out += quote(fields[k]);
  }
  out += "\r\n";
}

json fingerprint() {
  return json{{"focklab", FOCKLAB_VERSION},
              {"compiler", __VERSION__},
              {"cplusplus", static_cast<long long>(__cplusplus)},
#ifdef NDEBUG
              {"assertions", false},
#else
              {"assertions", true},
#endif
              {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                            std::to_string(EIGEN_MINOR_VERSION)},
              {"boost", BOOST_LIB_VERSION},
              {"fft", fft_backend_version()}};
}

json margin_json(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);
}

}  // namespace

std::string to_csv(const Report& r) {
  std::string out;
  append_line(out, r.columns);
  for (const auto& row : r.rows) {
    std::vector<std::string> fields;
    fields.reserve(row.size());
    for (const Cell& c : row) fields.push_back(format_cell(c));
    append_line(out, fields);
  }
  return out;
}

json summary_json(const Report& r, const ExperimentConfig& c) {
  json contracts = json::array();
  for (const Contract& k : r.contracts)
    contracts.push_back({{"name", k.name}, {"pass", k.pass}, {"margin", margin_json(k.margin)}, {"detail", k.detail}});
  return json{{"experiment", r.experiment},
              {"pass", r.pass()},
              {"contracts", contracts},
              {"columns", r.columns},
              {"rows", r.rows.size()},
              {"csv", r.experiment + ".csv"},
              {"extra", r.extra},
              {"config", config_to_json(c)},
              {"fingerprint", fingerprint()}};
}

std::filesystem::path write_report(const Report& r, const ExperimentConfig& c) {
  std::filesystem::create_directories(c.out_dir);
  const auto csv_path = c.out_dir / (r.experiment + ".csv");
  const auto json_path = c.out_dir / (r.experiment + ".json");
  {
    std::ofstream out(csv_path, std::ios::binary);
    out << to_csv(r);
    if (!out) throw std::runtime_error("cannot write " + csv_path.string());
  }
  {
    std::ofstream out(json_path, std::ios::binary);
    out << summary_json(r, c).dump(2) << '\n';
    if (!out) throw std::runtime_error("cannot write " + json_path.string());
  }
  return csv_path;
}

}  // namespace focklab
