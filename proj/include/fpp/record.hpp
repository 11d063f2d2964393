#pragma once

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "fpp/stats.hpp"

// Persisted experiment measurements: JSON-lines as the source of truth,
// TSV as a derived plot-ready export.

namespace fpp {

using Json = nlohmann::json;

struct ExperimentRecord {
  std::string experiment;
  std::string config_hash;
  int d = 2;
  std::string dist;
  std::uint64_t seed = 0;
  std::string grid_key;    // n | t | m | lambda | direction | i
  double grid_value = 0.0;
  std::string stat;
  double value = 0.0;
  stats::Interval ci;
  bool certified = true;
  Json aux = Json::object();
  std::string timestamp;

  // everything except the timestamp; the determinism contract compares this
  Json payload() const {
    Json j;
    j["experiment"] = experiment;
    j["config_hash"] = config_hash;
    j["d"] = d;
    j["dist"] = dist;
    j["seed"] = seed;
    j["grid_key"] = grid_key;
    j["grid_value"] = grid_value;
    j["stat"] = stat;
    j["value"] = value;
    j["ci"] = {ci.lo, ci.hi};
    j["certified"] = certified;
    j["aux"] = aux;
    return j;
  }

  Json to_json() const {
    Json j = payload();
    j["timestamp"] = timestamp;
    return j;
  }

  static ExperimentRecord from_json(const Json& j) {
    ExperimentRecord r;
    r.experiment = j.at("experiment").get<std::string>();
    r.config_hash = j.at("config_hash").get<std::string>();
    r.d = j.at("d").get<int>();
    r.dist = j.at("dist").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.grid_key = j.at("grid_key").get<std::string>();
    r.grid_value = j.at("grid_value").get<double>();
    r.stat = j.at("stat").get<std::string>();
    r.value = j.at("value").get<double>();
    r.ci = {j.at("ci")[0].get<double>(), j.at("ci")[1].get<double>()};
    r.certified = j.at("certified").get<bool>();
    r.aux = j.value("aux", Json::object());
    r.timestamp = j.value("timestamp", "");
    return r;
  }
};

inline std::string iso_timestamp() {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%FT%TZ");
  return os.str();
}

inline void write_jsonl(const std::vector<ExperimentRecord>& records, std::ostream& out) {
  for (const auto& r : records) out << r.to_json().dump() << "\n";
}

inline void write_jsonl_file(const std::vector<ExperimentRecord>& records,
                             const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("records: cannot write " + path);
  write_jsonl(records, out);
}

inline std::vector<ExperimentRecord> read_jsonl(std::istream& in) {
  std::vector<ExperimentRecord> records;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    records.push_back(ExperimentRecord::from_json(Json::parse(line)));
  }
  return records;
}

inline std::vector<ExperimentRecord> read_jsonl_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("records: cannot read " + path);
  return read_jsonl(in);
}

// Tab-separated export. Kinds:
//   tail    -> t, t_squared, log_p, ci_lo, ci_hi (tail-probability records)
//   shape   -> direction_angle, t, radius        (directional radius records)
//   generic -> grid_key, grid_value, stat, value, ci_lo, ci_hi
inline void emit_plot_data(const std::vector<ExperimentRecord>& records, const std::string& kind,
                           std::ostream& out) {
  for (const auto& r : records)
    if (r.experiment != records.front().experiment)
      throw std::invalid_argument("emit_plot_data: mixed-experiment input");
  out.precision(17);
  if (kind == "tail") {
    out << "t\tt_squared\tlog_p\tci_lo\tci_hi\n";
    for (const auto& r : records) {
      if (r.stat != "tail_prob") continue;
      double t = r.grid_value;
      double logp = r.value > 0 ? std::log(r.value) : -std::numeric_limits<double>::infinity();
      out << t << "\t" << t * t << "\t" << logp << "\t" << r.ci.lo << "\t" << r.ci.hi << "\n";
    }
  } else if (kind == "shape") {
    out << "direction_angle\tt\tradius\n";
    for (const auto& r : records) {
      if (r.stat != "radius") continue;
      out << r.aux.value("angle", 0.0) << "\t" << r.grid_value << "\t" << r.value << "\n";
    }
  } else if (kind == "generic") {
    out << "grid_key\tgrid_value\tstat\tvalue\tci_lo\tci_hi\n";
    for (const auto& r : records)
      out << r.grid_key << "\t" << r.grid_value << "\t" << r.stat << "\t" << r.value << "\t"
          << r.ci.lo << "\t" << r.ci.hi << "\n";
  } else {
    throw std::invalid_argument("emit_plot_data: unknown kind '" + kind + "'");
  }
}

}  // namespace fpp
