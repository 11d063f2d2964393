#pragma once

#include <cctype>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "fpp/rng.hpp"
#include "fpp/weights.hpp"

// Experiment configuration: flat key/value text with [section] headers,
// UTF-8, booleans as true/false, grids as comma lists. Parsing and
// serialization round-trip to a canonical form.

namespace fpp {

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

template <class T>
std::vector<T> parse_list(const std::string& s) {
  std::vector<T> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    std::stringstream conv(item);
    T v;
    conv >> v;
    if (conv.fail()) throw std::invalid_argument("config: bad list item '" + item + "'");
    out.push_back(v);
  }
  return out;
}

template <class T>
std::string format_list(const std::vector<T>& xs) {
  std::ostringstream os;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) os << ",";
    os << xs[i];
  }
  return os.str();
}

}  // namespace detail

// section.key -> value
using KeyValues = std::map<std::string, std::string>;

inline KeyValues parse_key_values(std::istream& in) {
  KeyValues kv;
  std::string line, section;
  while (std::getline(in, line)) {
    line = detail::trim(line);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line.front() == '[' && line.back() == ']') {
      section = detail::trim(line.substr(1, line.size() - 2));
      continue;
    }
    std::size_t eq = line.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("config: expected key = value: " + line);
    std::string key = detail::trim(line.substr(0, eq));
    std::string value = detail::trim(line.substr(eq + 1));
    kv[section.empty() ? key : section + "." + key] = value;
  }
  return kv;
}

struct ExperimentConfig {
  std::string name;
  int d = 2;
  std::uint64_t seed = 1;
  int workers = 1;
  std::string output = "records.jsonl";
  bool force = false;

  Distribution dist = Distribution::exponential(1.0);

  std::vector<long long> n_grid;
  std::vector<long long> m_grid;
  std::vector<double> t_grid;
  std::vector<double> lambda_grid = {-1.0, -0.5, -0.1, -0.01};
  std::vector<int> direction = {1, 0};
  int fan = 8;
  int samples = 1000;
  int window_cap = 4096;
  double threshold_a = 0.2;
  double c7 = 1.0;
  double alpha_phi = 0.5;
};

inline Distribution parse_distribution(const KeyValues& kv) {
  auto get = [&](const std::string& key, const std::string& fallback) {
    auto it = kv.find("distribution." + key);
    return it != kv.end() ? it->second : fallback;
  };
  std::string kind = get("kind", "");
  if (kind == "constant") return Distribution::constant(std::stod(get("a", "1")));
  if (kind == "atom-mixture")
    return Distribution::atom_mixture(std::stod(get("p0", "0")), std::stod(get("a", "1")));
  if (kind == "uniform")
    return Distribution::uniform(std::stod(get("lo", "0")), std::stod(get("hi", "1")));
  if (kind == "exponential") return Distribution::exponential(std::stod(get("rate", "1")));
  if (kind == "pareto")
    return Distribution::pareto(std::stod(get("alpha", "2")), std::stod(get("scale", "1")));
  if (kind == "finite-discrete") {
    auto values = detail::parse_list<double>(get("values", ""));
    auto probs = detail::parse_list<double>(get("probs", ""));
    if (values.size() != probs.size() || values.empty())
      throw std::invalid_argument("config: finite-discrete needs matching values/probs");
    return Distribution::finite_discrete(values, probs);
  }
  throw std::invalid_argument("config: unknown distribution kind '" + kind + "'");
}

inline ExperimentConfig parse_config(std::istream& in) {
  KeyValues kv = parse_key_values(in);
  ExperimentConfig cfg;
  auto get = [&](const std::string& key) -> const std::string* {
    auto it = kv.find(key);
    return it != kv.end() ? &it->second : nullptr;
  };
  if (const auto* v = get("experiment.name")) cfg.name = *v;
  if (cfg.name.empty()) throw std::invalid_argument("config: experiment.name is required");
  if (const auto* v = get("experiment.d")) cfg.d = std::stoi(*v);
  if (const auto* v = get("experiment.seed")) cfg.seed = std::stoull(*v);
  if (const auto* v = get("experiment.workers")) cfg.workers = std::stoi(*v);
  if (const auto* v = get("experiment.output")) cfg.output = *v;
  if (const auto* v = get("experiment.force")) cfg.force = (*v == "true");
  cfg.dist = parse_distribution(kv);
  if (const auto* v = get("grids.n")) cfg.n_grid = detail::parse_list<long long>(*v);
  if (const auto* v = get("grids.m")) cfg.m_grid = detail::parse_list<long long>(*v);
  if (const auto* v = get("grids.t")) cfg.t_grid = detail::parse_list<double>(*v);
  if (const auto* v = get("grids.lambda")) cfg.lambda_grid = detail::parse_list<double>(*v);
  if (const auto* v = get("grids.direction")) cfg.direction = detail::parse_list<int>(*v);
  if (const auto* v = get("grids.fan")) cfg.fan = std::stoi(*v);
  if (const auto* v = get("grids.samples")) cfg.samples = std::stoi(*v);
  if (const auto* v = get("grids.window_cap")) cfg.window_cap = std::stoi(*v);
  if (const auto* v = get("grids.threshold_a")) cfg.threshold_a = std::stod(*v);
  if (const auto* v = get("grids.c7")) cfg.c7 = std::stod(*v);
  if (const auto* v = get("grids.alpha_phi")) cfg.alpha_phi = std::stod(*v);
  if (cfg.d < 2) throw std::invalid_argument("config: d >= 2 required");
  if (static_cast<int>(cfg.direction.size()) != cfg.d)
    throw std::invalid_argument("config: direction length must equal d");
  return cfg;
}

inline ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot read " + path);
  return parse_config(in);
}

inline std::string serialize_distribution(const Distribution& d) {
  std::ostringstream os;
  os.precision(17);
  os << "[distribution]\n";
  switch (d.kind) {
    case DistKind::Constant:
      os << "kind = constant\na = " << d.a << "\n";
      break;
    case DistKind::AtomMixture:
      os << "kind = atom-mixture\np0 = " << d.p0 << "\na = " << d.a << "\n";
      break;
    case DistKind::FiniteDiscrete:
      os << "kind = finite-discrete\nvalues = " << detail::format_list(d.values)
         << "\nprobs = " << detail::format_list(d.probs) << "\n";
      break;
    case DistKind::Uniform:
      os << "kind = uniform\nlo = " << d.lo << "\nhi = " << d.hi << "\n";
      break;
    case DistKind::Exponential:
      os << "kind = exponential\nrate = " << d.rate << "\n";
      break;
    case DistKind::Pareto:
      os << "kind = pareto\nalpha = " << d.alpha << "\nscale = " << d.scale << "\n";
      break;
  }
  return os.str();
}

inline std::string serialize_config(const ExperimentConfig& cfg) {
  std::ostringstream os;
  os.precision(17);
  os << "[experiment]\n";
  os << "name = " << cfg.name << "\n";
  os << "d = " << cfg.d << "\n";
  os << "seed = " << cfg.seed << "\n";
  os << "workers = " << cfg.workers << "\n";
  os << "output = " << cfg.output << "\n";
  os << "force = " << (cfg.force ? "true" : "false") << "\n";
  os << serialize_distribution(cfg.dist);
  os << "[grids]\n";
  if (!cfg.n_grid.empty()) os << "n = " << detail::format_list(cfg.n_grid) << "\n";
  if (!cfg.m_grid.empty()) os << "m = " << detail::format_list(cfg.m_grid) << "\n";
  if (!cfg.t_grid.empty()) os << "t = " << detail::format_list(cfg.t_grid) << "\n";
  os << "lambda = " << detail::format_list(cfg.lambda_grid) << "\n";
  os << "direction = " << detail::format_list(cfg.direction) << "\n";
  os << "fan = " << cfg.fan << "\n";
  os << "samples = " << cfg.samples << "\n";
  os << "window_cap = " << cfg.window_cap << "\n";
  os << "threshold_a = " << cfg.threshold_a << "\n";
  os << "c7 = " << cfg.c7 << "\n";
  os << "alpha_phi = " << cfg.alpha_phi << "\n";
  return os.str();
}

// Seed-invariant identity of a run; workers and output path deliberately
// excluded so the same science with different scheduling hashes identically.
inline std::string config_hash(const ExperimentConfig& cfg) {
  ExperimentConfig c = cfg;
  c.workers = 1;
  c.output = "";
  std::string s = serialize_config(c);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) h = (h ^ ch) * 0x100000001b3ULL;
  std::ostringstream os;
  os << std::hex << h;
  return os.str();
}

}  // namespace fpp
