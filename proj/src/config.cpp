#include "fhrt/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>

namespace fhrt {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

struct Entry {
  std::string value;
  int line = 0;
};

class Reader {
 public:
  Reader(std::map<std::string, Entry> entries, std::vector<std::string>& issues)
      : entries_(std::move(entries)), issues_(issues) {}

  [[nodiscard]] bool has(const std::string& key) const { return entries_.count(key) != 0; }
  [[nodiscard]] int line(const std::string& key) const { return has(key) ? entries_.at(key).line : 0; }

  void fail(const std::string& key, const std::string& message) {
    const int l = line(key);
    issues_.push_back((l > 0 ? "line " + std::to_string(l) + ": " : std::string()) + key + ": " + message);
  }

  std::optional<std::string> text(const std::string& key) const {
    if (!has(key)) return std::nullopt;
    return entries_.at(key).value;
  }

  std::optional<double> real(const std::string& key) {
    const auto t = text(key);
    if (!t) return std::nullopt;
    char* end = nullptr;
    const double v = std::strtod(t->c_str(), &end);
    if (t->empty() || end != t->c_str() + t->size() || !std::isfinite(v)) {
      fail(key, "expected a finite number, got '" + *t + "'");
      return std::nullopt;
    }
    return v;
  }

  std::optional<long long> integer(const std::string& key) {
    const auto t = text(key);
    if (!t) return std::nullopt;
    long long v = 0;
    const auto [ptr, ec] = std::from_chars(t->data(), t->data() + t->size(), v);
    if (t->empty() || ec != std::errc() || ptr != t->data() + t->size()) {
      fail(key, "expected an integer, got '" + *t + "'");
      return std::nullopt;
    }
    return v;
  }

  std::optional<bool> boolean(const std::string& key) {
    const auto t = text(key);
    if (!t) return std::nullopt;
    if (*t == "true" || *t == "1" || *t == "yes") return true;
    if (*t == "false" || *t == "0" || *t == "no") return false;
    fail(key, "expected true or false, got '" + *t + "'");
    return std::nullopt;
  }

  std::optional<std::string> choice(const std::string& key, const std::vector<std::string>& allowed) {
    const auto t = text(key);
    if (!t) return std::nullopt;
    if (std::find(allowed.begin(), allowed.end(), *t) == allowed.end()) {
      std::string list;
      for (const auto& a : allowed) list += (list.empty() ? "" : "|") + a;
      fail(key, "expected one of " + list + ", got '" + *t + "'");
      return std::nullopt;
    }
    return t;
  }

  void require(const std::string& key) {
    if (!has(key)) issues_.push_back(key + ": required key missing");
  }

 private:
  std::map<std::string, Entry> entries_;
  std::vector<std::string>& issues_;
};

std::string join(const std::vector<std::string>& issues) {
  std::string out = "invalid configuration";
  for (const auto& i : issues) out += "\n  " + i;
  return out;
}

}  // namespace

ConfigParseError::ConfigParseError(std::vector<std::string> issues)
    : ConfigError(join(issues)), issues_(std::move(issues)) {}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys{
      "engine",       "n",           "N",          "nodes",          "L",
      "R",            "dealias",     "alpha",      "gamma",          "psi",
      "mu",           "coupling",    "mass_critical", "datum.family", "datum.amplitude",
      "datum.width",  "datum.chirp", "datum.center",  "datum.mode",   "datum.file",
      "T",            "dt0",         "dt_min",     "tol_step",       "guards.hs",
      "guards.tail",  "guards.boundary", "record_every", "out_dir",   "seed"};
  return keys;
}

ParsedConfig parse_config(const std::string& text) {
  std::vector<std::string> issues;
  std::map<std::string, Entry> entries;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      issues.push_back("line " + std::to_string(lineno) + ": expected 'key = value'");
      continue;
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto& keys = config_keys();
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      issues.push_back("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
      continue;
    }
    if (const auto it = entries.find(key); it != entries.end()) {
      issues.push_back("line " + std::to_string(lineno) + ": duplicate key '" + key + "' (first set on line " +
                       std::to_string(it->second.line) + ")");
      continue;
    }
    entries[key] = {value, lineno};
  }

  ParsedConfig out;
  for (const auto& [k, e] : entries) out.entries[k] = e.value;
  Reader rd(std::move(entries), issues);
  RunConfig& cfg = out.run;

  rd.require("engine");
  rd.require("n");
  rd.require("alpha");
  rd.require("T");
  const auto engine = rd.choice("engine", {"torus", "radial"});
  if (engine) cfg.grid.engine = *engine == "torus" ? Engine::torus : Engine::radial;
  const bool torus = !engine || *engine == "torus";
  const std::string points_key = torus ? "N" : "nodes";
  const std::string extent_key = torus ? "L" : "R";
  const std::string wrong_points = torus ? "nodes" : "N";
  const std::string wrong_extent = torus ? "R" : "L";
  if (engine) {
    rd.require(points_key);
    rd.require(extent_key);
    if (rd.has(wrong_points)) rd.fail(wrong_points, "not valid for engine " + *engine + "; use " + points_key);
    if (rd.has(wrong_extent)) rd.fail(wrong_extent, "not valid for engine " + *engine + "; use " + extent_key);
  }

  if (auto v = rd.integer("n")) {
    if (*v < 1 || *v > 16) rd.fail("n", "must lie in [1, 16]");
    else if (!torus && *v < 2) rd.fail("n", "radial engine requires n >= 2");
    else cfg.grid.n = static_cast<int>(*v);
  }
  if (auto v = rd.integer(points_key)) {
    if (*v < 2 || *v > (1 << 24)) rd.fail(points_key, "must lie in [2, 2^24]");
    else if (torus && (*v & (*v - 1)) != 0) rd.fail(points_key, "torus N must be a power of two");
    else cfg.grid.points = static_cast<int>(*v);
  }
  if (auto v = rd.real(extent_key)) {
    if (!(*v > 0.0)) rd.fail(extent_key, "must be positive");
    else cfg.grid.extent = *v;
  }
  if (auto v = rd.boolean("dealias")) cfg.grid.dealias = *v;

  if (auto v = rd.real("alpha")) {
    if (!(*v > 0.0)) rd.fail("alpha", "must be positive");
    else cfg.alpha = *v;
  }
  cfg.pot.gamma = cfg.alpha;
  if (auto v = rd.real("gamma")) cfg.pot.gamma = *v;
  if (rd.has("gamma") || rd.has("alpha")) {
    if (!(cfg.pot.gamma > 0.0) || !(cfg.pot.gamma < cfg.grid.n)) rd.fail(rd.has("gamma") ? "gamma" : "alpha", "gamma must lie in (0, n)");
  }
  if (auto v = rd.choice("psi", {"one", "exp"})) cfg.pot.psi = *v == "one" ? PsiFamily::one : PsiFamily::exponential;
  if (auto v = rd.real("mu")) {
    if (*v < 0.0) rd.fail("mu", "must be >= 0");
    else cfg.pot.mu = *v;
  }
  if (cfg.pot.psi == PsiFamily::exponential && !(cfg.pot.mu > 0.0)) rd.fail("psi", "psi = exp needs mu > 0");
  if (cfg.pot.psi == PsiFamily::one && cfg.pot.mu != 0.0) rd.fail("mu", "mu is only meaningful with psi = exp");
  if (auto v = rd.real("coupling")) cfg.pot.coupling = *v;
  if (auto v = rd.boolean("mass_critical")) {
    cfg.pot.mass_critical = *v;
    if (*v && cfg.pot.gamma != cfg.alpha) rd.fail("mass_critical", "requires gamma = alpha");
  }
  if (torus && cfg.pot.enabled() && cfg.grid.n > 3 && rd.has("n")) {
    rd.fail("n", "torus Hartree potential supports n <= 3 (set coupling = 0 for linear runs)");
  }

  if (auto v = rd.choice("datum.family", {"gaussian", "mode", "file"})) {
    cfg.datum.family = *v == "gaussian" ? DatumFamily::gaussian : (*v == "mode" ? DatumFamily::mode : DatumFamily::file);
  }
  if (auto v = rd.real("datum.amplitude")) {
    if (*v < 0.0) rd.fail("datum.amplitude", "must be >= 0");
    else cfg.datum.amplitude = *v;
  }
  if (auto v = rd.real("datum.width")) {
    if (!(*v > 0.0)) rd.fail("datum.width", "must be positive");
    else cfg.datum.width = *v;
  }
  if (auto v = rd.real("datum.chirp")) cfg.datum.chirp = *v;
  if (auto t = rd.text("datum.center")) {
    for (const auto& item : split_list(*t)) {
      char* end = nullptr;
      const double c = std::strtod(item.c_str(), &end);
      if (item.empty() || end != item.c_str() + item.size()) {
        rd.fail("datum.center", "expected comma-separated numbers");
        cfg.datum.center.clear();
        break;
      }
      cfg.datum.center.push_back(c);
    }
    if (!cfg.datum.center.empty() && torus && static_cast<int>(cfg.datum.center.size()) != cfg.grid.n) {
      rd.fail("datum.center", "needs one value per axis");
    }
    if (!torus && std::any_of(cfg.datum.center.begin(), cfg.datum.center.end(), [](double c) { return c != 0.0; })) {
      rd.fail("datum.center", "radial data must be centred at the origin");
    }
  }
  if (auto t = rd.text("datum.mode")) {
    for (const auto& item : split_list(*t)) {
      int m = 0;
      const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), m);
      if (item.empty() || ec != std::errc() || ptr != item.data() + item.size()) {
        rd.fail("datum.mode", "expected comma-separated integers");
        cfg.datum.mode.clear();
        break;
      }
      cfg.datum.mode.push_back(m);
    }
  }
  if (auto t = rd.text("datum.file")) cfg.datum.path = *t;
  if (cfg.datum.family == DatumFamily::mode) {
    if (!torus) rd.fail("datum.family", "mode datum needs the torus engine");
    if (static_cast<int>(cfg.datum.mode.size()) != cfg.grid.n) rd.fail("datum.mode", "mode datum needs one integer per axis");
  }
  if (cfg.datum.family == DatumFamily::file && cfg.datum.path.empty()) rd.fail("datum.file", "file datum needs datum.file");

  if (auto v = rd.real("T")) {
    if (!(*v > 0.0)) rd.fail("T", "must be positive");
    else cfg.T = *v;
  }
  if (auto v = rd.real("dt0")) {
    if (!(*v > 0.0)) rd.fail("dt0", "must be positive");
    else cfg.dt0 = *v;
  }
  if (auto v = rd.real("dt_min")) {
    if (!(*v > 0.0)) rd.fail("dt_min", "must be positive");
    else cfg.dt_min = *v;
  }
  if (!(cfg.dt_min <= cfg.dt0)) rd.fail(rd.has("dt_min") ? "dt_min" : "dt0", "need dt_min <= dt0");
  if (auto v = rd.real("tol_step")) {
    if (!(*v > 0.0)) rd.fail("tol_step", "must be positive");
    else cfg.tol_step = *v;
  }
  for (auto [key, slot] : {std::pair{"guards.hs", &cfg.guards.hs}, std::pair{"guards.tail", &cfg.guards.tail},
                           std::pair{"guards.boundary", &cfg.guards.boundary}}) {
    if (auto v = rd.real(key)) {
      if (!(*v > 0.0)) rd.fail(key, "must be positive");
      else *slot = *v;
    }
  }
  if (auto v = rd.integer("record_every")) {
    if (*v < 1) rd.fail("record_every", "must be >= 1");
    else cfg.record_every = static_cast<int>(std::min<long long>(*v, 1 << 30));
  }
  if (auto t = rd.text("out_dir")) {
    if (t->empty()) rd.fail("out_dir", "must not be empty");
    else cfg.out_dir = *t;
  }
  if (auto v = rd.integer("seed")) {
    if (*v < 0) rd.fail("seed", "must be >= 0");
    else cfg.seed = static_cast<std::uint64_t>(*v);
  }

  if (!issues.empty()) throw ConfigParseError(std::move(issues));
  try {
    cfg.validate();
  } catch (const ConfigError& e) {
    throw ConfigParseError({e.what()});
  }
  return out;
}

ParsedConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace fhrt
