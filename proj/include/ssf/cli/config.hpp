#pragma once

// Flat `key = value` experiment configuration with dotted section names.
// `#` starts a comment. Every error found is collected before failing.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ssf/ensemble.hpp"
#include "ssf/model.hpp"
#include "ssf/parallel.hpp"

namespace ssf::cli {

enum class Command { surface_density, surface_functional, bulk_ids, check_bounds, scaling_study };

inline std::string to_string(Command c) {
  switch (c) {
    case Command::surface_density: return "surface-density";
    case Command::surface_functional: return "surface-functional";
    case Command::bulk_ids: return "bulk-ids";
    case Command::check_bounds: return "check-bounds";
    case Command::scaling_study: return "scaling-study";
  }
  return "unknown";
}

inline std::optional<Command> parse_command(std::string_view s) {
  for (auto c : {Command::surface_density, Command::surface_functional, Command::bulk_ids, Command::check_bounds, Command::scaling_study})
    if (s == to_string(c)) return c;
  return std::nullopt;
}

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> errors) : std::runtime_error(join(errors)), errors_(std::move(errors)) {}
  const std::vector<std::string>& errors() const noexcept { return errors_; }

 private:
  static std::string join(const std::vector<std::string>& errors) {
    std::string out = "invalid configuration:";
    for (const auto& e : errors) out += "\n  " + e;
    return out;
  }
  std::vector<std::string> errors_;
};

struct ExperimentConfig {
  Command command = Command::surface_density;
  int nu = 2;
  int nu1 = 1;
  long L = 0;
  std::vector<long> L_list;
  std::optional<long> W;
  std::optional<long> P;
  Boundary boundary = Boundary::dirichlet;
  DisorderSpec disorder;
  std::optional<LambdaGrid> grid;
  std::size_t realizations = 100;
  std::uint64_t master_seed = 0;
  double p = 1.0;
  int k = 1;
  double c = 10.0;
  double theta = 0.5;
  double tf_center = 0.0;
  double tf_width = 1.0;
  std::size_t check_instances = 20;
  long check_max_dim = 8;
  Route route = Route::structured;
  std::string out;
  /// Explicit keys with trimmed values, sorted; input of the config hash.
  std::map<std::string, std::string> entries;

  SurfaceFamily family() const { return {nu, nu1, W, P, boundary}; }
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, ',')) out.push_back(trim(item));
  return out;
}

inline const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys{
      "command",          "model.nu",         "model.nu1",        "model.L",          "model.L_list",       "model.W",
      "model.P",          "model.boundary",   "disorder.kind",    "disorder.alpha",   "disorder.lo",        "disorder.hi",
      "disorder.a",       "disorder.b",       "disorder.prob",    "disorder.values",  "disorder.weights",   "disorder.density_sup",
      "grid.a",           "grid.b",           "grid.n",           "realizations",     "master_seed",        "numerics.p",
      "numerics.k",       "numerics.c",       "numerics.theta",   "test_function.center", "test_function.width", "check.instances",
      "check.max_dim",    "route",            "out"};
  return keys;
}

class Reader {
 public:
  Reader(const std::map<std::string, std::string>& kv, std::vector<std::string>& errors) : kv_(kv), errors_(errors) {}

  bool has(const std::string& key) const { return kv_.count(key) > 0; }

  template <class T>
  std::optional<T> integer(const std::string& key) {
    const auto it = kv_.find(key);
    if (it == kv_.end()) return std::nullopt;
    T v{};
    const auto& s = it->second;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
      errors_.push_back(key + ": expected an integer, got '" + s + "'");
      return std::nullopt;
    }
    return v;
  }

  std::optional<double> real(const std::string& key) {
    const auto it = kv_.find(key);
    if (it == kv_.end()) return std::nullopt;
    return parse_real(key, it->second);
  }

  std::optional<double> parse_real(const std::string& key, const std::string& s) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size() || !std::isfinite(v)) {
      errors_.push_back(key + ": expected a finite number, got '" + s + "'");
      return std::nullopt;
    }
    return v;
  }

  std::optional<std::vector<double>> reals(const std::string& key) {
    const auto it = kv_.find(key);
    if (it == kv_.end()) return std::nullopt;
    std::vector<double> out;
    for (const auto& item : split_list(it->second)) {
      const auto v = parse_real(key, item);
      if (!v) return std::nullopt;
      out.push_back(*v);
    }
    return out;
  }

  std::optional<std::string> text(const std::string& key) const {
    const auto it = kv_.find(key);
    if (it == kv_.end()) return std::nullopt;
    return it->second;
  }

  void require(const std::string& key, const std::string& why) {
    if (!has(key)) errors_.push_back(key + ": required " + why);
  }
  void forbid(const std::string& key, const std::string& why) {
    if (has(key)) errors_.push_back(key + ": not used " + why);
  }
  void fail(const std::string& msg) { errors_.push_back(msg); }

 private:
  const std::map<std::string, std::string>& kv_;
  std::vector<std::string>& errors_;
};

}  // namespace detail

/// Parses and validates a configuration. `command` (e.g. from the command
/// line) is used when the document has no `command` key and must agree with
/// it otherwise. Throws ConfigError listing every problem found.
inline ExperimentConfig parse_config(std::string_view text, std::optional<Command> command = std::nullopt) {
  std::vector<std::string> errors;
  std::map<std::string, std::string> kv;
  {
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      const auto body = detail::trim(line);
      if (body.empty()) continue;
      const auto eq = body.find('=');
      if (eq == std::string::npos) {
        errors.push_back("line " + std::to_string(lineno) + ": expected 'key = value'");
        continue;
      }
      const auto key = detail::trim(std::string_view(body).substr(0, eq));
      const auto value = detail::trim(std::string_view(body).substr(eq + 1));
      if (!detail::known_keys().count(key)) {
        errors.push_back("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
        continue;
      }
      if (value.empty()) {
        errors.push_back(key + ": empty value");
        continue;
      }
      if (!kv.emplace(key, value).second) errors.push_back("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    }
  }

  ExperimentConfig cfg;
  detail::Reader rd(kv, errors);

  if (const auto c = rd.text("command")) {
    const auto parsed = parse_command(*c);
    if (!parsed) rd.fail("command: unknown command '" + *c + "'");
    else if (command && *command != *parsed) rd.fail("command: config says '" + *c + "' but '" + to_string(*command) + "' was requested");
    else cfg.command = *parsed;
  } else if (command) {
    cfg.command = *command;
  } else {
    rd.fail("command: required (in the config or on the command line)");
  }
  const auto cmd = cfg.command;
  const bool surface = cmd == Command::surface_density || cmd == Command::surface_functional || cmd == Command::scaling_study;
  const std::string for_cmd = "for " + to_string(cmd);

  // model
  if (const auto v = rd.integer<int>("model.nu")) cfg.nu = *v;
  if (cfg.nu < 1) rd.fail("model.nu: violates nu ≥ 1");
  if (const auto v = rd.integer<int>("model.nu1")) cfg.nu1 = *v;
  else cfg.nu1 = cfg.nu - 1;
  if (surface && (cfg.nu1 < 0 || cfg.nu1 >= cfg.nu)) rd.fail("model.nu1: violates 0 ≤ nu1 ≤ nu - 1");
  if (const auto b = rd.text("model.boundary")) {
    if (*b == "dirichlet") cfg.boundary = Boundary::dirichlet;
    else if (*b == "periodic") cfg.boundary = Boundary::periodic;
    else rd.fail("model.boundary: expected dirichlet or periodic, got '" + *b + "'");
  }
  const bool single_L = cmd == Command::surface_density || cmd == Command::bulk_ids;
  const bool list_L = cmd == Command::surface_functional || cmd == Command::scaling_study;
  if (single_L) {
    rd.require("model.L", for_cmd);
    rd.forbid("model.L_list", for_cmd + " (use model.L)");
    if (const auto v = rd.integer<long>("model.L")) {
      cfg.L = *v;
      if (*v < 1) rd.fail("model.L: violates L ≥ 1");
    }
  } else if (list_L) {
    rd.require("model.L_list", for_cmd);
    rd.forbid("model.L", for_cmd + " (use model.L_list)");
    if (const auto s = rd.text("model.L_list")) {
      for (const auto& item : detail::split_list(*s)) {
        long v = 0;
        const auto res = std::from_chars(item.data(), item.data() + item.size(), v);
        if (res.ec != std::errc{} || res.ptr != item.data() + item.size()) {
          rd.fail("model.L_list: expected integers, got '" + item + "'");
          break;
        }
        if (v < 1) rd.fail("model.L_list: violates L ≥ 1");
        if (!cfg.L_list.empty() && v <= cfg.L_list.back()) rd.fail("model.L_list: violates strictly ascending order");
        cfg.L_list.push_back(v);
      }
    }
  } else {
    rd.forbid("model.L", for_cmd);
    rd.forbid("model.L_list", for_cmd);
  }
  if (surface) {
    if (const auto v = rd.integer<long>("model.W")) {
      cfg.W = *v;
      if (*v < 0) rd.fail("model.W: violates W ≥ 0");
    }
    if (const auto v = rd.integer<long>("model.P")) {
      cfg.P = *v;
      if (*v < 0) rd.fail("model.P: violates P ≥ 0");
    }
  } else {
    rd.forbid("model.W", for_cmd);
    rd.forbid("model.P", for_cmd);
  }

  // disorder
  if (cmd == Command::check_bounds) {
    for (const auto* key : {"disorder.kind", "disorder.alpha", "disorder.lo", "disorder.hi", "disorder.a", "disorder.b", "disorder.prob",
                            "disorder.values", "disorder.weights", "disorder.density_sup"})
      rd.forbid(key, for_cmd);
  } else {
    rd.require("disorder.kind", for_cmd);
    const auto kind = rd.text("disorder.kind").value_or("");
    const std::map<std::string, std::vector<std::string>> params{{"point_mass", {"disorder.alpha"}},
                                                                 {"uniform", {"disorder.lo", "disorder.hi"}},
                                                                 {"bernoulli", {"disorder.a", "disorder.b", "disorder.prob"}},
                                                                 {"discrete", {"disorder.values", "disorder.weights"}}};
    const auto it = params.find(kind);
    if (!kind.empty() && it == params.end()) rd.fail("disorder.kind: expected point_mass, uniform, bernoulli or discrete, got '" + kind + "'");
    if (it != params.end()) {
      for (const auto& [other, keys] : params)
        if (other != kind)
          for (const auto& key : keys)
            if (std::find(it->second.begin(), it->second.end(), key) == it->second.end()) rd.forbid(key, "by disorder.kind = " + kind);
      for (const auto& key : it->second) rd.require(key, "by disorder.kind = " + kind);
      if (kind == "point_mass") {
        if (const auto a = rd.real("disorder.alpha")) cfg.disorder = DisorderSpec::point_mass(*a);
      } else if (kind == "uniform") {
        const auto lo = rd.real("disorder.lo");
        const auto hi = rd.real("disorder.hi");
        if (lo && hi) {
          if (!(*lo < *hi)) rd.fail("disorder.lo, disorder.hi: violates lo < hi");
          else cfg.disorder = DisorderSpec::uniform(*lo, *hi);
        }
      } else if (kind == "bernoulli") {
        const auto a = rd.real("disorder.a");
        const auto b = rd.real("disorder.b");
        const auto prob = rd.real("disorder.prob");
        if (prob && !(*prob >= 0.0 && *prob <= 1.0)) rd.fail("disorder.prob: violates 0 ≤ prob ≤ 1");
        else if (a && b && prob) cfg.disorder = DisorderSpec::bernoulli(*a, *b, *prob);
      } else {
        const auto values = rd.reals("disorder.values");
        const auto weights = rd.reals("disorder.weights");
        if (values && weights) {
          double total = 0.0;
          bool ok = true;
          if (values->size() != weights->size()) {
            rd.fail("disorder.values, disorder.weights: violates equal lengths");
            ok = false;
          }
          for (double w : *weights) {
            if (w < 0.0) {
              rd.fail("disorder.weights: violates weights ≥ 0");
              ok = false;
              break;
            }
            total += w;
          }
          if (ok && std::abs(total - 1.0) > 1e-12) {
            rd.fail("disorder.weights: violates sum of weights = 1 (within 1e-12)");
            ok = false;
          }
          if (ok) cfg.disorder = DisorderSpec::discrete(*values, *weights);
        }
      }
    }
    if (const auto d = rd.real("disorder.density_sup")) {
      if (!(*d > 0.0)) rd.fail("disorder.density_sup: violates density_sup > 0");
      else cfg.disorder.density_sup = *d;
    }
  }

  // grid
  const bool gridded = cmd == Command::surface_density || cmd == Command::bulk_ids;
  if (gridded) {
    if (rd.has("grid.a") || rd.has("grid.b") || rd.has("grid.n")) {
      const auto fallback = LambdaGrid::covering(cfg.nu, cfg.disorder);
      LambdaGrid g = fallback;
      if (const auto v = rd.real("grid.a")) g.a = *v;
      if (const auto v = rd.real("grid.b")) g.b = *v;
      if (const auto v = rd.integer<long>("grid.n")) {
        if (*v < 2) rd.fail("grid.n: violates n ≥ 2");
        else g.n = static_cast<std::size_t>(*v);
      }
      if (!(g.a < g.b)) rd.fail("grid.a, grid.b: violates a < b");
      cfg.grid = g;
    }
  } else {
    for (const auto* key : {"grid.a", "grid.b", "grid.n"}) rd.forbid(key, for_cmd);
  }

  // run parameters
  if (const auto v = rd.integer<long>("realizations")) {
    if (*v < 1) rd.fail("realizations: violates realizations ≥ 1");
    else cfg.realizations = static_cast<std::size_t>(*v);
  }
  if (cmd == Command::check_bounds) rd.forbid("realizations", for_cmd + " (use check.instances)");
  if (const auto v = rd.integer<std::uint64_t>("master_seed")) cfg.master_seed = *v;

  if (cmd == Command::scaling_study) {
    if (const auto v = rd.real("numerics.p")) {
      if (!(*v > 0.0)) rd.fail("numerics.p: violates p > 0");
      else cfg.p = *v;
    }
    if (const auto v = rd.integer<int>("numerics.k")) {
      if (*v < 1) rd.fail("numerics.k: violates k ≥ 1");
      else cfg.k = *v;
    }
    if (const auto v = rd.real("numerics.c")) cfg.c = *v;
    if (!(cfg.c > 0.0)) rd.fail("numerics.c: violates c > 0");
  } else {
    for (const auto* key : {"numerics.p", "numerics.k", "numerics.c"}) rd.forbid(key, for_cmd);
  }
  if (cmd == Command::bulk_ids) {
    if (const auto v = rd.real("numerics.theta")) {
      if (!(*v > 0.0 && *v <= 1.0)) rd.fail("numerics.theta: violates 0 < theta ≤ 1");
      else cfg.theta = *v;
    }
  } else {
    rd.forbid("numerics.theta", for_cmd);
  }
  if (cmd == Command::surface_functional) {
    if (const auto v = rd.real("test_function.center")) cfg.tf_center = *v;
    if (const auto v = rd.real("test_function.width")) {
      if (!(*v > 0.0)) rd.fail("test_function.width: violates width > 0");
      else cfg.tf_width = *v;
    }
  } else {
    rd.forbid("test_function.center", for_cmd);
    rd.forbid("test_function.width", for_cmd);
  }
  if (cmd == Command::check_bounds) {
    if (const auto v = rd.integer<long>("check.instances")) {
      if (*v < 1) rd.fail("check.instances: violates instances ≥ 1");
      else cfg.check_instances = static_cast<std::size_t>(*v);
    }
    if (const auto v = rd.integer<long>("check.max_dim")) {
      if (*v < 1 || *v > 64) rd.fail("check.max_dim: violates 1 ≤ max_dim ≤ 64");
      else cfg.check_max_dim = *v;
    }
  } else {
    rd.forbid("check.instances", for_cmd);
    rd.forbid("check.max_dim", for_cmd);
  }
  if (const auto r = rd.text("route")) {
    if (*r == "structured") cfg.route = Route::structured;
    else if (*r == "dense") cfg.route = Route::dense;
    else rd.fail("route: expected structured or dense, got '" + *r + "'");
  }
  if (const auto o = rd.text("out")) cfg.out = *o;

  if (!errors.empty()) throw ConfigError(std::move(errors));
  cfg.entries = std::move(kv);
  cfg.entries["command"] = to_string(cfg.command);
  return cfg;
}

}  // namespace ssf::cli
