// SPDX-License-Identifier: Apache-2.0
#include "brownflow_cli/config.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

#include <yaml-cpp/yaml.h>

namespace brownflow::cli {

using Json = nlohmann::ordered_json;

namespace {

constexpr std::array<std::pair<Experiment, std::string_view>, 6> kExperimentNames{{
    {Experiment::flow_pm, "flow_pm"},
    {Experiment::flow_plus_kernel, "flow_plus_kernel"},
    {Experiment::flow_plus_coalescing, "flow_plus_coalescing"},
    {Experiment::wedge_laplace, "wedge_laplace"},
    {Experiment::chaos_compare, "chaos_compare"},
    {Experiment::verify_suite, "verify_suite"},
}};

enum class Kind { real, count, real_list, exit_list };

using DefaultFn = std::function<Json(const Json& params)>;
using CheckFn = std::function<std::string(const Json& value)>;

struct Param {
  std::string key;
  Kind kind;
  DefaultFn def;  // empty: required
  CheckFn check;  // empty message: fine
};

DefaultFn fixed(Json v) {
  return [v = std::move(v)](const Json&) { return v; };
}

// dt defaults to a thousandth of the horizon
DefaultFn dt_from_horizon() {
  return [](const Json& p) { return Json(1e-3 * p.at("horizon").get<double>()); };
}

CheckFn positive() {
  return [](const Json& v) {
    return v.get<double>() > 0.0 ? std::string() : std::string("must be positive");
  };
}

CheckFn at_least(std::uint64_t lo) {
  return [lo](const Json& v) {
    return v.get<std::uint64_t>() >= lo ? std::string()
                                        : "must be at least " + std::to_string(lo);
  };
}

CheckFn in_range(double lo, double hi) {
  return [lo, hi](const Json& v) {
    const double x = v.get<double>();
    return x > lo && x < hi ? std::string()
                            : "must lie strictly between " + std::to_string(lo) + " and " +
                                  std::to_string(hi);
  };
}

CheckFn list_each(CheckFn inner, bool nonempty) {
  return [inner = std::move(inner), nonempty](const Json& v) -> std::string {
    if (nonempty && v.empty()) return "must not be empty";
    for (const auto& e : v) {
      if (std::string m = inner(e); !m.empty()) return "entries " + m;
    }
    return {};
  };
}

Param seed_param() { return {"seed", Kind::count, {}, {}}; }
Param horizon_param(double def) { return {"horizon", Kind::real, fixed(def), positive()}; }
Param dt_param() { return {"dt", Kind::real, dt_from_horizon(), positive()}; }

Json default_exit_pairs() {
  Json a = Json::array();
  for (auto [al, ep] : {std::pair{0.1, 0.2}, {0.05, 0.5}, {0.2, 0.25}}) {
    Json e = Json::object();
    e["alpha"] = al;
    e["eps"] = ep;
    a.push_back(e);
  }
  return a;
}

CheckFn position_list() { return list_each(in_range(-1000.0, 1000.0), true); }

std::vector<Param> schema(Experiment e) {
  switch (e) {
    case Experiment::flow_pm:
    case Experiment::flow_plus_coalescing:
      return {seed_param(),
              {"x0", Kind::real_list, {}, position_list()},
              horizon_param(1.0),
              dt_param(),
              {"replicas", Kind::count, fixed(10000u), at_least(1)},
              {"paths_written", Kind::count, fixed(1u), {}}};
    case Experiment::flow_plus_kernel:
      return {seed_param(),
              {"x0", Kind::real, {}, in_range(-1000.0, 1000.0)},
              horizon_param(1.0),
              dt_param(),
              {"replicas", Kind::count, fixed(1000u), at_least(2)},
              {"M", Kind::count, fixed(256u), at_least(2)},
              {"bump_width", Kind::real, fixed(1.0), positive()}};
    case Experiment::wedge_laplace:
      return {seed_param(),
              {"x0", Kind::real, fixed(-0.1), {}},
              {"y0", Kind::real, fixed(0.1), {}},
              {"dt", Kind::real, fixed(1e-5), positive()},
              {"eps", Kind::real, fixed(0.01), positive()},
              {"horizon", Kind::real, fixed(1e5), positive()},
              {"replicas", Kind::count, fixed(10000u), at_least(2)},
              {"alpha", Kind::real_list, fixed(Json::array({0.5, 1.0, 2.0})),
               list_each(positive(), true)},
              {"exit", Kind::exit_list, fixed(Json::array()), {}},
              {"exit_replicas", Kind::count, fixed(10000u), at_least(2)}};
    case Experiment::chaos_compare:
      return {seed_param(),
              {"x0", Kind::real, fixed(0.5), {}},
              horizon_param(1.0),
              dt_param(),
              {"replicas", Kind::count, fixed(100u), at_least(2)},
              {"M", Kind::count, fixed(256u), at_least(2)},
              {"n_max", Kind::count, fixed(6u), at_least(0)},
              {"bump_width", Kind::real, fixed(1.0), positive()},
              {"nodes", Kind::count, fixed(4097u), at_least(5)}};
    case Experiment::verify_suite:
      return {seed_param(),
              {"dt", Kind::real, fixed(1e-3), positive()},
              {"replicas", Kind::count, fixed(2000u), at_least(50)},
              {"ks_starts", Kind::real_list, fixed(Json::array({-1.0, 0.0, 1.0})),
               list_each(in_range(-1000.0, 1000.0), false)},
              {"exit", Kind::exit_list, fixed(default_exit_pairs()), {}},
              {"exit_dt", Kind::real, fixed(1e-5), positive()},
              {"local_time_dt", Kind::real, fixed(1e-5), positive()},
              {"local_time_eps", Kind::real, fixed(0.01), positive()},
              {"local_time_replicas", Kind::count, fixed(200u), at_least(2)}};
  }
  return {};
}

// Parsing of scalar nodes. Each returns an error message or fills `out`.
std::string parse_real(const YAML::Node& n, Json& out) {
  if (!n.IsScalar()) return "expected a number";
  double v = 0.0;
  if (!YAML::convert<double>::decode(n, v)) return "expected a number, got '" + n.Scalar() + "'";
  if (!std::isfinite(v)) return "must be finite";
  out = v;
  return {};
}

std::string parse_count(const YAML::Node& n, Json& out) {
  if (!n.IsScalar()) return "expected a non-negative integer";
  const std::string& s = n.Scalar();
  std::uint64_t u = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), u);
  if (ec == std::errc() && ptr == s.data() + s.size()) {
    out = u;
    return {};
  }
  // accept integral reals such as 1e4
  double d = 0.0;
  if (YAML::convert<double>::decode(n, d) && d >= 0.0 && d <= 9007199254740992.0 &&
      d == std::floor(d)) {
    out = static_cast<std::uint64_t>(d);
    return {};
  }
  return "expected a non-negative integer, got '" + s + "'";
}

std::string closest(std::string_view key, const std::vector<std::string>& allowed) {
  std::string best;
  std::size_t best_d = std::numeric_limits<std::size_t>::max();
  for (const auto& a : allowed) {
    const std::size_t d = edit_distance(key, a);
    if (d < best_d) {
      best_d = d;
      best = a;
    }
  }
  const std::size_t limit = std::max<std::size_t>(2, key.size() / 3);
  return best_d <= limit ? best : std::string();
}

std::string unknown_key_message(const std::string& key, const std::vector<std::string>& allowed) {
  std::string msg = "unknown key '" + key + "'";
  if (const std::string s = closest(key, allowed); !s.empty()) {
    msg += " (did you mean '" + s + "'?)";
  }
  return msg;
}

void parse_value(const Param& p, const YAML::Node& node, Json& out,
                 std::vector<std::string>& errors) {
  const std::string where = "'" + p.key + "': ";
  std::string err;
  switch (p.kind) {
    case Kind::real:
      err = parse_real(node, out);
      break;
    case Kind::count:
      err = parse_count(node, out);
      break;
    case Kind::real_list: {
      if (!node.IsSequence()) {
        err = "expected a list of numbers";
        break;
      }
      out = Json::array();
      for (const auto& e : node) {
        Json v;
        if (err = parse_real(e, v); !err.empty()) break;
        out.push_back(v);
      }
      break;
    }
    case Kind::exit_list: {
      if (!node.IsSequence()) {
        err = "expected a list of {alpha, eps} maps";
        break;
      }
      out = Json::array();
      const std::vector<std::string> keys{"alpha", "eps"};
      for (std::size_t i = 0; i < node.size() && err.empty(); ++i) {
        const YAML::Node e = node[i];
        const std::string at = "entry " + std::to_string(i) + ": ";
        if (!e.IsMap()) {
          err = at + "expected a map with alpha and eps";
          break;
        }
        for (const auto& kv : e) {
          const std::string k = kv.first.as<std::string>();
          if (std::find(keys.begin(), keys.end(), k) == keys.end()) {
            err = at + unknown_key_message(k, keys);
          }
        }
        if (!err.empty()) break;
        Json entry = Json::object();
        for (const auto& k : keys) {
          if (!e[k]) {
            err = at + "missing '" + k + "'";
            break;
          }
          Json v;
          if (std::string m = parse_real(e[k], v); !m.empty()) {
            err = at + k + " " + m;
            break;
          }
          entry[k] = v;
        }
        if (!err.empty()) break;
        const double a = entry["alpha"].get<double>();
        const double eps = entry["eps"].get<double>();
        if (!(a > 0.0)) {
          err = at + "alpha must be positive";
        } else if (!(a < eps)) {
          err = at + "alpha must be smaller than eps (got alpha " + e["alpha"].Scalar() +
                ", eps " + e["eps"].Scalar() + ")";
        }
        out.push_back(entry);
      }
      break;
    }
  }
  if (err.empty() && p.check) err = p.check(out);
  if (!err.empty()) errors.push_back(where + err);
}

void cross_checks(Experiment e, const Json& p, std::vector<std::string>& errors) {
  if (p.contains("dt") && p.contains("horizon") &&
      p["dt"].get<double>() > p["horizon"].get<double>()) {
    errors.push_back("'dt' must not exceed 'horizon'");
  }
  switch (e) {
    case Experiment::flow_pm: {
      const auto& x = p["x0"];
      for (std::size_t i = 1; i < x.size(); ++i) {
        if (x[i].get<double>() < x[i - 1].get<double>()) {
          errors.push_back("'x0' must be sorted in increasing order");
          break;
        }
      }
      [[fallthrough]];
    }
    case Experiment::flow_plus_coalescing:
      if (p["paths_written"].get<std::uint64_t>() > p["replicas"].get<std::uint64_t>()) {
        errors.push_back("'paths_written' must not exceed 'replicas'");
      }
      break;
    case Experiment::wedge_laplace:
      if (!(p["x0"].get<double>() <= 0.0 && p["y0"].get<double>() > 0.0)) {
        errors.push_back("start must satisfy x0 <= 0 < y0");
      }
      break;
    default:
      break;
  }
}

std::string shortest(double v) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  std::string s(buf.data(), ptr);
  // keep it a YAML float so the type survives a round trip
  if (s.find_first_of(".eE") == std::string::npos) s += ".0";
  return s;
}

void emit_json(YAML::Emitter& out, const Json& v) {
  if (v.is_array()) {
    const bool nested = !v.empty() && v.front().is_object();
    if (!nested) out << YAML::Flow;
    out << YAML::BeginSeq;
    for (const auto& e : v) emit_json(out, e);
    out << YAML::EndSeq;
  } else if (v.is_object()) {
    out << YAML::Flow << YAML::BeginMap;
    for (const auto& [k, e] : v.items()) {
      out << YAML::Key << k << YAML::Value;
      emit_json(out, e);
    }
    out << YAML::EndMap;
  } else if (v.is_number_float()) {
    out << shortest(v.get<double>());
  } else if (v.is_number_unsigned()) {
    out << std::to_string(v.get<std::uint64_t>());
  } else {
    out << v.get<std::string>();
  }
}

}  // namespace

std::string to_string(Experiment e) {
  for (const auto& [k, name] : kExperimentNames) {
    if (k == e) return std::string(name);
  }
  return "unknown";
}

std::optional<Experiment> parse_experiment(std::string_view name) {
  for (const auto& [k, n] : kExperimentNames) {
    if (n == name) return k;
  }
  return std::nullopt;
}

std::size_t edit_distance(std::string_view a, std::string_view b) {
  std::vector<std::size_t> row(b.size() + 1);
  std::iota(row.begin(), row.end(), std::size_t{0});
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
      diag = up;
    }
  }
  return row[b.size()];
}

Validation validate(std::string_view text) {
  Validation result;
  auto& errors = result.errors;
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::Exception& ex) {
    errors.push_back(std::string("parse error: ") + ex.what());
    return result;
  }
  if (!root.IsMap()) {
    errors.push_back("config must be a map of keys to values");
    return result;
  }
  if (!root["experiment"]) {
    errors.push_back("missing required key 'experiment'");
    return result;
  }
  const std::string name = root["experiment"].IsScalar() ? root["experiment"].Scalar() : "";
  const auto experiment = parse_experiment(name);
  if (!experiment) {
    std::vector<std::string> names;
    for (const auto& [k, n] : kExperimentNames) names.emplace_back(n);
    std::string msg = "'experiment': unknown experiment '" + name + "'";
    if (const std::string s = closest(name, names); !s.empty()) {
      msg += " (did you mean '" + s + "'?)";
    }
    errors.push_back(msg);
    return result;
  }

  const std::vector<Param> params = schema(*experiment);
  std::vector<std::string> allowed{"experiment", "output_dir"};
  for (const auto& p : params) allowed.push_back(p.key);
  for (const auto& kv : root) {
    const std::string key = kv.first.as<std::string>();
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      errors.push_back(unknown_key_message(key, allowed));
    }
  }

  ExperimentConfig cfg;
  cfg.experiment = *experiment;
  if (const YAML::Node d = root["output_dir"]) {
    if (!d.IsScalar() || d.Scalar().empty()) {
      errors.push_back("'output_dir': expected a path");
    } else {
      cfg.output_dir = d.Scalar();
    }
  } else {
    cfg.output_dir = "out/" + name;
  }

  for (const auto& p : params) {
    Json value;
    if (const YAML::Node n = root[p.key]) {
      parse_value(p, n, value, errors);
      if (value.is_null()) continue;
    } else if (p.def) {
      // defaults may depend on keys that failed to parse
      try {
        value = p.def(cfg.params);
      } catch (const Json::exception&) {
        continue;
      }
    } else {
      errors.push_back("missing required key '" + p.key + "'");
      continue;
    }
    cfg.params[p.key] = value;
  }
  if (errors.empty()) cross_checks(*experiment, cfg.params, errors);
  if (errors.empty()) result.config = std::move(cfg);
  return result;
}

std::string echo(const ExperimentConfig& config) {
  YAML::Emitter out;
  out << YAML::BeginMap;
  out << YAML::Key << "experiment" << YAML::Value << to_string(config.experiment);
  out << YAML::Key << "output_dir" << YAML::Value << YAML::DoubleQuoted << config.output_dir;
  for (const auto& [k, v] : config.params.items()) {
    out << YAML::Key << k << YAML::Value;
    emit_json(out, v);
  }
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

}  // namespace brownflow::cli
