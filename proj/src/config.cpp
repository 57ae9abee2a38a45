#include "beamstab/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "beamstab/errors.hpp"

namespace beamstab {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, const std::string& where, std::initializer_list<const char*> keys) {
  const std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& [k, v] : obj.items())
    if (!allowed.count(k))
      throw ConfigError("unknown key '" + (where.empty() ? k : where + "." + k) + "'");
}

const json& section(const json& root, const char* name) {
  const json& s = root.at(name);
  if (!s.is_object()) throw ConfigError(std::string("'") + name + "' must be an object");
  return s;
}

double get_number(const json& obj, const char* key, const std::string& where, double fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number()) throw ConfigError("'" + where + key + "' must be a number, got " + v.dump());
  return v.get<double>();
}

int get_int(const json& obj, const char* key, const std::string& where, int fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_integer()) throw ConfigError("'" + where + key + "' must be an integer, got " + v.dump());
  return v.get<int>();
}

std::string get_string(const json& obj, const char* key, const std::string& where, std::string fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_string()) throw ConfigError("'" + where + key + "' must be a string, got " + v.dump());
  return v.get<std::string>();
}

std::vector<double> get_list(const json& obj, const char* key, const std::string& where,
                             std::vector<double> fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_array()) throw ConfigError("'" + where + key + "' must be a list of numbers");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) throw ConfigError("'" + where + key + "' must be a list of numbers, got " + e.dump());
    out.push_back(e.get<double>());
  }
  return out;
}

std::string num(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

void range(bool ok, const std::string& key, double value, const std::string& expect) {
  if (!ok) throw ConfigError("'" + key + "' = " + num(value) + " out of range: " + expect);
}

}  // namespace

void validate(const RunConfig& c) {
  const auto& co = c.coefficient;
  if (co.family != "power_law" && co.family != "power_law_times_smooth")
    throw ConfigError("'coefficient.family' = '" + co.family +
                      "' (expected power_law or power_law_times_smooth)");
  range(co.alpha > 0.0 && co.alpha < 2.0, "coefficient.alpha", co.alpha,
        "need 0 < alpha < 2 (K must lie in (0, 2))");
  range(co.c >= 0.0 && std::isfinite(co.c), "coefficient.c", co.c, "need c >= 0");
  if (co.family != "power_law") make_coefficient(co);  // K may leave (0, 2) through c
  range(c.beta >= 0.0 && std::isfinite(c.beta), "beta", c.beta, "need beta >= 0");
  range(c.gamma >= 0.0 && std::isfinite(c.gamma), "gamma", c.gamma, "need gamma >= 0");
  range(c.mesh.n_elements >= 4 && c.mesh.n_elements <= 1 << 16, "mesh.n_elements", c.mesh.n_elements,
        "need 4 <= n <= 65536");
  range(c.mesh.grading >= 1.0 && c.mesh.grading <= 4.0, "mesh.grading", c.mesh.grading, "need 1 <= grading <= 4");
  range(c.time.t_end > 0.0 && std::isfinite(c.time.t_end), "time.t_end", c.time.t_end, "need t_end > 0");
  range(c.time.dt > 0.0 && c.time.dt < c.time.t_end, "time.dt", c.time.dt, "need 0 < dt < t_end");
  range(c.time.snapshot_stride >= 0, "time.snapshot_stride", c.time.snapshot_stride, "need stride >= 0");
  range(c.hardy.mesh >= 32, "hardy.mesh", c.hardy.mesh, "need mesh >= 32");
  range(c.hardy.coarse_mesh >= 32, "hardy.coarse_mesh", c.hardy.coarse_mesh, "need coarse_mesh >= 32");
  if (c.eps0) {
    const double K = co.family == "power_law" ? co.alpha : make_coefficient(co).K();
    range(*c.eps0 > 0.0 && *c.eps0 <= 2.0 - K, "eps0", *c.eps0, "need 0 < eps0 <= 2 - K");
  }
  for (double a : c.sweep.alpha) range(a > 0.0 && a < 2.0, "sweep.alpha", a, "need 0 < alpha < 2");
  for (double b : c.sweep.beta) range(b >= 0.0, "sweep.beta", b, "need beta >= 0");
  for (double g : c.sweep.gamma) range(g >= 0.0, "sweep.gamma", g, "need gamma >= 0");
  for (double s : c.checks.integral_s)
    range(s >= 0.0 && s < c.time.t_end, "checks.integral_s", s, "need 0 <= s < t_end");
  range(c.checks.observability_s > 0.0 && c.checks.observability_s < c.checks.observability_T,
        "checks.observability_s", c.checks.observability_s, "need 0 < s < T");
  if (c.output.label.empty() || c.output.label.find('/') != std::string::npos)
    throw ConfigError("'output.label' must be a non-empty name without '/'");
}

RunConfig parse_config_text(const std::string& text) {
  json root;
  try {
    root = json::parse(text, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("config must be a JSON object");
  reject_unknown(root, "",
                 {"coefficient", "alpha", "beta", "gamma", "mesh", "time", "initial", "delta_policy",
                  "eps0", "hardy", "output", "static", "sweep", "checks"});

  RunConfig c;
  if (root.contains("coefficient")) {
    const json& s = section(root, "coefficient");
    reject_unknown(s, "coefficient", {"family", "alpha", "c"});
    c.coefficient.family = get_string(s, "family", "coefficient.", c.coefficient.family);
    c.coefficient.alpha = get_number(s, "alpha", "coefficient.", c.coefficient.alpha);
    c.coefficient.c = get_number(s, "c", "coefficient.", c.coefficient.c);
  }
  if (root.contains("alpha")) {
    if (root.contains("coefficient") && root.at("coefficient").contains("alpha"))
      throw ConfigError("'alpha' given both at top level and in 'coefficient'");
    c.coefficient.alpha = get_number(root, "alpha", "", c.coefficient.alpha);
  }
  c.beta = get_number(root, "beta", "", c.beta);
  c.gamma = get_number(root, "gamma", "", c.gamma);
  if (root.contains("mesh")) {
    const json& s = section(root, "mesh");
    reject_unknown(s, "mesh", {"n_elements", "grading"});
    c.mesh.n_elements = get_int(s, "n_elements", "mesh.", c.mesh.n_elements);
    c.mesh.grading = get_number(s, "grading", "mesh.", c.mesh.grading);
  }
  if (root.contains("time")) {
    const json& s = section(root, "time");
    reject_unknown(s, "time", {"dt", "t_end", "snapshot_stride"});
    c.time.dt = get_number(s, "dt", "time.", c.time.dt);
    c.time.t_end = get_number(s, "t_end", "time.", c.time.t_end);
    c.time.snapshot_stride = get_int(s, "snapshot_stride", "time.", c.time.snapshot_stride);
  }
  if (root.contains("initial")) {
    const json& s = section(root, "initial");
    reject_unknown(s, "initial", {"y0", "y1", "amplitudes"});
    try {
      c.initial.y0 = parse_profile(get_string(s, "y0", "initial.", to_string(c.initial.y0)));
      c.initial.y1 = parse_profile(get_string(s, "y1", "initial.", to_string(c.initial.y1)));
    } catch (const DomainError& e) {
      throw ConfigError(std::string("'initial': ") + e.what());
    }
    const auto amps = get_list(s, "amplitudes", "initial.", {c.initial.y0_amplitude, c.initial.y1_amplitude});
    if (amps.size() != 2) throw ConfigError("'initial.amplitudes' must have two entries [y0, y1]");
    c.initial.y0_amplitude = amps[0];
    c.initial.y1_amplitude = amps[1];
  }
  if (root.contains("delta_policy")) {
    try {
      c.delta_policy = parse_delta_policy(get_string(root, "delta_policy", "", "scan"));
    } catch (const DomainError& e) {
      throw ConfigError(std::string("'delta_policy': ") + e.what());
    }
  }
  if (root.contains("eps0")) c.eps0 = get_number(root, "eps0", "", 0.0);
  if (root.contains("hardy")) {
    const json& s = section(root, "hardy");
    reject_unknown(s, "hardy", {"mesh", "coarse_mesh"});
    c.hardy.mesh = get_int(s, "mesh", "hardy.", c.hardy.mesh);
    c.hardy.coarse_mesh = get_int(s, "coarse_mesh", "hardy.", c.hardy.coarse_mesh);
  }
  if (root.contains("output")) {
    const json& s = section(root, "output");
    reject_unknown(s, "output", {"directory", "label"});
    c.output.directory = get_string(s, "directory", "output.", c.output.directory);
    c.output.label = get_string(s, "label", "output.", c.output.label);
  }
  if (root.contains("static")) {
    const json& s = section(root, "static");
    reject_unknown(s, "static", {"lambda", "mu"});
    c.statics.lambda = get_number(s, "lambda", "static.", c.statics.lambda);
    c.statics.mu = get_number(s, "mu", "static.", c.statics.mu);
  }
  if (root.contains("sweep")) {
    const json& s = section(root, "sweep");
    reject_unknown(s, "sweep", {"alpha", "beta", "gamma"});
    c.sweep.alpha = get_list(s, "alpha", "sweep.", {});
    c.sweep.beta = get_list(s, "beta", "sweep.", {});
    c.sweep.gamma = get_list(s, "gamma", "sweep.", {});
  }
  if (root.contains("checks")) {
    const json& s = section(root, "checks");
    reject_unknown(s, "checks", {"extend", "integral_s", "observability_window"});
    if (s.contains("extend")) {
      if (!s.at("extend").is_boolean()) throw ConfigError("'checks.extend' must be true or false");
      c.checks.extend = s.at("extend").get<bool>();
    }
    c.checks.integral_s = get_list(s, "integral_s", "checks.", c.checks.integral_s);
    const auto w = get_list(s, "observability_window", "checks.",
                            {c.checks.observability_s, c.checks.observability_T});
    if (w.size() != 2) throw ConfigError("'checks.observability_window' must be [s, T]");
    c.checks.observability_s = w[0];
    c.checks.observability_T = w[1];
  }
  validate(c);
  return c;
}

RunConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config_text(ss.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

std::string to_json(const RunConfig& c) {
  json j;
  j["coefficient"] = {{"family", c.coefficient.family}, {"alpha", c.coefficient.alpha}, {"c", c.coefficient.c}};
  j["beta"] = c.beta;
  j["gamma"] = c.gamma;
  j["mesh"] = {{"n_elements", c.mesh.n_elements}, {"grading", c.mesh.grading}};
  j["time"] = {{"dt", c.time.dt}, {"t_end", c.time.t_end}, {"snapshot_stride", c.time.snapshot_stride}};
  j["initial"] = {{"y0", to_string(c.initial.y0)},
                  {"y1", to_string(c.initial.y1)},
                  {"amplitudes", {c.initial.y0_amplitude, c.initial.y1_amplitude}}};
  j["delta_policy"] = to_string(c.delta_policy);
  if (c.eps0) j["eps0"] = *c.eps0;
  j["hardy"] = {{"mesh", c.hardy.mesh}, {"coarse_mesh", c.hardy.coarse_mesh}};
  j["output"] = {{"directory", c.output.directory}, {"label", c.output.label}};
  j["static"] = {{"lambda", c.statics.lambda}, {"mu", c.statics.mu}};
  j["sweep"] = {{"alpha", c.sweep.alpha}, {"beta", c.sweep.beta}, {"gamma", c.sweep.gamma}};
  j["checks"] = {{"extend", c.checks.extend},
                 {"integral_s", c.checks.integral_s},
                 {"observability_window", {c.checks.observability_s, c.checks.observability_T}}};
  return j.dump(2);
}

DegeneracyCoefficient make_coefficient(const CoefficientConfig& c) {
  try {
    if (c.family == "power_law") return DegeneracyCoefficient::power_law(c.alpha);
    if (c.family == "power_law_times_smooth")
      return DegeneracyCoefficient::power_law_times_smooth(c.alpha, c.c);
  } catch (const ClassificationError& e) {
    throw ConfigError(std::string("coefficient rejected: ") + e.what());
  }
  throw ConfigError("unknown coefficient family '" + c.family + "'");
}

}  // namespace beamstab
