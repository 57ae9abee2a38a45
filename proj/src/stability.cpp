#include "beamstab/stability.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "beamstab/errors.hpp"

namespace beamstab {

std::string to_string(DeltaPolicy p) {
  return p == DeltaPolicy::Scan ? "scan" : "fixed_fraction";
}

DeltaPolicy parse_delta_policy(const std::string& name) {
  if (name == "scan") return DeltaPolicy::Scan;
  if (name == "fixed_fraction") return DeltaPolicy::FixedFraction;
  throw DomainError("unknown delta policy '" + name + "' (expected scan or fixed_fraction)");
}

double nu_constant(double beta, double gamma) {
  if (beta > 1.0 && gamma > 1.0) return beta * gamma / (2.0 * (beta + gamma));
  if (gamma > 1.0) return gamma / (2.0 * (1.0 + gamma));
  if (beta > 1.0) return beta / (2.0 * (beta + 1.0));
  return 0.25;
}

double c_delta_constant(double beta, double gamma, double delta) {
  if (beta > 1.0 && gamma > 1.0) return 1.0 - 2.0 * delta * (1.0 / beta + 1.0 / gamma);
  if (gamma > 1.0) return 1.0 - 2.0 * delta * (1.0 + 1.0 / gamma);
  if (beta > 1.0) return 1.0 - 2.0 * delta * (1.0 / beta + 1.0);
  return 1.0 - 4.0 * delta;
}

double trace_constant(double b) { return b != 0.0 ? std::min(2.0, 2.0 / b) : 2.0; }

double boundary_weight(double K, double eps0, double beta, double gamma) {
  // beta enters twice
  return K * beta / 2.0 + K / 4.0 + beta + eps0 * beta / 2.0 + beta + 1.0 + 2.0 * gamma * gamma +
         eps0 * gamma / 2.0;
}

namespace {

void validate(const LedgerInputs& in) {
  if (!(in.K > 0.0 && in.K < 2.0)) throw DomainError("ledger: K must lie in (0, 2)");
  if (!(in.c_hp > 0.0) || !std::isfinite(in.c_hp)) throw DomainError("ledger: c_hp must be positive");
  if (!(in.a1 > 0.0)) throw DomainError("ledger: a(1) must be positive");
  if (!(in.beta >= 0.0) || !(in.gamma >= 0.0))
    throw DomainError("ledger: beta and gamma must be non-negative");
  if (in.eps0 && !(*in.eps0 > 0.0 && *in.eps0 <= 2.0 - in.K))
    throw DomainError("ledger: eps0 must lie in (0, 2 - K]");
}

bool feasible(const StabilityConstants& c) {
  return c.delta > 0.0 && c.delta < c.nu && c.c_delta > 0.0 && c.delta < c.eps0 / c.c1 &&
         c.eps0 - c.delta * c.c1 > 0.0;
}

}  // namespace

StabilityConstants constants_at_delta(const LedgerInputs& in, double delta) {
  validate(in);
  StabilityConstants c;
  c.K = in.K;
  c.c_hp = in.c_hp;
  c.a1 = in.a1;
  c.beta = in.beta;
  c.gamma = in.gamma;
  c.eps0 = in.eps0.value_or(2.0 - in.K);
  c.c_beta = trace_constant(in.beta);
  c.c_gamma = trace_constant(in.gamma);
  c.theta = std::max(4.0 / in.a1 + in.K * in.c_hp, 1.0 + in.K / 4.0);
  c.rho = std::max(2.0, in.K / 4.0 + 1.0 + 1.0 / in.a1);
  c.nu = nu_constant(in.beta, in.gamma);
  c.delta = delta;
  c.c_delta = c_delta_constant(in.beta, in.gamma, delta);
  const double w = boundary_weight(in.K, c.eps0, in.beta, in.gamma);
  c.c1 = 2.0 * w / c.c_delta;
  c.c3 = (w / c.c_delta) * (2.0 + 2.0 * (4.0 * in.c_hp + 1.0) * (c.c_beta + c.c_gamma) +
                            (8.0 * in.c_hp + 3.0) / delta);
  c.c2 = 4.0 * c.theta + c.rho + 0.5 * c.c_gamma * (2.0 - in.K / 2.0) + c.c3;
  c.M = c.c2 / (c.eps0 - delta * c.c1);
  return c;
}

std::vector<DeltaCandidate> delta_scan(const LedgerInputs& in) {
  validate(in);
  const double nu = nu_constant(in.beta, in.gamma);
  std::vector<DeltaCandidate> out;
  out.reserve(64);
  for (int k = 0; k < 64; ++k) {
    const double d = nu * std::pow(10.0, -4.0 + 4.0 * (k + 0.5) / 64.0);
    const StabilityConstants c = constants_at_delta(in, d);
    DeltaCandidate cand{d, c.c_delta, c.c1, c.M, feasible(c)};
    if (!cand.feasible) cand.M = std::numeric_limits<double>::quiet_NaN();
    out.push_back(cand);
  }
  return out;
}

namespace {

StabilityConstants select(const LedgerInputs& in, DeltaPolicy policy) {
  if (policy == DeltaPolicy::Scan) {
    const auto scan = delta_scan(in);
    const DeltaCandidate* best = nullptr;
    for (const auto& c : scan)
      if (c.feasible && (!best || c.M < best->M)) best = &c;
    if (!best) {
      std::ostringstream os;
      os.precision(6);
      os << "no feasible delta in (0, nu):";
      for (const auto& c : scan) os << " [delta=" << c.delta << " C1=" << c.c1 << "]";
      throw InfeasibleDeltaError(os.str());
    }
    StabilityConstants c = constants_at_delta(in, best->delta);
    c.policy = policy;
    return c;
  }
  // delta = 1/2 min{nu, eps0 / C1(delta)}: g(d) = d - 1/2 min{...} is increasing
  // on (0, nu), so bisect for its root.
  const double nu = nu_constant(in.beta, in.gamma);
  auto g = [&](double d) {
    const StabilityConstants c = constants_at_delta(in, d);
    const double cap = c.c_delta > 0.0 ? c.eps0 / c.c1 : 0.0;
    return d - 0.5 * std::min(nu, cap);
  };
  double lo = 0.0, hi = nu;
  for (int it = 0; it < 200 && hi - lo > 1e-16 * nu; ++it) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) < 0.0 ? lo : hi) = mid;
  }
  StabilityConstants c = constants_at_delta(in, 0.5 * (lo + hi));
  c.policy = policy;
  if (!feasible(c)) throw InfeasibleDeltaError("fixed-fraction delta is infeasible");
  return c;
}

}  // namespace

StabilityConstants compute_constants(const LedgerInputs& in, DeltaPolicy policy) {
  StabilityConstants c = select(in, policy);
  if (in.c_hp_coarse && in.c_hp_fine) {
    LedgerInputs lo = in, hi = in;
    lo.c_hp = std::min(*in.c_hp_coarse, *in.c_hp_fine);
    hi.c_hp = std::max(*in.c_hp_coarse, *in.c_hp_fine);
    c.M_low = select(lo, policy).M;
    c.M_high = select(hi, policy).M;
  }
  return c;
}

StabilityConstants compute_constants(const DegeneracyCoefficient& coeff, double c_hp, double beta,
                                     double gamma, DeltaPolicy policy) {
  LedgerInputs in;
  in.K = coeff.K();
  in.c_hp = c_hp;
  in.a1 = coeff.a_at_1();
  in.beta = beta;
  in.gamma = gamma;
  return compute_constants(in, policy);
}

double theoretical_bound(const StabilityConstants& c, double E0, double t) {
  if (!(c.M > 0.0)) throw DomainError("theoretical_bound: M must be positive");
  if (E0 == 0.0) return 0.0;
  return E0 * std::exp(1.0 - t / c.M);
}

void attach_bound(EnergyTrace& trace, const StabilityConstants& c) {
  trace.bound.resize(trace.size());
  const double e0 = trace.size() ? trace.energy.front() : 0.0;
  for (std::size_t i = 0; i < trace.size(); ++i) trace.bound[i] = theoretical_bound(c, e0, trace.times[i]);
}

DecayReport verify_decay(const EnergyTrace& trace, const StabilityConstants& c) {
  if (trace.size() == 0) throw DomainError("verify_decay: empty trace");
  DecayReport r;
  const double e0 = trace.energy.front();
  if (e0 == 0.0) return r;

  for (std::size_t i = 0; i < trace.size(); ++i) {
    const double b = theoretical_bound(c, e0, trace.times[i]);
    const double e = trace.energy[i];
    if (e > b * (1.0 + 1e-6)) r.ok = false;
    if (e > 0.0) r.margin = std::min(r.margin, b / e);
  }

  const double t_end = trace.fixed_step_end > 0.0 ? trace.fixed_step_end : trace.times.back();
  const double floor = 1e-14 * e0;
  auto fit = [&](double from, double to, std::size_t& count) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    count = 0;
    for (std::size_t i = 0; i < trace.size(); ++i) {
      const double t = trace.times[i];
      if (t < from || t > to || !(trace.energy[i] > floor)) continue;
      const double y = std::log(trace.energy[i]);
      sx += t;
      sy += y;
      sxx += t * t;
      sxy += t * y;
      ++count;
    }
    if (count < 2) return std::numeric_limits<double>::infinity();
    const double n = static_cast<double>(count);
    const double den = n * sxx - sx * sx;
    if (!(den > 0.0)) return std::numeric_limits<double>::infinity();
    return -(n * sxy - sx * sy) / den;
  };
  std::size_t count = 0;
  r.fitted_rate = fit(0.5 * t_end, t_end, count);
  if (count < 8) {
    r.degenerate_fit = true;
    r.note = "energy below 1e-14 E(0) over most of the fit window; fitted on [0, t_end]";
    r.fitted_rate = fit(0.0, t_end, count);
  }
  return r;
}

namespace {

double interp(const std::vector<double>& t, const std::vector<double>& f, double x) {
  auto it = std::upper_bound(t.begin(), t.end(), x);
  std::size_t i = it == t.begin() ? 0 : static_cast<std::size_t>(it - t.begin()) - 1;
  i = std::min(i, t.size() - 2);
  return f[i] + (x - t[i]) / (t[i + 1] - t[i]) * (f[i + 1] - f[i]);
}

}  // namespace

IntegralInequalityReport verify_integral_inequality(const EnergyTrace& trace,
                                                    const StabilityConstants& c, double s, double T) {
  if (trace.size() < 2 || !(s < T) || s < trace.times.front() || T > trace.times.back() + 1e-12)
    throw DomainError("verify_integral_inequality: [s, T] not covered by the trace");
  const auto& t = trace.times;
  const auto& e = trace.energy;
  double acc = 0.0, pt = s, pe = interp(t, e, s);
  for (std::size_t i = 0; i < t.size() && t[i] < T; ++i) {
    if (t[i] <= s) continue;
    acc += 0.5 * (t[i] - pt) * (e[i] + pe);
    pt = t[i];
    pe = e[i];
  }
  acc += 0.5 * (T - pt) * (interp(t, e, std::min(T, t.back())) + pe);

  IntegralInequalityReport r;
  r.lhs = (c.eps0 - c.delta * c.c1) * acc;
  r.rhs = c.c2 * interp(t, e, s);
  r.slack = r.rhs > 0.0 ? r.lhs / r.rhs : 0.0;
  r.ok = r.lhs <= r.rhs * 1.05;
  return r;
}

ObservabilityReport verify_observability_estimates(const BeamDiscretization& disc,
                                                   const std::vector<BeamState>& states,
                                                   const StabilityConstants& c, double s, double T) {
  const SpaceTimeIntegrals I = integrate_states(disc, states, s, T);
  const double Es = I.at_s.energy;
  ObservabilityReport r;

  r.prop34_lhs = 0.5 * c.eps0 * (I.kinetic + I.bending);
  r.prop34_rhs = (4.0 * c.theta + c.rho + 0.5 * c.c_gamma * (2.0 - c.K / 2.0)) * Es +
                 (c.K * c.beta / 2.0 + c.K / 4.0 + c.beta) * I.y1_sq +
                 (c.beta + 1.0 + 2.0 * c.gamma * c.gamma) * I.yx1_sq;

  r.prop33_lhs = I.y1_sq + I.yx1_sq;
  r.prop33_rhs = 2.0 * c.delta / c.c_delta * I.energy +
                 (2.0 * (1.0 + (4.0 * c.c_hp + 1.0) * (c.c_beta + c.c_gamma)) +
                  (8.0 * c.c_hp + 3.0) / c.delta) /
                     c.c_delta * Es;

  r.prop33_slack = r.prop33_rhs > 0.0 ? r.prop33_lhs / r.prop33_rhs : 0.0;
  r.prop34_slack = r.prop34_rhs > 0.0 ? r.prop34_lhs / r.prop34_rhs : 0.0;
  r.prop33_ok = r.prop33_lhs <= r.prop33_rhs * 1.05;
  r.prop34_ok = r.prop34_lhs <= r.prop34_rhs * 1.05;
  return r;
}

void write_constants(std::ostream& os, const StabilityConstants& c) {
  const auto flags = os.flags();
  const auto prec = os.precision();
  os.setf(std::ios::scientific, std::ios::floatfield);
  os.precision(16);
  auto kv = [&](const char* k, double v) { os << k << " = " << v << '\n'; };
  kv("K", c.K);
  kv("c_hp", c.c_hp);
  kv("eps0", c.eps0);
  kv("a1", c.a1);
  kv("beta", c.beta);
  kv("gamma", c.gamma);
  kv("c_beta", c.c_beta);
  kv("c_gamma", c.c_gamma);
  kv("theta", c.theta);
  kv("rho", c.rho);
  kv("nu", c.nu);
  kv("delta", c.delta);
  kv("c_delta", c.c_delta);
  kv("c1", c.c1);
  kv("c2", c.c2);
  kv("c3", c.c3);
  kv("M", c.M);
  kv("M_low", c.M_low);
  kv("M_high", c.M_high);
  os << "delta_policy = " << to_string(c.policy) << '\n';
  os.flags(flags);
  os.precision(prec);
}

StabilityConstants read_constants(std::istream& is) {
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("constants file line " + std::to_string(lineno) + ": expected key = value");
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  auto num = [&](const char* k, bool required = true) {
    const auto it = kv.find(k);
    if (it == kv.end()) {
      if (required) throw ConfigError(std::string("constants file: missing key '") + k + "'");
      return std::numeric_limits<double>::quiet_NaN();
    }
    try {
      return std::stod(it->second);
    } catch (const std::exception&) {
      if (it->second == "nan" || it->second == "-nan") return std::numeric_limits<double>::quiet_NaN();
      throw ConfigError(std::string("constants file: bad value for '") + k + "': " + it->second);
    }
  };
  StabilityConstants c;
  c.K = num("K");
  c.c_hp = num("c_hp");
  c.eps0 = num("eps0");
  c.a1 = num("a1");
  c.beta = num("beta");
  c.gamma = num("gamma");
  c.c_beta = num("c_beta");
  c.c_gamma = num("c_gamma");
  c.theta = num("theta");
  c.rho = num("rho");
  c.nu = num("nu");
  c.delta = num("delta");
  c.c_delta = num("c_delta");
  c.c1 = num("c1");
  c.c2 = num("c2");
  c.c3 = num("c3");
  c.M = num("M");
  c.M_low = num("M_low", false);
  c.M_high = num("M_high", false);
  if (const auto it = kv.find("delta_policy"); it != kv.end()) c.policy = parse_delta_policy(it->second);
  if (!(c.M > 0.0)) throw ConfigError("constants file: M must be positive");
  return c;
}

}  // namespace beamstab
