#include "beamstab/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "beamstab/errors.hpp"
#include "beamstab/kernels/kernels.hpp"

#ifndef BEAMSTAB_VERSION
#define BEAMSTAB_VERSION "0.0.0"
#endif

namespace beamstab {

namespace fs = std::filesystem;

bool RunSummary::ok() const {
  if (!error.empty()) return false;
  return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.ok; });
}

std::string version_string() { return BEAMSTAB_VERSION; }

std::string run_name(const std::string& label, double alpha, double beta, double gamma) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "%s_%g_%g_%g", label.c_str(), alpha, beta, gamma);
  return buf;
}

fs::path output_root(const RunConfig& cfg, const std::string& override_dir) {
  if (!override_dir.empty()) return override_dir;
  if (const char* env = std::getenv("BEAMSTAB_OUT"); env && *env) return env;
  return cfg.output.directory;
}

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

std::string fmt_short(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

Verdict trace_bound_verdict(const EnergyTrace& tr, const StabilityConstants& c) {
  double worst_value = 0.0, worst_slope = 0.0;
  bool ok = true;
  for (std::size_t i = 0; i < tr.size(); ++i) {
    const double e = tr.energy[i];
    const double y2 = tr.trace_y1[i] * tr.trace_y1[i];
    const double s2 = tr.trace_yx1[i] * tr.trace_yx1[i];
    if (y2 > c.c_beta * e * (1.0 + 1e-3) || s2 > c.c_gamma * e * (1.0 + 1e-3)) ok = false;
    if (e > 0.0) {
      worst_value = std::max(worst_value, y2 / (c.c_beta * e));
      worst_slope = std::max(worst_slope, s2 / (c.c_gamma * e));
    }
  }
  return {"trace_bounds", ok,
          "max y(1)^2/(C_beta E) = " + fmt_short(worst_value) +
              ", max y_x(1)^2/(C_gamma E) = " + fmt_short(worst_slope)};
}

Verdict ledger_verdict(const StabilityConstants& c, double fitted_rate) {
  const bool delta_ok = c.delta > 0.0 && c.delta < std::min(c.nu, c.eps0 / c.c1);
  const bool rate_ok = fitted_rate >= 1.0 / c.M;
  return {"ledger", delta_ok && c.c_delta > 0.0 && c.M > 0.0 && rate_ok,
          "delta = " + fmt_short(c.delta) + ", min(nu, eps0/C1) = " +
              fmt_short(std::min(c.nu, c.eps0 / c.c1)) + ", C_delta = " + fmt_short(c.c_delta) +
              ", fitted_rate = " + fmt_short(fitted_rate) + ", 1/M = " + fmt_short(1.0 / c.M)};
}

void write_verdicts(std::ostream& os, const std::vector<Verdict>& vs) {
  for (const auto& v : vs) os << (v.ok ? "ok   " : "FAIL ") << v.name << "  " << v.detail << '\n';
}

// Removes the directory unless released; keeps failed runs from leaving
// half-written output behind.
class DirectoryGuard {
 public:
  explicit DirectoryGuard(fs::path p) : path_(std::move(p)) {}
  ~DirectoryGuard() {
    if (!released_) {
      std::error_code ec;
      fs::remove_all(path_, ec);
    }
  }
  void release() { released_ = true; }

 private:
  fs::path path_;
  bool released_ = false;
};

}  // namespace

void write_trace_csv(std::ostream& os, const EnergyTrace& tr) {
  os << "# fixed_step_end=" << fmt(tr.fixed_step_end) << '\n';
  os << "t,E,dissipation,bound,trace_y1,trace_yx1\n";
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i < tr.size(); ++i) {
    os << fmt(tr.times[i]) << ',' << fmt(tr.energy[i]) << ',' << fmt(tr.dissipation[i]) << ','
       << fmt(i < tr.bound.size() ? tr.bound[i] : nan) << ',' << fmt(tr.trace_y1[i]) << ','
       << fmt(tr.trace_yx1[i]) << '\n';
  }
}

EnergyTrace read_trace_csv(std::istream& is) {
  EnergyTrace tr;
  std::string line;
  bool header = false;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (const auto p = line.find("fixed_step_end="); p != std::string::npos)
        tr.fixed_step_end = std::stod(line.substr(p + 15));
      continue;
    }
    if (!header) {
      if (line.rfind("t,E,dissipation,bound,trace_y1,trace_yx1", 0) != 0)
        throw ConfigError("trace CSV: unexpected header '" + line + "'");
      header = true;
      continue;
    }
    std::stringstream ss(line);
    std::string cell;
    double v[6];
    for (int k = 0; k < 6; ++k) {
      if (!std::getline(ss, cell, ','))
        throw ConfigError("trace CSV line " + std::to_string(lineno) + ": expected 6 columns");
      try {
        v[k] = std::stod(cell);
      } catch (const std::exception&) {
        v[k] = std::numeric_limits<double>::quiet_NaN();
        if (cell.find("nan") == std::string::npos)
          throw ConfigError("trace CSV line " + std::to_string(lineno) + ": bad number '" + cell + "'");
      }
    }
    tr.times.push_back(v[0]);
    tr.energy.push_back(v[1]);
    tr.dissipation.push_back(v[2]);
    tr.bound.push_back(v[3]);
    tr.trace_y1.push_back(v[4]);
    tr.trace_yx1.push_back(v[5]);
  }
  if (tr.size() == 0) throw ConfigError("trace CSV: no data rows");
  if (tr.fixed_step_end <= 0.0) tr.fixed_step_end = tr.times.back();
  if (tr.size() > 1) tr.dt = tr.times[1] - tr.times[0];
  return tr;
}

std::vector<Verdict> verify_trace(const EnergyTrace& trace, const StabilityConstants& c) {
  std::vector<Verdict> out;
  const double res = energy_derivative_identity_residual(trace);
  out.push_back({"energy_identity", res <= 1e-10, "max residual / E(0) = " + fmt_short(res)});
  const DecayReport d = verify_decay(trace, c);
  out.push_back({"decay", d.ok,
                 "margin = " + fmt_short(d.margin) + ", fitted_rate = " + fmt_short(d.fitted_rate) +
                     (d.degenerate_fit ? " (degenerate fit)" : "")});
  out.push_back(trace_bound_verdict(trace, c));
  out.push_back(ledger_verdict(c, d.fitted_rate));
  return out;
}

RunSummary run_simulation(const RunConfig& cfg, const fs::path& root, bool debug_matrices) {
  validate(cfg);
  RunSummary s;
  s.alpha = cfg.coefficient.alpha;
  s.beta = cfg.beta;
  s.gamma = cfg.gamma;
  const std::string name = run_name(cfg.output.label, s.alpha, s.beta, s.gamma);
  s.directory = root / name;
  fs::create_directories(s.directory);
  DirectoryGuard guard(s.directory);

  const DegeneracyCoefficient coeff = make_coefficient(cfg.coefficient);
  const HardyEstimate fine = estimate_hardy_constant(coeff, cfg.hardy.mesh);
  const HardyEstimate coarse = estimate_hardy_constant(coeff, cfg.hardy.coarse_mesh);
  LedgerInputs in;
  in.K = coeff.K();
  in.c_hp = fine.c_hp;
  in.a1 = coeff.a_at_1();
  in.beta = cfg.beta;
  in.gamma = cfg.gamma;
  in.eps0 = cfg.eps0;
  in.c_hp_coarse = coarse.c_hp;
  in.c_hp_fine = fine.c_hp;
  s.constants = compute_constants(in, cfg.delta_policy);
  const StabilityConstants& c = s.constants;

  DiscretizationOptions opts;
  opts.grading = cfg.mesh.grading;
  const BeamDiscretization disc(coeff, cfg.mesh.n_elements, cfg.beta, cfg.gamma, opts);
  if (debug_matrices) disc.dump_matrices(s.directory.string(), name);

  const DofVector y0 = interpolate_profile(disc, cfg.initial.y0, cfg.initial.y0_amplitude);
  const DofVector y1 = interpolate_profile(disc, cfg.initial.y1, cfg.initial.y1_amplitude);

  SimulationOptions so;
  so.snapshot_stride = cfg.time.snapshot_stride;
  so.snapshot_from = 0.0;
  so.snapshot_to = cfg.checks.observability_T;
  if (cfg.checks.extend) so.extend_to = std::max(cfg.time.t_end, 3.0 * c.M);
  SimulationResult sim = simulate(disc, y0, y1, cfg.time.dt, cfg.time.t_end, so);
  attach_bound(sim.trace, c);

  s.verdicts = verify_trace(sim.trace, c);
  s.identity_residual = energy_derivative_identity_residual(sim.trace);
  const DecayReport d = verify_decay(sim.trace, c);
  s.fitted_rate = d.fitted_rate;
  s.decay_ok = d.ok;

  for (double sv : cfg.checks.integral_s) {
    const auto r = verify_integral_inequality(sim.trace, c, sv, cfg.time.t_end);
    s.verdicts.push_back({"integral_inequality_s=" + fmt_short(sv), r.ok,
                          "lhs/rhs = " + fmt_short(r.slack)});
  }
  if (cfg.checks.observability_T <= cfg.time.t_end && cfg.time.snapshot_stride > 0) {
    const auto o = verify_observability_estimates(disc, sim.snapshots, c, cfg.checks.observability_s,
                                                  cfg.checks.observability_T);
    s.prop33_slack = o.prop33_slack;
    s.prop34_slack = o.prop34_slack;
    s.verdicts.push_back({"boundary_trace_estimate", o.prop33_ok, "lhs/rhs = " + fmt_short(o.prop33_slack)});
    s.verdicts.push_back({"space_time_energy_estimate", o.prop34_ok, "lhs/rhs = " + fmt_short(o.prop34_slack)});
  } else {
    s.prop33_slack = s.prop34_slack = std::numeric_limits<double>::quiet_NaN();
  }

  {
    std::ofstream f(s.directory / (name + ".csv"));
    write_trace_csv(f, sim.trace);
    if (!f) throw std::runtime_error("failed writing trace CSV in " + s.directory.string());
  }
  {
    std::ofstream f(s.directory / "constants.txt");
    write_constants(f, c);
  }
  {
    std::ofstream f(s.directory / "verdicts.txt");
    write_verdicts(f, s.verdicts);
  }
  {
    nlohmann::json m;
    m["code_version"] = version_string();
    m["kernels"] = kernels::active().name;
    m["coefficient"] = coeff.describe();
    m["K"] = coeff.K();
    m["class"] = to_string(coeff.klass());
    m["c_hp"] = {{"mesh", fine.mesh_n}, {"value", fine.c_hp}, {"coarse_mesh", coarse.mesh_n},
                 {"coarse_value", coarse.c_hp}};
    const auto& h = disc.element_lengths();
    const auto [h_min, h_max] = std::minmax_element(h.begin(), h.end());
    nlohmann::json spectrum;
    try {
      const EigenEstimate lo = smallest_generalized_eigenvalue(disc.elastic(), disc.mass());
      const EigenEstimate hi = largest_generalized_eigenvalue(disc.elastic(), disc.mass());
      spectrum = {{"lambda_min", lo.value}, {"lambda_max", hi.value}, {"lambda_max_converged", hi.converged}};
    } catch (const SolverError& e) {
      spectrum = {{"error", e.what()}};
    }
    m["discretization"] = {{"n_elements", cfg.mesh.n_elements},
                           {"grading", cfg.mesh.grading},
                           {"n_dof", disc.n_dof()},
                           {"bandwidth", disc.elastic().bandwidth()},
                           {"h_min", *h_min},
                           {"h_max", *h_max},
                           {"spectrum", spectrum}};
    m["fixed_step_end"] = sim.trace.fixed_step_end;
    m["extended_to"] = sim.trace.times.back();
    m["config"] = nlohmann::json::parse(to_json(cfg));
    m["files"] = {name + ".csv", "constants.txt", "verdicts.txt"};
    std::ofstream f(s.directory / "manifest.json");
    f << m.dump(2) << '\n';
  }
  guard.release();
  return s;
}

std::vector<RunSummary> run_sweep(const RunConfig& cfg, const fs::path& root, int jobs) {
  auto or_single = [](const std::vector<double>& v, double x) { return v.empty() ? std::vector<double>{x} : v; };
  const auto alphas = or_single(cfg.sweep.alpha, cfg.coefficient.alpha);
  const auto betas = or_single(cfg.sweep.beta, cfg.beta);
  const auto gammas = or_single(cfg.sweep.gamma, cfg.gamma);

  std::vector<RunConfig> grid;
  for (double a : alphas)
    for (double b : betas)
      for (double g : gammas) {
        RunConfig c = cfg;
        c.coefficient.alpha = a;
        c.beta = b;
        c.gamma = g;
        grid.push_back(c);
      }

  std::vector<RunSummary> out(grid.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next++; i < grid.size(); i = next++) {
      try {
        out[i] = run_simulation(grid[i], root);
      } catch (const std::exception& e) {
        RunSummary& s = out[i];
        s.alpha = grid[i].coefficient.alpha;
        s.beta = grid[i].beta;
        s.gamma = grid[i].gamma;
        s.error = e.what();
      }
    }
  };
  if (jobs <= 0) jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  jobs = std::min<int>(jobs, static_cast<int>(grid.size()));
  {
    std::vector<std::jthread> pool;
    for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
    worker();
  }
  std::sort(out.begin(), out.end(), [](const RunSummary& x, const RunSummary& y) {
    return std::tie(x.alpha, x.beta, x.gamma) < std::tie(y.alpha, y.beta, y.gamma);
  });
  return out;
}

void write_summary_csv(std::ostream& os, const std::vector<RunSummary>& rows) {
  os << "alpha,beta,gamma,K,c_hp,eps0,nu,delta,c_delta,c1,c2,c3,M,fitted_rate,decay_ok,prop33_slack,"
        "prop34_slack\n";
  for (const auto& r : rows) {
    const auto& c = r.constants;
    os << fmt(r.alpha) << ',' << fmt(r.beta) << ',' << fmt(r.gamma) << ',' << fmt(c.K) << ','
       << fmt(c.c_hp) << ',' << fmt(c.eps0) << ',' << fmt(c.nu) << ',' << fmt(c.delta) << ','
       << fmt(c.c_delta) << ',' << fmt(c.c1) << ',' << fmt(c.c2) << ',' << fmt(c.c3) << ','
       << fmt(c.M) << ',' << fmt(r.fitted_rate) << ',' << (r.error.empty() && r.decay_ok ? 1 : 0)
       << ',' << fmt(r.prop33_slack) << ',' << fmt(r.prop34_slack) << '\n';
  }
}

}  // namespace beamstab
