// Acceptance criteria. One PASS/FAIL line per criterion; exit status 1 if any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "../support/oracles.hpp"
#include "beamstab/config.hpp"
#include "beamstab/runner.hpp"
#include "beamstab/statics.hpp"

namespace fs = std::filesystem;
using namespace beamstab;

namespace {

const std::vector<double> kSweepAlpha = {0.3, 0.7, 1.0, 1.5};
const std::vector<double> kSweepBoundary = {0.0, 1.0, 2.0};

struct Outcome {
  bool ok = true;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

const Verdict* find_verdict(const RunSummary& r, const std::string& name) {
  for (const auto& v : r.verdicts)
    if (v.name == name) return &v;
  return nullptr;
}

std::string run_tag(const RunSummary& r) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "alpha=%g beta=%g gamma=%g", r.alpha, r.beta, r.gamma);
  return buf;
}

// Sweep verdicts that must hold on every run.
Outcome every_run(const std::vector<RunSummary>& rows, const std::vector<std::string>& names) {
  Outcome o;
  int checked = 0;
  for (const auto& r : rows) {
    if (!r.error.empty()) {
      o.ok = false;
      o.detail = run_tag(r) + ": " + r.error;
      return o;
    }
    for (const auto& n : names) {
      const Verdict* v = find_verdict(r, n);
      if (!v) {
        o.ok = false;
        o.detail = run_tag(r) + ": verdict " + n + " missing";
        return o;
      }
      ++checked;
      if (!v->ok && o.ok) {
        o.ok = false;
        o.detail = run_tag(r) + ": " + n + " " + v->detail;
      }
    }
  }
  if (o.ok) o.detail = std::to_string(checked) + " checks over " + std::to_string(rows.size()) + " runs";
  return o;
}

std::vector<RunSummary> run_acceptance_sweep(const fs::path& root) {
  RunConfig cfg;
  cfg.output.label = "acceptance";
  cfg.mesh.n_elements = 128;
  cfg.time.dt = 1e-3;
  cfg.time.t_end = 20.0;
  cfg.initial.y0 = InitialProfile::X2OneMinusX2;
  cfg.initial.y1 = InitialProfile::Zero;
  cfg.hardy.mesh = 512;
  cfg.hardy.coarse_mesh = 256;
  cfg.sweep.alpha = kSweepAlpha;
  cfg.sweep.beta = kSweepBoundary;
  cfg.sweep.gamma = kSweepBoundary;
  return run_sweep(cfg, root, 0);
}

Outcome criterion_energy_identity(const std::vector<RunSummary>& rows) {
  Outcome o = every_run(rows, {"energy_identity"});
  double worst = 0.0;
  for (const auto& r : rows) worst = std::max(worst, r.identity_residual);
  if (o.ok) o.detail += ", worst residual " + fmt("%.2e", worst) + " E(0)";
  return o;
}

Outcome criterion_decay(const std::vector<RunSummary>& rows) {
  Outcome o = every_run(rows, {"decay"});
  double M_max = 0.0;
  for (const auto& r : rows) M_max = std::max(M_max, r.constants.M);
  if (o.ok) o.detail += ", M up to " + fmt("%.4g", M_max) + ", traces to 3M";
  return o;
}

Outcome criterion_static_oracle() {
  const auto coeff = DegeneracyCoefficient::power_law(0.5);
  const double c_hp = estimate_hardy_constant(coeff, 512).c_hp;
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> load(-10.0, 10.0);
  Outcome o;
  double worst = 0.0;
  int count = 0;
  for (double beta : {0.0, 0.5, 1.0, 2.0})
    for (double gamma : {0.0, 0.5, 1.0, 2.0}) {
      const BeamDiscretization disc(coeff, 128, beta, gamma);
      for (int k = 0; k < 100; ++k) {
        const StaticProblem prob{load(rng), load(rng), beta, gamma};
        const CubicSolution exact = cubic_oracle(prob);
        const DofVector z = solve_variational(disc, prob);
        const DofVector zi = interpolate(disc, [&](double x) { return exact.value(x); },
                                         [&](double x) { return exact.slope(x); });
        DofVector diff(z.size());
        for (std::size_t i = 0; i < z.size(); ++i) diff[i] = z[i] - zi[i];
        const double err = std::sqrt(triple_norm_sq(disc, diff)) / std::max(1.0, std::sqrt(triple_norm_sq(disc, zi)));
        worst = std::max(worst, err);
        const bool est_ok = verify_estimates(disc, prob, z, c_hp).ok;
        ++count;
        if ((err > 1e-10 || !est_ok) && o.ok) {
          o.ok = false;
          o.detail = "beta=" + fmt("%g", beta) + " gamma=" + fmt("%g", gamma) + " error " + fmt("%.2e", err) +
                     (est_ok ? "" : ", estimate violated");
        }
      }
    }
  if (o.ok) o.detail = std::to_string(count) + " instances, worst |||z_h - z|||/max(1,|||z|||) = " + fmt("%.2e", worst);
  return o;
}

Outcome criterion_gauss_green() {
  const std::vector<Polynomial> mono = {Polynomial{{0, 0, 1}}, Polynomial{{0, 0, 0, 1}},
                                        Polynomial{{0, 0, 0, 0, 1}}};
  Outcome o;
  double worst = 0.0;
  for (double alpha : kSweepAlpha) {
    const BeamDiscretization disc(DegeneracyCoefficient::power_law(alpha), 128, 1.0, 1.0);
    for (const auto& u : mono)
      for (const auto& v : mono) worst = std::max(worst, gauss_green_residual(disc, u, v));
  }
  o.ok = worst <= 1e-10;
  o.detail = "9 monomial pairs x 4 coefficients, worst residual " + fmt("%.2e", worst);
  return o;
}

// Random trial function sum_k c_k x^{p_k} + d sin(w x) with u(0) = 0 and
// int u^2 / a finite: every exponent exceeds alpha/2.
struct Trial {
  std::vector<double> c, p;
  double d = 0.0, w = 0.0;
  double value(double x) const {
    double s = d * std::sin(w * x);
    for (std::size_t k = 0; k < c.size(); ++k) s += c[k] * std::pow(x, p[k]);
    return s;
  }
  double slope(double x) const {
    double s = d * w * std::cos(w * x);
    for (std::size_t k = 0; k < c.size(); ++k) s += c[k] * p[k] * std::pow(x, p[k] - 1.0);
    return s;
  }
};

// Half white noise, half interpolants of random smooth clamped functions
// (x^p with p >= 2 and 1 - cos(w x)), so both rough and smooth directions are hit.
DofVector random_dofs(const BeamDiscretization& disc, std::mt19937_64& rng, int k) {
  std::normal_distribution<double> g;
  if (k % 2 == 0) {
    DofVector u(disc.n_dof());
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = g(rng);
    return u;
  }
  std::uniform_real_distribution<double> expo(2.0, 6.0), freq(0.5, 15.0);
  std::vector<double> c(3), p(3);
  for (int j = 0; j < 3; ++j) {
    c[j] = g(rng);
    p[j] = expo(rng);
  }
  const double d = g(rng), w = freq(rng);
  return interpolate(
      disc,
      [&](double x) {
        double s = d * (1.0 - std::cos(w * x));
        for (int j = 0; j < 3; ++j) s += c[j] * std::pow(x, p[j]);
        return s;
      },
      [&](double x) {
        double s = d * w * std::sin(w * x);
        for (int j = 0; j < 3; ++j) s += c[j] * p[j] * std::pow(x, p[j] - 1.0);
        return s;
      });
}

Outcome criterion_hardy() {
  Outcome o;
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  double worst_change = 0.0, worst_ratio = 0.0, worst_norm = 0.0;
  int trials = 0;
  for (double alpha : kSweepAlpha) {
    const auto coeff = DegeneracyCoefficient::power_law(alpha);
    const double coarse = estimate_hardy_constant(coeff, 256).c_hp;
    const double fine = estimate_hardy_constant(coeff, 512).c_hp;
    const double change = std::abs(fine - coarse) / fine;
    worst_change = std::max(worst_change, change);
    if (change >= 0.01 && o.ok) {
      o.ok = false;
      o.detail = "alpha=" + fmt("%g", alpha) + ": c_hp changes by " + fmt("%.2e", change);
    }

    std::uniform_real_distribution<double> expo(alpha / 2.0 + 0.3, 4.0);
    std::uniform_real_distribution<double> freq(0.1, 12.0);
    for (int k = 0; k < 250; ++k) {
      Trial t;
      const int terms = 1 + k % 4;
      for (int j = 0; j < terms; ++j) {
        t.c.push_back(g(rng));
        t.p.push_back(expo(rng));
      }
      if (k % 2 == 1) {
        t.d = g(rng);
        t.w = freq(rng);
      }
      const double num = oracle::integrate_01([&](double x) { return t.value(x) * t.value(x) / coeff.value(x); });
      const double den = oracle::integrate_01([&](double x) { return t.slope(x) * t.slope(x); });
      if (!(den > 0.0)) continue;
      const double ratio = num / den / fine;
      worst_ratio = std::max(worst_ratio, ratio);
      ++trials;
      if (ratio > 1.0 + 1e-3 && o.ok) {
        o.ok = false;
        o.detail = "alpha=" + fmt("%g", alpha) + ": trial quotient exceeds c_hp by " + fmt("%.2e", ratio - 1.0);
      }
    }

    const BeamDiscretization disc(coeff, 512, 0.0, 0.0);
    for (int k = 0; k < 25; ++k) {
      const DofVector u = random_dofs(disc, rng, k);
      const double s = disc.stiffness().quadratic_form(u);
      const double r = (disc.weighted_l2(u) + s) / ((4.0 * fine + 1.0) * s);
      worst_norm = std::max(worst_norm, r);
      if (r > 1.0 + 1e-3 && o.ok) {
        o.ok = false;
        o.detail = "alpha=" + fmt("%g", alpha) + ": norm inequality ratio " + fmt("%.6f", r);
      }
    }
  }
  if (o.ok)
    o.detail = "mesh change <= " + fmt("%.2e", worst_change) + ", " + std::to_string(trials) +
               " trials with max quotient/c_hp " + fmt("%.4f", worst_ratio) + ", 100 vectors with max ratio " +
               fmt("%.4f", worst_norm);
  return o;
}

Outcome criterion_traces(const std::vector<RunSummary>& rows) {
  Outcome o = every_run(rows, {"trace_bounds"});
  if (!o.ok) return o;
  std::mt19937_64 rng(13);
  double worst = 0.0;
  for (double alpha : kSweepAlpha) {
    const BeamDiscretization disc(DegeneracyCoefficient::power_law(alpha), 128, 0.0, 0.0);
    for (int k = 0; k < 25; ++k) {
      const DofVector u = random_dofs(disc, rng, k);
      const double s = disc.stiffness().quadratic_form(u);
      const double v = disc.value_at_1(u), d = disc.slope_at_1(u);
      worst = std::max({worst, v * v / s, d * d / s});
    }
  }
  o.ok = worst <= 1.0 + 1e-3;
  o.detail += "; 100 random vectors, max trace^2 / u'Su = " + fmt("%.4f", worst);
  return o;
}

Outcome criterion_multiplier() {
  Outcome o;
  std::string detail;
  for (double alpha : {0.5, 1.5}) {
    const auto coeff = DegeneracyCoefficient::power_law(alpha);
    double res[2] = {0.0, 0.0};
    for (int level = 0; level < 2; ++level) {
      const int n = 128 << level;
      const double dt = 1e-3 / (1 << level);
      const BeamDiscretization disc(coeff, n, 1.0, 1.0);
      SimulationOptions so;
      so.snapshot_stride = 1;
      so.snapshot_to = 2.0;
      const auto sim = simulate(disc, interpolate_profile(disc, InitialProfile::X2OneMinusX2),
                                interpolate_profile(disc, InitialProfile::Zero), dt, 2.0, so);
      res[level] = multiplier_identity_residual(disc, coeff, sim.snapshots, 0.1, 2.0).residual_31;
    }
    const double factor = res[0] / res[1];
    const bool ok = res[0] <= 0.05 && factor >= 2.0;
    o.ok = o.ok && ok;
    detail += (detail.empty() ? "" : "; ") + std::string("alpha=") + fmt("%g", alpha) + " residual " +
              fmt("%.2e", res[0]) + " -> " + fmt("%.2e", res[1]) + " (x" + fmt("%.2f", factor) + ")";
  }
  o.detail = detail;
  return o;
}

// E(t_end) at dt = 4h, 2h, h on a coarse mesh, where the time error dominates
// the undamped stiff boundary modes.
Outcome criterion_order() {
  const BeamDiscretization disc(DegeneracyCoefficient::power_law(0.5), 8, 1.0, 1.0);
  const DofVector y0 = interpolate_profile(disc, InitialProfile::SinBumpX2);
  const DofVector y1 = interpolate_profile(disc, InitialProfile::Zero);
  SimulationOptions so;
  so.snapshot_stride = 0;
  const double h = 1.25e-5, T = 0.25;
  double e[3];
  for (int k = 0; k < 3; ++k) e[k] = simulate(disc, y0, y1, h * (4 >> k), T, so).trace.energy.back();
  const double order = std::log2(std::abs(e[0] - e[1]) / std::abs(e[1] - e[2]));
  Outcome o;
  o.ok = order >= 1.9;
  o.detail = "observed order " + fmt("%.3f", order) + " (n=8, T=0.25, h=1.25e-5)";
  return o;
}

Outcome criterion_ledger(const std::vector<RunSummary>& rows) {
  Outcome o = every_run(rows, {"ledger"});
  double min_ratio = std::numeric_limits<double>::infinity();
  for (const auto& r : rows) {
    const auto& c = r.constants;
    const bool ok = c.delta > 0.0 && c.delta < std::min(c.nu, c.eps0 / c.c1) && c.c_delta > 0.0 && c.M > 0.0 &&
                    r.fitted_rate >= 1.0 / c.M;
    min_ratio = std::min(min_ratio, r.fitted_rate * c.M);
    if (!ok && o.ok) {
      o.ok = false;
      o.detail = run_tag(r) + ": ledger or rate check failed";
    }
  }
  if (o.ok) o.detail += ", min fitted_rate * M = " + fmt("%.3g", min_ratio);
  return o;
}

}  // namespace

int main() {
  const auto start = std::chrono::steady_clock::now();
  const fs::path root = fs::temp_directory_path() / ("beamstab_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(root);

  std::vector<RunSummary> rows;
  std::string sweep_error;
  try {
    rows = run_acceptance_sweep(root);
  } catch (const std::exception& e) {
    sweep_error = e.what();
  }
  const bool sweep_ok = sweep_error.empty() && rows.size() == 36;

  struct Entry {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  auto need_sweep = [&](auto f) {
    return [&, f]() -> Outcome {
      if (!sweep_ok) return {false, "sweep failed: " + (sweep_error.empty() ? std::to_string(rows.size()) + " rows" : sweep_error)};
      return f(rows);
    };
  };
  const std::vector<Entry> entries = {
      {1, "discrete energy identity", need_sweep(criterion_energy_identity)},
      {2, "decay certificate", need_sweep(criterion_decay)},
      {3, "integral inequality", need_sweep([](const auto& r) {
         return every_run(r, {"integral_inequality_s=0.1", "integral_inequality_s=1"});
       })},
      {4, "static oracle equivalence", criterion_static_oracle},
      {5, "Gauss-Green residual", criterion_gauss_green},
      {6, "Hardy constant consistency", criterion_hardy},
      {7, "trace bounds", need_sweep(criterion_traces)},
      {8, "multiplier identity convergence", criterion_multiplier},
      {9, "scheme order", criterion_order},
      {10, "constant-ledger sanity", need_sweep(criterion_ledger)},
  };

  int failed = 0;
  for (const auto& e : entries) {
    Outcome o;
    try {
      o = e.run();
    } catch (const std::exception& ex) {
      o = {false, std::string("exception: ") + ex.what()};
    }
    if (!o.ok) ++failed;
    std::printf("%s [%2d] %-32s %s\n", o.ok ? "PASS" : "FAIL", e.id, e.name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::error_code ec;
  fs::remove_all(root, ec);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("%d/%zu criteria passed in %.1f s\n", static_cast<int>(entries.size()) - failed, entries.size(), secs);
  return failed == 0 ? 0 : 1;
}
