// Command-line driver: simulate, constants, static-solve, hardy, sweep, verify.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "beamstab/config.hpp"
#include "beamstab/errors.hpp"
#include "beamstab/runner.hpp"
#include "beamstab/statics.hpp"

namespace fs = std::filesystem;
using namespace beamstab;

namespace {

struct Globals {
  std::string config_path;
  std::string out_dir;
  std::string label;
  int jobs = 0;
  bool debug_matrices = false;
};

RunConfig load(const Globals& g) {
  RunConfig cfg = g.config_path.empty() ? RunConfig{} : parse_config(g.config_path);
  if (!g.label.empty()) cfg.output.label = g.label;
  validate(cfg);
  return cfg;
}

void print_verdicts(const RunSummary& s) {
  for (const auto& v : s.verdicts)
    std::printf("  %-4s %-28s %s\n", v.ok ? "ok" : "FAIL", v.name.c_str(), v.detail.c_str());
}

int cmd_simulate(const Globals& g) {
  const RunConfig cfg = load(g);
  const RunSummary s = run_simulation(cfg, output_root(cfg, g.out_dir), g.debug_matrices);
  std::printf("run %s  M = %.6g  fitted_rate = %.6g\n", s.directory.string().c_str(), s.constants.M,
              s.fitted_rate);
  print_verdicts(s);
  return s.ok() ? 0 : 1;
}

int cmd_constants(const Globals& g) {
  const RunConfig cfg = load(g);
  const DegeneracyCoefficient coeff = make_coefficient(cfg.coefficient);
  const HardyEstimate fine = estimate_hardy_constant(coeff, cfg.hardy.mesh);
  const HardyEstimate coarse = estimate_hardy_constant(coeff, cfg.hardy.coarse_mesh);
  LedgerInputs in{coeff.K(), fine.c_hp, coeff.a_at_1(), cfg.beta, cfg.gamma, cfg.eps0, coarse.c_hp, fine.c_hp};
  const StabilityConstants c = compute_constants(in, cfg.delta_policy);
  std::cout << "# coefficient " << coeff.describe() << " (" << to_string(coeff.klass()) << ")\n";
  write_constants(std::cout, c);
  return 0;
}

int cmd_static(const Globals& g) {
  const RunConfig cfg = load(g);
  const DegeneracyCoefficient coeff = make_coefficient(cfg.coefficient);
  DiscretizationOptions opts;
  opts.grading = cfg.mesh.grading;
  const BeamDiscretization disc(coeff, cfg.mesh.n_elements, cfg.beta, cfg.gamma, opts);
  const StaticProblem prob{cfg.statics.lambda, cfg.statics.mu, cfg.beta, cfg.gamma};
  const DofVector z = solve_variational(disc, prob);
  const CubicSolution exact = cubic_oracle(prob);
  const DofVector zi = interpolate(disc, [&](double x) { return exact.value(x); },
                                   [&](double x) { return exact.slope(x); });
  DofVector diff(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) diff[i] = z[i] - zi[i];
  const double err = std::sqrt(triple_norm_sq(disc, diff));
  const double c_hp = estimate_hardy_constant(coeff, cfg.hardy.mesh).c_hp;
  const EstimateReport est = verify_estimates(disc, prob, z, c_hp);
  const bool accurate = err <= 1e-10 * std::max(1.0, std::sqrt(triple_norm_sq(disc, zi)));

  const fs::path dir = output_root(cfg, g.out_dir) /
                       run_name(cfg.output.label + "_static", cfg.coefficient.alpha, cfg.beta, cfg.gamma);
  fs::create_directories(dir);
  std::ofstream f(dir / "static.csv");
  f << "x,z,z_exact,z_x,z_x_exact\n";
  std::vector<double> w, t;
  disc.split(z, w, t);
  char buf[160];
  for (std::size_t i = 0; i < disc.nodes().size(); ++i) {
    const double x = disc.nodes()[i];
    std::snprintf(buf, sizeof buf, "%.16e,%.16e,%.16e,%.16e,%.16e\n", x, w[i], exact.value(x), t[i],
                  exact.slope(x));
    f << buf;
  }
  std::printf("p=%.17g\nq=%.17g\n", exact.p, exact.q);
  std::printf("triple_norm_error=%.17g\naccuracy_ok=%s\n", err, accurate ? "true" : "false");
  std::printf("weighted_l2=%.17g\nweighted_l2_bound=%.17g\n", est.weighted_l2, est.weighted_l2_bound);
  std::printf("triple_norm_sq=%.17g\ntriple_norm_sq_bound=%.17g\n", est.triple, est.triple_bound);
  std::printf("c_hp=%.17g\nestimates_ok=%s\ncsv=%s\n", c_hp, est.ok ? "true" : "false",
              (dir / "static.csv").string().c_str());
  return accurate && est.ok ? 0 : 1;
}

int cmd_hardy(const Globals& g) {
  const RunConfig cfg = load(g);
  const DegeneracyCoefficient coeff = make_coefficient(cfg.coefficient);
  const HardyEstimate coarse = estimate_hardy_constant(coeff, cfg.hardy.coarse_mesh);
  const HardyEstimate fine = estimate_hardy_constant(coeff, cfg.hardy.mesh);
  const double rel = std::abs(fine.c_hp - coarse.c_hp) / fine.c_hp;
  const HypothesisReport h = hypothesis_report(coeff, 4096);
  const char* hyp = h.ok ? "true" : "false";
  std::printf("coefficient=%s\nK=%.17g\nklass=%s\na1=%.17g\n", coeff.describe().c_str(), coeff.K(),
              to_string(coeff.klass()).c_str(), coeff.a_at_1());
  std::printf("c_hp=%.17g\nmesh=%d\nc_hp_coarse=%.17g\ncoarse_mesh=%d\nrelative_change=%.17g\n", fine.c_hp,
              fine.mesh_n, coarse.c_hp, coarse.mesh_n, rel);
  std::printf("hypothesis_ok=%s\n", hyp);
  std::printf("# K,klass,a1,c_hp,hypothesis_ok\n%.17g,%s,%.17g,%.17g,%s\n", coeff.K(),
              to_string(coeff.klass()).c_str(), coeff.a_at_1(), fine.c_hp, hyp);
  return rel < 0.01 ? 0 : 1;
}

int cmd_sweep(const Globals& g) {
  const RunConfig cfg = load(g);
  const fs::path root = output_root(cfg, g.out_dir);
  fs::create_directories(root);
  const auto rows = run_sweep(cfg, root, g.jobs);
  const fs::path summary = root / (cfg.output.label + "_summary.csv");
  {
    std::ofstream f(summary);
    write_summary_csv(f, rows);
  }
  bool all = true;
  for (const auto& r : rows) {
    all = all && r.ok();
    if (!r.error.empty()) {
      std::printf("FAIL alpha=%g beta=%g gamma=%g: %s\n", r.alpha, r.beta, r.gamma, r.error.c_str());
      continue;
    }
    std::printf("%-4s alpha=%g beta=%g gamma=%g  M=%.6g  rate=%.4g\n", r.ok() ? "ok" : "FAIL", r.alpha, r.beta,
                r.gamma, r.constants.M, r.fitted_rate);
    if (!r.ok()) print_verdicts(r);
  }
  std::printf("summary: %s (%zu runs)\n", summary.string().c_str(), rows.size());
  return all ? 0 : 1;
}

int cmd_verify(const std::string& trace_path, const std::string& constants_path) {
  std::ifstream tf(trace_path);
  if (!tf) throw ConfigError("cannot open trace '" + trace_path + "'");
  std::ifstream cf(constants_path);
  if (!cf) throw ConfigError("cannot open constants file '" + constants_path + "'");
  const EnergyTrace tr = read_trace_csv(tf);
  const StabilityConstants c = read_constants(cf);
  bool all = true;
  for (const auto& v : verify_trace(tr, c)) {
    all = all && v.ok;
    std::printf("  %-4s %-28s %s\n", v.ok ? "ok" : "FAIL", v.name.c_str(), v.detail.c_str());
  }
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stabilization diagnostics for a degenerate clamped beam with boundary damping"};
  app.set_version_flag("--version", version_string());
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--config", g.config_path, "JSON configuration file")->check(CLI::ExistingFile);
  app.add_option("--out", g.out_dir, "Output root (overrides BEAMSTAB_OUT and output.directory)");
  app.add_option("--label", g.label, "Run label (overrides output.label)");
  app.add_option("--jobs", g.jobs, "Worker threads for sweep (default: available cores)")
      ->check(CLI::NonNegativeNumber);
  app.add_flag("--debug-matrices", g.debug_matrices, "Dump assembled matrices in coordinate format");

  auto* sim = app.add_subcommand("simulate", "Run one simulation with all checks");
  auto* cons = app.add_subcommand("constants", "Print the constant ledger");
  auto* stat = app.add_subcommand("static-solve", "Solve the static trace problem and compare with the cubic");
  auto* hardy = app.add_subcommand("hardy", "Estimate the weighted Hardy constant at two mesh levels");
  auto* sweep = app.add_subcommand("sweep", "Run the alpha x beta x gamma grid");
  auto* ver = app.add_subcommand("verify", "Check a stored trace against a stored ledger");
  std::string trace_path, constants_path;
  ver->add_option("--trace", trace_path, "Trace CSV")->required()->check(CLI::ExistingFile);
  ver->add_option("--constants", constants_path, "Constants file")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);
  try {
    if (*sim) return cmd_simulate(g);
    if (*cons) return cmd_constants(g);
    if (*stat) return cmd_static(g);
    if (*hardy) return cmd_hardy(g);
    if (*sweep) return cmd_sweep(g);
    if (*ver) return cmd_verify(trace_path, constants_path);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
  return 0;
}
