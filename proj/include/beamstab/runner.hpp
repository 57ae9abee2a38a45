#pragma once
// Orchestration of runs: one directory per run holding the trace CSV, the
// constant ledger, the verdicts and a manifest of the resolved config.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "beamstab/config.hpp"
#include "beamstab/stability.hpp"

namespace beamstab {

struct Verdict {
  std::string name;
  bool ok = true;
  std::string detail;
};

struct RunSummary {
  double alpha = 0.0, beta = 0.0, gamma = 0.0;
  StabilityConstants constants;
  double identity_residual = 0.0;
  double fitted_rate = 0.0;
  bool decay_ok = false;
  double prop33_slack = 0.0, prop34_slack = 0.0;
  std::vector<Verdict> verdicts;
  std::filesystem::path directory;
  std::string error;  // set when the run threw

  bool ok() const;
};

std::string version_string();

/// {label}_{alpha}_{beta}_{gamma}
std::string run_name(const std::string& label, double alpha, double beta, double gamma);

/// Output root: explicit override if non-empty, else $BEAMSTAB_OUT, else the config's directory.
std::filesystem::path output_root(const RunConfig& cfg, const std::string& override_dir);

/// Runs the configured simulation and all checks. Writes into
/// root/run_name(...). On an exception the run directory is removed and the
/// exception rethrown.
RunSummary run_simulation(const RunConfig& cfg, const std::filesystem::path& root,
                          bool debug_matrices = false);

/// Grid over sweep.alpha x sweep.beta x sweep.gamma (each list defaulting to
/// the single configured value), `jobs` worker threads. Rows come back sorted
/// by (alpha, beta, gamma). Failed runs carry their error message.
std::vector<RunSummary> run_sweep(const RunConfig& cfg, const std::filesystem::path& root, int jobs);

void write_trace_csv(std::ostream& os, const EnergyTrace& trace);
/// Reads the columns written by write_trace_csv; '#' lines may carry
/// "fixed_step_end=<t>".
EnergyTrace read_trace_csv(std::istream& is);

void write_summary_csv(std::ostream& os, const std::vector<RunSummary>& rows);

/// Checks a stored trace against a stored ledger: energy identity, decay
/// certificate and trace bounds.
std::vector<Verdict> verify_trace(const EnergyTrace& trace, const StabilityConstants& c);

}  // namespace beamstab
