#pragma once
// Constant ledger of the exponential decay certificate E(t) <= E(0) e^{1 - t/M}
// and the checks of that certificate and its intermediate estimates against
// simulated traces.

#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "beamstab/coefficient.hpp"
#include "beamstab/dynamics.hpp"

namespace beamstab {

enum class DeltaPolicy { Scan, FixedFraction };

std::string to_string(DeltaPolicy p);
/// Accepts "scan" and "fixed_fraction".
DeltaPolicy parse_delta_policy(const std::string& name);

struct LedgerInputs {
  double K = 0.0;
  double c_hp = 0.0;
  double a1 = 1.0;
  double beta = 0.0;
  double gamma = 0.0;
  /// Defaults to 2 - K when unset; must lie in (0, 2 - K].
  std::optional<double> eps0;
  /// Hardy estimates at two mesh levels; when both are set, M is also
  /// evaluated at each to give an interval.
  std::optional<double> c_hp_coarse;
  std::optional<double> c_hp_fine;
};

struct DeltaCandidate {
  double delta = 0.0;
  double c_delta = 0.0;
  double c1 = 0.0;
  double M = std::numeric_limits<double>::quiet_NaN();
  bool feasible = false;
};

struct StabilityConstants {
  double K = 0.0, c_hp = 0.0, eps0 = 0.0, a1 = 0.0;
  double beta = 0.0, gamma = 0.0;
  double c_beta = 0.0, c_gamma = 0.0;
  double theta = 0.0, rho = 0.0, nu = 0.0;
  double delta = 0.0, c_delta = 0.0;
  double c1 = 0.0, c2 = 0.0, c3 = 0.0;
  double M = 0.0;
  DeltaPolicy policy = DeltaPolicy::Scan;
  /// M at the two Hardy estimates (NaN when no band was supplied).
  double M_low = std::numeric_limits<double>::quiet_NaN();
  double M_high = std::numeric_limits<double>::quiet_NaN();
};

/// Case split on whether beta and gamma exceed 1.
double nu_constant(double beta, double gamma);
double c_delta_constant(double beta, double gamma, double delta);
/// min{2, 2/b} for b != 0, else 2.
double trace_constant(double b);
/// The boundary weight K beta/2 + K/4 + 2 beta + eps0 beta/2 + 1 + 2 gamma^2 + eps0 gamma/2
/// shared by C1 and C3.
double boundary_weight(double K, double eps0, double beta, double gamma);

/// Full ledger at a given delta; no feasibility check.
StabilityConstants constants_at_delta(const LedgerInputs& in, double delta);

/// Ledger with delta chosen by policy. Throws InfeasibleDeltaError (with the
/// scan in the message) when no delta in (0, nu) satisfies delta < eps0 / C1(delta).
StabilityConstants compute_constants(const LedgerInputs& in, DeltaPolicy policy = DeltaPolicy::Scan);
StabilityConstants compute_constants(const DegeneracyCoefficient& coeff, double c_hp, double beta,
                                     double gamma, DeltaPolicy policy = DeltaPolicy::Scan);

/// The 64 log-spaced candidates nu * 10^{-4 + 4 (k + 1/2) / 64}.
std::vector<DeltaCandidate> delta_scan(const LedgerInputs& in);

/// E0 exp(1 - t / M)
double theoretical_bound(const StabilityConstants& c, double E0, double t);
void attach_bound(EnergyTrace& trace, const StabilityConstants& c);

struct DecayReport {
  bool ok = true;
  double margin = std::numeric_limits<double>::infinity();  // min bound / E
  double fitted_rate = std::numeric_limits<double>::infinity();
  bool degenerate_fit = false;
  std::string note;
};

/// ok iff E <= bound (1 + 1e-6) at every recorded time. The rate is the
/// negated least-squares slope of ln E over [t_end/2, t_end] of the fixed-step
/// segment, using only samples above 1e-14 E(0).
DecayReport verify_decay(const EnergyTrace& trace, const StabilityConstants& c);

struct IntegralInequalityReport {
  bool ok = true;
  double lhs = 0.0;  // (eps0 - delta C1) int_s^T E
  double rhs = 0.0;  // C2 E(s)
  double slack = 0.0;  // lhs / rhs
};

/// Trapezoid over the trace. Tolerance factor 1.05.
IntegralInequalityReport verify_integral_inequality(const EnergyTrace& trace,
                                                    const StabilityConstants& c, double s, double T);

struct ObservabilityReport {
  bool prop33_ok = true;  // boundary traces against the C_delta-weighted bound
  bool prop34_ok = true;  // eps0-weighted space-time energy against the theta/rho bound
  double prop33_lhs = 0.0, prop33_rhs = 0.0, prop33_slack = 0.0;
  double prop34_lhs = 0.0, prop34_rhs = 0.0, prop34_slack = 0.0;
};

/// Evaluates both observability-type inequalities on stored states covering
/// [s, T]; ok flags LHS <= RHS (1 + 5%). Throws SimulationError if the states
/// do not cover the window.
ObservabilityReport verify_observability_estimates(const BeamDiscretization& disc,
                                                   const std::vector<BeamState>& states,
                                                   const StabilityConstants& c, double s, double T);

/// key = value lines, 17 significant digits.
void write_constants(std::ostream& os, const StabilityConstants& c);
StabilityConstants read_constants(std::istream& is);

}  // namespace beamstab
