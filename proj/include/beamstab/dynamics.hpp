#pragma once
// Semi-discrete beam  M_w y'' + (S + B) y + C y' = 0  advanced by the implicit
// midpoint rule, plus the space-time diagnostics evaluated on stored states.

#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "beamstab/discretization.hpp"

namespace beamstab {

struct BeamState {
  double t = 0.0;
  DofVector y;  // displacement
  DofVector v;  // velocity
};

/// Initial-data menu. Every entry satisfies the clamped conditions at x = 0.
enum class InitialProfile { Zero, X2, X3, X2OneMinusX2, SinBumpX2 };

std::string to_string(InitialProfile p);
/// Accepts zero, x2, x3, x2_1mx_2, sin_bump_x2. Throws DomainError otherwise.
InitialProfile parse_profile(const std::string& name);

struct ProfileFunction {
  std::function<double(double)> value;
  std::function<double(double)> slope;
};
ProfileFunction profile_function(InitialProfile p, double amplitude = 1.0);
DofVector interpolate_profile(const BeamDiscretization& disc, InitialProfile p, double amplitude = 1.0);

struct EnergyTrace {
  std::vector<double> times;
  std::vector<double> energy;
  /// y_t(1)^2 + y_tx(1)^2 at the midpoint of the step ending at times[n];
  /// dissipation[0] = 0.
  std::vector<double> dissipation;
  /// E(0) e^{1 - t/M}; empty until a certificate is attached.
  std::vector<double> bound;
  std::vector<double> trace_y1;
  std::vector<double> trace_yx1;
  /// End of the fixed-step segment; later entries come from the tail schedule.
  double fixed_step_end = 0.0;
  double dt = 0.0;

  std::size_t size() const { return times.size(); }
};

/// E = 1/2 (v^T M_w v + int (y'')^2 + beta y(1)^2 + gamma y'(1)^2)
double energy(const BeamDiscretization& disc, const BeamState& state);

/// One implicit-midpoint step with a cached factorization of
/// M_w + dt^2/4 (S + B) + dt/2 C.
class Stepper {
 public:
  /// conservative = true drops C (energy-conserving diagnostic mode); only that
  /// mode accepts dt < 0, which integrates backwards in time.
  Stepper(const BeamDiscretization& disc, double dt, bool conservative = false);

  double dt() const { return dt_; }
  bool conservative() const { return conservative_; }

  /// Advances in place; returns the midpoint dissipation (tr_v v^{n+1/2})^2 + (tr_s v^{n+1/2})^2.
  double advance(BeamState& state) const;

 private:
  const BeamDiscretization* disc_;
  double dt_;
  bool conservative_;
  BandCholesky factor_;
};

/// Convenience single step (factorizes on every call).
BeamState step(const BeamDiscretization& disc, const BeamState& state, double dt);

struct SimulationOptions {
  int snapshot_stride = 10;  // 0 stores no states
  double snapshot_from = 0.0;
  double snapshot_to = std::numeric_limits<double>::infinity();
  bool conservative = false;
  /// If > t_end, continue to this time with geometrically growing steps.
  double extend_to = 0.0;
  double tail_growth = 1.1;
  int tail_min_steps = 200;
  /// Abort when E increases by more than monotone_tol * E(0) in one step.
  bool check_monotone = true;
  double monotone_tol = 1e-10;
};

struct SimulationResult {
  EnergyTrace trace;
  std::vector<BeamState> snapshots;
};

SimulationResult simulate(const BeamDiscretization& disc, const DofVector& y0, const DofVector& y1,
                          double dt, double t_end, const SimulationOptions& opts = {});

/// max_n |E^{n+1} - E^n + dt_n D^{n+1/2}| / E^0 (absolute when E^0 = 0).
double energy_derivative_identity_residual(const EnergyTrace& trace);

/// Spatial integrals of a single stored state.
struct StateFunctionals {
  double t = 0.0;
  double kinetic = 0.0;          // int v^2 / a
  double kinetic_multiplier = 0.0;  // int v^2 / a (1 - x a'/a)
  double bending = 0.0;          // int (y'')^2
  double cross_xa = 0.0;         // int v (x / a) y'
  double cross_ya = 0.0;         // int y v / a
  double y1 = 0.0, yx1 = 0.0, v1 = 0.0, vx1 = 0.0, yxx1 = 0.0;
  double energy = 0.0;
};

StateFunctionals state_functionals(const BeamDiscretization& disc, const BeamState& state);

/// Time integrals over [s, T] (trapezoid on the stored states) and endpoint
/// values, shared by the multiplier identities and the observability checks.
struct SpaceTimeIntegrals {
  double s = 0.0, T = 0.0;
  double kinetic = 0.0, kinetic_multiplier = 0.0, bending = 0.0;
  double y1_sq = 0.0, yx1_sq = 0.0, v1_sq = 0.0, vx1_sq = 0.0, yxx1_sq = 0.0;
  double yx1_y1 = 0.0, yx1_v1 = 0.0, yx1_vx1 = 0.0, y1_v1 = 0.0;
  double energy = 0.0;
  StateFunctionals at_s, at_T;
};

/// Throws SimulationError if the states do not cover [s, T] with at least
/// three samples.
SpaceTimeIntegrals integrate_states(const BeamDiscretization& disc,
                                    const std::vector<BeamState>& states, double s, double T);

struct MultiplierReport {
  double residual_31 = 0.0;  // |sum of terms| / max |term| for the x y_x / a multiplier identity
  double residual_32 = 0.0;  // same for the combined (K/2-weighted) identity
  std::vector<std::pair<std::string, double>> terms_31;
  std::vector<std::pair<std::string, double>> terms_32;
};

MultiplierReport multiplier_identity_residual(const BeamDiscretization& disc,
                                              const DegeneracyCoefficient& coeff,
                                              const std::vector<BeamState>& states, double s,
                                              double T);

}  // namespace beamstab
