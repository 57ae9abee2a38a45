#pragma once
// The static trace problem: find z with z(0) = z'(0) = 0 and
//   int z''phi'' + beta z(1)phi(1) + gamma z'(1)phi'(1) = lambda phi(1) + mu phi'(1)
// for every admissible phi. Its strong form forces z'''' = 0, so z is the
// cubic p x^2 + q x^3 fixed by the two boundary rows at x = 1.

#include "beamstab/discretization.hpp"

namespace beamstab {

struct StaticProblem {
  double lambda = 0.0;
  double mu = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
};

/// z(x) = p x^2 + q x^3
struct CubicSolution {
  double p = 0.0;
  double q = 0.0;

  double value(double x) const { return p * x * x + q * x * x * x; }
  double slope(double x) const { return 2.0 * p * x + 3.0 * q * x * x; }
  double curvature(double x) const { return 2.0 * p + 6.0 * q * x; }
  double third() const { return 6.0 * q; }
};

/// Solves  beta(p + q) - 6q = lambda,  gamma(2p + 3q) + (2p + 6q) = mu.
CubicSolution cubic_oracle(const StaticProblem& prob);

/// Residuals of the two boundary rows at x = 1 for a cubic.
struct BoundaryResidual {
  double shear = 0.0;   // beta z(1) - z'''(1) - lambda
  double moment = 0.0;  // gamma z'(1) + z''(1) - mu
};
BoundaryResidual boundary_residual(const StaticProblem& prob, const CubicSolution& z);

/// Discrete Lax-Milgram system (S + B) z = lambda e_v + mu e_s.
DofVector solve_variational(const BeamDiscretization& disc, const StaticProblem& prob);

struct EstimateReport {
  bool ok = true;
  double weighted_l2 = 0.0;        // int z^2 / a
  double weighted_l2_bound = 0.0;  // (4 c_hp + 1)(|lambda| + |mu|)^2
  double triple = 0.0;             // |||z|||^2
  double triple_bound = 0.0;       // (|lambda| + |mu|)^2
};

/// Checks both a-priori bounds with c_hp standing in for the Hardy constant,
/// tolerance factor (1 + 1e-3).
EstimateReport verify_estimates(const BeamDiscretization& disc, const StaticProblem& prob,
                                const DofVector& z, double c_hp);

}  // namespace beamstab
