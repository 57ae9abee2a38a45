#include "beamstab/statics.hpp"

#include <cmath>
#include <utility>
#include <vector>

#include "beamstab/errors.hpp"

namespace beamstab {

CubicSolution cubic_oracle(const StaticProblem& prob) {
  const double b = prob.beta, g = prob.gamma;
  if (!(b >= 0.0) || !(g >= 0.0)) throw DomainError("cubic_oracle: beta, gamma must be >= 0");
  // [ b        b - 6    ] [p]   [lambda]
  // [ 2g + 2   3g + 6   ] [q] = [mu    ]
  const double a11 = b, a12 = b - 6.0;
  const double a21 = 2.0 * g + 2.0, a22 = 3.0 * g + 6.0;
  const double det = a11 * a22 - a12 * a21;  // = b g + 4 b + 12 g + 12 > 0
  return {(prob.lambda * a22 - a12 * prob.mu) / det, (a11 * prob.mu - a21 * prob.lambda) / det};
}

BoundaryResidual boundary_residual(const StaticProblem& prob, const CubicSolution& z) {
  return {prob.beta * z.value(1.0) - z.third() - prob.lambda,
          prob.gamma * z.slope(1.0) + z.curvature(1.0) - prob.mu};
}

namespace {

using Wide = long double;

// S + B assembled from the node coordinates and factored in extended
// precision. On graded meshes the value rows carry entries of size h^-3 whose
// rounding differs element to element; in double that leaves a smooth error of
// order eps * n^3 in the solution.
std::vector<Wide> solve_wide(const BeamDiscretization& disc, const StaticProblem& prob) {
  constexpr std::size_t kd = 3;
  const std::size_t ne = disc.element_lengths().size();
  const std::size_t nd = disc.n_dof();
  std::vector<Wide> band((kd + 1) * nd, 0.0L);  // A(i, i - d) at d * nd + i
  auto add = [&](long i, long j, Wide v) {
    if (i < 0 || j < 0) return;
    if (i < j) std::swap(i, j);
    band[static_cast<std::size_t>(i - j) * nd + static_cast<std::size_t>(i)] += v;
  };
  const auto& x = disc.nodes();
  for (std::size_t e = 0; e < ne; ++e) {
    const Wide h = static_cast<Wide>(x[e + 1]) - static_cast<Wide>(x[e]);
    const Wide h2 = h * h, h3 = h2 * h;
    const Wide k[4][4] = {{12 / h3, 6 / h2, -12 / h3, 6 / h2},
                          {6 / h2, 4 / h, -6 / h2, 2 / h},
                          {-12 / h3, -6 / h2, 12 / h3, -6 / h2},
                          {6 / h2, 2 / h, -6 / h2, 4 / h}};
    long g[4];
    for (int i = 0; i < 4; ++i) {
      const std::size_t node = e + (i >= 2 ? 1 : 0);
      g[i] = node == 0 ? -1
                       : static_cast<long>(i % 2 == 0 ? BeamDiscretization::value_dof(node)
                                                      : BeamDiscretization::slope_dof(node));
    }
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j <= i; ++j) add(g[i], g[j], k[i][j]);
  }
  band[disc.trace_value()] += prob.beta;
  band[disc.trace_slope()] += prob.gamma;

  auto at = [&](std::size_t i, std::size_t d) -> Wide& { return band[d * nd + i]; };
  for (std::size_t j = 0; j < nd; ++j) {
    Wide piv = at(j, 0);
    for (std::size_t k = 1; k <= kd && k <= j; ++k) piv -= at(j, k) * at(j, k);
    if (!(piv > 0.0L)) throw SolverError("static system is not positive definite");
    at(j, 0) = std::sqrt(piv);
    for (std::size_t d = 1; d <= kd && j + d < nd; ++d) {
      const std::size_t i = j + d;
      Wide v = at(i, d);
      for (std::size_t k = 1; k + d <= kd && k <= j; ++k) v -= at(i, d + k) * at(j, k);
      at(i, d) = v / at(j, 0);
    }
  }
  std::vector<Wide> z(nd, 0.0L);
  z[disc.trace_value()] = prob.lambda;
  z[disc.trace_slope()] = prob.mu;
  for (std::size_t i = 0; i < nd; ++i) {
    for (std::size_t k = 1; k <= kd && k <= i; ++k) z[i] -= at(i, k) * z[i - k];
    z[i] /= at(i, 0);
  }
  for (std::size_t i = nd; i-- > 0;) {
    for (std::size_t k = 1; k <= kd && i + k < nd; ++k) z[i] -= at(i + k, k) * z[i + k];
    z[i] /= at(i, 0);
  }
  return z;
}

}  // namespace

DofVector solve_variational(const BeamDiscretization& disc, const StaticProblem& prob) {
  if (prob.beta != disc.beta() || prob.gamma != disc.gamma())
    throw DomainError("solve_variational: discretization built with different beta/gamma");
  const std::vector<Wide> z = solve_wide(disc, prob);
  DofVector out(disc.n_dof());
  for (std::size_t i = 0; i < z.size(); ++i) out[i] = static_cast<double>(z[i]);
  return out;
}

EstimateReport verify_estimates(const BeamDiscretization& disc, const StaticProblem& prob,
                                const DofVector& z, double c_hp) {
  EstimateReport r;
  const double load = std::abs(prob.lambda) + std::abs(prob.mu);
  r.weighted_l2 = weighted_l2_norm_sq(disc, z);
  r.weighted_l2_bound = (4.0 * c_hp + 1.0) * load * load;
  r.triple = triple_norm_sq(disc, z);
  r.triple_bound = load * load;
  constexpr double tol = 1.0 + 1e-3;
  r.ok = r.weighted_l2 <= r.weighted_l2_bound * tol && r.triple <= r.triple_bound * tol;
  return r;
}

}  // namespace beamstab
