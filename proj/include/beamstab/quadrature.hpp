#pragma once

#include <span>
#include <vector>

namespace beamstab {

/// Gauss-Legendre rule mapped to the reference interval [0, 1].
struct GaussRule {
  std::vector<double> nodes;    // in (0, 1), ascending
  std::vector<double> weights;  // sum to 1
};

/// Supported orders: 2, 4, 8, 16, 32.
const GaussRule& gauss_rule(int points);

}  // namespace beamstab
