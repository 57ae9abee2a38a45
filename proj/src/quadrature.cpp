#include "beamstab/quadrature.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <numeric>
#include <stdexcept>
#include <string>

namespace beamstab {
namespace {

template <int N>
GaussRule make_rule() {
  using G = boost::math::quadrature::gauss<double, N>;
  const auto& x = G::abscissa();  // non-negative half, x[0] = 0 for odd N
  const auto& w = G::weights();
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < x.size(); ++i) {
    pts.emplace_back(x[i], w[i]);
    if (x[i] != 0.0) pts.emplace_back(-x[i], w[i]);
  }
  std::sort(pts.begin(), pts.end());
  GaussRule r;
  for (const auto& [xi, wi] : pts) {
    r.nodes.push_back(0.5 * (xi + 1.0));
    r.weights.push_back(0.5 * wi);
  }
  return r;
}

}  // namespace

const GaussRule& gauss_rule(int points) {
  static const GaussRule r2 = make_rule<2>();
  static const GaussRule r4 = make_rule<4>();
  static const GaussRule r8 = make_rule<8>();
  static const GaussRule r16 = make_rule<16>();
  static const GaussRule r32 = make_rule<32>();
  switch (points) {
    case 2: return r2;
    case 4: return r4;
    case 8: return r8;
    case 16: return r16;
    case 32: return r32;
    default: throw std::invalid_argument("gauss_rule: unsupported order " + std::to_string(points));
  }
}

}  // namespace beamstab
