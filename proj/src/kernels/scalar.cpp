#include "beamstab/kernels/kernels.hpp"

#include <algorithm>
#include <cassert>

namespace beamstab::kernels::scalar {

double dot(std::span<const double> x, std::span<const double> y) {
  assert(x.size() == y.size());
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

double wdot(std::span<const double> w, std::span<const double> f, std::span<const double> g) {
  assert(w.size() == f.size() && f.size() == g.size());
  double s = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * f[i] * g[i];
  return s;
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
  assert(x.size() == y.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

void band_symv(const SymBandView& a, std::span<const double> x, std::span<double> y) {
  assert(x.size() == a.n && y.size() == a.n);
  const std::size_t n = a.n;
  const double* d0 = a.diag(0);
  for (std::size_t i = 0; i < n; ++i) y[i] = d0[i] * x[i];
  for (std::size_t d = 1; d <= a.kd && d < n; ++d) {
    const double* dd = a.diag(d);
    for (std::size_t i = 0; i + d < n; ++i) {
      y[i + d] += dd[i] * x[i];
      y[i] += dd[i] * x[i + d];
    }
  }
}

double hermite_bending(std::span<const double> h, std::span<const double> w,
                       std::span<const double> t) {
  assert(w.size() == h.size() + 1 && t.size() == w.size());
  double s = 0.0;
  for (std::size_t e = 0; e < h.size(); ++e) {
    const double he = h[e];
    const double dw = w[e + 1] - w[e];
    // u''(s) = c0 + c1 s on the reference interval s in [0, 1]
    const double c0 = (6.0 * dw - he * (4.0 * t[e] + 2.0 * t[e + 1])) / (he * he);
    const double c1 = (-12.0 * dw + 6.0 * he * (t[e] + t[e + 1])) / (he * he);
    s += he * (c0 * c0 + c0 * c1 + c1 * c1 / 3.0);
  }
  return s;
}

const KernelTable& table() {
  static const KernelTable t{"scalar", &dot, &wdot, &axpy, &band_symv, &hermite_bending};
  return t;
}

}  // namespace beamstab::kernels::scalar
