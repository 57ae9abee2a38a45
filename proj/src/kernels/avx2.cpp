// Compiled with -mavx2 -mfma. Only reached through kernels::active() after a
// CPU feature check, or directly from the equivalence tests when supported.
#include "beamstab/kernels/kernels.hpp"

#include <immintrin.h>

#include <cassert>

namespace beamstab::kernels::avx2 {
namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

// Row i of the symmetric band product, scalar fallback for the edges.
inline double band_row(const SymBandView& a, std::span<const double> x, std::size_t i) {
  double s = a.diag(0)[i] * x[i];
  for (std::size_t d = 1; d <= a.kd; ++d) {
    const double* dd = a.diag(d);
    if (i + d < a.n) s += dd[i] * x[i + d];
    if (i >= d) s += dd[i - d] * x[i - d];
  }
  return s;
}

}  // namespace

double dot(std::span<const double> x, std::span<const double> y) {
  assert(x.size() == y.size());
  const std::size_t n = x.size();
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(&x[i]), _mm256_loadu_pd(&y[i]), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(&x[i + 4]), _mm256_loadu_pd(&y[i + 4]), acc1);
  }
  for (; i + 4 <= n; i += 4)
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(&x[i]), _mm256_loadu_pd(&y[i]), acc0);
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

double wdot(std::span<const double> w, std::span<const double> f, std::span<const double> g) {
  assert(w.size() == f.size() && f.size() == g.size());
  const std::size_t n = w.size();
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d wf = _mm256_mul_pd(_mm256_loadu_pd(&w[i]), _mm256_loadu_pd(&f[i]));
    acc = _mm256_fmadd_pd(wf, _mm256_loadu_pd(&g[i]), acc);
  }
  double s = hsum(acc);
  for (; i < n; ++i) s += w[i] * f[i] * g[i];
  return s;
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
  assert(x.size() == y.size());
  const std::size_t n = x.size();
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(&y[i], _mm256_fmadd_pd(va, _mm256_loadu_pd(&x[i]), _mm256_loadu_pd(&y[i])));
  for (; i < n; ++i) y[i] += a * x[i];
}

void band_symv(const SymBandView& a, std::span<const double> x, std::span<double> y) {
  assert(x.size() == a.n && y.size() == a.n);
  const std::size_t n = a.n;
  const std::size_t kd = a.kd;
  std::size_t i = 0;
  for (; i < kd && i < n; ++i) y[i] = band_row(a, x, i);
  const double* d0 = a.diag(0);
  for (; i + 4 + kd <= n; i += 4) {
    __m256d acc = _mm256_mul_pd(_mm256_loadu_pd(d0 + i), _mm256_loadu_pd(&x[i]));
    for (std::size_t d = 1; d <= kd; ++d) {
      const double* dd = a.diag(d);
      acc = _mm256_fmadd_pd(_mm256_loadu_pd(dd + i), _mm256_loadu_pd(&x[i + d]), acc);
      acc = _mm256_fmadd_pd(_mm256_loadu_pd(dd + i - d), _mm256_loadu_pd(&x[i - d]), acc);
    }
    _mm256_storeu_pd(&y[i], acc);
  }
  for (; i < n; ++i) y[i] = band_row(a, x, i);
}

double hermite_bending(std::span<const double> h, std::span<const double> w,
                       std::span<const double> t) {
  assert(w.size() == h.size() + 1 && t.size() == w.size());
  const std::size_t ne = h.size();
  const __m256d six = _mm256_set1_pd(6.0);
  const __m256d four = _mm256_set1_pd(4.0);
  const __m256d two = _mm256_set1_pd(2.0);
  const __m256d m12 = _mm256_set1_pd(-12.0);
  const __m256d third = _mm256_set1_pd(1.0 / 3.0);
  __m256d acc = _mm256_setzero_pd();
  std::size_t e = 0;
  for (; e + 4 <= ne; e += 4) {
    const __m256d he = _mm256_loadu_pd(&h[e]);
    const __m256d inv_h2 = _mm256_div_pd(_mm256_set1_pd(1.0), _mm256_mul_pd(he, he));
    const __m256d w0 = _mm256_loadu_pd(&w[e]);
    const __m256d w1 = _mm256_loadu_pd(&w[e + 1]);
    const __m256d t0 = _mm256_loadu_pd(&t[e]);
    const __m256d t1 = _mm256_loadu_pd(&t[e + 1]);
    const __m256d dw = _mm256_sub_pd(w1, w0);
    const __m256d tt0 = _mm256_fmadd_pd(four, t0, _mm256_mul_pd(two, t1));
    const __m256d c0 = _mm256_mul_pd(_mm256_fnmadd_pd(he, tt0, _mm256_mul_pd(six, dw)), inv_h2);
    const __m256d tsum = _mm256_mul_pd(six, _mm256_add_pd(t0, t1));
    const __m256d c1 = _mm256_mul_pd(_mm256_fmadd_pd(he, tsum, _mm256_mul_pd(m12, dw)), inv_h2);
    __m256d q = _mm256_mul_pd(_mm256_mul_pd(c1, c1), third);
    q = _mm256_fmadd_pd(c0, c1, q);
    q = _mm256_fmadd_pd(c0, c0, q);
    acc = _mm256_fmadd_pd(he, q, acc);
  }
  double s = hsum(acc);
  for (; e < ne; ++e) {
    const double he = h[e];
    const double dw = w[e + 1] - w[e];
    const double c0 = (6.0 * dw - he * (4.0 * t[e] + 2.0 * t[e + 1])) / (he * he);
    const double c1 = (-12.0 * dw + 6.0 * he * (t[e] + t[e + 1])) / (he * he);
    s += he * (c0 * c0 + c0 * c1 + c1 * c1 / 3.0);
  }
  return s;
}

const KernelTable& table() {
  static const KernelTable t{"avx2", &dot, &wdot, &axpy, &band_symv, &hermite_bending};
  return t;
}

}  // namespace beamstab::kernels::avx2
