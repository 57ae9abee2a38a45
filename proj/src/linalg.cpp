#include "beamstab/linalg.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <string>

#include "beamstab/errors.hpp"

namespace beamstab {

SymBandMatrix::SymBandMatrix(std::size_t n, std::size_t kd)
    : n_(n), kd_(kd), data_((kd + 1) * n, 0.0) {}

double SymBandMatrix::operator()(std::size_t i, std::size_t j) const {
  if (i < j) std::swap(i, j);
  const std::size_t d = i - j;
  if (d > kd_) return 0.0;
  return data_[d * n_ + j];
}

void SymBandMatrix::add(std::size_t i, std::size_t j, double v) {
  if (i < j) std::swap(i, j);
  assert(i - j <= kd_ && i < n_);
  data_[(i - j) * n_ + j] += v;
}

void SymBandMatrix::set(std::size_t i, std::size_t j, double v) {
  if (i < j) std::swap(i, j);
  assert(i - j <= kd_ && i < n_);
  data_[(i - j) * n_ + j] = v;
}

void SymBandMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  kernels::active().band_symv(view(), x, y);
}

std::vector<double> SymBandMatrix::multiply(std::span<const double> x) const {
  std::vector<double> y(n_);
  multiply(x, y);
  return y;
}

double SymBandMatrix::quadratic_form(std::span<const double> x) const {
  const auto ax = multiply(x);
  return kernels::active().dot(x, ax);
}

SymBandMatrix SymBandMatrix::plus_scaled(const SymBandMatrix& other, double s) const {
  assert(other.n_ == n_ && other.kd_ == kd_);
  SymBandMatrix r = *this;
  for (std::size_t k = 0; k < data_.size(); ++k) r.data_[k] += s * other.data_[k];
  return r;
}

double SymBandMatrix::max_abs() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

std::vector<std::vector<double>> SymBandMatrix::to_dense() const {
  std::vector<std::vector<double>> a(n_, std::vector<double>(n_, 0.0));
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j) a[i][j] = (*this)(i, j);
  return a;
}

BandCholesky::BandCholesky(const SymBandMatrix& a) : n_(a.size()), kd_(a.bandwidth()) {
  l_.assign((kd_ + 1) * n_, 0.0);
  auto L = [this](std::size_t i, std::size_t j) -> double& { return l_[(i - j) * n_ + j]; };
  for (std::size_t j = 0; j < n_; ++j) {
    const std::size_t k0 = j > kd_ ? j - kd_ : 0;
    double djj = a(j, j);
    for (std::size_t k = k0; k < j; ++k) djj -= L(j, k) * L(j, k);
    if (!(djj > 0.0) || !std::isfinite(djj))
      throw SolverError("band Cholesky: pivot " + std::to_string(j) +
                        " is not positive (matrix not positive definite)");
    const double ljj = std::sqrt(djj);
    L(j, j) = ljj;
    const std::size_t iend = std::min(n_ - 1, j + kd_);
    for (std::size_t i = j + 1; i <= iend; ++i) {
      double s = a(i, j);
      const std::size_t kk0 = i > kd_ ? i - kd_ : 0;
      for (std::size_t k = std::max(k0, kk0); k < j; ++k) s -= L(i, k) * L(j, k);
      L(i, j) = s / ljj;
    }
  }
}

void BandCholesky::solve_in_place(std::span<double> b) const {
  assert(b.size() == n_);
  // forward: L z = b
  for (std::size_t i = 0; i < n_; ++i) {
    double s = b[i];
    const std::size_t k0 = i > kd_ ? i - kd_ : 0;
    for (std::size_t k = k0; k < i; ++k) s -= l_[(i - k) * n_ + k] * b[k];
    b[i] = s / l_[i];
  }
  // backward: L^T x = z
  for (std::size_t ii = n_; ii-- > 0;) {
    double s = b[ii];
    const std::size_t kend = std::min(n_ - 1, ii + kd_);
    for (std::size_t k = ii + 1; k <= kend; ++k) s -= l_[(k - ii) * n_ + ii] * b[k];
    b[ii] = s / l_[ii];
  }
}

std::vector<double> BandCholesky::solve(std::span<const double> b) const {
  std::vector<double> x(b.begin(), b.end());
  solve_in_place(x);
  return x;
}

namespace {

std::vector<double> scaled_to_unit(const SymBandMatrix& b, std::vector<double> u) {
  const double norm = std::sqrt(b.quadratic_form(u));
  if (!(norm > 0.0) || !std::isfinite(norm)) throw SolverError("eigen iteration: iterate collapsed");
  for (double& v : u) v /= norm;
  return u;
}

}  // namespace

EigenEstimate smallest_generalized_eigenvalue(const SymBandMatrix& a, const SymBandMatrix& b,
                                              double rel_tol, int max_iter) {
  const std::size_t n = a.size();
  const BandCholesky fa(a);
  EigenEstimate est;
  // Positive start vector: the ground state of a definite pencil with
  // positive-weight mass does not change sign, so this overlaps it.
  std::vector<double> u = scaled_to_unit(b, std::vector<double>(n, 1.0));
  double lambda_prev = 0.0;
  for (int it = 1; it <= max_iter; ++it) {
    const auto bu = b.multiply(u);
    auto x = bu;
    fa.solve_in_place(x);
    // Rayleigh quotient of the inverse, 1 / (u^T B A^{-1} B u): avoids forming
    // u^T A u, whose rounding grows with the largest entries of A.
    double inv = 0.0;
    for (std::size_t i = 0; i < n; ++i) inv += bu[i] * x[i];
    if (!(inv > 0.0) || !std::isfinite(inv)) throw SolverError("inverse iteration: iterate collapsed");
    const double lambda = 1.0 / inv;
    u = scaled_to_unit(b, x);
    est.iterations = it;
    if (it > 1 && std::abs(lambda - lambda_prev) <= rel_tol * std::abs(lambda)) {
      est.value = lambda;
      est.converged = true;
      break;
    }
    lambda_prev = lambda;
    est.value = lambda;
  }
  est.vector = std::move(u);
  if (!est.converged) throw SolverError("inverse iteration did not converge");
  return est;
}

EigenEstimate largest_generalized_eigenvalue(const SymBandMatrix& a, const SymBandMatrix& b,
                                             double rel_tol, int max_iter) {
  const std::size_t n = a.size();
  const BandCholesky fb(b);
  EigenEstimate est;
  // Alternating signs overlap the highest modes of banded discretizations.
  std::vector<double> u(n);
  for (std::size_t i = 0; i < n; ++i) u[i] = (i % 4 < 2) ? 1.0 : -1.0;
  double lambda_prev = 0.0;
  for (int it = 1; it <= max_iter; ++it) {
    auto au = a.multiply(u);
    fb.solve_in_place(au);
    u.swap(au);
    const double unorm = std::sqrt(b.quadratic_form(u));
    if (!(unorm > 0.0) || !std::isfinite(unorm))
      throw SolverError("power iteration: iterate collapsed");
    for (double& v : u) v /= unorm;
    const double lambda = a.quadratic_form(u);
    est.iterations = it;
    est.value = lambda;
    if (it > 1 && std::abs(lambda - lambda_prev) <= rel_tol * std::abs(lambda)) {
      est.converged = true;
      break;
    }
    lambda_prev = lambda;
  }
  est.vector = std::move(u);
  return est;
}

}  // namespace beamstab
