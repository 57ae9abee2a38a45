#pragma once
// Symmetric band storage, band Cholesky, and the two eigen-iterations the
// project needs (smallest and largest eigenvalue of a definite pencil).

#include <cstddef>
#include <span>
#include <vector>

#include "beamstab/kernels/kernels.hpp"

namespace beamstab {

class SymBandMatrix {
 public:
  SymBandMatrix() = default;
  SymBandMatrix(std::size_t n, std::size_t kd);

  std::size_t size() const { return n_; }
  std::size_t bandwidth() const { return kd_; }

  /// Entry (i, j) with |i - j| <= kd; symmetric access.
  double operator()(std::size_t i, std::size_t j) const;
  void add(std::size_t i, std::size_t j, double v);
  void set(std::size_t i, std::size_t j, double v);

  kernels::SymBandView view() const { return {n_, kd_, data_.data()}; }

  /// y = A x through the active kernel table.
  void multiply(std::span<const double> x, std::span<double> y) const;
  std::vector<double> multiply(std::span<const double> x) const;
  double quadratic_form(std::span<const double> x) const;

  /// this + s * other; both must share n and kd.
  SymBandMatrix plus_scaled(const SymBandMatrix& other, double s) const;

  double max_abs() const;
  std::vector<std::vector<double>> to_dense() const;

 private:
  std::size_t n_ = 0;
  std::size_t kd_ = 0;
  std::vector<double> data_;  // diagonal d occupies [d * n, (d + 1) * n)
};

/// Lower band Cholesky factor L with A = L L^T.
class BandCholesky {
 public:
  /// Throws SolverError if A is not numerically positive definite.
  explicit BandCholesky(const SymBandMatrix& a);

  std::size_t size() const { return n_; }
  void solve_in_place(std::span<double> b) const;
  std::vector<double> solve(std::span<const double> b) const;

 private:
  std::size_t n_ = 0;
  std::size_t kd_ = 0;
  std::vector<double> l_;  // L(i + d, i) at d * n + i
};

struct EigenEstimate {
  double value = 0.0;
  std::vector<double> vector;
  int iterations = 0;
  bool converged = false;
};

/// Smallest eigenvalue of A u = lambda B u (A, B SPD) by inverse iteration.
EigenEstimate smallest_generalized_eigenvalue(const SymBandMatrix& a, const SymBandMatrix& b,
                                              double rel_tol = 1e-14, int max_iter = 500);

/// Largest eigenvalue of A u = lambda B u by power iteration on B^{-1} A.
EigenEstimate largest_generalized_eigenvalue(const SymBandMatrix& a, const SymBandMatrix& b,
                                             double rel_tol = 1e-10, int max_iter = 2000);

}  // namespace beamstab
