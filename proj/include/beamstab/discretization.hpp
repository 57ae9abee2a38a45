#pragma once
// Two-node Hermite cubic elements on a mesh graded toward the degenerate end.
//
// Degrees of freedom are interleaved (value, slope) at nodes 1..N; node 0 is
// clamped and carries no unknowns, so u(0) = u'(0) = 0 holds exactly for every
// discrete function.

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "beamstab/coefficient.hpp"
#include "beamstab/linalg.hpp"

namespace beamstab {

/// Coefficients of a discrete function in the value/slope basis.
struct DofVector {
  std::vector<double> values;

  DofVector() = default;
  explicit DofVector(std::size_t n) : values(n, 0.0) {}
  explicit DofVector(std::vector<double> v) : values(std::move(v)) {}

  std::size_t size() const { return values.size(); }
  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }
  operator std::span<const double>() const { return values; }
  operator std::span<double>() { return values; }
};

/// Values and first two derivatives of a discrete function at every
/// quadrature point of the mesh.
struct FieldSamples {
  std::vector<double> value;
  std::vector<double> d1;
  std::vector<double> d2;
};

/// Polynomial of degree <= 4 used by the Gauss-Green diagnostic.
struct Polynomial {
  std::vector<double> coeffs;  // coeffs[k] multiplies x^k

  double operator()(double x) const;
  Polynomial derivative() const;
  int degree() const;
};

struct DiscretizationOptions {
  double grading = 2.0;
  int first_element_points = 16;
  int interior_points = 16;
};

class BeamDiscretization {
 public:
  /// Assembles weighted mass, bending stiffness, boundary stiffness and
  /// boundary damping. Throws AssemblyError if the mass matrix is not SPD.
  BeamDiscretization(const DegeneracyCoefficient& coeff, int n_elements, double beta,
                     double gamma, DiscretizationOptions opts = {});

  const DegeneracyCoefficient& coefficient() const { return coeff_; }
  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<double>& element_lengths() const { return h_; }
  int n_elements() const { return static_cast<int>(h_.size()); }
  std::size_t n_dof() const { return 2 * h_.size(); }
  double beta() const { return beta_; }
  double gamma() const { return gamma_; }
  const DiscretizationOptions& options() const { return opts_; }

  /// Global indices of the value/slope unknowns at node i (1 <= i <= N).
  static std::size_t value_dof(std::size_t node) { return 2 * (node - 1); }
  static std::size_t slope_dof(std::size_t node) { return 2 * (node - 1) + 1; }
  std::size_t trace_value() const { return n_dof() - 2; }
  std::size_t trace_slope() const { return n_dof() - 1; }

  const SymBandMatrix& mass() const { return mass_; }        // int phi_i phi_j / a
  const SymBandMatrix& stiffness() const { return stiff_; }  // int phi_i'' phi_j''
  const SymBandMatrix& boundary_stiffness() const { return bstiff_; }
  const SymBandMatrix& boundary_damping() const { return bdamp_; }
  /// S + B, the operator of the static problem and of the potential energy.
  const SymBandMatrix& elastic() const { return elastic_; }

  /// int (u'')^2 evaluated element by element (no cancellation across the
  /// 1/h^3 stiffness entries).
  double bending_energy(const DofVector& u) const;
  /// int u^2 / a = u^T M_w u.
  double weighted_l2(const DofVector& u) const;

  double value_at_1(const DofVector& u) const { return u[trace_value()]; }
  double slope_at_1(const DofVector& u) const { return u[trace_slope()]; }
  /// u''(1) from the last element's cubic.
  double curvature_at_1(const DofVector& u) const;

  /// Evaluate u, u', u'' at a point x in [0, 1].
  void evaluate(const DofVector& u, double x, double& value, double& d1, double& d2) const;

  /// Quadrature points and weights (weights include the element length).
  const std::vector<double>& quad_points() const { return xq_; }
  const std::vector<double>& quad_weights() const { return wq_; }
  FieldSamples sample(const DofVector& u) const;

  /// Split interleaved DOFs into nodal values and slopes at nodes 0..N
  /// (node 0 entries are the clamped zeros).
  void split(const DofVector& u, std::vector<double>& w, std::vector<double>& t) const;

  /// Coordinate-format dump ("row col value", 1-based, lower triangle).
  void dump_matrices(const std::string& directory, const std::string& prefix) const;

 private:
  struct QuadPoint {
    std::size_t element;
    double n[4], d1[4], d2[4];
  };

  DegeneracyCoefficient coeff_;
  double beta_, gamma_;
  DiscretizationOptions opts_;
  std::vector<double> nodes_, h_;
  SymBandMatrix mass_, stiff_, bstiff_, bdamp_, elastic_;
  std::vector<double> xq_, wq_;
  std::vector<QuadPoint> qp_;

  // Global index of local dof k on element e, or -1 when clamped.
  long local_to_global(std::size_t e, int k) const;
};

BeamDiscretization build(const DegeneracyCoefficient& coeff, int n_elements, double beta,
                         double gamma, double grading = 2.0);

/// Value and slope of f at the free nodes. Throws DomainError unless
/// |f(0)|, |f'(0)| <= 1e-12.
DofVector interpolate(const BeamDiscretization& disc, const std::function<double(double)>& f,
                      const std::function<double(double)>& df);

double weighted_l2_norm_sq(const BeamDiscretization& disc, const DofVector& u);

/// |||u|||^2 = int (u'')^2 + beta u(1)^2 + gamma u'(1)^2 = u^T (S + B) u.
double triple_norm_sq(const BeamDiscretization& disc, const DofVector& u);

/// |LHS - RHS| of  int u''''v = u'''(1)v(1) - u''(1)v'(1) + int u''v''  for
/// clamped polynomials of degree <= 4. LHS in closed form; int u''v'' by the
/// mesh's Gauss rules, which are exact for these degrees.
double gauss_green_residual(const BeamDiscretization& disc, const Polynomial& u,
                            const Polynomial& v);

}  // namespace beamstab
