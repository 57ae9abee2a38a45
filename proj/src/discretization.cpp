#include "beamstab/discretization.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>

#include "beamstab/errors.hpp"
#include "beamstab/kernels/kernels.hpp"
#include "beamstab/quadrature.hpp"

namespace beamstab {
namespace {

// Hermite cubic shape functions on [0, 1] for an element of length h:
// value/slope at the left node, value/slope at the right node.
void hermite(double s, double h, double n[4], double d1[4], double d2[4]) {
  const double s2 = s * s, s3 = s2 * s;
  n[0] = 1.0 - 3.0 * s2 + 2.0 * s3;
  n[1] = h * (s - 2.0 * s2 + s3);
  n[2] = 3.0 * s2 - 2.0 * s3;
  n[3] = h * (-s2 + s3);
  d1[0] = (-6.0 * s + 6.0 * s2) / h;
  d1[1] = 1.0 - 4.0 * s + 3.0 * s2;
  d1[2] = (6.0 * s - 6.0 * s2) / h;
  d1[3] = -2.0 * s + 3.0 * s2;
  d2[0] = (-6.0 + 12.0 * s) / (h * h);
  d2[1] = (-4.0 + 6.0 * s) / h;
  d2[2] = (6.0 - 12.0 * s) / (h * h);
  d2[3] = (-2.0 + 6.0 * s) / h;
}

// Exact Hermite bending matrix; one rounding per entry keeps the graded-mesh
// solves accurate.
void element_stiffness(double h, double se[4][4]) {
  const double h2 = h * h, h3 = h2 * h;
  const double k[4][4] = {{12.0 / h3, 6.0 / h2, -12.0 / h3, 6.0 / h2},
                          {6.0 / h2, 4.0 / h, -6.0 / h2, 2.0 / h},
                          {-12.0 / h3, -6.0 / h2, 12.0 / h3, -6.0 / h2},
                          {6.0 / h2, 2.0 / h, -6.0 / h2, 4.0 / h}};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) se[i][j] = k[i][j];
}

}  // namespace

double Polynomial::operator()(double x) const {
  double r = 0.0;
  for (std::size_t k = coeffs.size(); k-- > 0;) r = r * x + coeffs[k];
  return r;
}

Polynomial Polynomial::derivative() const {
  Polynomial d;
  for (std::size_t k = 1; k < coeffs.size(); ++k) d.coeffs.push_back(static_cast<double>(k) * coeffs[k]);
  return d;
}

int Polynomial::degree() const {
  for (std::size_t k = coeffs.size(); k-- > 0;)
    if (coeffs[k] != 0.0) return static_cast<int>(k);
  return 0;
}

long BeamDiscretization::local_to_global(std::size_t e, int k) const {
  const std::size_t node = e + (k >= 2 ? 1 : 0);
  if (node == 0) return -1;
  return static_cast<long>(k % 2 == 0 ? value_dof(node) : slope_dof(node));
}

BeamDiscretization::BeamDiscretization(const DegeneracyCoefficient& coeff, int n_elements,
                                       double beta, double gamma, DiscretizationOptions opts)
    : coeff_(coeff), beta_(beta), gamma_(gamma), opts_(opts) {
  if (n_elements < 4) throw DomainError("discretization needs at least 4 elements");
  if (!(beta >= 0.0) || !(gamma >= 0.0) || !std::isfinite(beta) || !std::isfinite(gamma))
    throw DomainError("beta and gamma must be finite and non-negative");
  if (!(opts.grading >= 1.0)) throw DomainError("grading must be >= 1");

  const std::size_t ne = static_cast<std::size_t>(n_elements);
  nodes_.resize(ne + 1);
  for (std::size_t i = 0; i <= ne; ++i)
    nodes_[i] = std::pow(static_cast<double>(i) / static_cast<double>(ne), opts.grading);
  nodes_.back() = 1.0;
  h_.resize(ne);
  for (std::size_t e = 0; e < ne; ++e) h_[e] = nodes_[e + 1] - nodes_[e];

  const std::size_t nd = 2 * ne;
  mass_ = SymBandMatrix(nd, 3);
  stiff_ = SymBandMatrix(nd, 3);
  bstiff_ = SymBandMatrix(nd, 3);
  bdamp_ = SymBandMatrix(nd, 3);

  for (std::size_t e = 0; e < ne; ++e) {
    const GaussRule& rule = gauss_rule(e == 0 ? opts.first_element_points : opts.interior_points);
    double me[4][4] = {}, se[4][4] = {};
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
      QuadPoint p{};
      p.element = e;
      hermite(rule.nodes[q], h_[e], p.n, p.d1, p.d2);
      const double xq = nodes_[e] + h_[e] * rule.nodes[q];
      const double wq = rule.weights[q] * h_[e];
      const double inv_a = 1.0 / coeff_.value(xq);
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
          me[i][j] += wq * inv_a * p.n[i] * p.n[j];
        }
      xq_.push_back(xq);
      wq_.push_back(wq);
      qp_.push_back(p);
    }
    element_stiffness(h_[e], se);
    for (int i = 0; i < 4; ++i) {
      const long gi = local_to_global(e, i);
      if (gi < 0) continue;
      for (int j = 0; j <= i; ++j) {
        const long gj = local_to_global(e, j);
        if (gj < 0) continue;
        mass_.add(static_cast<std::size_t>(gi), static_cast<std::size_t>(gj), me[i][j]);
        stiff_.add(static_cast<std::size_t>(gi), static_cast<std::size_t>(gj), se[i][j]);
      }
    }
  }
  bstiff_.set(trace_value(), trace_value(), beta_);
  bstiff_.set(trace_slope(), trace_slope(), gamma_);
  bdamp_.set(trace_value(), trace_value(), 1.0);
  bdamp_.set(trace_slope(), trace_slope(), 1.0);
  elastic_ = stiff_.plus_scaled(bstiff_, 1.0);

  if (!std::isfinite(mass_.max_abs()) || !std::isfinite(stiff_.max_abs()))
    throw AssemblyError("non-finite matrix entries; quadrature broke down near x = 0");
  try {
    BandCholesky check(mass_);
  } catch (const SolverError& e) {
    throw AssemblyError(std::string("weighted mass matrix is not positive definite: ") + e.what());
  }
}

void BeamDiscretization::split(const DofVector& u, std::vector<double>& w, std::vector<double>& t) const {
  const std::size_t ne = h_.size();
  w.assign(ne + 1, 0.0);
  t.assign(ne + 1, 0.0);
  for (std::size_t i = 1; i <= ne; ++i) {
    w[i] = u[value_dof(i)];
    t[i] = u[slope_dof(i)];
  }
}

double BeamDiscretization::bending_energy(const DofVector& u) const {
  std::vector<double> w, t;
  split(u, w, t);
  return kernels::active().hermite_bending(h_, w, t);
}

double BeamDiscretization::weighted_l2(const DofVector& u) const { return mass_.quadratic_form(u); }

double BeamDiscretization::curvature_at_1(const DofVector& u) const {
  const std::size_t ne = h_.size();
  const double h = h_.back();
  const double w0 = ne > 1 ? u[value_dof(ne - 1)] : 0.0;
  const double t0 = ne > 1 ? u[slope_dof(ne - 1)] : 0.0;
  const double w1 = u[value_dof(ne)];
  const double t1 = u[slope_dof(ne)];
  return (6.0 * (w0 - w1)) / (h * h) + (2.0 * t0 + 4.0 * t1) / h;
}

void BeamDiscretization::evaluate(const DofVector& u, double x, double& value, double& d1,
                                  double& d2) const {
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("evaluate: x must lie in [0, 1]");
  auto it = std::upper_bound(nodes_.begin(), nodes_.end(), x);
  std::size_t e = it == nodes_.begin() ? 0 : static_cast<std::size_t>(it - nodes_.begin()) - 1;
  e = std::min(e, h_.size() - 1);
  const double s = (x - nodes_[e]) / h_[e];
  double n[4], dn[4], d2n[4];
  hermite(s, h_[e], n, dn, d2n);
  value = d1 = d2 = 0.0;
  for (int k = 0; k < 4; ++k) {
    const long g = local_to_global(e, k);
    if (g < 0) continue;
    const double c = u[static_cast<std::size_t>(g)];
    value += n[k] * c;
    d1 += dn[k] * c;
    d2 += d2n[k] * c;
  }
}

FieldSamples BeamDiscretization::sample(const DofVector& u) const {
  std::vector<double> w, t;
  split(u, w, t);
  FieldSamples f;
  f.value.resize(qp_.size());
  f.d1.resize(qp_.size());
  f.d2.resize(qp_.size());
  for (std::size_t q = 0; q < qp_.size(); ++q) {
    const auto& p = qp_[q];
    const double c[4] = {w[p.element], t[p.element], w[p.element + 1], t[p.element + 1]};
    double v = 0.0, a = 0.0, b = 0.0;
    for (int k = 0; k < 4; ++k) {
      v += p.n[k] * c[k];
      a += p.d1[k] * c[k];
      b += p.d2[k] * c[k];
    }
    f.value[q] = v;
    f.d1[q] = a;
    f.d2[q] = b;
  }
  return f;
}

void BeamDiscretization::dump_matrices(const std::string& directory, const std::string& prefix) const {
  std::filesystem::create_directories(directory);
  auto dump = [&](const SymBandMatrix& m, const std::string& name) {
    std::ofstream os(std::filesystem::path(directory) / (prefix + "_" + name + ".coo"));
    os << std::setprecision(17) << std::scientific;
    os << "% " << m.size() << " " << m.size() << " symmetric lower band kd=" << m.bandwidth() << "\n";
    for (std::size_t j = 0; j < m.size(); ++j)
      for (std::size_t i = j; i < std::min(m.size(), j + m.bandwidth() + 1); ++i)
        if (m(i, j) != 0.0) os << i + 1 << " " << j + 1 << " " << m(i, j) << "\n";
  };
  dump(mass_, "M_w");
  dump(stiff_, "S");
  dump(bstiff_, "B");
  dump(bdamp_, "C");
}

BeamDiscretization build(const DegeneracyCoefficient& coeff, int n_elements, double beta,
                         double gamma, double grading) {
  DiscretizationOptions opts;
  opts.grading = grading;
  return BeamDiscretization(coeff, n_elements, beta, gamma, opts);
}

DofVector interpolate(const BeamDiscretization& disc, const std::function<double(double)>& f,
                      const std::function<double(double)>& df) {
  if (std::abs(f(0.0)) > 1e-12 || std::abs(df(0.0)) > 1e-12)
    throw DomainError("interpolate: f must satisfy f(0) = f'(0) = 0");
  DofVector u(disc.n_dof());
  const auto& x = disc.nodes();
  for (std::size_t i = 1; i < x.size(); ++i) {
    u[BeamDiscretization::value_dof(i)] = f(x[i]);
    u[BeamDiscretization::slope_dof(i)] = df(x[i]);
  }
  return u;
}

double weighted_l2_norm_sq(const BeamDiscretization& disc, const DofVector& u) {
  if (u.size() != disc.n_dof()) throw DomainError("weighted_l2_norm_sq: size mismatch");
  return disc.weighted_l2(u);
}

double triple_norm_sq(const BeamDiscretization& disc, const DofVector& u) {
  if (u.size() != disc.n_dof()) throw DomainError("triple_norm_sq: size mismatch");
  const double a = disc.value_at_1(u), b = disc.slope_at_1(u);
  return disc.bending_energy(u) + disc.beta() * a * a + disc.gamma() * b * b;
}

double gauss_green_residual(const BeamDiscretization& disc, const Polynomial& u, const Polynomial& v) {
  if (u.degree() > 4 || v.degree() > 4)
    throw DomainError("gauss_green_residual: polynomials of degree <= 4 only");
  const Polynomial du = u.derivative(), dv = v.derivative();
  if (std::abs(u(0.0)) > 1e-14 || std::abs(du(0.0)) > 1e-14 || std::abs(v(0.0)) > 1e-14 ||
      std::abs(dv(0.0)) > 1e-14)
    throw DomainError("gauss_green_residual: u and v must satisfy the clamped conditions");
  const Polynomial d2u = du.derivative(), d3u = d2u.derivative(), d4u = d3u.derivative();
  const Polynomial d2v = dv.derivative();

  // int_0^1 u'''' v: product coefficients integrated term by term
  double lhs = 0.0;
  for (std::size_t i = 0; i < d4u.coeffs.size(); ++i)
    for (std::size_t j = 0; j < v.coeffs.size(); ++j)
      lhs += d4u.coeffs[i] * v.coeffs[j] / static_cast<double>(i + j + 1);

  const auto& xq = disc.quad_points();
  const auto& wq = disc.quad_weights();
  double bulk = 0.0;
  for (std::size_t q = 0; q < xq.size(); ++q) bulk += wq[q] * d2u(xq[q]) * d2v(xq[q]);
  const double rhs = d3u(1.0) * v(1.0) - d2u(1.0) * dv(1.0) + bulk;
  return std::abs(lhs - rhs);
}

}  // namespace beamstab
