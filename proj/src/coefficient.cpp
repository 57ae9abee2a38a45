#include "beamstab/coefficient.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "beamstab/errors.hpp"
#include "beamstab/linalg.hpp"
#include "beamstab/quadrature.hpp"

namespace beamstab {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr double kGridLow = 1e-8;
constexpr int kSupGrid = 4096;

std::vector<double> geometric_grid(double lo, double hi, int n) {
  std::vector<double> x(static_cast<std::size_t>(n));
  const double r = std::log(hi / lo) / (n - 1);
  for (int i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] = lo * std::exp(r * i);
  x.back() = hi;
  return x;
}

double raw_value(const CoefficientForm& form, double x) {
  return std::visit(overloaded{
                        [x](const PowerLaw& p) { return x == 0.0 ? 0.0 : std::pow(x, p.alpha); },
                        [x](const PowerLawTimesSmooth& p) {
                          return x == 0.0 ? 0.0 : std::pow(x, p.alpha) * (1.0 + p.c * x);
                        },
                        [x](const UserDefined& u) { return u.a(x); },
                    },
                    form);
}

double raw_derivative(const CoefficientForm& form, double x) {
  return std::visit(overloaded{
                        [x](const PowerLaw& p) { return p.alpha * std::pow(x, p.alpha - 1.0); },
                        [x](const PowerLawTimesSmooth& p) {
                          // d/dx (x^alpha + c x^(alpha + 1))
                          return p.alpha * std::pow(x, p.alpha - 1.0) +
                                 p.c * (p.alpha + 1.0) * std::pow(x, p.alpha);
                        },
                        [x](const UserDefined& u) { return u.a_prime(x); },
                    },
                    form);
}

double ratio(const CoefficientForm& form, double x) {
  return x * std::abs(raw_derivative(form, x)) / raw_value(form, x);
}

double golden_max(const CoefficientForm& form, double lo, double hi) {
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = lo, b = hi;
  double c = b - phi * (b - a), d = a + phi * (b - a);
  double fc = ratio(form, c), fd = ratio(form, d);
  for (int it = 0; it < 120 && (b - a) > 1e-15 * b; ++it) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - phi * (b - a);
      fc = ratio(form, c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + phi * (b - a);
      fd = ratio(form, d);
    }
  }
  return std::max(fc, fd);
}

double grid_supremum(const CoefficientForm& form) {
  const auto xs = geometric_grid(kGridLow, 1.0, kSupGrid);
  std::vector<double> g(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    g[i] = ratio(form, xs[i]);
    if (!std::isfinite(g[i]))
      throw ClassificationError("x|a'|/a is not finite at x = " + std::to_string(xs[i]));
  }
  double sup = *std::max_element(g.begin(), g.end());
  // Refine around every interior local maximum; the endpoints are already sampled.
  for (std::size_t i = 1; i + 1 < xs.size(); ++i) {
    if (g[i] >= g[i - 1] && g[i] >= g[i + 1] && g[i] >= 0.5 * sup)
      sup = std::max(sup, golden_max(form, xs[i - 1], xs[i + 1]));
  }
  return sup;
}

}  // namespace

std::string to_string(DegeneracyClass k) {
  return k == DegeneracyClass::WeaklyDegenerate ? "WD" : "SD";
}

double compute_K(const CoefficientForm& form) {
  double k = std::visit(overloaded{
                            [](const PowerLaw& p) { return p.alpha; },
                            [&](const PowerLawTimesSmooth&) { return grid_supremum(form); },
                            [&](const UserDefined&) { return grid_supremum(form); },
                        },
                        form);
  if (!(k > 0.0))
    throw ClassificationError("K = " + std::to_string(k) + " is not positive: a does not degenerate");
  if (k >= 2.0)
    throw ClassificationError("K = " + std::to_string(k) +
                              " >= 2: neither weakly nor strongly degenerate");
  return k;
}

DegeneracyCoefficient::DegeneracyCoefficient(CoefficientForm form) : form_(std::move(form)) {
  std::visit(overloaded{
                 [](const PowerLaw& p) {
                   if (!(p.alpha > 0.0) || !std::isfinite(p.alpha))
                     throw ClassificationError("power law exponent must be positive");
                 },
                 [](const PowerLawTimesSmooth& p) {
                   if (!(p.alpha > 0.0) || !std::isfinite(p.alpha))
                     throw ClassificationError("power law exponent must be positive");
                   if (!(p.c >= 0.0) || !std::isfinite(p.c))
                     throw ClassificationError("smooth factor c must be >= 0");
                 },
                 [](const UserDefined& u) {
                   if (!u.a || !u.a_prime)
                     throw ClassificationError("user-defined coefficient needs a and a'");
                 },
             },
             form_);
  if (std::abs(raw_value(form_, 0.0)) > 1e-14)
    throw ClassificationError("a(0) must vanish");
  for (double x : geometric_grid(kGridLow, 1.0, 1024)) {
    const double v = raw_value(form_, x);
    if (!(v > 0.0) || !std::isfinite(v))
      throw ClassificationError("a is not positive at x = " + std::to_string(x));
  }
  k_ = compute_K(form_);
  a1_ = raw_value(form_, 1.0);
  klass_ = k_ < 1.0 ? DegeneracyClass::WeaklyDegenerate : DegeneracyClass::StronglyDegenerate;
}

DegeneracyCoefficient DegeneracyCoefficient::power_law(double alpha) {
  return DegeneracyCoefficient(PowerLaw{alpha});
}

DegeneracyCoefficient DegeneracyCoefficient::power_law_times_smooth(double alpha, double c) {
  return DegeneracyCoefficient(PowerLawTimesSmooth{alpha, c});
}

double DegeneracyCoefficient::value(double x) const {
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("a(x): x must lie in [0, 1]");
  if (x == 0.0) return 0.0;
  return raw_value(form_, x);
}

double DegeneracyCoefficient::derivative(double x) const {
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("a'(x): x must lie in [0, 1]");
  if (x == 0.0) {
    return std::visit(overloaded{
                          [](const PowerLaw& p) {
                            if (p.alpha < 1.0) throw DomainError("a'(0) is unbounded for alpha < 1");
                            return p.alpha == 1.0 ? 1.0 : 0.0;
                          },
                          [](const PowerLawTimesSmooth& p) {
                            if (p.alpha < 1.0) throw DomainError("a'(0) is unbounded for alpha < 1");
                            return p.alpha == 1.0 ? 1.0 : 0.0;
                          },
                          [](const UserDefined& u) {
                            const double d = u.a_prime(0.0);
                            if (!std::isfinite(d)) throw DomainError("a'(0) is not finite");
                            return d;
                          },
                      },
                      form_);
  }
  return raw_derivative(form_, x);
}

double DegeneracyCoefficient::log_slope(double x) const {
  if (!(x > 0.0 && x <= 1.0)) throw DomainError("x a'/a: x must lie in (0, 1]");
  if (const auto* p = std::get_if<PowerLaw>(&form_)) return p->alpha;
  return x * raw_derivative(form_, x) / raw_value(form_, x);
}

std::string DegeneracyCoefficient::family() const {
  return std::visit(overloaded{
                        [](const PowerLaw&) { return std::string("power_law"); },
                        [](const PowerLawTimesSmooth&) { return std::string("power_law_times_smooth"); },
                        [](const UserDefined&) { return std::string("user"); },
                    },
                    form_);
}

double DegeneracyCoefficient::alpha() const {
  if (const auto* p = std::get_if<PowerLaw>(&form_)) return p->alpha;
  if (const auto* p = std::get_if<PowerLawTimesSmooth>(&form_)) return p->alpha;
  return std::numeric_limits<double>::quiet_NaN();
}

double DegeneracyCoefficient::c() const {
  if (std::holds_alternative<PowerLaw>(form_)) return 0.0;
  if (const auto* p = std::get_if<PowerLawTimesSmooth>(&form_)) return p->c;
  return std::numeric_limits<double>::quiet_NaN();
}

std::string DegeneracyCoefficient::describe() const {
  std::ostringstream os;
  os.precision(6);
  std::visit(overloaded{
                 [&](const PowerLaw& p) { os << "x^" << p.alpha; },
                 [&](const PowerLawTimesSmooth& p) { os << "x^" << p.alpha << "*(1+" << p.c << "x)"; },
                 [&](const UserDefined& u) { os << (u.name.empty() ? "user" : u.name); },
             },
             form_);
  return os.str();
}

double eval_a(const DegeneracyCoefficient& coeff, double x) { return coeff.value(x); }

double eval_a_prime(const DegeneracyCoefficient& coeff, double x) { return coeff.derivative(x); }

HypothesisReport hypothesis_report(const DegeneracyCoefficient& coeff, int grid_n) {
  if (grid_n < 16) throw DomainError("check_hypothesis: grid_n must be >= 16");
  const auto xs = geometric_grid(kGridLow, 1.0, grid_n);
  const double k = coeff.K();
  HypothesisReport rep;
  double prev = std::pow(xs[0], k) / coeff.value(xs[0]);
  for (std::size_t i = 1; i < xs.size(); ++i) {
    const double cur = std::pow(xs[i], k) / coeff.value(xs[i]);
    if (cur < prev * (1.0 - 1e-10)) {
      rep.ok = false;
      rep.largest_violation = xs[i];
    }
    prev = cur;
  }
  return rep;
}

bool check_hypothesis(const DegeneracyCoefficient& coeff, int grid_n) {
  return hypothesis_report(coeff, grid_n).ok;
}

namespace {

std::vector<double> graded_nodes(int n, double grading) {
  std::vector<double> x(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i <= n; ++i) x[static_cast<std::size_t>(i)] = std::pow(static_cast<double>(i) / n, grading);
  x.back() = 1.0;
  return x;
}

struct P1Pencil {
  SymBandMatrix stiffness;
  SymBandMatrix weighted_mass;
};

// Unknowns are nodal values at x_1..x_N; u(0) = 0 is eliminated.
P1Pencil assemble_p1(const DegeneracyCoefficient& coeff, int n, double grading) {
  const auto x = graded_nodes(n, grading);
  const std::size_t nd = static_cast<std::size_t>(n);
  P1Pencil p{SymBandMatrix(nd, 1), SymBandMatrix(nd, 1)};
  for (std::size_t e = 0; e < nd; ++e) {
    const double h = x[e + 1] - x[e];
    const GaussRule& q = gauss_rule(16);
    double m00 = 0.0, m01 = 0.0, m11 = 0.0;
    for (std::size_t k = 0; k < q.nodes.size(); ++k) {
      const double s = q.nodes[k];
      const double xq = x[e] + h * s;
      const double w = q.weights[k] * h / coeff.value(xq);
      m00 += w * (1.0 - s) * (1.0 - s);
      m01 += w * (1.0 - s) * s;
      m11 += w * s * s;
    }
    // local dofs: node e (absent when e == 0) and node e + 1
    const std::size_t j = e;  // global index of node e + 1
    p.stiffness.add(j, j, 1.0 / h);
    p.weighted_mass.add(j, j, m11);
    if (e > 0) {
      const std::size_t i = e - 1;
      p.stiffness.add(i, i, 1.0 / h);
      p.stiffness.add(i, j, -1.0 / h);
      p.weighted_mass.add(i, i, m00);
      p.weighted_mass.add(i, j, m01);
    }
  }
  return p;
}

}  // namespace

HardyEstimate estimate_hardy_constant(const DegeneracyCoefficient& coeff, int mesh_n, double grading) {
  if (mesh_n < 32) throw DomainError("estimate_hardy_constant: mesh_n must be >= 32");
  if (!(grading >= 1.0)) throw DomainError("estimate_hardy_constant: grading must be >= 1");
  const auto pencil = assemble_p1(coeff, mesh_n, grading);
  const auto eig = smallest_generalized_eigenvalue(pencil.stiffness, pencil.weighted_mass);
  if (!(eig.value > 0.0))
    throw SolverError("Hardy pencil has a non-positive eigenvalue: assembly is broken");
  return {1.0 / eig.value, eig.value, mesh_n};
}

double hardy_quotient_p1(const DegeneracyCoefficient& coeff, int mesh_n, double grading,
                         const std::vector<double>& nodal_values) {
  const auto pencil = assemble_p1(coeff, mesh_n, grading);
  if (nodal_values.size() != pencil.stiffness.size())
    throw DomainError("hardy_quotient_p1: expected one value per free node");
  return pencil.weighted_mass.quadratic_form(nodal_values) /
         pencil.stiffness.quadratic_form(nodal_values);
}

}  // namespace beamstab
