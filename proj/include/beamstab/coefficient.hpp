#pragma once
// The degenerate coefficient a(x): a(0) = 0, a > 0 on (0, 1].

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace beamstab {

enum class DegeneracyClass { WeaklyDegenerate, StronglyDegenerate };

std::string to_string(DegeneracyClass k);

/// a(x) = x^alpha
struct PowerLaw {
  double alpha = 0.5;
};

/// a(x) = x^alpha (1 + c x), c >= 0
struct PowerLawTimesSmooth {
  double alpha = 1.0;
  double c = 0.0;
};

/// Caller-supplied a and a'. Nothing ties the two together; check_hypothesis
/// is how an inconsistent pair shows up.
struct UserDefined {
  std::string name;
  std::function<double(double)> a;
  std::function<double(double)> a_prime;
};

using CoefficientForm = std::variant<PowerLaw, PowerLawTimesSmooth, UserDefined>;

/// Evaluates sup over (0, 1] of x |a'(x)| / a(x). Closed form for PowerLaw,
/// geometric-grid supremum with golden-section refinement otherwise.
/// Throws ClassificationError when the result is not in (0, 2).
double compute_K(const CoefficientForm& form);

class DegeneracyCoefficient {
 public:
  /// Validates positivity on a grid, computes K and the class.
  explicit DegeneracyCoefficient(CoefficientForm form);

  static DegeneracyCoefficient power_law(double alpha);
  static DegeneracyCoefficient power_law_times_smooth(double alpha, double c);

  const CoefficientForm& form() const { return form_; }
  double K() const { return k_; }
  double a_at_1() const { return a1_; }
  DegeneracyClass klass() const { return klass_; }

  /// a(x) for x in [0, 1]; exactly 0 at x = 0.
  double value(double x) const;
  /// a'(x) for x in (0, 1]; x = 0 only when the derivative is finite there.
  double derivative(double x) const;
  /// x a'(x) / a(x), the quantity whose supremum is K.
  double log_slope(double x) const;

  std::string describe() const;
  /// Family tag as used in configuration files: power_law, power_law_times_smooth, user.
  std::string family() const;
  double alpha() const;  // NaN for user-defined forms
  double c() const;      // 0 for PowerLaw, NaN for user-defined forms

 private:
  CoefficientForm form_;
  double k_ = 0.0;
  double a1_ = 1.0;
  DegeneracyClass klass_ = DegeneracyClass::WeaklyDegenerate;
};

double eval_a(const DegeneracyCoefficient& coeff, double x);
double eval_a_prime(const DegeneracyCoefficient& coeff, double x);

struct HypothesisReport {
  bool ok = true;
  /// Largest grid point where x^K / a(x) drops, if any.
  std::optional<double> largest_violation;
};

/// Non-decrease of x^K / a(x) on a geometric grid of grid_n points in [1e-8, 1].
/// A finite check, not a proof. grid_n >= 16.
HypothesisReport hypothesis_report(const DegeneracyCoefficient& coeff, int grid_n);
bool check_hypothesis(const DegeneracyCoefficient& coeff, int grid_n);

struct HardyEstimate {
  double c_hp = 0.0;
  double lambda_min = 0.0;
  int mesh_n = 0;
};

/// Best constant C of  int u^2/a <= C int (u')^2  over u(0) = 0, estimated as
/// 1 / lambda_min of the P1 pencil on a mesh graded toward 0 (x = s^grading).
/// Conforming, so the estimate approaches the true constant from below.
HardyEstimate estimate_hardy_constant(const DegeneracyCoefficient& coeff, int mesh_n,
                                      double grading = 2.0);

/// Quotient int u^2/a / int (u')^2 for a P1 trial function given at the
/// nodes x_1..x_N of the same graded mesh, using the same quadrature as the
/// estimator. Used to certify the estimate from below.
double hardy_quotient_p1(const DegeneracyCoefficient& coeff, int mesh_n, double grading,
                         const std::vector<double>& nodal_values);

}  // namespace beamstab
