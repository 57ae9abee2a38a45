#include <doctest.h>

#include <cmath>
#include <random>

#include "beamstab/statics.hpp"

using namespace beamstab;

namespace {

double err_triple(const BeamDiscretization& d, const DofVector& z, const CubicSolution& c) {
  const auto zi = interpolate(d, [&](double x) { return c.value(x); }, [&](double x) { return c.slope(x); });
  DofVector diff(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) diff[i] = z[i] - zi[i];
  return std::sqrt(triple_norm_sq(d, diff)) / std::max(1.0, std::sqrt(triple_norm_sq(d, zi)));
}

}  // namespace

TEST_CASE("cubic oracle examples") {
  const auto a = cubic_oracle({1, 0, 0, 0});
  CHECK(a.p == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(a.q == doctest::Approx(-1.0 / 6.0).epsilon(1e-15));

  const auto b = cubic_oracle({1, 0, 1, 1});
  CHECK(b.p == doctest::Approx(9.0 / 29.0).epsilon(1e-15));
  CHECK(b.q == doctest::Approx(-4.0 / 29.0).epsilon(1e-15));

  for (double beta : {0.0, 0.5, 2.0}) {
    const auto z = cubic_oracle({0, 0, beta, 1.0});
    CHECK(z.p == 0.0);
    CHECK(z.q == 0.0);
  }
}

TEST_CASE("oracle satisfies the boundary rows") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-5, 5);
  for (int k = 0; k < 200; ++k) {
    for (double beta : {0.0, 0.5, 1.0, 2.0})
      for (double gamma : {0.0, 0.5, 1.0, 2.0}) {
        const StaticProblem p{u(rng), u(rng), beta, gamma};
        const auto r = boundary_residual(p, cubic_oracle(p));
        CHECK(std::abs(r.shear) <= 1e-12);
        CHECK(std::abs(r.moment) <= 1e-12);
      }
  }
}

TEST_CASE("discrete solve reproduces the cubic on random data") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-3, 3);
  const auto coeff = DegeneracyCoefficient::power_law(0.7);
  for (double beta : {0.0, 0.5, 1.0, 2.0})
    for (double gamma : {0.0, 0.5, 1.0, 2.0}) {
      const auto d = build(coeff, 32, beta, gamma);
      for (int k = 0; k < 10; ++k) {
        const StaticProblem p{u(rng), u(rng), beta, gamma};
        const auto z = solve_variational(d, p);
        CAPTURE(beta);
        CAPTURE(gamma);
        CHECK(err_triple(d, z, cubic_oracle(p)) <= 1e-10);
      }
    }
}

TEST_CASE("graded fine meshes stay at roundoff") {
  const auto coeff = DegeneracyCoefficient::power_law(0.5);
  for (int n : {128, 256}) {
    const auto d = build(coeff, n, 1.0, 1.0);
    const StaticProblem p{1.3, -0.7, 1.0, 1.0};
    CAPTURE(n);
    CHECK(err_triple(d, solve_variational(d, p), cubic_oracle(p)) <= 1e-10);
  }
}

TEST_CASE("zero load and linearity") {
  const auto d = build(DegeneracyCoefficient::power_law(1.4), 24, 1.0, 0.5);
  const auto z0 = solve_variational(d, {0, 0, 1.0, 0.5});
  for (double v : z0.values) CHECK(v == 0.0);
  const auto z1 = solve_variational(d, {1.5, -0.5, 1.0, 0.5});
  const auto z2 = solve_variational(d, {-0.25, 2.0, 1.0, 0.5});
  const auto z12 = solve_variational(d, {1.25, 1.5, 1.0, 0.5});
  for (std::size_t i = 0; i < z12.size(); ++i)
    CHECK(z12[i] == doctest::Approx(z1[i] + z2[i]).epsilon(1e-12).scale(1.0));
}

TEST_CASE("a-priori estimates") {
  const auto coeff = DegeneracyCoefficient::power_law(0.5);
  const double chp = estimate_hardy_constant(coeff, 256).c_hp;
  const auto d = build(coeff, 64, 0.0, 0.0);

  const StaticProblem p1{1, 0, 0, 0};
  const auto r1 = verify_estimates(d, p1, solve_variational(d, p1), chp);
  CHECK(r1.ok);
  CHECK(r1.triple == doctest::Approx(1.0 / 3.0).epsilon(1e-10));
  CHECK(r1.triple_bound == 1.0);

  const StaticProblem p2{0, 1, 0, 0};
  const auto z2 = solve_variational(d, p2);
  const auto r2 = verify_estimates(d, p2, z2, chp);
  CHECK(r2.ok);
  CHECK(r2.triple == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(cubic_oracle(p2).p == doctest::Approx(0.5));
  CHECK(cubic_oracle(p2).q == doctest::Approx(0.0).scale(1.0));

  const StaticProblem p0{0, 0, 0, 0};
  const auto r0 = verify_estimates(d, p0, solve_variational(d, p0), chp);
  CHECK(r0.ok);
  CHECK(r0.triple == 0.0);
  CHECK(r0.weighted_l2 == 0.0);
}

TEST_CASE("estimates hold across the boundary weights") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(-2, 2);
  for (double alpha : {0.3, 1.5}) {
    const auto coeff = DegeneracyCoefficient::power_law(alpha);
    const double chp = estimate_hardy_constant(coeff, 256).c_hp;
    for (double beta : {0.0, 0.5, 1.0, 2.0})
      for (double gamma : {0.0, 0.5, 1.0, 2.0}) {
        const auto d = build(coeff, 32, beta, gamma);
        const StaticProblem p{u(rng), u(rng), beta, gamma};
        CHECK(verify_estimates(d, p, solve_variational(d, p), chp).ok);
      }
  }
}
