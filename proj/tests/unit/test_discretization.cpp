#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "../support/oracles.hpp"
#include "beamstab/discretization.hpp"
#include "beamstab/errors.hpp"

using namespace beamstab;

namespace {

DofVector random_dofs(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> g;
  DofVector u(n);
  for (std::size_t i = 0; i < n; ++i) u[i] = g(rng);
  return u;
}

double max_asym(const SymBandMatrix& m) {
  double worst = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m.size(); ++j) worst = std::max(worst, std::abs(m(i, j) - m(j, i)));
  return worst;
}

auto sq = [](double x) { return x * x; };
auto two_x = [](double x) { return 2.0 * x; };
auto cube = [](double x) { return x * x * x; };
auto three_x2 = [](double x) { return 3.0 * x * x; };

}  // namespace

TEST_CASE("zero boundary weights give a zero boundary matrix") {
  const auto d = build(DegeneracyCoefficient::power_law(0.5), 4, 0.0, 0.0);
  CHECK(d.boundary_stiffness().max_abs() == 0.0);
  CHECK(d.n_dof() == 8);
  CHECK(d.trace_value() == 6);
  CHECK(d.trace_slope() == 7);
}

TEST_CASE("assembled matrices are symmetric and B, C are the trace selectors") {
  const auto d = build(DegeneracyCoefficient::power_law(1.3), 16, 0.7, 2.0);
  for (const auto* m : {&d.mass(), &d.stiffness(), &d.boundary_stiffness(), &d.boundary_damping(), &d.elastic()})
    CHECK(max_asym(*m) <= 1e-12 * m->max_abs());
  const auto& b = d.boundary_stiffness();
  const auto& c = d.boundary_damping();
  for (std::size_t i = 0; i < d.n_dof(); ++i)
    for (std::size_t j = 0; j < d.n_dof(); ++j) {
      double eb = 0.0, ec = 0.0;
      if (i == j && i == d.trace_value()) eb = 0.7, ec = 1.0;
      if (i == j && i == d.trace_slope()) eb = 2.0, ec = 1.0;
      CHECK(b(i, j) == eb);
      CHECK(c(i, j) == ec);
    }
}

TEST_CASE("graded nodes") {
  const auto d = build(DegeneracyCoefficient::power_law(0.5), 8, 0.0, 0.0, 2.0);
  const auto& x = d.nodes();
  REQUIRE(x.size() == 9);
  CHECK(x.front() == 0.0);
  CHECK(x.back() == 1.0);
  CHECK(x[1] == doctest::Approx(1.0 / 64.0));
  CHECK_THROWS_AS(build(DegeneracyCoefficient::power_law(0.5), 3, 0.0, 0.0), DomainError);
}

TEST_CASE("mass entry of the slope basis at node 1 against adaptive quadrature") {
  const auto d = build(DegeneracyCoefficient::power_law(0.5), 64, 0.0, 0.0);
  const double x0 = d.nodes()[0], x1 = d.nodes()[1], x2 = d.nodes()[2];
  const double h0 = x1 - x0, h1 = x2 - x1;
  auto left = [&](double x) {
    const double s = (x - x0) / h0;
    const double n = h0 * (-s * s + s * s * s);
    return n * n / std::sqrt(x);
  };
  auto right = [&](double x) {
    const double s = (x - x1) / h1;
    const double n = h1 * (s - 2 * s * s + s * s * s);
    return n * n / std::sqrt(x);
  };
  const double exact = oracle::gauss_kronrod(left, x0, x1) + oracle::gauss_kronrod(right, x1, x2);
  const std::size_t k = BeamDiscretization::slope_dof(1);
  CHECK(std::abs(d.mass()(k, k) - exact) <= 1e-8 * exact);
}

TEST_CASE("every mass diagonal matches adaptive quadrature") {
  for (double alpha : {0.5, 1.5}) {
    const auto d = build(DegeneracyCoefficient::power_law(alpha), 32, 0.0, 0.0);
    const auto& x = d.nodes();
    for (std::size_t node = 1; node < x.size(); ++node) {
      for (int slope = 0; slope < 2; ++slope) {
        double exact = 0.0;
        for (int side = 0; side < 2; ++side) {
          const std::size_t e = side == 0 ? node - 1 : node;
          if (e + 1 >= x.size()) continue;
          const double a = x[e], h = x[e + 1] - x[e];
          auto f = [&](double xx) {
            const double s = (xx - a) / h;
            double n;
            if (side == 0) n = slope ? h * (-s * s + s * s * s) : 3 * s * s - 2 * s * s * s;
            else n = slope ? h * (s - 2 * s * s + s * s * s) : 1 - 3 * s * s + 2 * s * s * s;
            return n * n / std::pow(xx, alpha);
          };
          exact += oracle::gauss_kronrod(f, a, a + h);
        }
        const std::size_t k = slope ? BeamDiscretization::slope_dof(node) : BeamDiscretization::value_dof(node);
        CAPTURE(alpha);
        CAPTURE(node);
        CAPTURE(slope);
        CHECK(std::abs(d.mass()(k, k) - exact) <= 1e-8 * exact);
      }
    }
  }
}

TEST_CASE("interpolate reproduces quadratics and cubics") {
  const auto d = build(DegeneracyCoefficient::power_law(0.8), 12, 1.0, 1.0);
  const auto u2 = interpolate(d, sq, two_x);
  const auto u3 = interpolate(d, cube, three_x2);
  CHECK(d.bending_energy(u2) == doctest::Approx(4.0).epsilon(1e-13));
  CHECK(d.stiffness().quadratic_form(u2) == doctest::Approx(4.0).epsilon(1e-10));
  CHECK(d.bending_energy(u3) == doctest::Approx(12.0).epsilon(1e-13));
  CHECK(d.stiffness().quadratic_form(u3) == doctest::Approx(12.0).epsilon(1e-10));

  const auto z = interpolate(d, [](double) { return 0.0; }, [](double) { return 0.0; });
  for (double v : z.values) CHECK(v == 0.0);

  CHECK_THROWS_AS(interpolate(d, [](double x) { return x + 1.0; }, [](double) { return 1.0; }), DomainError);
  CHECK_THROWS_AS(interpolate(d, [](double x) { return x; }, [](double) { return 1.0; }), DomainError);

  double v, d1, d2;
  d.evaluate(u3, 0.37, v, d1, d2);
  CHECK(v == doctest::Approx(cube(0.37)).epsilon(1e-13));
  CHECK(d1 == doctest::Approx(three_x2(0.37)).epsilon(1e-13));
  CHECK(d2 == doctest::Approx(6 * 0.37).epsilon(1e-12));
  CHECK(d.curvature_at_1(u3) == doctest::Approx(6.0).epsilon(1e-12));
}

TEST_CASE("weighted_l2_norm_sq") {
  const auto d = build(DegeneracyCoefficient::power_law(1.0), 128, 0.0, 0.0);
  const auto u = interpolate(d, sq, two_x);
  CHECK(weighted_l2_norm_sq(d, DofVector(d.n_dof())) == 0.0);
  CHECK(std::abs(weighted_l2_norm_sq(d, u) - 0.25) <= 1e-6);
  DofVector u2 = u;
  for (auto& x : u2.values) x *= 2.0;
  CHECK(weighted_l2_norm_sq(d, u2) == doctest::Approx(4.0 * weighted_l2_norm_sq(d, u)).epsilon(1e-14));
}

TEST_CASE("triple_norm_sq") {
  const auto c = DegeneracyCoefficient::power_law(0.5);
  const auto d0 = build(c, 16, 0.0, 0.0);
  const auto d1 = build(c, 16, 1.0, 1.0);
  const auto u0 = interpolate(d0, sq, two_x);
  const auto u1 = interpolate(d1, sq, two_x);
  CHECK(triple_norm_sq(d0, u0) == doctest::Approx(d0.stiffness().quadratic_form(u0)).epsilon(1e-10));
  CHECK(triple_norm_sq(d1, u1) == doctest::Approx(9.0).epsilon(1e-12));
  std::mt19937_64 rng(3);
  for (int k = 0; k < 20; ++k) {
    const auto u = random_dofs(rng, d1.n_dof());
    CHECK(triple_norm_sq(d1, u) >= d1.stiffness().quadratic_form(u) * (1 - 1e-12));
  }
}

TEST_CASE("Gauss-Green residual on clamped monomials") {
  const auto d = build(DegeneracyCoefficient::power_law(1.5), 16, 0.0, 0.0);
  const Polynomial x2{{0, 0, 1}}, x3{{0, 0, 0, 1}}, x4{{0, 0, 0, 0, 1}};
  CHECK(gauss_green_residual(d, x2, x2) <= 1e-10);
  CHECK(gauss_green_residual(d, x4, x2) <= 1e-10);
  CHECK(gauss_green_residual(d, x3, x3) <= 1e-10);
  CHECK_THROWS_AS(gauss_green_residual(d, Polynomial{{0, 1}}, x2), DomainError);
  CHECK_THROWS_AS(gauss_green_residual(d, Polynomial{{0, 0, 0, 0, 0, 1}}, x2), DomainError);
}

TEST_CASE("pencil (S + B, M_w) is positive definite") {
  for (double beta : {0.0, 1.0}) {
    const auto d = build(DegeneracyCoefficient::power_law(1.2), 32, beta, beta);
    const auto lo = smallest_generalized_eigenvalue(d.elastic(), d.mass());
    CHECK(lo.value > 0.0);
  }
}

TEST_CASE("trace bounds and norm equivalence on random DOF vectors") {
  std::mt19937_64 rng(5);
  const auto c = DegeneracyCoefficient::power_law(0.9);
  const auto d = build(c, 64, 0.0, 0.0);
  const double chp = estimate_hardy_constant(c, 512).c_hp;
  for (int k = 0; k < 100; ++k) {
    const auto u = random_dofs(rng, d.n_dof());
    const double s = d.stiffness().quadratic_form(u);
    CHECK(sq(d.value_at_1(u)) <= s * (1 + 1e-3));
    CHECK(sq(d.slope_at_1(u)) <= s * (1 + 1e-3));
    CHECK(d.weighted_l2(u) + s <= (4 * chp + 1) * s * (1 + 1e-3));
  }
}

TEST_CASE("matrix dump writes four coordinate files") {
  const auto d = build(DegeneracyCoefficient::power_law(0.5), 4, 1.0, 2.0);
  const auto dir = std::filesystem::temp_directory_path() / "beamstab_dump_test";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  d.dump_matrices(dir.string(), "t");
  for (const char* suffix : {"_M_w.coo", "_S.coo", "_B.coo", "_C.coo"})
    CHECK(std::filesystem::exists(dir / (std::string("t") + suffix)));
  std::filesystem::remove_all(dir);
}
