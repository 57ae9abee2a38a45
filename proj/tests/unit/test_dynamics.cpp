#include <doctest.h>

#include <cmath>

#include "beamstab/dynamics.hpp"
#include "beamstab/errors.hpp"

using namespace beamstab;

namespace {

BeamState state_from(const BeamDiscretization& d, InitialProfile y0, InitialProfile y1) {
  return {0.0, interpolate_profile(d, y0), interpolate_profile(d, y1)};
}

double max_abs_diff(const DofVector& a, const DofVector& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double max_abs(const DofVector& a) {
  double m = 0.0;
  for (double x : a.values) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

TEST_CASE("energy examples") {
  const auto c = DegeneracyCoefficient::power_law(0.5);
  const auto d0 = build(c, 16, 0.0, 0.0);
  const auto d1 = build(c, 16, 1.0, 1.0);
  CHECK(energy(d0, state_from(d0, InitialProfile::Zero, InitialProfile::Zero)) == 0.0);
  CHECK(energy(d0, state_from(d0, InitialProfile::X2, InitialProfile::Zero)) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(energy(d1, state_from(d1, InitialProfile::X2, InitialProfile::Zero)) == doctest::Approx(4.5).epsilon(1e-12));
}

TEST_CASE("profile menu") {
  for (const char* name : {"zero", "x2", "x3", "x2_1mx_2", "sin_bump_x2"}) {
    const auto p = parse_profile(name);
    CHECK(to_string(p) == name);
    const auto f = profile_function(p, 2.0);
    CHECK(f.value(0.0) == 0.0);
    CHECK(f.slope(0.0) == 0.0);
    const double h = 1e-6, x = 0.41;
    CHECK(f.slope(x) == doctest::Approx((f.value(x + h) - f.value(x - h)) / (2 * h)).epsilon(1e-7).scale(1.0));
  }
  CHECK_THROWS_AS(parse_profile("x4"), DomainError);
}

TEST_CASE("zero state is a fixed point") {
  const auto d = build(DegeneracyCoefficient::power_law(1.2), 16, 1.0, 1.0);
  const auto s = step(d, state_from(d, InitialProfile::Zero, InitialProfile::Zero), 1e-2);
  CHECK(max_abs(s.y) == 0.0);
  CHECK(max_abs(s.v) == 0.0);
  CHECK(s.t == doctest::Approx(1e-2));
}

TEST_CASE("per-step energy balance") {
  const auto d = build(DegeneracyCoefficient::power_law(0.5), 32, 1.0, 1.0);
  BeamState s = state_from(d, InitialProfile::X2OneMinusX2, InitialProfile::SinBumpX2);
  const double e0 = energy(d, s);
  const double dt = 2e-3;
  const Stepper st(d, dt);
  double worst = 0.0;
  for (int n = 0; n < 500; ++n) {
    const double before = energy(d, s);
    const double diss = st.advance(s);
    const double after = energy(d, s);
    CHECK(after <= before + 1e-14 * e0);
    worst = std::max(worst, std::abs(after - before + dt * diss) / e0);
  }
  CHECK(worst <= 1e-10);
  CHECK_THROWS_AS(Stepper(d, -dt), DomainError);
  CHECK_THROWS_AS(Stepper(d, 0.0), DomainError);
}

TEST_CASE("conservative mode conserves energy and is time-reversible") {
  const auto d = build(DegeneracyCoefficient::power_law(0.8), 32, 0.0, 0.0);
  const BeamState init = state_from(d, InitialProfile::X2OneMinusX2, InitialProfile::X3);
  const double e0 = energy(d, init);
  const double dt = 1e-3;
  BeamState s = init;
  const Stepper fwd(d, dt, true);
  double drift = 0.0;
  for (int n = 0; n < 1000; ++n) {
    CHECK(fwd.advance(s) == 0.0);
    drift = std::max(drift, std::abs(energy(d, s) - e0) / e0);
  }
  CHECK(drift <= 1e-10);

  const Stepper back(d, -dt, true);
  for (int n = 0; n < 1000; ++n) back.advance(s);
  CHECK(std::abs(s.t) <= 1e-12);
  CHECK(max_abs_diff(s.y, init.y) <= 1e-8 * max_abs(init.y));
  CHECK(max_abs_diff(s.v, init.v) <= 1e-8 * std::max(1.0, max_abs(init.v)));
}

TEST_CASE("simulate: zero data, decay and identity residual") {
  const auto d = build(DegeneracyCoefficient::power_law(0.5), 32, 1.0, 1.0);
  const auto z = interpolate_profile(d, InitialProfile::Zero);
  const auto zero = simulate(d, z, z, 1e-2, 1.0);
  for (std::size_t n = 0; n < zero.trace.size(); ++n) {
    CHECK(zero.trace.energy[n] == 0.0);
    CHECK(zero.trace.dissipation[n] == 0.0);
  }
  CHECK(energy_derivative_identity_residual(zero.trace) == 0.0);

  const auto y0 = interpolate_profile(d, InitialProfile::X2);
  const auto run = simulate(d, y0, z, 1e-3, 2.0);
  CHECK(run.trace.times.back() == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(run.trace.energy.back() < run.trace.energy.front());
  CHECK(energy_derivative_identity_residual(run.trace) <= 1e-10);
  for (std::size_t n = 1; n < run.trace.size(); ++n)
    CHECK(run.trace.energy[n] <= run.trace.energy[n - 1] + 1e-10 * run.trace.energy[0]);

  CHECK_THROWS_AS(simulate(d, y0, z, 2.0, 1.0), DomainError);
  CHECK_THROWS_AS(simulate(d, y0, z, 1e-3, -1.0), DomainError);
}

TEST_CASE("simulate lands on t_end when dt does not divide it") {
  const auto d = build(DegeneracyCoefficient::power_law(0.5), 16, 1.0, 1.0);
  const auto y0 = interpolate_profile(d, InitialProfile::X2);
  const auto run = simulate(d, y0, interpolate_profile(d, InitialProfile::Zero), 0.03, 1.0);
  CHECK(run.trace.times.back() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(energy_derivative_identity_residual(run.trace) <= 1e-10);
}

TEST_CASE("extended tail keeps energy monotone") {
  const auto d = build(DegeneracyCoefficient::power_law(1.5), 32, 1.0, 1.0);
  SimulationOptions o;
  o.extend_to = 50.0;
  o.snapshot_stride = 0;
  const auto run = simulate(d, interpolate_profile(d, InitialProfile::X2OneMinusX2),
                            interpolate_profile(d, InitialProfile::Zero), 1e-2, 5.0, o);
  CHECK(run.trace.fixed_step_end == doctest::Approx(5.0));
  CHECK(run.trace.times.back() == doctest::Approx(50.0));
  CHECK(energy_derivative_identity_residual(run.trace) <= 1e-10);
  CHECK(run.snapshots.empty());
}

TEST_CASE("second-order convergence in time") {
  const auto d = build(DegeneracyCoefficient::power_law(0.5), 8, 1.0, 1.0);
  const auto y0 = interpolate_profile(d, InitialProfile::SinBumpX2);
  const auto y1 = interpolate_profile(d, InitialProfile::Zero);
  SimulationOptions o;
  o.snapshot_stride = 0;
  const double h = 1.25e-5, T = 0.25;
  const double e1 = simulate(d, y0, y1, 4 * h, T, o).trace.energy.back();
  const double e2 = simulate(d, y0, y1, 2 * h, T, o).trace.energy.back();
  const double e3 = simulate(d, y0, y1, h, T, o).trace.energy.back();
  const double order = std::log2(std::abs(e1 - e2) / std::abs(e2 - e3));
  CHECK(order >= 1.9);
}

TEST_CASE("multiplier identities") {
  const auto coeff = DegeneracyCoefficient::power_law(0.5);
  SimulationOptions o;
  o.snapshot_stride = 1;
  o.snapshot_to = 2.0;

  const auto d0 = build(coeff, 16, 1.0, 1.0);
  const auto z = interpolate_profile(d0, InitialProfile::Zero);
  const auto zero = simulate(d0, z, z, 1e-2, 2.0, o);
  const auto r0 = multiplier_identity_residual(d0, coeff, zero.snapshots, 0.1, 2.0);
  CHECK(r0.residual_31 == 0.0);
  CHECK(r0.residual_32 == 0.0);
  CHECK_THROWS_AS(multiplier_identity_residual(d0, coeff, zero.snapshots, 0.1, 5.0), SimulationError);

  double prev = 0.0;
  for (int level = 0; level < 2; ++level) {
    const int n = 64 << level;
    const double dt = 2e-3 / (1 << level);
    const auto d = build(coeff, n, 1.0, 1.0);
    const auto run = simulate(d, interpolate_profile(d, InitialProfile::X2OneMinusX2),
                              interpolate_profile(d, InitialProfile::Zero), dt, 2.0, o);
    const auto r = multiplier_identity_residual(d, coeff, run.snapshots, 0.1, 2.0);
    CAPTURE(level);
    CHECK(r.residual_31 <= 0.05);
    CHECK(r.residual_32 <= 0.05);
    if (level == 1) CHECK(r.residual_31 <= prev / 2);
    prev = r.residual_31;
  }
}
