#include "beamstab/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "beamstab/errors.hpp"
#include "beamstab/kernels/kernels.hpp"

namespace beamstab {

std::string to_string(InitialProfile p) {
  switch (p) {
    case InitialProfile::Zero: return "zero";
    case InitialProfile::X2: return "x2";
    case InitialProfile::X3: return "x3";
    case InitialProfile::X2OneMinusX2: return "x2_1mx_2";
    case InitialProfile::SinBumpX2: return "sin_bump_x2";
  }
  return "?";
}

InitialProfile parse_profile(const std::string& name) {
  for (auto p : {InitialProfile::Zero, InitialProfile::X2, InitialProfile::X3,
                 InitialProfile::X2OneMinusX2, InitialProfile::SinBumpX2})
    if (to_string(p) == name) return p;
  throw DomainError("unknown initial profile '" + name +
                    "' (expected zero, x2, x3, x2_1mx_2, sin_bump_x2)");
}

ProfileFunction profile_function(InitialProfile p, double amp) {
  using std::numbers::pi;
  switch (p) {
    case InitialProfile::Zero:
      return {[](double) { return 0.0; }, [](double) { return 0.0; }};
    case InitialProfile::X2:
      return {[amp](double x) { return amp * x * x; }, [amp](double x) { return 2.0 * amp * x; }};
    case InitialProfile::X3:
      return {[amp](double x) { return amp * x * x * x; },
              [amp](double x) { return 3.0 * amp * x * x; }};
    case InitialProfile::X2OneMinusX2:
      return {[amp](double x) { return amp * x * x * (1.0 - x) * (1.0 - x); },
              [amp](double x) { return amp * 2.0 * x * (1.0 - x) * (1.0 - 2.0 * x); }};
    case InitialProfile::SinBumpX2:
      // x^2 sin^4(pi x): vanishes to fourth order at x = 1, so every boundary
      // row at x = 1 is satisfied by (y0, 0) for all beta, gamma.
      return {[amp](double x) {
                const double s = std::sin(pi * x);
                return amp * x * x * s * s * s * s;
              },
              [amp](double x) {
                const double s = std::sin(pi * x), c = std::cos(pi * x);
                return amp * (2.0 * x * s * s * s * s + 4.0 * pi * x * x * s * s * s * c);
              }};
  }
  throw DomainError("unknown initial profile");
}

DofVector interpolate_profile(const BeamDiscretization& disc, InitialProfile p, double amplitude) {
  const auto f = profile_function(p, amplitude);
  return interpolate(disc, f.value, f.slope);
}

double energy(const BeamDiscretization& disc, const BeamState& state) {
  if (state.y.size() != disc.n_dof() || state.v.size() != disc.n_dof())
    throw DomainError("energy: state size does not match the discretization");
  const double y1 = disc.value_at_1(state.y), yx1 = disc.slope_at_1(state.y);
  return 0.5 * (disc.weighted_l2(state.v) + disc.bending_energy(state.y) +
                disc.beta() * y1 * y1 + disc.gamma() * yx1 * yx1);
}

namespace {

SymBandMatrix step_matrix(const BeamDiscretization& disc, double dt, bool conservative) {
  SymBandMatrix a = disc.mass().plus_scaled(disc.elastic(), 0.25 * dt * dt);
  if (!conservative) a = a.plus_scaled(disc.boundary_damping(), 0.5 * dt);
  return a;
}

}  // namespace

Stepper::Stepper(const BeamDiscretization& disc, double dt, bool conservative)
    : disc_(&disc),
      dt_(dt),
      conservative_(conservative),
      factor_([&]() -> BandCholesky {
        if (!std::isfinite(dt) || dt == 0.0 || (!conservative && dt < 0.0))
          throw DomainError("step: dt must be positive (negative only in conservative mode)");
        try {
          return BandCholesky(step_matrix(disc, dt, conservative));
        } catch (const SolverError& e) {
          throw SolverError(std::string("step matrix factorization failed (reduce dt): ") + e.what());
        }
      }()) {}

double Stepper::advance(BeamState& s) const {
  const std::size_t n = disc_->n_dof();
  const auto& k = kernels::active();
  // (M + dt^2/4 K + dt/2 C) v_mid = M v - dt/2 K y
  std::vector<double> rhs(n), ky(n);
  disc_->mass().multiply(s.v, rhs);
  disc_->elastic().multiply(s.y, ky);
  k.axpy(-0.5 * dt_, ky, rhs);
  factor_.solve_in_place(rhs);
  const std::vector<double>& vmid = rhs;

  k.axpy(dt_, vmid, s.y.values);
  for (std::size_t i = 0; i < n; ++i) s.v[i] = 2.0 * vmid[i] - s.v[i];
  s.t += dt_;
  if (conservative_) return 0.0;
  const double a = vmid[disc_->trace_value()], b = vmid[disc_->trace_slope()];
  return a * a + b * b;
}

BeamState step(const BeamDiscretization& disc, const BeamState& state, double dt) {
  if (!(dt > 0.0)) throw DomainError("step: dt must be positive");
  BeamState next = state;
  Stepper(disc, dt).advance(next);
  return next;
}

SimulationResult simulate(const BeamDiscretization& disc, const DofVector& y0, const DofVector& y1,
                          double dt, double t_end, const SimulationOptions& opts) {
  if (!(t_end > 0.0)) throw DomainError("simulate: t_end must be positive");
  if (!(dt > 0.0 && dt < t_end)) throw DomainError("simulate: dt must lie in (0, t_end)");
  if (y0.size() != disc.n_dof() || y1.size() != disc.n_dof())
    throw DomainError("simulate: initial data size does not match the discretization");

  SimulationResult out;
  EnergyTrace& tr = out.trace;
  BeamState st{0.0, y0, y1};
  const double e0 = energy(disc, st);
  const double tol = opts.monotone_tol * e0;

  auto record = [&](double dissipation) {
    tr.times.push_back(st.t);
    tr.energy.push_back(energy(disc, st));
    tr.dissipation.push_back(dissipation);
    tr.trace_y1.push_back(disc.value_at_1(st.y));
    tr.trace_yx1.push_back(disc.slope_at_1(st.y));
    const std::size_t m = tr.energy.size();
    if (opts.check_monotone && m > 1 && tr.energy[m - 1] > tr.energy[m - 2] + tol) {
      std::ostringstream os;
      os.precision(17);
      os << "energy increased at t = " << st.t << ": " << tr.energy[m - 2] << " -> "
         << tr.energy[m - 1] << " (E0 = " << e0 << ")";
      throw SimulationError(os.str());
    }
  };
  auto maybe_snapshot = [&](long n) {
    if (opts.snapshot_stride <= 0 || n % opts.snapshot_stride != 0) return;
    if (st.t < opts.snapshot_from - 1e-12 || st.t > opts.snapshot_to + 1e-12) return;
    out.snapshots.push_back(st);
  };

  // Full steps of dt; a shorter closing step lands exactly on t_end when
  // t_end is not a multiple of dt.
  const double ratio = t_end / dt;
  long n_full = std::lround(ratio);
  if (std::abs(ratio - static_cast<double>(n_full)) > 1e-9 * ratio) n_full = static_cast<long>(std::floor(ratio));
  tr.dt = dt;
  tr.times.reserve(static_cast<std::size_t>(n_full) + 2);
  record(0.0);
  maybe_snapshot(0);

  const Stepper stepper(disc, dt, opts.conservative);
  for (long n = 1; n <= n_full; ++n) {
    const double d = stepper.advance(st);
    st.t = n == n_full && std::abs(ratio - static_cast<double>(n_full)) <= 1e-9 * ratio
               ? t_end
               : static_cast<double>(n) * dt;  // no drift from repeated addition
    record(d);
    maybe_snapshot(n);
  }
  if (t_end - st.t > 1e-12 * t_end) {
    const double d = Stepper(disc, t_end - st.t, opts.conservative).advance(st);
    st.t = t_end;
    record(d);
  }
  tr.fixed_step_end = st.t;

  if (opts.extend_to > st.t) {
    const double cap = std::max(dt, (opts.extend_to - st.t) / std::max(1, opts.tail_min_steps));
    double h = dt;
    while (st.t < opts.extend_to) {
      h = std::min(h * opts.tail_growth, cap);
      const double target = std::min(st.t + h, opts.extend_to);
      const double hh = target - st.t;
      if (!(hh > 0.0)) break;
      const double d = Stepper(disc, hh, opts.conservative).advance(st);
      st.t = target;
      record(d);
    }
  }
  return out;
}

double energy_derivative_identity_residual(const EnergyTrace& trace) {
  if (trace.size() < 2) return 0.0;
  const double e0 = trace.energy.front();
  double worst = 0.0;
  for (std::size_t n = 1; n < trace.size(); ++n) {
    const double dt = trace.times[n] - trace.times[n - 1];
    worst = std::max(worst, std::abs(trace.energy[n] - trace.energy[n - 1] + dt * trace.dissipation[n]));
  }
  return e0 > 0.0 ? worst / e0 : worst;
}

StateFunctionals state_functionals(const BeamDiscretization& disc, const BeamState& state) {
  const auto& coeff = disc.coefficient();
  const auto& xq = disc.quad_points();
  const auto& wq = disc.quad_weights();
  const FieldSamples ys = disc.sample(state.y);
  const FieldSamples vs = disc.sample(state.v);
  const std::size_t nq = xq.size();
  std::vector<double> w_inv_a(nq), w_x_inv_a(nq), w_mult(nq);
  for (std::size_t q = 0; q < nq; ++q) {
    const double a = coeff.value(xq[q]);
    w_inv_a[q] = wq[q] / a;
    w_x_inv_a[q] = wq[q] * xq[q] / a;
    w_mult[q] = w_inv_a[q] * (1.0 - coeff.log_slope(xq[q]));
  }
  const auto& k = kernels::active();
  StateFunctionals f;
  f.t = state.t;
  f.kinetic = disc.weighted_l2(state.v);
  f.kinetic_multiplier = k.wdot(w_mult, vs.value, vs.value);
  f.bending = disc.bending_energy(state.y);
  f.cross_xa = k.wdot(w_x_inv_a, vs.value, ys.d1);
  f.cross_ya = k.wdot(w_inv_a, ys.value, vs.value);
  f.y1 = disc.value_at_1(state.y);
  f.yx1 = disc.slope_at_1(state.y);
  f.v1 = disc.value_at_1(state.v);
  f.vx1 = disc.slope_at_1(state.v);
  f.yxx1 = disc.curvature_at_1(state.y);
  f.energy = 0.5 * (f.kinetic + f.bending + disc.beta() * f.y1 * f.y1 + disc.gamma() * f.yx1 * f.yx1);
  return f;
}

namespace {

// Trapezoid integral over [s, T] of a series sampled at ascending times, with
// linear interpolation at the window ends.
double integrate_window(const std::vector<double>& t, const std::vector<double>& f, double s, double T) {
  auto interp = [&](double x) {
    auto it = std::upper_bound(t.begin(), t.end(), x);
    std::size_t i = it == t.begin() ? 0 : static_cast<std::size_t>(it - t.begin()) - 1;
    i = std::min(i, t.size() - 2);
    const double th = (x - t[i]) / (t[i + 1] - t[i]);
    return f[i] + th * (f[i + 1] - f[i]);
  };
  double acc = 0.0;
  double prev_t = s, prev_f = interp(s);
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] <= s) continue;
    if (t[i] >= T) break;
    acc += 0.5 * (t[i] - prev_t) * (f[i] + prev_f);
    prev_t = t[i];
    prev_f = f[i];
  }
  acc += 0.5 * (T - prev_t) * (interp(T) + prev_f);
  return acc;
}

}  // namespace

SpaceTimeIntegrals integrate_states(const BeamDiscretization& disc,
                                    const std::vector<BeamState>& states, double s, double T) {
  if (!(s < T)) throw DomainError("integrate_states: need s < T");
  if (states.size() < 3 || states.front().t > s + 1e-12 || states.back().t < T - 1e-12)
    throw SimulationError("insufficient snapshots: stored states must cover [s, T]");
  std::size_t inside = 0;
  for (const auto& st : states)
    if (st.t >= s - 1e-12 && st.t <= T + 1e-12) ++inside;
  if (inside < 3) throw SimulationError("insufficient snapshots inside [s, T]");

  const std::size_t m = states.size();
  std::vector<double> t(m);
  std::vector<StateFunctionals> fs(m);
  for (std::size_t i = 0; i < m; ++i) {
    fs[i] = state_functionals(disc, states[i]);
    t[i] = states[i].t;
  }
  auto series = [&](auto get) {
    std::vector<double> v(m);
    for (std::size_t i = 0; i < m; ++i) v[i] = get(fs[i]);
    return integrate_window(t, v, s, T);
  };
  auto at = [&](double x) {
    // nearest stored state; windows are expected to land on snapshot times
    std::size_t best = 0;
    for (std::size_t i = 1; i < m; ++i)
      if (std::abs(t[i] - x) < std::abs(t[best] - x)) best = i;
    return fs[best];
  };

  SpaceTimeIntegrals r;
  r.s = s;
  r.T = T;
  r.kinetic = series([](const StateFunctionals& f) { return f.kinetic; });
  r.kinetic_multiplier = series([](const StateFunctionals& f) { return f.kinetic_multiplier; });
  r.bending = series([](const StateFunctionals& f) { return f.bending; });
  r.y1_sq = series([](const StateFunctionals& f) { return f.y1 * f.y1; });
  r.yx1_sq = series([](const StateFunctionals& f) { return f.yx1 * f.yx1; });
  r.v1_sq = series([](const StateFunctionals& f) { return f.v1 * f.v1; });
  r.vx1_sq = series([](const StateFunctionals& f) { return f.vx1 * f.vx1; });
  r.yxx1_sq = series([](const StateFunctionals& f) { return f.yxx1 * f.yxx1; });
  r.yx1_y1 = series([](const StateFunctionals& f) { return f.yx1 * f.y1; });
  r.yx1_v1 = series([](const StateFunctionals& f) { return f.yx1 * f.v1; });
  r.yx1_vx1 = series([](const StateFunctionals& f) { return f.yx1 * f.vx1; });
  r.y1_v1 = series([](const StateFunctionals& f) { return f.y1 * f.v1; });
  r.energy = series([](const StateFunctionals& f) { return f.energy; });
  r.at_s = at(s);
  r.at_T = at(T);
  return r;
}

namespace {

double normalized_sum(const std::vector<std::pair<std::string, double>>& terms) {
  double sum = 0.0, scale = 0.0;
  for (const auto& [name, v] : terms) {
    sum += v;
    scale = std::max(scale, std::abs(v));
  }
  return scale > 0.0 ? std::abs(sum) / scale : 0.0;
}

}  // namespace

MultiplierReport multiplier_identity_residual(const BeamDiscretization& disc,
                                              const DegeneracyCoefficient& coeff,
                                              const std::vector<BeamState>& states, double s,
                                              double T) {
  if (!(s > 0.0 && s < T)) throw DomainError("multiplier identity needs 0 < s < T");
  const SpaceTimeIntegrals I = integrate_states(disc, states, s, T);
  const double beta = disc.beta(), gamma = disc.gamma();
  const double K = coeff.K(), a1 = coeff.a_at_1();

  MultiplierReport r;
  // 0 = sum of these terms
  r.terms_31 = {
      {"bracket_xa", 2.0 * (I.at_T.cross_xa - I.at_s.cross_xa)},
      {"boundary_vt_over_a1", -I.v1_sq / a1},
      {"kinetic_multiplier", I.kinetic_multiplier},
      {"bending", 3.0 * I.bending},
      {"beta_yx_y", 2.0 * beta * I.yx1_y1},
      {"yx_yt", 2.0 * I.yx1_v1},
      {"gamma_yx_sq", 2.0 * gamma * I.yx1_sq},
      {"yx_ytx", 2.0 * I.yx1_vx1},
      {"yxx_sq", -I.yxx1_sq},
  };
  r.residual_31 = normalized_sum(r.terms_31);

  // LHS - (B.T.) = 0
  const double lhs_kin = 0.5 * K * I.kinetic + I.kinetic_multiplier;
  const double lhs_bend = (3.0 - 0.5 * K) * I.bending;
  r.terms_32 = {
      {"lhs_kinetic", lhs_kin},
      {"lhs_bending", lhs_bend},
      {"bt_bracket_ya", -0.5 * K * (I.at_T.cross_ya - I.at_s.cross_ya)},
      {"bt_bracket_xa", 2.0 * (I.at_T.cross_xa - I.at_s.cross_xa)},
      {"bt_K_beta_y_sq", -0.5 * K * beta * I.y1_sq},
      {"bt_K_y_yt", -0.5 * K * I.y1_v1},
      {"bt_gamma_yx_sq", -gamma * (0.5 * K - 2.0) * I.yx1_sq},
      {"bt_yx_ytx", -(0.5 * K - 2.0) * I.yx1_vx1},
      {"bt_vt_over_a1", -I.v1_sq / a1},
      {"bt_beta_yx_y", 2.0 * beta * I.yx1_y1},
      {"bt_yx_yt", 2.0 * I.yx1_v1},
      {"bt_yxx_sq", -I.yxx1_sq},
  };
  r.residual_32 = normalized_sum(r.terms_32);
  return r;
}

}  // namespace beamstab
