#include "sta/dynamics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include <boost/numeric/odeint.hpp>

namespace sta {

namespace odeint = boost::numeric::odeint;

namespace {

using State = std::array<double, 7>;  // b_x, b_y, b_z, b'_x, b'_y, b'_z, C_Q

struct EquationTerms {
  AxisTriple w0_sq;
  AxisTriple damping;    // hbar alpha / (m <x_j^2>_0)
  double heating = 0.0;  // hbar alpha / <r . grad U>_0
};

EquationTerms make_terms(const StrokeSpec& spec, const GasSpec& gas, Regime regime) {
  EquationTerms terms;
  for (int j = 0; j < kAxes; ++j) terms.w0_sq[j] = spec.omega0[j] * spec.omega0[j];
  if (regime == Regime::ViscousUnitary && gas.alpha_s != 0.0) {
    for (int j = 0; j < kAxes; ++j) {
      terms.damping[j] = kHbar * gas.alpha_s / (gas.mass * gas.initial_msq_sizes[j]);
    }
    terms.heating = kHbar * gas.alpha_s / gas.virial_denominator;
  }
  return terms;
}

void accelerations(Regime regime, const EquationTerms& terms, const AxisTriple& b,
                   const AxisTriple& bdot, double cq, const AxisTriple& w2, AxisTriple& bddot,
                   double& cq_rate) {
  cq_rate = 0.0;
  switch (regime) {
    case Regime::NonInteracting:
      for (int j = 0; j < kAxes; ++j) {
        bddot[j] = terms.w0_sq[j] / (b[j] * b[j] * b[j]) - w2[j] * b[j];
      }
      return;
    case Regime::Unitary: {
      const double gamma = b.product();
      const double gamma_23 = std::cbrt(gamma * gamma);
      for (int j = 0; j < kAxes; ++j) {
        bddot[j] = terms.w0_sq[j] / (b[j] * gamma_23) - w2[j] * b[j];
      }
      return;
    }
    case Regime::ViscousUnitary: {
      const double gamma = b.product();
      const double gamma_23 = std::cbrt(gamma * gamma);
      const AxisTriple sigma = stress_diagonal(b, bdot);
      for (int j = 0; j < kAxes; ++j) {
        bddot[j] = terms.w0_sq[j] / (gamma_23 * b[j]) * (1.0 + cq) -
                   terms.damping[j] * sigma[j] / b[j] - w2[j] * b[j];
      }
      cq_rate = gamma_23 * terms.heating *
                (sigma.x * sigma.x + sigma.y * sigma.y + sigma.z * sigma.z);
      return;
    }
  }
}

struct ScalingOde {
  Regime regime;
  EquationTerms terms;
  const DriveSchedule* drive;

  void operator()(const State& x, State& dxdt, double t) const {
    const AxisTriple b{x[0], x[1], x[2]};
    const AxisTriple bdot{x[3], x[4], x[5]};
    for (int j = 0; j < kAxes; ++j) {
      if (!std::isfinite(b[j]) || !std::isfinite(bdot[j])) {
        throw Error(ErrorCode::StepSizeUnderflow,
                    "non-finite state at t = " + std::to_string(t));
      }
      if (b[j] <= kCollapseGuard) {
        throw Error(ErrorCode::ScaleFactorCollapse,
                    "b_" + std::to_string(j) + " <= 1e-6 at t = " + std::to_string(t));
      }
    }
    AxisTriple bddot;
    double cq_rate = 0.0;
    accelerations(regime, terms, b, bdot, x[6], drive->omega_sq(t), bddot, cq_rate);
    dxdt = {bdot.x, bdot.y, bdot.z, bddot.x, bddot.y, bddot.z, cq_rate};
  }
};

ScalingState to_scaling_state(const State& x, double t) {
  return ScalingState{{x[0], x[1], x[2]}, {x[3], x[4], x[5]}, x[6], t};
}

std::vector<double> output_grid(double t0, double t1, const IntegratorConfig& cfg) {
  if (cfg.output_times.empty()) return uniform_grid(t0, t1, std::max<std::size_t>(cfg.sample_count, 2));
  std::vector<double> grid{t0};
  for (double t : cfg.output_times) {
    if (t < t0 || t > t1) {
      throw Error(ErrorCode::InvalidConfig, "output time " + std::to_string(t) +
                                                " outside integration window");
    }
    if (t > grid.back()) grid.push_back(t);
    else if (t < grid.back()) {
      throw Error(ErrorCode::InvalidConfig, "output times must be increasing");
    }
  }
  if (grid.back() < t1) grid.push_back(t1);
  return grid;
}

void check_config(const IntegratorConfig& cfg) {
  if (!(cfg.rel_tol > 0.0) || !(cfg.abs_tol > 0.0)) {
    throw Error(ErrorCode::InvalidConfig, "integrator tolerances must be > 0");
  }
  if (cfg.max_step < 0.0) throw Error(ErrorCode::InvalidConfig, "max_step must be >= 0");
}

// odeint resets its own checker at every observation; this one counts the whole window
struct TotalStepBudget {
  std::size_t limit;
  std::size_t steps = 0;
  void operator()() {
    if (++steps > limit) {
      throw odeint::no_progress_error("step budget of " + std::to_string(limit) + " exhausted");
    }
  }
  void reset() {}
};

/// Integrates from `start` over [start.t, t_end] and appends samples (excluding the
/// start itself) to `samples`.
void integrate_window(Regime regime, const DriveSchedule& drive, const StrokeSpec& spec,
                      const GasSpec& gas, const ScalingState& start, double t_end,
                      const IntegratorConfig& cfg, std::vector<ScalingState>& samples) {
  check_config(cfg);
  const double t0 = start.t;
  if (!(t_end > t0)) return;
  const std::vector<double> grid = output_grid(t0, t_end, cfg);

  ScalingOde ode{regime, make_terms(spec, gas, regime), &drive};
  State x{start.b.x, start.b.y, start.b.z, start.bdot.x, start.bdot.y, start.bdot.z, start.cq};

  const double window = t_end - t0;
  const double max_step = cfg.max_step > 0.0 ? cfg.max_step : window / 16.0;
  double fastest = 0.0;
  const AxisTriple w2_start = drive.omega_sq(t0);
  for (int j = 0; j < kAxes; ++j) {
    fastest = std::max({fastest, spec.omega0[j], std::sqrt(std::abs(w2_start[j]))});
  }
  const double dt0 = std::min(max_step, 1e-3 / fastest);

  auto stepper = odeint::make_dense_output(cfg.abs_tol, cfg.rel_tol, max_step,
                                           odeint::runge_kutta_dopri5<State>());
  bool first = true;
  auto observer = [&](const State& s, double t) {
    if (first) {
      first = false;
      return;
    }
    samples.push_back(to_scaling_state(s, t));
  };
  try {
    odeint::integrate_times(stepper, ode, x, grid.begin(), grid.end(), dt0, observer,
                            TotalStepBudget{cfg.max_steps});
  } catch (const odeint::odeint_error& e) {
    throw Error(ErrorCode::StepSizeUnderflow, e.what());
  }
}

Trajectory run_stroke(Regime regime, const DriveSchedule& drive, const StrokeSpec& spec,
                      const GasSpec& gas, const IntegratorConfig& cfg) {
  validate_spec(spec, gas);
  Trajectory traj{spec, gas, {ScalingState{}}, {}};
  integrate_window(regime, drive, spec, gas, traj.samples.front(), spec.tau, cfg, traj.samples);
  return traj;
}

}  // namespace

std::vector<double> uniform_grid(double t0, double t1, std::size_t n) {
  n = std::max<std::size_t>(n, 2);
  std::vector<double> grid(n);
  for (std::size_t i = 0; i < n; ++i) {
    grid[i] = t0 + (t1 - t0) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  grid.back() = t1;
  return grid;
}

Trajectory integrate_noninteracting(const DriveSchedule& drive, const StrokeSpec& spec,
                                    const GasSpec& gas, const IntegratorConfig& cfg) {
  return run_stroke(Regime::NonInteracting, drive, spec, gas, cfg);
}

Trajectory integrate_unitary(const DriveSchedule& drive, const StrokeSpec& spec,
                             const GasSpec& gas, const IntegratorConfig& cfg) {
  return run_stroke(Regime::Unitary, drive, spec, gas, cfg);
}

Trajectory integrate_viscous(const DriveSchedule& drive, const StrokeSpec& spec,
                             const GasSpec& gas, const IntegratorConfig& cfg) {
  if (gas.regime != Regime::ViscousUnitary) {
    throw Error(ErrorCode::RegimeMismatch, "integrate_viscous requires regime viscous-unitary");
  }
  return run_stroke(Regime::ViscousUnitary, drive, spec, gas, cfg);
}

Trajectory integrate(const DriveSchedule& drive, const StrokeSpec& spec, const GasSpec& gas,
                     const IntegratorConfig& cfg) {
  return run_stroke(gas.regime, drive, spec, gas, cfg);
}

Trajectory continue_trajectory(const Trajectory& traj, const DriveSchedule& drive,
                               double duration, const IntegratorConfig& cfg) {
  if (traj.samples.empty()) throw Error(ErrorCode::InvalidConfig, "cannot continue an empty trajectory");
  if (!(duration >= 0.0)) throw Error(ErrorCode::NonPositiveDuration, "continuation duration must be >= 0");
  Trajectory out = traj;
  out.observables.clear();
  const ScalingState start = traj.back();
  integrate_window(traj.gas.regime, drive, traj.spec, traj.gas, start, start.t + duration, cfg,
                   out.samples);
  return out;
}

Trajectory tof_continuation(const Trajectory& traj, const GasSpec& gas, double duration,
                            const IntegratorConfig& cfg) {
  Trajectory with_gas = traj;
  with_gas.gas = gas;
  return continue_trajectory(with_gas, DriveSchedule::free_expansion(), duration, cfg);
}

AxisTriple scaling_acceleration(Regime regime, const ScalingState& state, const AxisTriple& omega_sq,
                                const StrokeSpec& spec, const GasSpec& gas) {
  AxisTriple bddot;
  double cq_rate = 0.0;
  accelerations(regime, make_terms(spec, gas, regime), state.b, state.bdot, state.cq, omega_sq,
                bddot, cq_rate);
  return bddot;
}

}  // namespace sta
