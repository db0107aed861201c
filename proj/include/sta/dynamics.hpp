#pragma once

#include <cstddef>
#include <vector>

#include "sta/core.hpp"
#include "sta/protocol.hpp"

namespace sta {

struct IntegratorConfig {
  double rel_tol = 1e-9;
  double abs_tol = 1e-12;
  double max_step = 0.0;             // s; 0 means window / 16
  std::vector<double> output_times;  // absolute times; empty means uniform grid
  std::size_t sample_count = 201;    // used when output_times is empty
  std::size_t max_steps = 20'000'000;  // accepted steps per integration window
};

/// Guard on every scale factor; integration aborts with ScaleFactorCollapse below it.
inline constexpr double kCollapseGuard = 1e-6;

/// b_j'' + Omega_j^2 b_j = omega_j0^2 / b_j^3, axes independent.
Trajectory integrate_noninteracting(const DriveSchedule& drive, const StrokeSpec& spec,
                                    const GasSpec& gas, const IntegratorConfig& cfg = {});

/// b_j'' + Omega_j^2 b_j = omega_j0^2 / (b_j Gamma^(2/3)), Gamma = b_x b_y b_z.
Trajectory integrate_unitary(const DriveSchedule& drive, const StrokeSpec& spec,
                             const GasSpec& gas, const IntegratorConfig& cfg = {});

/// Unitary equations with viscous stress and heating, state (b, b', C_Q).
Trajectory integrate_viscous(const DriveSchedule& drive, const StrokeSpec& spec,
                             const GasSpec& gas, const IntegratorConfig& cfg = {});

/// Dispatches on gas.regime.
Trajectory integrate(const DriveSchedule& drive, const StrokeSpec& spec, const GasSpec& gas,
                     const IntegratorConfig& cfg = {});

/// Continues `traj` from its last sample for `duration` under `drive` (absolute time),
/// using the equations of gas.regime. New samples are appended after the last one.
Trajectory continue_trajectory(const Trajectory& traj, const DriveSchedule& drive,
                               double duration, const IntegratorConfig& cfg = {});

/// Free expansion (omega_j = 0) for `duration` after the end of `traj`.
Trajectory tof_continuation(const Trajectory& traj, const GasSpec& gas, double duration,
                            const IntegratorConfig& cfg = {});

/// Acceleration b_j'' of the regime's equations at a state (exposed for tests and
/// observables bookkeeping).
AxisTriple scaling_acceleration(Regime regime, const ScalingState& state, const AxisTriple& omega_sq,
                                const StrokeSpec& spec, const GasSpec& gas);

/// Uniform grid of n points on [t0, t1] (n >= 2).
std::vector<double> uniform_grid(double t0, double t1, std::size_t n);

}  // namespace sta
