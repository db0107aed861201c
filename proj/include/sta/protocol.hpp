#pragma once

#include <array>
#include <functional>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "sta/core.hpp"

namespace sta {

/// What a schedule or drive does after the stroke ends at t = tau.
enum class PostStroke {
  Hold,     // keep the value reached at tau
  Release,  // trap switched off: omega = 0
};

/// Value with its first and second time derivatives.
struct Derivs {
  double value = 0.0;
  double first = 0.0;
  double second = 0.0;
};

/// Quintic smoothstep 10 s^3 - 15 s^4 + 6 s^5 and its s-derivatives, s clamped to [0, 1].
Derivs quintic_smoothstep(double s);

/// Reference trap-frequency schedule omega_j(t). The quintic makes value, first and
/// second derivative match the stationary endpoints exactly.
class FrequencySchedule {
 public:
  explicit FrequencySchedule(StrokeSpec spec, PostStroke post = PostStroke::Hold);

  /// omega_j(t) with analytic derivatives (rad/s, rad/s^2, rad/s^3).
  Derivs axis(int j, double t) const;
  std::array<Derivs, kAxes> at(double t) const;

  const StrokeSpec& spec() const { return spec_; }
  double tau() const { return spec_.tau; }
  PostStroke post() const { return post_; }
  const AxisTriple& initial() const { return spec_.omega0; }
  const AxisTriple& final_omega() const { return final_; }

  /// True when omega_j(t)/omega_j0 is the same function on every axis.
  bool isotropic_shape(double rel_tol = 1e-12) const;

 private:
  StrokeSpec spec_;
  AxisTriple final_;
  PostStroke post_;
};

FrequencySchedule smoothstep_frequency(const StrokeSpec& spec, PostStroke post = PostStroke::Hold);

struct PathPoint {
  AxisTriple b = AxisTriple::uniform(1.0);
  AxisTriple bdot;
  AxisTriple bddot;
};

/// A prescribed scaling-factor path b_j(t) on [0, tau], held constant afterwards.
class ScalingPath {
 public:
  using Evaluator = std::function<PathPoint(double)>;

  ScalingPath(Evaluator eval, double tau);

  PathPoint at(double t) const;
  double tau() const { return tau_; }

 private:
  Evaluator eval_;
  double tau_;
  PathPoint end_;
};

/// Unitary adiabat b_j = (omega_j0/omega_j) (nu/nu_0)^(1/2), nu the geometric mean
/// frequency. Derivatives are analytic. Throws FrequencyCrossesZero.
ScalingPath adiabatic_reference(const FrequencySchedule& schedule);

/// Uncoupled adiabat b_j = (omega_j0/omega_j)^(1/2).
ScalingPath noninteracting_adiabat(const FrequencySchedule& schedule);

/// b_j(t) = 1 + (target_b_j - 1) * smoothstep(t/tau).
ScalingPath smoothstep_path(const StrokeSpec& spec);

enum class DriveKind { Reference, LcdNonInteracting, LcdUnitary, LcdViscous, Table, Free };

std::string_view to_string(DriveKind kind);

/// Squared driving frequencies Omega_j^2(t) (rad^2/s^2). Negative values are
/// representable (expulsive potential); feasibility is reported, never enforced.
class DriveSchedule {
 public:
  using Evaluator = std::function<AxisTriple(double)>;

  DriveSchedule(DriveKind kind, Evaluator in_stroke, double tau, PostStroke post);

  /// Trap switched off for all t.
  static DriveSchedule free_expansion();

  AxisTriple omega_sq(double t) const;

  DriveKind kind() const { return kind_; }
  double tau() const { return tau_; }
  PostStroke post() const { return post_; }
  bool feasible() const { return feasible_; }

  DriveSchedule with_post(PostStroke post) const;

 private:
  DriveKind kind_;
  std::shared_ptr<const Evaluator> eval_;
  double tau_;
  PostStroke post_;
  AxisTriple start_;
  AxisTriple end_;
  bool feasible_ = true;
};

/// Omega_j^2 = omega_j^2: the reference schedule applied directly, no correction.
DriveSchedule reference_drive(const FrequencySchedule& schedule);

/// Unitary LCD in explicit geometric-mean form.
DriveSchedule lcd_anisotropic_unitary(const FrequencySchedule& schedule);

/// Unitary LCD for schedules with a common shape on all axes. Throws NotIsotropicShape.
DriveSchedule lcd_isotropic_unitary(const FrequencySchedule& schedule);

/// Omega_j^2 = omega_j0^2 / b_j^4 - bddot_j / b_j, per axis.
DriveSchedule lcd_noninteracting(const FrequencySchedule& schedule, const ScalingPath& desired);

/// Drive that makes `desired` an exact solution of the viscous scaling equations.
/// C_Q is accumulated along the path by Gauss-Legendre quadrature.
DriveSchedule lcd_viscous_unitary(const FrequencySchedule& schedule, const GasSpec& gas,
                                  const ScalingPath& desired);

/// Monotone cubic (PCHIP) interpolation of tabulated Omega_j^2. `times` must start at
/// 0, end at tau and be strictly increasing.
DriveSchedule drive_from_table(std::vector<double> times, std::array<std::vector<double>, kAxes> omega_sq,
                               PostStroke post = PostStroke::Hold);

/// C_Q accumulated along a prescribed path (used by lcd_viscous_unitary, exposed for tests).
class ViscousHeating {
 public:
  ViscousHeating(const GasSpec& gas, ScalingPath path, int panels = 512);

  double rate(double t) const;
  double at(double t) const;

 private:
  double coefficient_;
  ScalingPath path_;
  double h_;
  std::vector<double> cumulative_;
};

struct FeasibilityReport {
  AxisTriple min_omega_sq;
  AxisTriple max_omega_sq;
  AxisTriple argmin_t;
  std::array<std::vector<std::pair<double, double>>, kAxes> negative_intervals;
  bool feasible = true;
};

/// Samples Omega_j^2 on a uniform grid over [0, tau] and reports every interval where
/// it is negative.
FeasibilityReport feasibility_check(const DriveSchedule& drive, int samples = 10001);

}  // namespace sta
