#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <string_view>
#include <utility>
#include <vector>

#include "sta/error.hpp"

namespace sta {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kHbar = 1.054571817e-34;      // J s
inline constexpr double kBoltzmann = 1.380649e-23;    // J/K
inline constexpr double kLithium6Mass = 9.98834e-27;  // kg

/// Hz at interface boundaries, rad/s everywhere inside.
constexpr double hz_to_rad(double hz) { return kTwoPi * hz; }
constexpr double rad_to_hz(double omega) { return omega / kTwoPi; }

inline constexpr int kAxes = 3;

struct AxisTriple {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  static constexpr AxisTriple uniform(double v) { return {v, v, v}; }

  constexpr double& operator[](int j) { return j == 0 ? x : (j == 1 ? y : z); }
  constexpr double operator[](int j) const { return j == 0 ? x : (j == 1 ? y : z); }

  bool all_finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }
  bool all_positive() const { return x > 0.0 && y > 0.0 && z > 0.0; }
  double product() const { return x * y * z; }
  double sum() const { return x + y + z; }

  friend bool operator==(const AxisTriple&, const AxisTriple&) = default;
};

enum class Regime { NonInteracting, Unitary, ViscousUnitary };

std::string_view to_string(Regime regime);
Regime parse_regime(std::string_view name);

/// Stroke problem statement: initial trap, nominal final scale factors, duration.
struct StrokeSpec {
  AxisTriple omega0;                               // rad/s
  AxisTriple target_b = AxisTriple::uniform(1.0);  // nominal b_j(tau)
  double tau = 0.0;                                // s

  /// omega_j(tau) = omega_j0 / b_j(tau)^2
  AxisTriple final_omega() const;

  friend bool operator==(const StrokeSpec&, const StrokeSpec&) = default;
};

/// Build a stroke from initial and final trap frequencies (rad/s).
StrokeSpec stroke_between(const AxisTriple& omega0, const AxisTriple& omega_final, double tau);

struct GasSpec {
  Regime regime = Regime::Unitary;
  double mass = kLithium6Mass;     // kg
  double initial_energy = 0.0;     // J per particle, <H(0)>
  AxisTriple initial_msq_sizes;    // m^2, <x_j^2>_0
  double alpha_s = 0.0;            // trap-averaged shear viscosity coefficient
  double virial_denominator = 0.0; // J, <r . grad U_total>_0

  friend bool operator==(const GasSpec&, const GasSpec&) = default;
};

/// Fills in the harmonic closures: 1/2 m w_j0^2 <x_j^2>_0 = E/6 and
/// <r . grad U>_0 = E.
GasSpec make_gas(Regime regime, const StrokeSpec& spec, double initial_energy,
                 double alpha_s = 0.0, double mass = kLithium6Mass);

struct ScalingState {
  AxisTriple b = AxisTriple::uniform(1.0);
  AxisTriple bdot;
  double cq = 0.0;
  double t = 0.0;

  double gamma() const { return b.product(); }
};

/// sigma_jj = 2 bdot_j/b_j - (2/3) Gamma'/Gamma, with Gamma'/Gamma = sum bdot_k/b_k.
AxisTriple stress_diagonal(const AxisTriple& b, const AxisTriple& bdot);

struct ObservableRecord {
  double t = 0.0;
  double q_star = 1.0;       // NaN where the adiabat is undefined (released trap)
  double mean_energy = 1.0;  // units of <H(0)>
  double mean_work = 0.0;    // units of <H(0)>
  AxisTriple sizes;          // m, 1/e half-width convention follows initial_msq_sizes
  AxisTriple dimensionless_sizes;
  double z_over_x = 1.0;     // sigma_bar_z / sigma_bar_x
  double r_over_z = 1.0;     // sigma_bar_r / sigma_bar_z (r = x)
};

struct Trajectory {
  StrokeSpec spec;
  GasSpec gas;
  std::vector<ScalingState> samples;
  /// Empty until annotated by the observables module; otherwise one per sample.
  std::vector<ObservableRecord> observables;

  const ScalingState& back() const { return samples.back(); }
  /// Sample whose time is closest to t.
  const ScalingState& nearest(double t) const;
};

std::vector<Violation> check_spec(const StrokeSpec& spec, const GasSpec& gas);

/// Returns the pair unchanged when every invariant holds; throws ValidationError
/// listing all violations otherwise.
std::pair<StrokeSpec, GasSpec> validate_spec(const StrokeSpec& spec, const GasSpec& gas);

}  // namespace sta
