#pragma once

#include <array>
#include <vector>

#include "sta/core.hpp"
#include "sta/protocol.hpp"

namespace sta {

/// Isotropic noninteracting gas (single b, single omega0):
/// Q* = b_ad^2 [1/(2 b^2) + w^2 b^2/(2 w0^2) + b'^2/(2 w0^2)], b_ad = (w0/w)^(1/2).
/// Throws NotIsotropic when the state or the trap is not isotropic.
double q_star_noninteracting(const ScalingState& state, double omega, const StrokeSpec& spec);

/// Same formula with the applied Omega^2 and the reference adiabat b_ad given separately.
double q_star_noninteracting(double b, double bdot, double omega_sq, double omega0, double b_ad);

/// Anisotropic noninteracting gas: per-axis energies summed, each axis carrying 1/3 of
/// <H(0)>. Returns <H>/<H_ad>.
double q_star_noninteracting_total(const ScalingState& state, const AxisTriple& omega_sq,
                                   const AxisTriple& omega_ref, const StrokeSpec& spec);

/// Mean energy of the unitary (or viscous, through C_Q) gas in units of <H(0)>:
/// (1 + C_Q)/(2 Gamma^(2/3)) + (1/6) sum (b'_j^2 + Omega_j^2 b_j^2)/omega_j0^2.
double unitary_energy(const ScalingState& state, const AxisTriple& omega_sq, const StrokeSpec& spec);

/// Gamma_ad^(2/3) = nu_0 / nu(t) for reference frequencies omega_ref.
double adiabatic_volume_factor(const AxisTriple& omega_ref, const StrokeSpec& spec);

/// Q* = Gamma_ad^(2/3) [1/(2 Gamma^(2/3)) + (1/6) sum (b'^2 + Omega^2 b^2)/omega_0^2].
double q_star_unitary(const ScalingState& state, const AxisTriple& omega_sq, const StrokeSpec& spec,
                      double gamma_ad_23);

/// Uses the adiabatic reference of `schedule` at state.t for Gamma_ad.
/// Throws FrequencyCrossesZero.
double q_star_unitary(const ScalingState& state, const AxisTriple& omega_sq,
                      const FrequencySchedule& schedule);

/// Closed form along an exact isotropic LCD stroke:
/// Q* = 1 + (1/12) sum (omega_j''/omega_j^3 - omega_j'^2/omega_j^4).
double isotropic_q_star_drive_form(const std::array<Derivs, kAxes>& omega);
double isotropic_q_star_drive_form(const FrequencySchedule& schedule, double t);

struct EnergyWork {
  double energy = 1.0;  // <H(t)>/<H(0)>
  double work = 0.0;    // <W(t)>/<H(0)>
};

/// <H> = Q* <H_ad>, <W> = <H> - <H(0)>. `adiabatic_factor` is b_ad^2 (noninteracting)
/// or Gamma_ad^(2/3) (unitary), so that <H_ad>/<H(0)> = 1/adiabatic_factor.
EnergyWork mean_energy_and_work(double q_star, double adiabatic_factor);

struct SizeRecord {
  double t = 0.0;
  AxisTriple sizes;
  AxisTriple dimensionless;
  double z_over_x = 1.0;
  double r_over_z = 1.0;
};

/// sigma_j(t) = b_j(t) sigma_j(0) with sigma_j(0) = <x_j^2>_0^(1/2).
std::vector<SizeRecord> cloud_sizes(const Trajectory& traj);

/// Fills traj.observables. `schedule` supplies the adiabat (reference frequencies),
/// `drive` the applied Omega^2(t) including its post-stroke behaviour.
void annotate(Trajectory& traj, const FrequencySchedule& schedule, const DriveSchedule& drive);

}  // namespace sta
