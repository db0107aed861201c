#include "sta/observables.hpp"

#include <cmath>
#include <limits>

namespace sta {

namespace {

constexpr double kIsotropyTol = 1e-9;

bool nearly_equal(double a, double b) { return std::abs(a - b) <= kIsotropyTol * std::abs(a); }

}  // namespace

double q_star_noninteracting(double b, double bdot, double omega_sq, double omega0, double b_ad) {
  const double w0_sq = omega0 * omega0;
  return b_ad * b_ad * (0.5 / (b * b) + 0.5 * omega_sq * b * b / w0_sq + 0.5 * bdot * bdot / w0_sq);
}

double q_star_noninteracting(const ScalingState& state, double omega, const StrokeSpec& spec) {
  const auto& b = state.b;
  const auto& w0 = spec.omega0;
  if (!nearly_equal(b.x, b.y) || !nearly_equal(b.x, b.z) || !nearly_equal(w0.x, w0.y) ||
      !nearly_equal(w0.x, w0.z)) {
    throw Error(ErrorCode::NotIsotropic, "single-b nonadiabatic factor needs an isotropic stroke");
  }
  if (!(omega > 0.0)) throw Error(ErrorCode::FrequencyCrossesZero, "omega(t) must be > 0");
  const double b_ad = std::sqrt(w0.x / omega);
  return q_star_noninteracting(b.x, state.bdot.x, omega * omega, w0.x, b_ad);
}

double q_star_noninteracting_total(const ScalingState& state, const AxisTriple& omega_sq,
                                   const AxisTriple& omega_ref, const StrokeSpec& spec) {
  double energy = 0.0;
  double adiabatic = 0.0;
  for (int j = 0; j < kAxes; ++j) {
    if (!(omega_ref[j] > 0.0)) {
      throw Error(ErrorCode::FrequencyCrossesZero, "reference frequency must be > 0");
    }
    const double b_ad_sq = spec.omega0[j] / omega_ref[j];
    energy += q_star_noninteracting(state.b[j], state.bdot[j], omega_sq[j], spec.omega0[j],
                                    std::sqrt(b_ad_sq)) / b_ad_sq;
    adiabatic += 1.0 / b_ad_sq;
  }
  return energy / adiabatic;
}

double unitary_energy(const ScalingState& state, const AxisTriple& omega_sq, const StrokeSpec& spec) {
  const double gamma = state.gamma();
  double sum = 0.0;
  for (int j = 0; j < kAxes; ++j) {
    const double b = state.b[j];
    const double v = state.bdot[j];
    sum += (v * v + omega_sq[j] * b * b) / (spec.omega0[j] * spec.omega0[j]);
  }
  return (1.0 + state.cq) / (2.0 * std::cbrt(gamma * gamma)) + sum / 6.0;
}

double adiabatic_volume_factor(const AxisTriple& omega_ref, const StrokeSpec& spec) {
  double ratio = 1.0;
  for (int j = 0; j < kAxes; ++j) {
    if (!(omega_ref[j] > 0.0)) {
      throw Error(ErrorCode::FrequencyCrossesZero, "reference frequency must be > 0");
    }
    ratio *= spec.omega0[j] / omega_ref[j];
  }
  return std::cbrt(ratio);
}

double q_star_unitary(const ScalingState& state, const AxisTriple& omega_sq, const StrokeSpec& spec,
                      double gamma_ad_23) {
  return gamma_ad_23 * unitary_energy(state, omega_sq, spec);
}

double q_star_unitary(const ScalingState& state, const AxisTriple& omega_sq,
                      const FrequencySchedule& schedule) {
  const auto w = schedule.at(state.t);
  const AxisTriple ref{w[0].value, w[1].value, w[2].value};
  return q_star_unitary(state, omega_sq, schedule.spec(), adiabatic_volume_factor(ref, schedule.spec()));
}

double isotropic_q_star_drive_form(const std::array<Derivs, kAxes>& omega) {
  double sum = 0.0;
  for (const auto& w : omega) {
    const double w2 = w.value * w.value;
    sum += w.second / (w2 * w.value) - w.first * w.first / (w2 * w2);
  }
  return 1.0 + sum / 12.0;
}

double isotropic_q_star_drive_form(const FrequencySchedule& schedule, double t) {
  return isotropic_q_star_drive_form(schedule.at(t));
}

EnergyWork mean_energy_and_work(double q_star, double adiabatic_factor) {
  const double energy = q_star / adiabatic_factor;
  return {energy, energy - 1.0};
}

std::vector<SizeRecord> cloud_sizes(const Trajectory& traj) {
  AxisTriple sigma0;
  for (int j = 0; j < kAxes; ++j) sigma0[j] = std::sqrt(traj.gas.initial_msq_sizes[j]);
  std::vector<SizeRecord> out;
  out.reserve(traj.samples.size());
  for (const auto& s : traj.samples) {
    SizeRecord rec;
    rec.t = s.t;
    rec.dimensionless = s.b;
    for (int j = 0; j < kAxes; ++j) rec.sizes[j] = s.b[j] * sigma0[j];
    rec.z_over_x = s.b.z / s.b.x;
    rec.r_over_z = s.b.x / s.b.z;
    out.push_back(rec);
  }
  return out;
}

void annotate(Trajectory& traj, const FrequencySchedule& schedule, const DriveSchedule& drive) {
  const auto sizes = cloud_sizes(traj);
  const StrokeSpec& spec = traj.spec;
  traj.observables.clear();
  traj.observables.reserve(traj.samples.size());
  constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

  for (std::size_t i = 0; i < traj.samples.size(); ++i) {
    const ScalingState& s = traj.samples[i];
    const AxisTriple w2 = drive.omega_sq(s.t);
    const auto w = schedule.at(s.t);
    const AxisTriple ref{w[0].value, w[1].value, w[2].value};
    const bool adiabat_defined = ref.all_positive();

    ObservableRecord rec;
    rec.t = s.t;
    if (traj.gas.regime == Regime::NonInteracting) {
      double energy = 0.0;
      for (int j = 0; j < kAxes; ++j) {
        energy += q_star_noninteracting(s.b[j], s.bdot[j], w2[j], spec.omega0[j], 1.0) / 3.0;
      }
      rec.mean_energy = energy;
      rec.q_star = adiabat_defined ? q_star_noninteracting_total(s, w2, ref, spec) : kNaN;
    } else {
      rec.mean_energy = unitary_energy(s, w2, spec);
      rec.q_star = adiabat_defined ? rec.mean_energy * adiabatic_volume_factor(ref, spec) : kNaN;
    }
    rec.mean_work = rec.mean_energy - 1.0;
    rec.sizes = sizes[i].sizes;
    rec.dimensionless_sizes = sizes[i].dimensionless;
    rec.z_over_x = sizes[i].z_over_x;
    rec.r_over_z = sizes[i].r_over_z;
    traj.observables.push_back(rec);
  }
}

}  // namespace sta
