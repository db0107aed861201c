#include "sta/core.hpp"

#include <algorithm>
#include <string>

namespace sta {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonPositiveFrequency: return "NonPositiveFrequency";
    case ErrorCode::NonPositiveDuration: return "NonPositiveDuration";
    case ErrorCode::NonPositiveTarget: return "NonPositiveTarget";
    case ErrorCode::ViscosityInWrongRegime: return "ViscosityInWrongRegime";
    case ErrorCode::NegativeViscosity: return "NegativeViscosity";
    case ErrorCode::NonPositiveMass: return "NonPositiveMass";
    case ErrorCode::NonPositiveEnergy: return "NonPositiveEnergy";
    case ErrorCode::NonPositiveSize: return "NonPositiveSize";
    case ErrorCode::NonPositiveVirial: return "NonPositiveVirial";
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::RegimeMismatch: return "RegimeMismatch";
    case ErrorCode::FrequencyCrossesZero: return "FrequencyCrossesZero";
    case ErrorCode::NotIsotropicShape: return "NotIsotropicShape";
    case ErrorCode::NotIsotropic: return "NotIsotropic";
    case ErrorCode::ScaleFactorNonPositive: return "ScaleFactorNonPositive";
    case ErrorCode::ScaleFactorCollapse: return "ScaleFactorCollapse";
    case ErrorCode::StepSizeUnderflow: return "StepSizeUnderflow";
    case ErrorCode::GridTooNarrow: return "GridTooNarrow";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::DegenerateProfile: return "DegenerateProfile";
    case ErrorCode::FitDiverged: return "FitDiverged";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

ErrorKind kind_of(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonPositiveFrequency:
    case ErrorCode::NonPositiveDuration:
    case ErrorCode::NonPositiveTarget:
    case ErrorCode::ViscosityInWrongRegime:
    case ErrorCode::NegativeViscosity:
    case ErrorCode::NonPositiveMass:
    case ErrorCode::NonPositiveEnergy:
    case ErrorCode::NonPositiveSize:
    case ErrorCode::NonPositiveVirial:
    case ErrorCode::NonFiniteValue:
    case ErrorCode::InvalidConfig:
    case ErrorCode::RegimeMismatch:
    case ErrorCode::NotIsotropicShape:
    case ErrorCode::NotIsotropic:
    case ErrorCode::GridTooNarrow:
    case ErrorCode::TooFewSamples:
    case ErrorCode::IoError:
      return ErrorKind::Validation;
    default:
      return ErrorKind::Numerical;
  }
}

namespace {

std::string join_messages(const std::vector<Violation>& violations) {
  std::string out;
  for (const auto& v : violations) {
    if (!out.empty()) out += "; ";
    out += v.message;
  }
  return out;
}

}  // namespace

ValidationError::ValidationError(std::vector<Violation> violations)
    : Error(violations.empty() ? ErrorCode::InvalidConfig : violations.front().code,
            join_messages(violations)),
      violations_(std::move(violations)) {}

bool ValidationError::has(ErrorCode code) const noexcept {
  return std::any_of(violations_.begin(), violations_.end(),
                     [code](const Violation& v) { return v.code == code; });
}

std::string_view to_string(Regime regime) {
  switch (regime) {
    case Regime::NonInteracting: return "noninteracting";
    case Regime::Unitary: return "unitary";
    case Regime::ViscousUnitary: return "viscous-unitary";
  }
  return "unknown";
}

Regime parse_regime(std::string_view name) {
  if (name == "noninteracting") return Regime::NonInteracting;
  if (name == "unitary") return Regime::Unitary;
  if (name == "viscous-unitary" || name == "viscous") return Regime::ViscousUnitary;
  throw Error(ErrorCode::InvalidConfig, "unknown regime '" + std::string(name) + "'");
}

AxisTriple StrokeSpec::final_omega() const {
  AxisTriple out;
  for (int j = 0; j < kAxes; ++j) out[j] = omega0[j] / (target_b[j] * target_b[j]);
  return out;
}

StrokeSpec stroke_between(const AxisTriple& omega0, const AxisTriple& omega_final, double tau) {
  StrokeSpec spec{omega0, {}, tau};
  for (int j = 0; j < kAxes; ++j) spec.target_b[j] = std::sqrt(omega0[j] / omega_final[j]);
  return spec;
}

GasSpec make_gas(Regime regime, const StrokeSpec& spec, double initial_energy, double alpha_s,
                 double mass) {
  GasSpec gas;
  gas.regime = regime;
  gas.mass = mass;
  gas.initial_energy = initial_energy;
  gas.alpha_s = alpha_s;
  gas.virial_denominator = initial_energy;
  for (int j = 0; j < kAxes; ++j) {
    const double w = spec.omega0[j];
    gas.initial_msq_sizes[j] = initial_energy / (3.0 * mass * w * w);
  }
  return gas;
}

AxisTriple stress_diagonal(const AxisTriple& b, const AxisTriple& bdot) {
  const AxisTriple rate{bdot.x / b.x, bdot.y / b.y, bdot.z / b.z};
  const double volume_rate = rate.sum();
  AxisTriple sigma;
  for (int j = 0; j < kAxes; ++j) sigma[j] = 2.0 * rate[j] - (2.0 / 3.0) * volume_rate;
  return sigma;
}

const ScalingState& Trajectory::nearest(double t) const {
  if (samples.empty()) throw Error(ErrorCode::InvalidConfig, "empty trajectory");
  auto it = std::lower_bound(samples.begin(), samples.end(), t,
                             [](const ScalingState& s, double v) { return s.t < v; });
  if (it == samples.end()) return samples.back();
  if (it != samples.begin() && std::abs(std::prev(it)->t - t) < std::abs(it->t - t)) {
    return *std::prev(it);
  }
  return *it;
}

std::vector<Violation> check_spec(const StrokeSpec& spec, const GasSpec& gas) {
  std::vector<Violation> out;
  auto add = [&out](ErrorCode code, std::string msg) { out.push_back({code, std::move(msg)}); };

  if (!spec.omega0.all_finite() || !spec.target_b.all_finite() || !std::isfinite(spec.tau)) {
    add(ErrorCode::NonFiniteValue, "stroke contains non-finite values");
  }
  if (!spec.omega0.all_positive()) add(ErrorCode::NonPositiveFrequency, "omega0 must be > 0");
  if (!spec.target_b.all_positive()) add(ErrorCode::NonPositiveTarget, "target_b must be > 0");
  if (!(spec.tau > 0.0)) add(ErrorCode::NonPositiveDuration, "tau must be > 0");
  if (spec.omega0.all_positive() && spec.target_b.all_positive()) {
    const AxisTriple wf = spec.final_omega();
    if (!wf.all_positive() || !wf.all_finite()) {
      add(ErrorCode::NonPositiveFrequency, "final frequency omega0/b^2 must be > 0");
    }
  }

  if (!(gas.mass > 0.0)) add(ErrorCode::NonPositiveMass, "mass must be > 0");
  if (!(gas.initial_energy > 0.0)) add(ErrorCode::NonPositiveEnergy, "initial_energy must be > 0");
  if (!gas.initial_msq_sizes.all_positive() || !gas.initial_msq_sizes.all_finite()) {
    add(ErrorCode::NonPositiveSize, "initial_msq_sizes must be > 0");
  }
  if (!(gas.virial_denominator > 0.0)) {
    add(ErrorCode::NonPositiveVirial, "virial_denominator must be > 0");
  }
  if (!std::isfinite(gas.alpha_s)) {
    add(ErrorCode::NonFiniteValue, "alpha_s must be finite");
  } else if (gas.alpha_s < 0.0) {
    add(ErrorCode::NegativeViscosity, "alpha_s must be >= 0");
  } else if (gas.alpha_s != 0.0 && gas.regime != Regime::ViscousUnitary) {
    add(ErrorCode::ViscosityInWrongRegime,
        "alpha_s != 0 requires regime viscous-unitary, got " + std::string(to_string(gas.regime)));
  }
  return out;
}

std::pair<StrokeSpec, GasSpec> validate_spec(const StrokeSpec& spec, const GasSpec& gas) {
  auto violations = check_spec(spec, gas);
  if (!violations.empty()) throw ValidationError(std::move(violations));
  return {spec, gas};
}

}  // namespace sta
