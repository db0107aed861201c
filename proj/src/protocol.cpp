#include "sta/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <string>

// boost 1.74 pchip.hpp calls isnan unqualified
using std::isnan;
#include <boost/math/interpolators/pchip.hpp>
#include <boost/math/quadrature/gauss.hpp>

namespace sta {

Derivs quintic_smoothstep(double s) {
  if (s <= 0.0) return {0.0, 0.0, 0.0};
  if (s >= 1.0) return {1.0, 0.0, 0.0};
  const double s2 = s * s;
  const double s3 = s2 * s;
  return {
      s3 * (10.0 - 15.0 * s + 6.0 * s2),
      30.0 * s2 * (1.0 - 2.0 * s + s2),
      60.0 * s * (1.0 - 3.0 * s + 2.0 * s2),
  };
}

// ---------------------------------------------------------------------------
// FrequencySchedule

FrequencySchedule::FrequencySchedule(StrokeSpec spec, PostStroke post)
    : spec_(spec), final_(spec.final_omega()), post_(post) {
  validate_spec(spec_, make_gas(Regime::Unitary, spec_, 1.0));
}

Derivs FrequencySchedule::axis(int j, double t) const {
  const double w0 = spec_.omega0[j];
  if (t <= 0.0) return {w0, 0.0, 0.0};
  if (t >= spec_.tau) {
    if (post_ == PostStroke::Release && t > spec_.tau) return {0.0, 0.0, 0.0};
    return {final_[j], 0.0, 0.0};
  }
  const double inv_tau = 1.0 / spec_.tau;
  const Derivs s = quintic_smoothstep(t * inv_tau);
  const double delta = final_[j] - w0;
  return {w0 + delta * s.value, delta * s.first * inv_tau, delta * s.second * inv_tau * inv_tau};
}

std::array<Derivs, kAxes> FrequencySchedule::at(double t) const {
  return {axis(0, t), axis(1, t), axis(2, t)};
}

bool FrequencySchedule::isotropic_shape(double rel_tol) const {
  const double r0 = final_[0] / spec_.omega0[0];
  for (int j = 1; j < kAxes; ++j) {
    const double rj = final_[j] / spec_.omega0[j];
    if (std::abs(rj - r0) > rel_tol * std::abs(r0)) return false;
  }
  return true;
}

FrequencySchedule smoothstep_frequency(const StrokeSpec& spec, PostStroke post) {
  return FrequencySchedule(spec, post);
}

// ---------------------------------------------------------------------------
// ScalingPath

ScalingPath::ScalingPath(Evaluator eval, double tau) : eval_(std::move(eval)), tau_(tau) {
  end_ = eval_(tau_);
  end_.bdot = {};
  end_.bddot = {};
}

PathPoint ScalingPath::at(double t) const {
  if (t <= 0.0) return PathPoint{};
  if (t >= tau_) return end_;
  return eval_(t);
}

namespace {

void require_positive(const std::array<Derivs, kAxes>& w, double t) {
  for (int j = 0; j < kAxes; ++j) {
    if (!(w[j].value > 0.0)) {
      throw Error(ErrorCode::FrequencyCrossesZero,
                  "omega_" + std::to_string(j) + "(" + std::to_string(t) + ") <= 0");
    }
  }
}

}  // namespace

ScalingPath adiabatic_reference(const FrequencySchedule& schedule) {
  // ln b_j = ln(omega_j0/omega_j) + (1/2) ln(nu/nu_0); work with logarithmic rates
  // p_j = omega_j'/omega_j and P = nu'/nu = mean(p).
  auto eval = [schedule](double t) {
    const auto w = schedule.at(t);
    require_positive(w, t);
    const AxisTriple& w0 = schedule.initial();

    double log_nu_ratio = 0.0;
    AxisTriple p, pdot;
    for (int j = 0; j < kAxes; ++j) {
      log_nu_ratio += std::log(w[j].value / w0[j]) / 3.0;
      p[j] = w[j].first / w[j].value;
      pdot[j] = w[j].second / w[j].value - p[j] * p[j];
    }
    const double big_p = p.sum() / 3.0;
    const double big_pdot = pdot.sum() / 3.0;
    const double nu_factor = std::exp(0.5 * log_nu_ratio);

    PathPoint out;
    for (int j = 0; j < kAxes; ++j) {
      const double b = (w0[j] / w[j].value) * nu_factor;
      const double r = -p[j] + 0.5 * big_p;
      const double rdot = -pdot[j] + 0.5 * big_pdot;
      out.b[j] = b;
      out.bdot[j] = b * r;
      out.bddot[j] = b * (r * r + rdot);
    }
    return out;
  };
  return ScalingPath(eval, schedule.tau());
}

ScalingPath noninteracting_adiabat(const FrequencySchedule& schedule) {
  auto eval = [schedule](double t) {
    const auto w = schedule.at(t);
    require_positive(w, t);
    PathPoint out;
    for (int j = 0; j < kAxes; ++j) {
      // b = (w0/w)^(1/2): b'/b = -p/2, b''/b = (p/2)^2 - p'/2
      const double p = w[j].first / w[j].value;
      const double pdot = w[j].second / w[j].value - p * p;
      const double b = std::sqrt(schedule.initial()[j] / w[j].value);
      out.b[j] = b;
      out.bdot[j] = -0.5 * p * b;
      out.bddot[j] = b * (0.25 * p * p - 0.5 * pdot);
    }
    return out;
  };
  return ScalingPath(eval, schedule.tau());
}

ScalingPath smoothstep_path(const StrokeSpec& spec) {
  auto eval = [spec](double t) {
    const double inv_tau = 1.0 / spec.tau;
    const Derivs s = quintic_smoothstep(t * inv_tau);
    PathPoint out;
    for (int j = 0; j < kAxes; ++j) {
      const double delta = spec.target_b[j] - 1.0;
      out.b[j] = 1.0 + delta * s.value;
      out.bdot[j] = delta * s.first * inv_tau;
      out.bddot[j] = delta * s.second * inv_tau * inv_tau;
    }
    return out;
  };
  return ScalingPath(eval, spec.tau);
}

// ---------------------------------------------------------------------------
// DriveSchedule

std::string_view to_string(DriveKind kind) {
  switch (kind) {
    case DriveKind::Reference: return "reference";
    case DriveKind::LcdNonInteracting: return "lcd-noninteracting";
    case DriveKind::LcdUnitary: return "lcd-unitary";
    case DriveKind::LcdViscous: return "lcd-viscous";
    case DriveKind::Table: return "table";
    case DriveKind::Free: return "free";
  }
  return "unknown";
}

DriveSchedule::DriveSchedule(DriveKind kind, Evaluator in_stroke, double tau, PostStroke post)
    : kind_(kind),
      eval_(std::make_shared<const Evaluator>(std::move(in_stroke))),
      tau_(tau),
      post_(post) {
  start_ = (*eval_)(0.0);
  end_ = (*eval_)(tau_);
  constexpr int kSamples = 10001;
  for (int i = 0; i < kSamples && feasible_; ++i) {
    const double t = tau_ * static_cast<double>(i) / (kSamples - 1);
    const AxisTriple w2 = (*eval_)(t);
    feasible_ = w2.x >= 0.0 && w2.y >= 0.0 && w2.z >= 0.0;
  }
}

DriveSchedule DriveSchedule::free_expansion() {
  return DriveSchedule(DriveKind::Free, [](double) { return AxisTriple{}; }, 0.0,
                       PostStroke::Release);
}

AxisTriple DriveSchedule::omega_sq(double t) const {
  if (t < 0.0) return start_;
  if (t > tau_) return post_ == PostStroke::Hold ? end_ : AxisTriple{};
  return (*eval_)(t);
}

DriveSchedule DriveSchedule::with_post(PostStroke post) const {
  DriveSchedule copy = *this;
  copy.post_ = post;
  return copy;
}

DriveSchedule reference_drive(const FrequencySchedule& schedule) {
  auto eval = [schedule](double t) {
    AxisTriple out;
    for (int j = 0; j < kAxes; ++j) {
      const double w = schedule.axis(j, t).value;
      out[j] = w * w;
    }
    return out;
  };
  return DriveSchedule(DriveKind::Reference, eval, schedule.tau(), schedule.post());
}

DriveSchedule lcd_anisotropic_unitary(const FrequencySchedule& schedule) {
  auto eval = [schedule](double t) {
    const auto w = schedule.at(t);
    require_positive(w, t);
    // product Pi = wx wy wz, nu = Pi^(1/3)
    const double pi = w[0].value * w[1].value * w[2].value;
    const double pi_dot = w[0].first * w[1].value * w[2].value +
                          w[0].value * w[1].first * w[2].value +
                          w[0].value * w[1].value * w[2].first;
    const double pi_ddot = w[0].second * w[1].value * w[2].value +
                           w[0].value * w[1].second * w[2].value +
                           w[0].value * w[1].value * w[2].second +
                           2.0 * (w[0].first * w[1].first * w[2].value +
                                  w[0].first * w[1].value * w[2].first +
                                  w[0].value * w[1].first * w[2].first);
    const double nu_rate = pi_dot / (3.0 * pi);
    const double nu_accel = pi_ddot / (3.0 * pi) - (2.0 / 9.0) * (pi_dot / pi) * (pi_dot / pi);

    AxisTriple out;
    for (int j = 0; j < kAxes; ++j) {
      const double wj = w[j].value;
      const double p = w[j].first / wj;
      out[j] = wj * wj - 2.0 * p * p + w[j].second / wj + 0.25 * nu_rate * nu_rate -
               0.5 * nu_accel + p * nu_rate;
    }
    return out;
  };
  return DriveSchedule(DriveKind::LcdUnitary, eval, schedule.tau(), schedule.post());
}

DriveSchedule lcd_isotropic_unitary(const FrequencySchedule& schedule) {
  if (!schedule.isotropic_shape()) {
    throw Error(ErrorCode::NotIsotropicShape,
                "omega_j(t)/omega_j0 differs between axes beyond 1e-12");
  }
  auto eval = [schedule](double t) {
    const auto w = schedule.at(t);
    require_positive(w, t);
    AxisTriple out;
    for (int j = 0; j < kAxes; ++j) {
      const double wj = w[j].value;
      const double p = w[j].first / wj;
      out[j] = wj * wj - 0.75 * p * p + 0.5 * w[j].second / wj;
    }
    return out;
  };
  return DriveSchedule(DriveKind::LcdUnitary, eval, schedule.tau(), schedule.post());
}

namespace {

void require_positive_path(const PathPoint& pt, double t) {
  if (!pt.b.all_positive()) {
    throw Error(ErrorCode::ScaleFactorNonPositive,
                "desired path has b_j <= 0 at t = " + std::to_string(t));
  }
}

}  // namespace

DriveSchedule lcd_noninteracting(const FrequencySchedule& schedule, const ScalingPath& desired) {
  auto eval = [w0 = schedule.initial(), desired](double t) {
    const PathPoint pt = desired.at(t);
    require_positive_path(pt, t);
    AxisTriple out;
    for (int j = 0; j < kAxes; ++j) {
      const double b = pt.b[j];
      const double b2 = b * b;
      out[j] = w0[j] * w0[j] / (b2 * b2) - pt.bddot[j] / b;
    }
    return out;
  };
  return DriveSchedule(DriveKind::LcdNonInteracting, eval, schedule.tau(), schedule.post());
}

// ---------------------------------------------------------------------------
// Viscous heating along a prescribed path

ViscousHeating::ViscousHeating(const GasSpec& gas, ScalingPath path, int panels)
    : coefficient_(kHbar * gas.alpha_s / gas.virial_denominator),
      path_(std::move(path)),
      h_(path_.tau() / panels),
      cumulative_(static_cast<std::size_t>(panels) + 1, 0.0) {
  if (coefficient_ == 0.0) return;
  auto f = [this](double s) { return rate(s); };
  for (int k = 0; k < panels; ++k) {
    cumulative_[k + 1] = cumulative_[k] +
                         boost::math::quadrature::gauss<double, 10>::integrate(f, k * h_, (k + 1) * h_);
  }
}

double ViscousHeating::rate(double t) const {
  const PathPoint pt = path_.at(t);
  const AxisTriple sigma = stress_diagonal(pt.b, pt.bdot);
  const double sum_sq = sigma.x * sigma.x + sigma.y * sigma.y + sigma.z * sigma.z;
  return coefficient_ * std::cbrt(pt.b.product() * pt.b.product()) * sum_sq;
}

double ViscousHeating::at(double t) const {
  if (coefficient_ == 0.0 || t <= 0.0) return 0.0;
  if (t >= path_.tau()) return cumulative_.back();
  const auto k = std::min(static_cast<std::size_t>(t / h_), cumulative_.size() - 2);
  const double t0 = static_cast<double>(k) * h_;
  if (t <= t0) return cumulative_[k];
  auto f = [this](double s) { return rate(s); };
  return cumulative_[k] + boost::math::quadrature::gauss<double, 10>::integrate(f, t0, t);
}

DriveSchedule lcd_viscous_unitary(const FrequencySchedule& schedule, const GasSpec& gas,
                                  const ScalingPath& desired) {
  if (gas.regime != Regime::ViscousUnitary) {
    throw Error(ErrorCode::RegimeMismatch, "lcd_viscous_unitary requires regime viscous-unitary");
  }
  auto heating = std::make_shared<const ViscousHeating>(gas, desired);
  AxisTriple damping;
  for (int j = 0; j < kAxes; ++j) {
    damping[j] = kHbar * gas.alpha_s / (gas.mass * gas.initial_msq_sizes[j]);
  }
  auto eval = [w0 = schedule.initial(), desired, heating, damping](double t) {
    const PathPoint pt = desired.at(t);
    require_positive_path(pt, t);
    const double gamma_23 = std::cbrt(pt.b.product() * pt.b.product());
    const double cq = heating->at(t);
    const AxisTriple sigma = stress_diagonal(pt.b, pt.bdot);
    AxisTriple out;
    for (int j = 0; j < kAxes; ++j) {
      const double b = pt.b[j];
      const double b2 = b * b;
      out[j] = w0[j] * w0[j] / (gamma_23 * b2) * (1.0 + cq) - damping[j] * sigma[j] / b2 -
               pt.bddot[j] / b;
    }
    return out;
  };
  return DriveSchedule(DriveKind::LcdViscous, eval, schedule.tau(), schedule.post());
}

// ---------------------------------------------------------------------------
// Tabulated drive

DriveSchedule drive_from_table(std::vector<double> times, std::array<std::vector<double>, kAxes> omega_sq,
                               PostStroke post) {
  if (times.size() < 4) {
    throw Error(ErrorCode::InvalidConfig, "drive table needs at least 4 rows");
  }
  if (times.front() != 0.0) throw Error(ErrorCode::InvalidConfig, "drive table must start at t = 0");
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1])) {
      throw Error(ErrorCode::InvalidConfig, "drive table times must be strictly increasing");
    }
  }
  for (const auto& col : omega_sq) {
    if (col.size() != times.size()) {
      throw Error(ErrorCode::InvalidConfig, "drive table columns have unequal lengths");
    }
  }
  const double tau = times.back();
  using Pchip = boost::math::interpolators::pchip<std::vector<double>>;
  std::array<std::shared_ptr<const Pchip>, kAxes> interp;
  for (int j = 0; j < kAxes; ++j) {
    interp[j] = std::make_shared<const Pchip>(std::vector<double>(times), std::move(omega_sq[j]));
  }
  auto eval = [interp, tau](double t) {
    const double tc = std::clamp(t, 0.0, tau);
    return AxisTriple{(*interp[0])(tc), (*interp[1])(tc), (*interp[2])(tc)};
  };
  return DriveSchedule(DriveKind::Table, eval, tau, post);
}

// ---------------------------------------------------------------------------

FeasibilityReport feasibility_check(const DriveSchedule& drive, int samples) {
  FeasibilityReport report;
  samples = std::max(samples, 2);
  std::array<double, kAxes> open{-1.0, -1.0, -1.0};
  double prev_t = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double t = drive.tau() * static_cast<double>(i) / (samples - 1);
    const AxisTriple w2 = drive.omega_sq(t);
    for (int j = 0; j < kAxes; ++j) {
      if (i == 0 || w2[j] < report.min_omega_sq[j]) {
        report.min_omega_sq[j] = w2[j];
        report.argmin_t[j] = t;
      }
      if (i == 0 || w2[j] > report.max_omega_sq[j]) report.max_omega_sq[j] = w2[j];
      if (w2[j] < 0.0 && open[j] < 0.0) open[j] = t;
      if (w2[j] >= 0.0 && open[j] >= 0.0) {
        report.negative_intervals[j].emplace_back(open[j], prev_t);
        open[j] = -1.0;
      }
    }
    prev_t = t;
  }
  for (int j = 0; j < kAxes; ++j) {
    if (open[j] >= 0.0) report.negative_intervals[j].emplace_back(open[j], prev_t);
    if (!report.negative_intervals[j].empty()) report.feasible = false;
  }
  return report;
}

}  // namespace sta
