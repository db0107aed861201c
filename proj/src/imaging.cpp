#include "sta/imaging.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include <Eigen/Dense>

#include "number_format.hpp"

namespace sta {

namespace {

constexpr int kMaxIterations = 200;
constexpr double kStepTolerance = 1e-8;
constexpr double kInitialDamping = 1e-3;
constexpr double kMaxDamping = 1e16;

struct LinearizedModel {
  Eigen::Matrix3d normal;
  Eigen::Vector3d gradient;
  double cost = 0.0;
};

double cost_of(const Profile& profile, const GaussianParams& p) {
  double cost = 0.0;
  for (std::size_t i = 0; i < profile.positions.size(); ++i) {
    const double r = profile.values[i] - gaussian_model(p, profile.positions[i]);
    cost += r * r;
  }
  return cost;
}

LinearizedModel linearize(const Profile& profile, const GaussianParams& p) {
  LinearizedModel lin;
  lin.normal.setZero();
  lin.gradient.setZero();
  const double inv_sigma_sq = 1.0 / (p.sigma * p.sigma);
  for (std::size_t i = 0; i < profile.positions.size(); ++i) {
    const double x = profile.positions[i];
    const double e = std::exp(-x * x * inv_sigma_sq);
    const double r = profile.values[i] - (p.a0 + p.a1 * e);
    const Eigen::Vector3d jac(1.0, e, 2.0 * p.a1 * e * x * x * inv_sigma_sq / p.sigma);
    lin.normal.noalias() += jac * jac.transpose();
    lin.gradient.noalias() += jac * r;
    lin.cost += r * r;
  }
  return lin;
}

bool step_is_small(const Eigen::Vector3d& step, const GaussianParams& p) {
  const double amplitude_scale = std::abs(p.a0) + std::abs(p.a1);
  return std::abs(step[0]) <= kStepTolerance * amplitude_scale &&
         std::abs(step[1]) <= kStepTolerance * std::abs(p.a1) &&
         std::abs(step[2]) <= kStepTolerance * p.sigma;
}

void check_profile(const Profile& profile) {
  if (profile.positions.size() != profile.values.size()) {
    throw Error(ErrorCode::InvalidConfig, "profile columns have unequal lengths");
  }
  for (std::size_t i = 1; i < profile.positions.size(); ++i) {
    if (!(profile.positions[i] > profile.positions[i - 1])) {
      throw Error(ErrorCode::InvalidConfig, "profile positions must be strictly increasing");
    }
  }
}

}  // namespace

double gaussian_model(const GaussianParams& p, double x) {
  return p.a0 + p.a1 * std::exp(-x * x / (p.sigma * p.sigma));
}

Profile synthesize_profile(const GaussianParams& truth, const ProfileGrid& grid, const NoiseSpec& noise) {
  if (!(truth.sigma > 0.0)) throw Error(ErrorCode::InvalidConfig, "sigma must be > 0");
  if (grid.points < 2) throw Error(ErrorCode::TooFewSamples, "grid needs at least 2 points");
  if (!(grid.half_width >= 4.0 * truth.sigma)) {
    throw Error(ErrorCode::GridTooNarrow, "grid must span at least +-4 sigma");
  }
  Profile profile;
  profile.positions.resize(grid.points);
  profile.values.resize(grid.points);
  for (std::size_t i = 0; i < grid.points; ++i) {
    const double x = -grid.half_width +
                     2.0 * grid.half_width * static_cast<double>(i) / static_cast<double>(grid.points - 1);
    profile.positions[i] = x;
    profile.values[i] = gaussian_model(truth, x);
  }
  if (noise.snr > 0.0) {
    std::mt19937_64 rng(noise.seed);
    std::normal_distribution<double> dist(0.0, std::abs(truth.a1) / noise.snr);
    for (double& v : profile.values) v += dist(rng);
  }
  return profile;
}

GaussianParams initial_guess(const Profile& profile) {
  const auto [lo, hi] = std::minmax_element(profile.values.begin(), profile.values.end());
  const double offset = *lo;
  const double amplitude = *hi - *lo;
  if (!(amplitude > 0.0)) throw Error(ErrorCode::DegenerateProfile, "profile has zero variance");

  // trapezoid-weighted second moment of the background-subtracted signal
  double mass = 0.0;
  double second = 0.0;
  const auto n = profile.positions.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double left = i > 0 ? profile.positions[i] - profile.positions[i - 1] : 0.0;
    const double right = i + 1 < n ? profile.positions[i + 1] - profile.positions[i] : 0.0;
    const double w = 0.5 * (left + right) * (profile.values[i] - offset);
    const double x = profile.positions[i];
    mass += w;
    second += w * x * x;
  }
  if (!(mass > 0.0) || !(second > 0.0)) {
    throw Error(ErrorCode::DegenerateProfile, "background-subtracted signal has no spread");
  }
  return {offset, amplitude, std::sqrt(2.0 * second / mass)};
}

GaussianFit gaussian_fit(const Profile& profile, const std::optional<GaussianParams>& guess) {
  check_profile(profile);
  if (profile.positions.size() < 8) throw Error(ErrorCode::TooFewSamples, "fit needs >= 8 samples");
  GaussianParams p = guess ? *guess : initial_guess(profile);
  if (!(p.sigma > 0.0)) throw Error(ErrorCode::InvalidConfig, "initial sigma must be > 0");

  double lambda = kInitialDamping;
  LinearizedModel lin = linearize(profile, p);
  GaussianFit fit;

  int iter = 0;
  for (; iter < kMaxIterations; ++iter) {
    if (lin.cost == 0.0) {
      fit.converged = true;
      break;
    }
    Eigen::Matrix3d damped = lin.normal;
    damped.diagonal() += lambda * lin.normal.diagonal();
    const Eigen::Vector3d step = damped.ldlt().solve(lin.gradient);
    const GaussianParams trial{p.a0 + step[0], p.a1 + step[1], p.sigma + step[2]};
    const double trial_cost =
        trial.sigma > 0.0 && step.allFinite() ? cost_of(profile, trial)
                                              : std::numeric_limits<double>::infinity();
    if (trial_cost < lin.cost) {
      const bool small = step_is_small(step, trial);
      p = trial;
      lin = linearize(profile, p);
      lambda = std::max(lambda / 10.0, 1e-12);
      if (small) {
        fit.converged = true;
        ++iter;
        break;
      }
    } else {
      lambda *= 10.0;
      if (lambda > kMaxDamping) {
        // no descent direction left at working precision
        fit.converged = step_is_small(step, p) || lin.gradient.norm() <= 1e-12 * std::sqrt(lin.cost);
        ++iter;
        break;
      }
    }
  }

  if (!std::isfinite(p.a0) || !std::isfinite(p.a1) || !std::isfinite(p.sigma) || !(p.sigma > 0.0)) {
    throw Error(ErrorCode::FitDiverged, "fit parameters left the finite domain");
  }
  fit.a0 = p.a0;
  fit.a1 = p.a1;
  fit.sigma = p.sigma;
  fit.residual_norm = std::sqrt(lin.cost);
  fit.iterations = iter;
  return fit;
}

double infer_in_trap_size(const GaussianFit& observed, double expansion_factor) {
  if (!(expansion_factor > 0.0)) {
    throw Error(ErrorCode::ScaleFactorNonPositive, "expansion factor must be > 0");
  }
  return observed.sigma / expansion_factor;
}

double infer_in_trap_size(const GaussianFit& observed, const GasSpec& gas, const StrokeSpec& trap,
                          double t_tof, int axis, const IntegratorConfig& cfg) {
  if (axis < 0 || axis >= kAxes) throw Error(ErrorCode::InvalidConfig, "axis must be 0, 1 or 2");
  validate_spec(trap, gas);
  Trajectory stationary{trap, gas, {ScalingState{}}, {}};
  IntegratorConfig tof_cfg = cfg;
  tof_cfg.output_times.clear();
  tof_cfg.sample_count = 2;
  const Trajectory tof = tof_continuation(stationary, gas, t_tof, tof_cfg);
  return infer_in_trap_size(observed, tof.back().b[axis]);
}

void write_profile_csv(const Profile& profile, const std::filesystem::path& path) {
  check_profile(profile);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
  out << "position,value\n";
  for (std::size_t i = 0; i < profile.positions.size(); ++i) {
    out << detail::format_double(profile.positions[i]) << ','
        << detail::format_double(profile.values[i]) << '\n';
  }
  if (!out) throw Error(ErrorCode::IoError, "failed writing " + path.string());
}

Profile read_profile_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  Profile profile;
  profile.axis = path.stem().string();
  std::string line;
  bool header_seen = false;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r" || line.front() == '#') continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw Error(ErrorCode::InvalidConfig, path.string() + ":" + std::to_string(line_no) +
                                                ": expected two comma-separated columns");
    }
    const auto x = detail::parse_double(std::string_view(line).substr(0, comma));
    const auto y = detail::parse_double(std::string_view(line).substr(comma + 1));
    if (!x || !y) {
      if (!header_seen && profile.positions.empty()) {
        header_seen = true;
        continue;
      }
      throw Error(ErrorCode::InvalidConfig,
                  path.string() + ":" + std::to_string(line_no) + ": not a number");
    }
    profile.positions.push_back(*x);
    profile.values.push_back(*y);
  }
  check_profile(profile);
  return profile;
}

}  // namespace sta
