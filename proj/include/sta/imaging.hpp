#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "sta/core.hpp"
#include "sta/dynamics.hpp"

namespace sta {

/// 1-D density cut: strictly increasing positions (m) and signal values.
struct Profile {
  std::vector<double> positions;
  std::vector<double> values;
  std::string axis = "x";
};

/// Model A0 + A1 exp(-x^2 / sigma^2); sigma is the 1/e half-width.
struct GaussianParams {
  double a0 = 0.0;
  double a1 = 1.0;
  double sigma = 1.0;
};

double gaussian_model(const GaussianParams& p, double x);

struct GaussianFit {
  double a0 = 0.0;
  double a1 = 0.0;
  double sigma = 0.0;
  double residual_norm = 0.0;
  int iterations = 0;
  bool converged = false;

  GaussianParams params() const { return {a0, a1, sigma}; }
};

struct ProfileGrid {
  double half_width = 0.0;  // positions span [-half_width, half_width]
  std::size_t points = 201;
};

/// Additive white Gaussian noise with standard deviation a1 / snr; snr <= 0 disables it.
struct NoiseSpec {
  double snr = 0.0;
  std::uint64_t seed = 0;
};

/// Throws GridTooNarrow when the grid does not span +-4 sigma.
Profile synthesize_profile(const GaussianParams& truth, const ProfileGrid& grid,
                           const NoiseSpec& noise = {});

/// Moment-based starting point: offset = min, amplitude = max - min,
/// sigma = (2 <x^2>)^(1/2) of the background-subtracted signal.
GaussianParams initial_guess(const Profile& profile);

/// Levenberg-Marquardt fit of A0 + A1 exp(-x^2/sigma^2). Throws TooFewSamples,
/// DegenerateProfile or FitDiverged.
GaussianFit gaussian_fit(const Profile& profile,
                         const std::optional<GaussianParams>& guess = std::nullopt);

/// sigma_in_trap = sigma_obs / b_j(t_tof).
double infer_in_trap_size(const GaussianFit& observed, double expansion_factor);

/// Runs the free expansion of a gas released from a stationary trap `spec.omega0` and
/// divides the observed width by b_axis(t_tof).
double infer_in_trap_size(const GaussianFit& observed, const GasSpec& gas, const StrokeSpec& trap,
                          double t_tof, int axis, const IntegratorConfig& cfg = {});

/// Two-column CSV: "position,value" header then one row per sample.
void write_profile_csv(const Profile& profile, const std::filesystem::path& path);
Profile read_profile_csv(const std::filesystem::path& path);

}  // namespace sta
