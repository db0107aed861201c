#pragma once
// Independent reference implementations and frozen values for the test suites.
// Nothing here calls into sta:: numerics; the point is to have a second opinion.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numbers>

namespace oracle {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kHbar = 1.054571817e-34;
inline constexpr double kBoltzmann = 1.380649e-23;
inline constexpr double kLi6 = 9.98834e-27;

using Vec3 = std::array<double, 3>;

// Frozen values, computed once with scipy DOP853 (rtol 1e-11..1e-12) on the same
// equations written out by hand. Trap (825, 230, 230) Hz, b = 1.5, tau = 1250 us,
// reference (uncorrected) drive.
inline constexpr Vec3 kSec3ReferenceB = {1.971051644647, 1.245119109392, 1.245119109392};
inline constexpr Vec3 kSec3ReferenceBdotOverOmega0 = {0.153495636802, 0.352817702378, 0.352817702378};
inline constexpr double kSec3ReferenceQStar = 1.1538975362022188;
inline constexpr double kSec3ReferenceWork = -0.4871566505767917;
// Isotropic endpoint: W = 1/1.5^2 - 1.
inline constexpr double kSec3LcdWork = 1.0 / 2.25 - 1.0;

// Cigar trap (5581.5, 5581.5, 252.7) Hz released for 500 us, 2.47 E_F, E_F = 6.5 uK.
inline constexpr std::array<double, 4> kTofAlphas = {0.0, 1.0, 2.0, 5.0};
inline constexpr std::array<double, 4> kTofBx = {20.691874020949886, 20.59768556751914, 20.503503096359218,
                                                 20.22107772094631};
inline constexpr std::array<double, 4> kTofBz = {1.0675162810296188, 1.0749577892068671, 1.0823140684512855,
                                                 1.1038820665539488};
inline constexpr std::array<double, 4> kTofCq = {0.0, 0.23993363329145598, 0.47361498995797474,
                                                 1.138659524565421};
// Same release at 0.78 E_F.
inline constexpr std::array<double, 4> kTofRatioLowE = {19.383192920479477, 18.696211801899256,
                                                        18.051636399057994, 16.333274794751258};

// Anisotropic adiabat endpoint for 5581.5 -> 2480.7 Hz (x, y), 252.7 -> 208.8 Hz (z).
inline Vec3 anisotropic_endpoint() {
  const Vec3 w0 = {5581.5, 5581.5, 252.7};
  const Vec3 w1 = {2480.7, 2480.7, 208.8};
  const double nu_ratio = std::cbrt((w1[0] * w1[1] * w1[2]) / (w0[0] * w0[1] * w0[2]));
  Vec3 b{};
  for (int j = 0; j < 3; ++j) b[j] = (w0[j] / w1[j]) * std::sqrt(nu_ratio);
  return b;
}

inline double quintic(double s) { return s * s * s * (10.0 + s * (-15.0 + 6.0 * s)); }

// omega(t) of the quintic reference schedule, evaluated by hand.
inline double omega_at(double w0, double w1, double tau, double t) {
  const double s = std::clamp(t / tau, 0.0, 1.0);
  return w0 + (w1 - w0) * quintic(s);
}

// Unitary adiabat b_j = (w_j0/w_j) sqrt(nu/nu0).
inline Vec3 adiabat(const Vec3& w0, const Vec3& w1, double tau, double t) {
  Vec3 w{};
  for (int j = 0; j < 3; ++j) w[j] = omega_at(w0[j], w1[j], tau, t);
  const double nu_ratio = std::cbrt((w[0] * w[1] * w[2]) / (w0[0] * w0[1] * w0[2]));
  Vec3 b{};
  for (int j = 0; j < 3; ++j) b[j] = (w0[j] / w[j]) * std::sqrt(nu_ratio);
  return b;
}

// Fifth-order central differences.
inline double d1(const std::function<double(double)>& f, double t, double h) {
  return (-f(t + 2 * h) + 8 * f(t + h) - 8 * f(t - h) + f(t - 2 * h)) / (12 * h);
}
inline double d2(const std::function<double(double)>& f, double t, double h) {
  return (-f(t + 2 * h) + 16 * f(t + h) - 30 * f(t) + 16 * f(t - h) - f(t - 2 * h)) / (12 * h * h);
}

// Classical fixed-step RK4 on the unitary scaling equations, b'' = w0^2/(b G^(2/3)) - W^2(t) b.
inline std::array<double, 6> rk4_unitary(const Vec3& w0, const std::function<Vec3(double)>& omega_sq, double t1,
                                         int steps) {
  using S = std::array<double, 6>;
  auto rhs = [&](double t, const S& y) {
    const double g23 = std::cbrt(y[0] * y[1] * y[2] * y[0] * y[1] * y[2]);
    const Vec3 w2 = omega_sq(t);
    S d{};
    for (int j = 0; j < 3; ++j) {
      d[j] = y[3 + j];
      d[3 + j] = w0[j] * w0[j] / (y[j] * g23) - w2[j] * y[j];
    }
    return d;
  };
  S y = {1, 1, 1, 0, 0, 0};
  const double h = t1 / steps;
  for (int i = 0; i < steps; ++i) {
    const double t = i * h;
    const S k1 = rhs(t, y);
    S tmp{};
    for (int k = 0; k < 6; ++k) tmp[k] = y[k] + 0.5 * h * k1[k];
    const S k2 = rhs(t + 0.5 * h, tmp);
    for (int k = 0; k < 6; ++k) tmp[k] = y[k] + 0.5 * h * k2[k];
    const S k3 = rhs(t + 0.5 * h, tmp);
    for (int k = 0; k < 6; ++k) tmp[k] = y[k] + h * k3[k];
    const S k4 = rhs(t + h, tmp);
    for (int k = 0; k < 6; ++k) y[k] += h / 6.0 * (k1[k] + 2 * k2[k] + 2 * k3[k] + k4[k]);
  }
  return y;
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace oracle
