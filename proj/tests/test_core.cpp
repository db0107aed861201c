#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "sta/core.hpp"

using namespace sta;

namespace {

StrokeSpec sec3_stroke() {
  return {{hz_to_rad(825.0), hz_to_rad(230.0), hz_to_rad(230.0)}, AxisTriple::uniform(1.5), 1250e-6};
}

}  // namespace

TEST_CASE("Hz to rad/s round trip") {
  for (double hz : {1e-3, 230.0, 825.0, 5581.5, 1e7}) {
    CHECK(rad_to_hz(hz_to_rad(hz)) == doctest::Approx(hz).epsilon(1e-15));
    CHECK(hz_to_rad(hz) == doctest::Approx(oracle::kTwoPi * hz).epsilon(1e-16));
  }
}

TEST_CASE("AxisTriple helpers") {
  AxisTriple a{1.0, 2.0, 3.0};
  CHECK(a[0] == 1.0);
  CHECK(a[2] == 3.0);
  a[1] = 4.0;
  CHECK(a.y == 4.0);
  CHECK(a.product() == 12.0);
  CHECK(a.sum() == 8.0);
  CHECK(a.all_positive());
  CHECK_FALSE(AxisTriple{1.0, 0.0, 1.0}.all_positive());
  CHECK_FALSE(AxisTriple{1.0, std::nan(""), 1.0}.all_finite());
}

TEST_CASE("regime names") {
  CHECK(parse_regime("noninteracting") == Regime::NonInteracting);
  CHECK(parse_regime("unitary") == Regime::Unitary);
  CHECK(parse_regime("viscous-unitary") == Regime::ViscousUnitary);
  for (Regime r : {Regime::NonInteracting, Regime::Unitary, Regime::ViscousUnitary}) {
    CHECK(parse_regime(to_string(r)) == r);
  }
  CHECK_THROWS_AS(parse_regime("bec"), Error);
}

TEST_CASE("final frequency and stroke_between") {
  const StrokeSpec s = sec3_stroke();
  const AxisTriple wf = s.final_omega();
  CHECK(wf.x == doctest::Approx(hz_to_rad(825.0) / 2.25));
  const StrokeSpec back = stroke_between(s.omega0, wf, s.tau);
  for (int j = 0; j < kAxes; ++j) CHECK(back.target_b[j] == doctest::Approx(1.5).epsilon(1e-14));
}

TEST_CASE("gas closures") {
  const StrokeSpec s = sec3_stroke();
  const double e = 1e-30;
  const GasSpec g = make_gas(Regime::Unitary, s, e);
  CHECK(g.virial_denominator == e);
  for (int j = 0; j < kAxes; ++j) {
    // 1/2 m w^2 <x^2> = E/6
    CHECK(0.5 * g.mass * s.omega0[j] * s.omega0[j] * g.initial_msq_sizes[j] == doctest::Approx(e / 6.0));
  }
  CHECK(g.mass == oracle::kLi6);
}

TEST_CASE("validation examples") {
  const StrokeSpec s = sec3_stroke();
  const GasSpec g = make_gas(Regime::Unitary, s, 1e-30);
  SUBCASE("preset stroke is valid and validation is idempotent") {
    const auto [s1, g1] = validate_spec(s, g);
    const auto [s2, g2] = validate_spec(s1, g1);
    CHECK(s2 == s);
    CHECK(g2 == g);
  }
  SUBCASE("tau = 0") {
    StrokeSpec bad = s;
    bad.tau = 0.0;
    try {
      validate_spec(bad, g);
      FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
      CHECK(e.has(ErrorCode::NonPositiveDuration));
      CHECK(e.kind() == ErrorKind::Validation);
    }
  }
  SUBCASE("viscosity in unitary regime") {
    GasSpec bad = g;
    bad.alpha_s = 0.5;
    try {
      validate_spec(s, bad);
      FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
      CHECK(e.has(ErrorCode::ViscosityInWrongRegime));
    }
  }
  SUBCASE("all violations are reported together") {
    StrokeSpec bad = s;
    bad.omega0.y = -1.0;
    bad.target_b.z = 0.0;
    GasSpec badg = g;
    badg.mass = 0.0;
    badg.alpha_s = -1.0;
    const auto v = check_spec(bad, badg);
    CHECK(v.size() >= 4);
    try {
      validate_spec(bad, badg);
      FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
      CHECK(e.has(ErrorCode::NonPositiveFrequency));
      CHECK(e.has(ErrorCode::NonPositiveTarget));
      CHECK(e.has(ErrorCode::NonPositiveMass));
      CHECK(e.has(ErrorCode::NegativeViscosity));
    }
  }
  SUBCASE("non-finite input") {
    StrokeSpec bad = s;
    bad.tau = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(validate_spec(bad, g), ValidationError);
  }
}

TEST_CASE("stress diagonal is traceless") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> bd(0.2, 30.0);
  std::uniform_real_distribution<double> vd(-1e5, 1e5);
  for (int i = 0; i < 1000; ++i) {
    const AxisTriple b{bd(rng), bd(rng), bd(rng)};
    const AxisTriple v{vd(rng), vd(rng), vd(rng)};
    const AxisTriple s = stress_diagonal(b, v);
    const double scale = std::abs(v.x / b.x) + std::abs(v.y / b.y) + std::abs(v.z / b.z);
    CHECK(std::abs(s.sum()) <= 1e-12 * scale);
    // oracle: 2 r_j - (2/3) sum r
    const double rs = v.x / b.x + v.y / b.y + v.z / b.z;
    CHECK(s.x == doctest::Approx(2.0 * v.x / b.x - 2.0 / 3.0 * rs).epsilon(1e-12).scale(scale));
  }
  CHECK(stress_diagonal(AxisTriple::uniform(2.0), AxisTriple::uniform(3.0)) == AxisTriple{});
}

TEST_CASE("error codes have names and kinds") {
  CHECK(to_string(ErrorCode::ScaleFactorCollapse) == "ScaleFactorCollapse");
  CHECK(kind_of(ErrorCode::NonPositiveDuration) == ErrorKind::Validation);
  CHECK(kind_of(ErrorCode::InvalidConfig) == ErrorKind::Validation);
  CHECK(kind_of(ErrorCode::StepSizeUnderflow) == ErrorKind::Numerical);
  CHECK(kind_of(ErrorCode::FitDiverged) == ErrorKind::Numerical);
}

TEST_CASE("Trajectory::nearest") {
  Trajectory t;
  for (double x : {0.0, 1.0, 2.0}) {
    ScalingState s;
    s.t = x;
    t.samples.push_back(s);
  }
  CHECK(t.nearest(0.4).t == 0.0);
  CHECK(t.nearest(0.6).t == 1.0);
  CHECK(t.nearest(9.0).t == 2.0);
}
