#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "sta/protocol.hpp"

using namespace sta;

namespace {

StrokeSpec sec3_stroke(double tau = 1250e-6) {
  return {{hz_to_rad(825.0), hz_to_rad(230.0), hz_to_rad(230.0)}, AxisTriple::uniform(1.5), tau};
}

StrokeSpec cigar_stroke() {
  const AxisTriple w0{hz_to_rad(5581.5), hz_to_rad(5581.5), hz_to_rad(252.7)};
  const AxisTriple w1{hz_to_rad(2480.7), hz_to_rad(2480.7), hz_to_rad(208.8)};
  return stroke_between(w0, w1, 1.5e-3);
}

std::vector<StrokeSpec> stroke_zoo() {
  std::vector<StrokeSpec> out = {sec3_stroke(), cigar_stroke()};
  // compressions and mixed strokes
  out.push_back({{hz_to_rad(100.0), hz_to_rad(200.0), hz_to_rad(300.0)}, {0.7, 1.3, 1.0}, 2e-3});
  out.push_back({{hz_to_rad(1000.0), hz_to_rad(1000.0), hz_to_rad(50.0)}, {2.0, 2.0, 0.5}, 3e-2});
  return out;
}

}  // namespace

TEST_CASE("quintic smoothstep") {
  CHECK(quintic_smoothstep(0.0).value == 0.0);
  CHECK(quintic_smoothstep(1.0).value == 1.0);
  CHECK(quintic_smoothstep(0.5).value == 0.5);
  for (double s : {0.0, 1.0}) {
    CHECK(quintic_smoothstep(s).first == 0.0);
    CHECK(quintic_smoothstep(s).second == 0.0);
  }
  // clamped outside [0, 1]
  CHECK(quintic_smoothstep(-0.3).value == 0.0);
  CHECK(quintic_smoothstep(1.7).value == 1.0);
  for (double s = 0.05; s < 1.0; s += 0.05) {
    CHECK(quintic_smoothstep(s).value == doctest::Approx(oracle::quintic(s)).epsilon(1e-14));
  }
}

TEST_CASE("schedule boundary-condition suite") {
  for (const auto& spec : stroke_zoo()) {
    const FrequencySchedule sched(spec);
    const AxisTriple wf = spec.final_omega();
    for (int j = 0; j < kAxes; ++j) {
      const double w0 = spec.omega0[j];
      const Derivs a = sched.axis(j, 0.0);
      const Derivs b = sched.axis(j, spec.tau);
      // natural units: omega / omega0, omega' tau / omega0, omega'' tau^2 / omega0
      CHECK(std::abs(a.value - w0) / w0 < 1e-10);
      CHECK(std::abs(b.value - wf[j]) / w0 < 1e-10);
      CHECK(std::abs(a.first) * spec.tau / w0 < 1e-10);
      CHECK(std::abs(b.first) * spec.tau / w0 < 1e-10);
      CHECK(std::abs(a.second) * spec.tau * spec.tau / w0 < 1e-10);
      CHECK(std::abs(b.second) * spec.tau * spec.tau / w0 < 1e-10);
      // midpoint is the arithmetic mean
      CHECK(sched.axis(j, 0.5 * spec.tau).value == doctest::Approx(0.5 * (w0 + wf[j])).epsilon(1e-14));
    }
  }
}

TEST_CASE("schedule derivatives match central differences") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.01, 0.99);
  for (const auto& spec : stroke_zoo()) {
    const FrequencySchedule sched(spec);
    const double h = spec.tau * 1e-6;
    for (int i = 0; i < 100; ++i) {
      const double t = u(rng) * spec.tau;
      for (int j = 0; j < kAxes; ++j) {
        const double fd1 = (sched.axis(j, t + h).value - sched.axis(j, t - h).value) / (2 * h);
        const double fd2 = (sched.axis(j, t + h).first - sched.axis(j, t - h).first) / (2 * h);
        const double scale1 = std::abs(spec.final_omega()[j] - spec.omega0[j]) / spec.tau;
        const double scale2 = scale1 / spec.tau;
        if (scale1 == 0.0) continue;
        CHECK(std::abs(sched.axis(j, t).first - fd1) <= 1e-5 * scale1);
        CHECK(std::abs(sched.axis(j, t).second - fd2) <= 1e-5 * scale2);
      }
    }
  }
}

TEST_CASE("schedule before, after, released") {
  const StrokeSpec spec = sec3_stroke();
  const FrequencySchedule hold(spec);
  const FrequencySchedule released(spec, PostStroke::Release);
  CHECK(hold.axis(0, -1.0).value == spec.omega0.x);
  CHECK(hold.axis(0, 2.0 * spec.tau).value == doctest::Approx(spec.final_omega().x));
  CHECK(released.axis(0, 2.0 * spec.tau).value == 0.0);
  CHECK(hold.isotropic_shape());
  CHECK_FALSE(FrequencySchedule(cigar_stroke()).isotropic_shape());
}

TEST_CASE("adiabatic reference") {
  SUBCASE("identity stroke gives b = 1") {
    StrokeSpec s = sec3_stroke();
    s.target_b = AxisTriple::uniform(1.0);
    const ScalingPath p = adiabatic_reference(FrequencySchedule(s));
    for (double t : {0.0, 1e-4, 6e-4, s.tau}) {
      for (int j = 0; j < kAxes; ++j) {
        CHECK(p.at(t).b[j] == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(p.at(t).bdot[j] == 0.0);
      }
    }
  }
  SUBCASE("matches the hand-written nu-ratio formula and its finite differences") {
    for (const auto& spec : stroke_zoo()) {
      const FrequencySchedule sched(spec);
      const ScalingPath p = adiabatic_reference(sched);
      const oracle::Vec3 w0{spec.omega0.x, spec.omega0.y, spec.omega0.z};
      const AxisTriple wf = spec.final_omega();
      const oracle::Vec3 w1{wf.x, wf.y, wf.z};
      for (double frac : {0.1, 0.3, 0.5, 0.77, 0.95}) {
        const double t = frac * spec.tau;
        const PathPoint pt = p.at(t);
        for (int j = 0; j < kAxes; ++j) {
          auto bj = [&](double x) { return oracle::adiabat(w0, w1, spec.tau, x)[j]; };
          CHECK(pt.b[j] == doctest::Approx(bj(t)).epsilon(1e-13));
          const double h = spec.tau * 1e-3;
          const double v_scale = std::abs(pt.b[j] - 1.0) / spec.tau + 1e-300;
          CHECK(std::abs(pt.bdot[j] - oracle::d1(bj, t, h)) <= 1e-6 * v_scale + 1e-9 / spec.tau);
          CHECK(std::abs(pt.bddot[j] - oracle::d2(bj, t, h)) <=
                1e-5 * v_scale / spec.tau + 1e-7 / (spec.tau * spec.tau));
        }
      }
    }
  }
  SUBCASE("isotropic stroke reduces to sqrt(w0/w)") {
    const StrokeSpec spec = sec3_stroke();
    const FrequencySchedule sched(spec);
    const ScalingPath p = adiabatic_reference(sched);
    const ScalingPath q = noninteracting_adiabat(sched);
    for (double frac : {0.2, 0.6, 1.0}) {
      const double t = frac * spec.tau;
      for (int j = 0; j < kAxes; ++j) {
        CHECK(p.at(t).b[j] == doctest::Approx(std::sqrt(spec.omega0[j] / sched.axis(j, t).value)).epsilon(1e-13));
        CHECK(q.at(t).b[j] == doctest::Approx(p.at(t).b[j]).epsilon(1e-13));
      }
    }
  }
  SUBCASE("anisotropic cigar endpoint") {
    const StrokeSpec spec = cigar_stroke();
    const PathPoint end = adiabatic_reference(FrequencySchedule(spec)).at(spec.tau);
    const oracle::Vec3 b = oracle::anisotropic_endpoint();
    CHECK(end.b.x / end.b.z == doctest::Approx(b[0] / b[2]).epsilon(1e-12));
    CHECK(end.b.x / end.b.z == doctest::Approx(1.86).epsilon(0.01 / 1.86));
  }
}

TEST_CASE("LCD unitary drive") {
  SUBCASE("constant schedule gives omega0^2") {
    StrokeSpec s = cigar_stroke();
    s.target_b = AxisTriple::uniform(1.0);
    const DriveSchedule d = lcd_anisotropic_unitary(FrequencySchedule(s));
    for (double t : {0.0, 3e-4, 1e-3, s.tau}) {
      for (int j = 0; j < kAxes; ++j) {
        CHECK(d.omega_sq(t)[j] == doctest::Approx(s.omega0[j] * s.omega0[j]).epsilon(1e-14));
      }
    }
  }
  SUBCASE("endpoint identity") {
    for (const auto& spec : stroke_zoo()) {
      const FrequencySchedule sched(spec);
      const DriveSchedule d = lcd_anisotropic_unitary(sched);
      for (int j = 0; j < kAxes; ++j) {
        const double w0 = sched.axis(j, 0.0).value;
        const double w1 = sched.axis(j, spec.tau).value;
        CHECK(d.omega_sq(0.0)[j] == doctest::Approx(w0 * w0).epsilon(1e-14));
        CHECK(d.omega_sq(spec.tau)[j] == doctest::Approx(w1 * w1).epsilon(1e-14));
      }
    }
  }
  SUBCASE("nu-form equals omega^2 - bddot/b on the adiabat") {
    for (const auto& spec : stroke_zoo()) {
      const FrequencySchedule sched(spec);
      const DriveSchedule d = lcd_anisotropic_unitary(sched);
      const ScalingPath p = adiabatic_reference(sched);
      for (int i = 1; i < 1000; ++i) {
        const double t = spec.tau * i / 1000.0;
        const PathPoint pt = p.at(t);
        for (int j = 0; j < kAxes; ++j) {
          const double w = sched.axis(j, t).value;
          const double other = w * w - pt.bddot[j] / pt.b[j];
          CHECK(std::abs(d.omega_sq(t)[j] - other) <= 1e-10 * std::max(std::abs(other), w * w));
        }
      }
    }
  }
  SUBCASE("isotropic closed form agrees with the anisotropic form") {
    const StrokeSpec spec = sec3_stroke();
    const FrequencySchedule sched(spec);
    const DriveSchedule iso = lcd_isotropic_unitary(sched);
    const DriveSchedule aniso = lcd_anisotropic_unitary(sched);
    double worst = 0.0;
    for (int i = 0; i <= 1000; ++i) {
      const double t = spec.tau * i / 1000.0;
      for (int j = 0; j < kAxes; ++j) {
        const double a = iso.omega_sq(t)[j];
        const double b = aniso.omega_sq(t)[j];
        worst = std::max(worst, std::abs(a - b) / std::abs(b));
        // hand-written isotropic oracle
        const Derivs w = sched.axis(j, t);
        const double p = w.first / w.value;
        const double hand = w.value * w.value - 0.75 * p * p + 0.5 * w.second / w.value;
        CHECK(a == doctest::Approx(hand).epsilon(1e-12));
      }
    }
    CHECK(worst < 1e-10);
  }
  SUBCASE("expansion weakens confinement mid-stroke") {
    const StrokeSpec spec = sec3_stroke();
    const FrequencySchedule sched(spec);
    const DriveSchedule d = lcd_isotropic_unitary(sched);
    const double t = 0.2 * spec.tau;
    for (int j = 0; j < kAxes; ++j) {
      const double w = sched.axis(j, t).value;
      CHECK(d.omega_sq(t)[j] < w * w);
    }
  }
  SUBCASE("isotropic form rejects anisotropic schedules") {
    CHECK_THROWS_AS(lcd_isotropic_unitary(FrequencySchedule(cigar_stroke())), Error);
  }
}

TEST_CASE("LCD noninteracting drive") {
  const StrokeSpec spec = sec3_stroke();
  const FrequencySchedule sched(spec);
  SUBCASE("b = 1 gives omega0^2") {
    StrokeSpec id = spec;
    id.target_b = AxisTriple::uniform(1.0);
    const DriveSchedule d = lcd_noninteracting(FrequencySchedule(id), smoothstep_path(id));
    for (int j = 0; j < kAxes; ++j) CHECK(d.omega_sq(4e-4)[j] == doctest::Approx(id.omega0[j] * id.omega0[j]));
  }
  SUBCASE("hand-written formula on the smoothstep path") {
    const ScalingPath p = smoothstep_path(spec);
    const DriveSchedule d = lcd_noninteracting(sched, p);
    for (double frac : {0.1, 0.4, 0.8}) {
      const double t = frac * spec.tau;
      const double s = t / spec.tau;
      const double b = 1.0 + 0.5 * oracle::quintic(s);
      const double bdd = 0.5 * 60.0 * s * (1 - 3 * s + 2 * s * s) / (spec.tau * spec.tau);
      for (int j = 0; j < kAxes; ++j) {
        const double w0 = spec.omega0[j];
        CHECK(d.omega_sq(t)[j] == doctest::Approx(w0 * w0 / std::pow(b, 4) - bdd / b).epsilon(1e-12));
      }
    }
  }
  SUBCASE("slow stroke approaches the reference") {
    StrokeSpec slow = spec;
    slow.tau = 10.0;
    const FrequencySchedule ss(slow);
    const DriveSchedule d = lcd_noninteracting(ss, noninteracting_adiabat(ss));
    const double w = ss.axis(1, 3.0).value;
    CHECK(d.omega_sq(3.0).y == doctest::Approx(w * w).epsilon(1e-6));
  }
}

TEST_CASE("LCD viscous drive") {
  const StrokeSpec spec = cigar_stroke();
  const FrequencySchedule sched(spec);
  const double e = 2.47 * 6.5e-6 * oracle::kBoltzmann;
  SUBCASE("alpha = 0 reduces to the inviscid LCD") {
    const GasSpec gas = make_gas(Regime::ViscousUnitary, spec, e, 0.0);
    const DriveSchedule v = lcd_viscous_unitary(sched, gas, adiabatic_reference(sched));
    const DriveSchedule u = lcd_anisotropic_unitary(sched);
    for (int i = 0; i <= 200; ++i) {
      const double t = spec.tau * i / 200.0;
      for (int j = 0; j < kAxes; ++j) {
        CHECK(v.omega_sq(t)[j] == doctest::Approx(u.omega_sq(t)[j]).epsilon(1e-9).scale(spec.omega0[j] *
                                                                                         spec.omega0[j]));
      }
    }
  }
  SUBCASE("isotropic path with alpha = 5 gives the inviscid drive") {
    StrokeSpec iso = spec;
    iso.target_b = AxisTriple::uniform(1.5);
    const FrequencySchedule is(iso);
    const GasSpec gas = make_gas(Regime::ViscousUnitary, iso, e, 5.0);
    const DriveSchedule v = lcd_viscous_unitary(is, gas, adiabatic_reference(is));
    const DriveSchedule u = lcd_anisotropic_unitary(is);
    for (int i = 0; i <= 200; ++i) {
      const double t = iso.tau * i / 200.0;
      for (int j = 0; j < kAxes; ++j) {
        CHECK(v.omega_sq(t)[j] == doctest::Approx(u.omega_sq(t)[j]).epsilon(1e-12));
      }
    }
  }
  SUBCASE("anisotropic path with alpha > 0 differs") {
    const GasSpec gas = make_gas(Regime::ViscousUnitary, spec, e, 5.0);
    const DriveSchedule v = lcd_viscous_unitary(sched, gas, adiabatic_reference(sched));
    const DriveSchedule u = lcd_anisotropic_unitary(sched);
    const double t = 0.5 * spec.tau;
    CHECK(std::abs(v.omega_sq(t).z - u.omega_sq(t).z) > 1e-6 * u.omega_sq(t).z);
  }
  SUBCASE("heating is nonnegative and nondecreasing") {
    const GasSpec gas = make_gas(Regime::ViscousUnitary, spec, e, 5.0);
    const ViscousHeating heat(gas, adiabatic_reference(sched));
    double prev = 0.0;
    CHECK(heat.at(0.0) == 0.0);
    for (int i = 1; i <= 100; ++i) {
      const double c = heat.at(spec.tau * i / 100.0);
      CHECK(c >= prev);
      prev = c;
    }
    CHECK(prev > 0.0);
  }
  SUBCASE("needs a viscous gas") {
    const GasSpec gas = make_gas(Regime::Unitary, spec, e);
    CHECK_THROWS_AS(lcd_viscous_unitary(sched, gas, adiabatic_reference(sched)), Error);
  }
}

TEST_CASE("identity stroke keeps omega0 in every regime") {
  StrokeSpec s = cigar_stroke();
  s.target_b = AxisTriple::uniform(1.0);
  const FrequencySchedule sched(s);
  const GasSpec gas = make_gas(Regime::ViscousUnitary, s, 1e-29, 3.0);
  const std::vector<DriveSchedule> drives = {reference_drive(sched), lcd_anisotropic_unitary(sched),
                                             lcd_noninteracting(sched, noninteracting_adiabat(sched)),
                                             lcd_viscous_unitary(sched, gas, adiabatic_reference(sched))};
  for (const auto& d : drives) {
    for (double t : {0.0, 2e-4, 7e-4, s.tau}) {
      for (int j = 0; j < kAxes; ++j) {
        CHECK(d.omega_sq(t)[j] == doctest::Approx(s.omega0[j] * s.omega0[j]).epsilon(1e-14));
      }
    }
  }
}

TEST_CASE("feasibility") {
  SUBCASE("constant drive") {
    StrokeSpec s = sec3_stroke();
    s.target_b = AxisTriple::uniform(1.0);
    const FeasibilityReport r = feasibility_check(reference_drive(FrequencySchedule(s)));
    CHECK(r.feasible);
    CHECK(r.min_omega_sq.x == doctest::Approx(s.omega0.x * s.omega0.x));
  }
  SUBCASE("sec3 stroke is feasible, 100x faster is not") {
    const FeasibilityReport ok = feasibility_check(lcd_anisotropic_unitary(FrequencySchedule(sec3_stroke())));
    CHECK(ok.feasible);
    for (int j = 0; j < kAxes; ++j) CHECK(ok.min_omega_sq[j] > 0.0);
    const StrokeSpec fast = sec3_stroke(1250e-8);
    const FeasibilityReport bad = feasibility_check(lcd_anisotropic_unitary(FrequencySchedule(fast)));
    CHECK_FALSE(bad.feasible);
    for (int j = 0; j < kAxes; ++j) {
      REQUIRE_FALSE(bad.negative_intervals[j].empty());
      const auto [a, b] = bad.negative_intervals[j].front();
      CHECK(a > 0.0);
      CHECK(b < fast.tau);
      CHECK(bad.min_omega_sq[j] < 0.0);
    }
  }
}

TEST_CASE("table drive") {
  std::vector<double> t = {0.0, 1e-3, 2e-3, 3e-3, 4e-3};
  std::array<std::vector<double>, kAxes> w2;
  for (int j = 0; j < kAxes; ++j) w2[j] = {100.0, 90.0, 50.0, -10.0, 20.0};
  const DriveSchedule d = drive_from_table(t, w2);
  for (std::size_t i = 0; i < t.size(); ++i) CHECK(d.omega_sq(t[i]).x == doctest::Approx(w2[0][i]));
  CHECK(d.omega_sq(10.0).x == doctest::Approx(20.0));
  CHECK_FALSE(d.feasible());
  CHECK(d.with_post(PostStroke::Release).omega_sq(10.0).x == 0.0);

  std::array<std::vector<double>, kAxes> short_cols;
  for (int j = 0; j < kAxes; ++j) short_cols[j] = {1.0, 2.0};
  CHECK_THROWS_AS(drive_from_table({0.0, 1.0}, short_cols), Error);
  CHECK_THROWS_AS(drive_from_table({0.0, 2e-3, 1e-3, 3e-3, 4e-3}, w2), Error);
}

TEST_CASE("free expansion drive") {
  const DriveSchedule d = DriveSchedule::free_expansion();
  CHECK(d.omega_sq(0.0) == AxisTriple{});
  CHECK(d.omega_sq(1.0) == AxisTriple{});
}
