#include "lmstim/lm_trajectory.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace lmstim;

namespace {

LmConfig config(double radius, int samples, LmMode mode = LmMode::single) {
  LmConfig c;
  c.center = Vec3(0, 0, 220);
  c.radius = radius;
  c.samples_per_cycle = samples;
  c.mode = mode;
  if (mode == LmMode::multi) {
    c.foci_count = 4;
    c.foci_spacing = 3.0;
  }
  return c;
}

}  // namespace

TEST_CASE("step width") {
  CHECK(step_width(3.0, 82) == doctest::Approx(0.2299).epsilon(1e-4));
  CHECK(std::abs(step_width(3.0, 82) - kTwoPi * 3.0 / 82.0) < 1e-12);
  CHECK(step_width(1.0 / kTwoPi, 10) == doctest::Approx(0.1).epsilon(1e-14));
  CHECK_THROWS_AS(step_width(6.0, 1), ConfigError);
  CHECK_THROWS_AS(step_width(0.0, 10), ConfigError);
}

TEST_CASE("samples for a target step") {
  CHECK(samples_for_target_step(3.0, 0.23) == 82);
  CHECK(samples_for_target_step(6.0, 4.0) == 10);
  CHECK(samples_for_target_step(2.0, kTwoPi * 2.0) == 3);
  CHECK(samples_for_target_step(2.0, 100.0) == 3);
  // Exactly representable boundary: 2 pi A / N equals the target.
  const double a = 5.0;
  const double target = kTwoPi * a / 40.0;
  CHECK(samples_for_target_step(a, target) == 40);
  for (double r : {2.0, 3.0, 4.0, 5.0, 6.0}) {
    const int n = samples_for_target_step(r, 0.23);
    CHECK(step_width(r, n) <= 0.23);
    CHECK(step_width(r, n - 1) > 0.23);
  }
  CHECK_THROWS_AS(samples_for_target_step(3.0, 0.0), ConfigError);
}

TEST_CASE("dwell time and update rate") {
  const DwellTiming a = dwell_time(82, 5.0);
  CHECK(std::abs(a.dwell - 1.0 / 410.0) < 1e-12);
  CHECK(a.dwell == doctest::Approx(2.439e-3).epsilon(1e-3));
  CHECK(std::abs(a.update_rate - 410.0) < 1e-12);
  CHECK_FALSE(a.rate_violation);
  const DwellTiming b = dwell_time(10, 25.0);
  CHECK(std::abs(b.update_rate - 250.0) < 1e-12);
  CHECK_FALSE(b.rate_violation);
  CHECK(dwell_time(1000, 5.0).rate_violation);
  CHECK_FALSE(dwell_time(200, 5.0).rate_violation);
}

TEST_CASE("orbit samples") {
  LmConfig c = config(3.0, 4);
  c.center = Vec3::Zero();
  const Trajectory t = lm_s_trajectory(c);
  REQUIRE(t.positions.size() == 4);
  const Vec3 expected[] = {{3, 0, 0}, {0, 3, 0}, {-3, 0, 0}, {0, -3, 0}};
  for (int j = 0; j < 4; ++j) CHECK((t.positions[j] - expected[j]).norm() < 1e-12);
  CHECK(t.theta[0] == 0.0);
  CHECK(t.dwell == doctest::Approx(1.0 / 20.0));
}

TEST_CASE("first sample carries the z offset") {
  LmConfig c = config(3.0, 5);
  c.z_profile = {0.7, 0, 0, 0, 0};
  const Trajectory t = lm_s_trajectory(c);
  CHECK((t.positions[0] - (c.center + 3.0 * c.basis_a + 0.7 * c.basis_c)).norm() < 1e-12);
}

TEST_CASE("circle residual and constant chord on a tilted basis") {
  LmConfig c = config(5.0, 137);
  const Mat3 r = axis_angle_rotation(Vec3(1, 2, 3), 37.0);
  c.basis_a = r * Vec3::UnitX();
  c.basis_b = r * Vec3::UnitY();
  c.basis_c = r * Vec3::UnitZ();
  const Trajectory t = lm_s_trajectory(c);
  const double chord = 2.0 * 5.0 * std::sin(kPi / 137.0);
  for (std::size_t j = 0; j < t.positions.size(); ++j) {
    CHECK(std::abs((t.positions[j] - c.center).norm() - 5.0) < 1e-9);
    const Vec3& next = t.positions[(j + 1) % t.positions.size()];
    CHECK(std::abs((next - t.positions[j]).norm() - chord) < 1e-9);
  }
}

TEST_CASE("config validation") {
  LmConfig c = config(3.0, 82);
  c.basis_b = Vec3(1, 1, 0).normalized();
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = config(3.0, 2);
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = config(0.0, 82);
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = config(3.0, 82);
  c.z_profile = {1.0, 2.0};
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = config(3.0, 82, LmMode::multi);
  c.foci_spacing = 0.1;
  CHECK_THROWS_WITH_AS(c.validate(), "foci spacing below step width", ConfigError);
  c = config(3.0, 82, LmMode::multi);
  c.foci_count = 7;  // 7 * 13 >= 82
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("foci stride") {
  CHECK(foci_stride(3.0, step_width(6.0, 164)) == 13);
  CHECK(foci_stride(3.0, 0.22) == 13);
  // d equal to d_LM must give 1 despite rounding in the division.
  for (int n : {7, 82, 137, 164, 1000}) {
    const double s = step_width(3.0, n);
    CHECK(foci_stride(s, s) == 1);
    CHECK(foci_stride(5.0 * s, s) == 5);
  }
}

TEST_CASE("schedule index example") {
  const FociSchedule s = lm_m_schedule(config(6.0, 164, LmMode::multi));
  CHECK(s.stride == 13);
  REQUIRE(s.steps.size() == 164);
  const std::vector<std::size_t> first{0, 13, 26, 39};  // 1-based: 1, 14, 27, 40
  CHECK(s.steps[0] == first);
  const std::vector<std::size_t> published{0, 14, 28, 36};
  CHECK(s.steps[0] != published);
}

TEST_CASE("schedule advances one sample per step and wraps") {
  const FociSchedule s = make_schedule(82, 13, 4);
  for (std::size_t j = 0; j < 82; ++j) {
    for (std::size_t i = 0; i < 4; ++i) {
      CHECK(s.steps[(j + 1) % 82][i] == (s.steps[j][i] + 1) % 82);
      CHECK(s.steps[j][i] == (j + i * 13) % 82);
    }
  }
}

TEST_CASE("single-focus schedule matches LM-S ordering") {
  const FociSchedule s = make_schedule(10, 3, 1);
  for (std::size_t j = 0; j < 10; ++j) CHECK(s.steps[j] == std::vector<std::size_t>{j});
  const FociSchedule adj = make_schedule(10, 1, 3);
  CHECK(adj.steps[0] == std::vector<std::size_t>{0, 1, 2});
}

TEST_CASE("mirror") {
  const ReflectionPlane z0;
  CHECK((mirror_point(Vec3(0, 0, 10), z0) - Vec3(0, 0, -10)).norm() < 1e-15);
  CHECK((mirror_point(Vec3(3, 4, 0), z0) - Vec3(3, 4, 0)).norm() < 1e-15);

  std::mt19937_64 rng(11);
  std::normal_distribution<double> g(0.0, 50.0);
  for (int k = 0; k < 200; ++k) {
    const ReflectionPlane pl{Vec3(g(rng), g(rng), g(rng)), Vec3(g(rng), g(rng), g(rng)).normalized()};
    const Vec3 p(g(rng), g(rng), g(rng));
    const Vec3 q(g(rng), g(rng), g(rng));
    CHECK((mirror_point(mirror_point(p, pl), pl) - p).norm() < 1e-9);
    CHECK(std::abs((mirror_point(p, pl) - mirror_point(q, pl)).norm() - (p - q).norm()) < 1e-9);
  }
  CHECK_THROWS_AS(mirror_point(Vec3::Zero(), ReflectionPlane{Vec3::Zero(), Vec3(0, 0, 2)}),
                  ConfigError);
}

TEST_CASE("reflected trajectory") {
  SUBCASE("centre on the plane with no tilt reproduces the orbit") {
    LmConfig c = config(3.0, 82);
    c.center = Vec3(1, 2, 0);
    const Trajectory a = lm_s_trajectory(c);
    const Trajectory b = reflected_trajectory(c, ReflectionPlane{}, 0.0);
    for (std::size_t j = 0; j < a.positions.size(); ++j) {
      CHECK((a.positions[j] - b.positions[j]).norm() < 1e-12);
    }
  }
  SUBCASE("tilt rotates the orbit plane about basis_a") {
    LmConfig c = config(3.0, 4);
    c.center = Vec3::Zero();
    const Trajectory t = reflected_trajectory(c, ReflectionPlane{}, -50.0);
    const double s = std::sin(deg_to_rad(50.0));
    const double co = std::cos(deg_to_rad(50.0));
    // Sample 2 sits at A * b' with b' = (0, cos 50, -sin 50).
    CHECK((t.positions[1] - 3.0 * Vec3(0, co, -s)).norm() < 1e-12);
    CHECK((t.positions[0] - Vec3(3, 0, 0)).norm() < 1e-12);
  }
  SUBCASE("marker configuration stays on the viewer side of the display") {
    for (LmMode mode : {LmMode::single, LmMode::multi}) {
      for (double a : {2.0, 3.0, 4.0, 5.0, 6.0}) {
        LmConfig c = config(a, samples_for_target_step(a, 0.23), mode);
        const ReflectionPlane display;
        c.center = mirror_point(Vec3(0, 30, 30), display);
        const Trajectory t = reflected_trajectory(c, display, -50.0);
        for (const Vec3& p : t.positions) CHECK(p.z() > 0.0);
      }
    }
  }
  CHECK_THROWS_AS(reflected_trajectory(config(3.0, 82), ReflectionPlane{}, 120.0), ConfigError);
}

TEST_CASE("drive stream") {
  const TransducerArray array = build_array(ArrayLayoutConfig::paper_default());
  LmConfig c = config(3.0, 4);
  const Trajectory t = lm_s_trajectory(c);
  const auto s = trajectory_to_drive_stream(t, nullptr, array, Combiner::complex);
  REQUIRE(s.size() == 4);
  double total = 0.0;
  for (std::size_t j = 0; j < s.size(); ++j) {
    CHECK(s[j].phases == single_focus_phases(array, {t.positions[j]}));
    total += s[j].duration;
  }
  CHECK(total == doctest::Approx(1.0 / c.lm_frequency).epsilon(1e-12));

  LmConfig m = config(3.0, 82, LmMode::multi);
  const Trajectory tm = lm_s_trajectory(m);
  const FociSchedule sched = lm_m_schedule(m);
  const auto sm = trajectory_to_drive_stream(tm, &sched, array, Combiner::complex);
  REQUIRE(sm.size() == 82);
  CHECK(foci_at_step(tm, &sched, 5).size() == 4);
  std::vector<FocusSpec> foci;
  for (const Vec3& p : foci_at_step(tm, &sched, 5)) foci.push_back({p});
  CHECK(sm[5].phases == drive_for_foci(array, foci, Combiner::complex, sm[5].duration).phases);
}
