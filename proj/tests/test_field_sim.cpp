#include "lmstim/field_sim.hpp"
#include "lmstim/lm_trajectory.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>

using namespace lmstim;

namespace {

TransducerArray small_array(std::vector<Vec3> positions, Vec3 normal = Vec3::UnitZ()) {
  std::vector<Transducer> ts;
  for (const Vec3& p : positions) ts.push_back({p, normal});
  const std::size_t n = ts.size();
  return TransducerArray(std::move(ts), 1, n, 40000.0, 340000.0, 4.5);
}

const TransducerArray& default_array() {
  static const TransducerArray a = build_array(ArrayLayoutConfig::paper_default());
  return a;
}

DriveFrame focus_frame(const TransducerArray& a, const Vec3& f) {
  return DriveFrame{single_focus_phases(a, {f}), 1.0, 1e-3};
}

std::vector<DriveFrame> orbit_frames(double radius, int n, LmMode mode) {
  LmConfig c;
  c.center = Vec3(0, 0, 220);
  c.radius = radius;
  c.samples_per_cycle = n;
  c.mode = mode;
  if (mode == LmMode::multi) {
    c.foci_count = 4;
    c.foci_spacing = 3.0;
  }
  const Trajectory t = lm_s_trajectory(c);
  if (mode == LmMode::multi) {
    const FociSchedule s = lm_m_schedule(c);
    return trajectory_to_drive_stream(t, &s, default_array(), Combiner::complex);
  }
  return trajectory_to_drive_stream(t, nullptr, default_array(), Combiner::complex);
}

FieldGrid synthetic(std::size_t nu, std::size_t nv, const std::vector<double>& v) {
  FieldGrid g;
  g.grid.nu = nu;
  g.grid.nv = nv;
  g.grid.spacing = 1.0;
  g.values = v;
  return g;
}

}  // namespace

TEST_CASE("on-axis emitter driven at -k r arrives with zero phase") {
  const TransducerArray a = small_array({Vec3::Zero()});
  const Vec3 p(0, 0, 123.4);
  const DriveFrame f = focus_frame(a, p);
  const ComplexPressure v = complex_pressure(a, f, p);
  CHECK(std::abs(std::arg(v)) < 1e-9);
  CHECK(std::abs(v) == doctest::Approx(1.0 / 123.4).epsilon(1e-12));
}

TEST_CASE("two equidistant in-phase emitters double the amplitude") {
  const TransducerArray one = small_array({Vec3(-5, 0, 0)});
  const TransducerArray two = small_array({Vec3(-5, 0, 0), Vec3(5, 0, 0)});
  const Vec3 p(0, 0, 80);
  const DriveFrame f1{PhaseVector({0.0}), 1.0, 1.0};
  const DriveFrame f2{PhaseVector({0.0, 0.0}), 1.0, 1.0};
  CHECK(std::abs(complex_pressure(two, f2, p)) ==
        doctest::Approx(2.0 * std::abs(complex_pressure(one, f1, p))).epsilon(1e-12));
}

TEST_CASE("points behind an emitter receive nothing from it") {
  const TransducerArray a = small_array({Vec3::Zero()});
  const DriveFrame f{PhaseVector({0.0}), 1.0, 1.0};
  CHECK(std::abs(complex_pressure(a, f, Vec3(0, 0, -50))) == 0.0);
  CHECK(std::abs(complex_pressure(a, f, Vec3(50, 0, 0))) == 0.0);  // grazing counts as behind
  const Vec3 q(50, 0, 5);
  CHECK(std::abs(complex_pressure(a, f, q)) ==
        doctest::Approx(directivity(std::atan2(50.0, 5.0), a) / q.norm()).epsilon(1e-5));
}

TEST_CASE("points closer than r_min are rejected") {
  const TransducerArray a = small_array({Vec3::Zero()});
  const DriveFrame f{PhaseVector({0.0}), 1.0, 1.0};
  CHECK_THROWS_AS(complex_pressure(a, f, Vec3(0, 0, 0.5)), NumericalError);
  CHECK_NOTHROW(complex_pressure(a, f, Vec3(0, 0, 0.5), 0.1));
  GridSpec g = GridSpec::centered(Vec3(0, 0, 0.2), 2.0, 0.5);
  CHECK_THROWS_AS(radiation_pressure_map(a, f, g), NumericalError);
}

TEST_CASE("field is linear in the complex drive") {
  const TransducerArray& a = default_array();
  const Vec3 p(3, -2, 215);
  std::vector<std::complex<double>> d1(a.size()), d2(a.size()), sum(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    d1[i] = std::polar(1.0, 0.01 * i);
    d2[i] = std::polar(0.5, -0.03 * i);
    sum[i] = 2.0 * d1[i] + d2[i];
  }
  const auto lhs = complex_pressure(a, sum, p);
  const auto rhs = 2.0 * complex_pressure(a, d1, p) + complex_pressure(a, d2, p);
  CHECK(std::abs(lhs - rhs) < 1e-12 * std::abs(rhs));
}

TEST_CASE("single focus over the default array") {
  const TransducerArray& a = default_array();
  const Vec3 f(0, 0, 220);
  const DriveFrame d = focus_frame(a, f);
  CHECK(std::abs(complex_pressure(a, d, f)) >= 10.0 * std::abs(complex_pressure(a, d, f + Vec3(20, 0, 0))));

  const GridSpec g = GridSpec::centered(f, 16.0, 0.4);
  const FieldGrid m = radiation_pressure_map(a, d, g);
  CHECK(m.normalization == "max");
  CHECK(m.max_value() == 1.0);
  const auto peaks = find_local_maxima(m, 0.5);
  REQUIRE(peaks.size() == 1);
  CHECK((peaks[0].position - f).norm() <= 4.25);
}

TEST_CASE("maps are invariant to a global phase offset") {
  const TransducerArray& a = default_array();
  const DriveFrame d = focus_frame(a, Vec3(2, 1, 220));
  std::vector<double> shifted(d.phases.values());
  for (double& x : shifted) x += 1.2345;
  const DriveFrame s{PhaseVector(shifted), 1.0, 1e-3};
  FieldOptions o;
  o.normalize = false;
  const GridSpec g = GridSpec::centered(Vec3(0, 0, 220), 10.0, 1.0);
  const FieldGrid m1 = radiation_pressure_map(a, d, g, o);
  const FieldGrid m2 = radiation_pressure_map(a, s, g, o);
  for (std::size_t k = 0; k < m1.values.size(); ++k) {
    CHECK(std::abs(m1.values[k] - m2.values[k]) <= 1e-9 * m1.values[k]);
  }
}

TEST_CASE("zero amplitude gives a zero grid") {
  const TransducerArray& a = default_array();
  DriveFrame d = focus_frame(a, Vec3(0, 0, 220));
  d.amplitude = 0.0;
  const FieldGrid m = radiation_pressure_map(a, d, GridSpec::centered(Vec3(0, 0, 220), 4.0, 1.0));
  for (double v : m.values) CHECK(v == 0.0);
  CHECK(m.normalization == "none");
  CHECK(find_local_maxima(m, 0.3).empty());
}

TEST_CASE("results do not depend on the worker count") {
  const TransducerArray& a = default_array();
  const auto frames = orbit_frames(3.0, 12, LmMode::multi);
  const GridSpec g = GridSpec::centered(Vec3(0, 0, 220), 10.0, 0.5);
  FieldOptions one;
  one.workers = 1;
  FieldOptions many;
  many.workers = 5;
  CHECK(time_averaged_map(a, frames, g, one).values == time_averaged_map(a, frames, g, many).values);
  CHECK(radiation_pressure_map(a, frames[0], g, one).values ==
        radiation_pressure_map(a, frames[0], g, many).values);
}

TEST_CASE("one-frame time average is the instant map") {
  const TransducerArray& a = default_array();
  const DriveFrame d = focus_frame(a, Vec3(1, 0, 220));
  const GridSpec g = GridSpec::centered(Vec3(0, 0, 220), 8.0, 0.5);
  const std::vector<DriveFrame> one{d};
  const FieldGrid inst = radiation_pressure_map(a, d, g);
  const FieldGrid avg = time_averaged_map(a, one, g);
  CHECK(inst.values == avg.values);
  CHECK(inst.quantity == avg.quantity);

  const std::vector<DriveFrame> repeated(3, d);
  const FieldGrid rep = time_averaged_map(a, repeated, g);
  for (std::size_t k = 0; k < rep.values.size(); ++k) {
    CHECK(rep.values[k] == doctest::Approx(inst.values[k]).epsilon(1e-12));
  }
}

TEST_CASE("time average weights frames by dwell") {
  const TransducerArray& a = default_array();
  DriveFrame f1 = focus_frame(a, Vec3(-3, 0, 220));
  DriveFrame f2 = focus_frame(a, Vec3(3, 0, 220));
  f1.duration = 3.0;
  f2.duration = 1.0;
  const Vec3 p(-1, 0.5, 220);
  const std::vector<DriveFrame> frames{f1, f2};
  const GridSpec g{p, Vec3::UnitX(), Vec3::UnitY(), 1.0, 1, 1};
  FieldOptions o;
  o.normalize = false;
  const double expected = 0.75 * std::norm(complex_pressure(a, f1, p)) +
                          0.25 * std::norm(complex_pressure(a, f2, p));
  CHECK(time_averaged_map(a, frames, g, o).values[0] == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("dft_power against closed forms") {
  const std::size_t n = 16;
  std::vector<double> s(n);
  for (std::size_t t = 0; t < n; ++t) s[t] = 2.0 + std::cos(kTwoPi * 3.0 * t / n);
  const auto p = dft_power(s);
  CHECK(p[0] == doctest::Approx(32.0 * 32.0));
  CHECK(p[3] == doctest::Approx(64.0));
  CHECK(p[13] == doctest::Approx(64.0));
  CHECK(p[1] == doctest::Approx(0.0).epsilon(1e-12).scale(1.0));
}

TEST_CASE("spectrum bin arithmetic") {
  std::vector<DriveFrame> frames(82, DriveFrame{PhaseVector(), 1.0, 1.0 / 410.0});
  CHECK(spectrum_bin(frames, 5.0) == 1);
  CHECK(spectrum_bin(frames, 10.0) == 2);
  CHECK(spectrum_bin(frames, 0.0) == 0);
  CHECK(spectrum_bin(frames, 205.0) == 41);
  CHECK_THROWS_AS(spectrum_bin(frames, 7.0), ConfigError);
  CHECK_THROWS_AS(spectrum_bin(frames, 210.0), ConfigError);
  frames[3].duration *= 2.0;
  CHECK_THROWS_AS(spectrum_bin(frames, 5.0), ConfigError);
}

TEST_CASE("spectrum map agrees with per-point DFT and Parseval") {
  const TransducerArray& a = default_array();
  const auto frames = orbit_frames(3.0, 20, LmMode::single);
  const GridSpec g = GridSpec::centered(Vec3(0, 0, 220), 8.0, 2.0);
  FieldOptions o;
  o.normalize = false;
  const double cycle = 1.0 / (frames.size() * frames[0].duration);
  const FieldGrid s1 = temporal_spectrum_map(a, frames, g, cycle, o);
  const FieldGrid s0 = temporal_spectrum_map(a, frames, g, 0.0, o);
  const FieldGrid avg = time_averaged_map(a, frames, g, o);
  const double n = static_cast<double>(frames.size());
  for (std::size_t i = 0; i < g.nu; ++i) {
    for (std::size_t j = 0; j < g.nv; ++j) {
      const auto series = pressure_time_series(a, frames, g.point(i, j));
      const auto power = dft_power(series);
      CHECK(s1.at(i, j) == doctest::Approx(power[1]).epsilon(1e-9));
      // DC bin is the squared series sum: (N * mean)^2.
      CHECK(s0.at(i, j) == doctest::Approx(n * n * avg.at(i, j) * avg.at(i, j)).epsilon(1e-9));
      const double mean = std::accumulate(series.begin(), series.end(), 0.0) / n;
      double var = 0.0;
      for (double x : series) var += (x - mean) * (x - mean);
      const double total = std::accumulate(power.begin(), power.end(), 0.0);
      CHECK(std::abs(total - (n * var + power[0])) <= 1e-6 * total);
    }
  }
}

TEST_CASE("static drive has no power off DC") {
  const TransducerArray& a = default_array();
  const std::vector<DriveFrame> frames(8, focus_frame(a, Vec3(0, 0, 220)));
  const GridSpec g = GridSpec::centered(Vec3(0, 0, 220), 4.0, 1.0);
  FieldOptions o;
  o.normalize = false;
  const double cycle = 1.0 / (8 * frames[0].duration);
  const FieldGrid s = temporal_spectrum_map(a, frames, g, 2.0 * cycle, o);
  const FieldGrid dc = temporal_spectrum_map(a, frames, g, 0.0, o);
  for (std::size_t k = 0; k < s.values.size(); ++k) CHECK(s.values[k] <= 1e-20 * dc.values[k]);
}

TEST_CASE("disk quadrature") {
  DiskProbe p;
  p.center = Vec3(1, 2, 3);
  p.normal = axis_angle_rotation(Vec3::UnitX(), 40.0) * Vec3::UnitZ();
  const auto s = disk_samples(p);
  CHECK(s.size() == doctest::Approx(1000).epsilon(0.02));
  double area = 0.0;
  double second = 0.0;
  for (const DiskSample& d : s) {
    const Vec3 r = d.position - p.center;
    CHECK(std::abs(r.dot(p.normal)) < 1e-12);
    CHECK(r.norm() < p.radius);
    area += d.weight;
    second += d.weight * r.squaredNorm();
  }
  CHECK(area == doctest::Approx(kPi * 7.5 * 7.5).epsilon(1e-12));
  // Polar moment of a disk: pi R^4 / 2.
  CHECK(second == doctest::Approx(kPi * std::pow(7.5, 4) / 2.0).epsilon(5e-3));
  DiskProbe bad = p;
  bad.radius = 0.0;
  CHECK_THROWS_AS(disk_samples(bad), ConfigError);
}

TEST_CASE("integrated force") {
  const TransducerArray& a = default_array();
  DriveFrame d = focus_frame(a, Vec3(0, 0, 220));
  DiskProbe p;
  p.center = Vec3(0, 0, 220);
  const double f = integrated_force(a, d, p);
  CHECK(f > 0.0);
  d.amplitude = 2.0;
  CHECK(integrated_force(a, d, p) == doctest::Approx(4.0 * f).epsilon(1e-12));
  d.amplitude = 0.0;
  CHECK(integrated_force(a, d, p) == 0.0);
}

TEST_CASE("local maxima on synthetic grids") {
  CHECK(find_local_maxima(synthetic(4, 4, std::vector<double>(16, 1.0)), 0.0).empty());

  std::vector<double> v(7 * 7, 0.0);
  v[2 * 7 + 2] = 1.0;
  v[4 * 7 + 5] = 0.5;
  v[5 * 7 + 1] = 0.2;
  v[0 * 7 + 3] = 2.0;  // on the border: never reported
  const auto m = find_local_maxima(synthetic(7, 7, v), 0.1);
  REQUIRE(m.size() == 3);
  CHECK(m[0].i == 2);
  CHECK(m[0].j == 2);
  CHECK(m[1].value == 0.5);
  CHECK(find_local_maxima(synthetic(7, 7, v), 0.2).size() == 2);

  // A two-sample plateau is not a strict maximum.
  std::vector<double> flat(5 * 5, 0.0);
  flat[2 * 5 + 2] = 1.0;
  flat[2 * 5 + 3] = 1.0;
  CHECK(find_local_maxima(synthetic(5, 5, flat), 0.0).size() <= 1);
}

TEST_CASE("grid validation") {
  GridSpec g = GridSpec::centered(Vec3::Zero(), 40.0, 0.2);
  CHECK(g.nu == 201);
  CHECK(g.nv == 201);
  CHECK((g.point(100, 100) - Vec3::Zero()).norm() < 1e-12);
  CHECK_THROWS_AS(GridSpec::centered(Vec3::Zero(), 40.0, 0.0), ConfigError);
  g.axis_u = Vec3(2, 0, 0);
  CHECK_THROWS_AS(g.validate(), ConfigError);
}
