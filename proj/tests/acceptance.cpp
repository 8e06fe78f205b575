// Acceptance criteria 1-9: one PASS/FAIL line each.
//
// Exit status is 0 when the failing set equals the documented known failures
// (criteria that the physics of the modelled array cannot meet; see README),
// and 1 on any other outcome, including a known failure that starts passing.

#include "lmstim/commands.hpp"
#include "lmstim/formats.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <set>
#include <sstream>
#include <string>

using namespace lmstim;

namespace {

const std::set<int> kKnownFailures{2, 9};

std::set<int> failures;

void report(int id, bool pass, const std::string& detail) {
  std::printf("criterion %d: %s | %s\n", id, pass ? "PASS" : "FAIL", detail.c_str());
  if (!pass) failures.insert(id);
}

std::string fmt(double v) { return format_sig9(v); }

std::string peaks_detail(const PeakReport& r) {
  std::ostringstream o;
  o << r.match.peak_count << " maxima, distances to scheduled foci [";
  for (std::size_t i = 0; i < r.match.distances.size(); ++i) {
    o << (i ? " " : "") << (std::isfinite(r.match.distances[i]) ? fmt(r.match.distances[i]) : "none");
  }
  o << "] mm";
  return o.str();
}

bool criterion2(const FigureMetrics& m, std::size_t foci) {
  return m.multi_complex.match.peak_count == foci && m.multi_complex.match.all_within;
}

// Criterion 7 pieces; each returns an empty string on success.
std::string check_invariants(const TransducerArray& array) {
  std::ostringstream bad;
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> g(0.0, 40.0);

  for (int k = 0; k < 500; ++k) {
    const ReflectionPlane pl{Vec3(g(rng), g(rng), g(rng)), Vec3(g(rng), g(rng), g(rng)).normalized()};
    const Vec3 p(g(rng), g(rng), g(rng));
    const Vec3 q(g(rng), g(rng), g(rng));
    const double inv = (mirror_point(mirror_point(p, pl), pl) - p).norm();
    const double iso = std::abs((mirror_point(p, pl) - mirror_point(q, pl)).norm() - (p - q).norm());
    if (inv > 1e-9 || iso > 1e-9) {
      bad << "mirror ";
      break;
    }
  }

  for (double a : {2.0, 3.0, 6.0}) {
    LmConfig c;
    c.center = Vec3(0, 0, 220);
    c.radius = a;
    c.samples_per_cycle = samples_for_target_step(a, 0.23);
    const Trajectory t = lm_s_trajectory(c);
    const double chord = 2.0 * a * std::sin(kPi / c.samples_per_cycle);
    for (std::size_t j = 0; j < t.positions.size(); ++j) {
      if (std::abs((t.positions[j] - c.center).norm() - a) > 1e-9) bad << "circle ";
      const Vec3& n = t.positions[(j + 1) % t.positions.size()];
      if (std::abs((n - t.positions[j]).norm() - chord) > 1e-9) bad << "chord ";
    }
  }

  const FociSchedule s = make_schedule(164, 13, 4);
  for (std::size_t j = 0; j < 164; ++j) {
    for (std::size_t i = 0; i < 4; ++i) {
      if (s.steps[(j + 1) % 164][i] != (s.steps[j][i] + 1) % 164) bad << "schedule ";
    }
  }

  const Vec3 f(3, -4, 215);
  const PhaseVector ph = single_focus_phases(array, {f});
  for (std::size_t i = 0; i < array.size(); ++i) {
    const double r = (f - array.transducers()[i].position).norm();
    if (std::abs(std::remainder(array.wavenumber() * r + ph[i], kTwoPi)) > 1e-9) {
      bad << "arrival-phase ";
      break;
    }
  }

  {
    std::vector<double> shifted(ph.values());
    for (double& x : shifted) x += 2.5;
    const DriveFrame d1{ph, 1.0, 1.0};
    const DriveFrame d2{PhaseVector(shifted), 1.0, 1.0};
    FieldOptions o;
    o.normalize = false;
    const GridSpec grid = GridSpec::centered(f, 10.0, 1.0);
    const FieldGrid a = radiation_pressure_map(array, d1, grid, o);
    const FieldGrid b = radiation_pressure_map(array, d2, grid, o);
    for (std::size_t k = 0; k < a.values.size(); ++k) {
      if (std::abs(a.values[k] - b.values[k]) > 1e-9 * a.values[k]) {
        bad << "global-phase ";
        break;
      }
    }
  }

  {
    LmConfig c;
    c.center = Vec3(0, 0, 220);
    c.radius = 3.0;
    c.samples_per_cycle = 82;
    const auto frames = trajectory_to_drive_stream(lm_s_trajectory(c), nullptr, array, Combiner::complex);
    const GridSpec grid = GridSpec::centered(c.center, 8.0, 1.0);
    for (std::size_t i = 0; i < grid.nu; ++i) {
      for (std::size_t j = 0; j < grid.nv; ++j) {
        const auto series = pressure_time_series(array, frames, grid.point(i, j));
        const auto power = dft_power(series);
        double mean = 0.0;
        for (double x : series) mean += x;
        mean /= static_cast<double>(series.size());
        double var = 0.0;
        for (double x : series) var += (x - mean) * (x - mean);
        double total = 0.0;
        for (double p : power) total += p;
        if (std::abs(total - (series.size() * var + power[0])) > 1e-6 * total) bad << "parseval ";
      }
    }
  }

  {
    GaussianSmoother sm;
    for (int i = 0; i < 30; ++i) {
      if ((sm.push(Vec3(1.5, -2, 7)) - Vec3(1.5, -2, 7)).norm() > 1e-12) {
        bad << "smoother-dc ";
        break;
      }
    }
  }

  {
    // Replay: identical inputs give byte-identical serialized outputs, also
    // across worker counts.
    auto field_text = [&](unsigned workers) {
      FieldOptions o;
      o.workers = workers;
      LmConfig c;
      c.center = Vec3(0, 0, 220);
      c.radius = 4.0;
      c.samples_per_cycle = 40;
      c.mode = LmMode::multi;
      c.foci_count = 4;
      c.foci_spacing = 3.0;
      const FociSchedule sc = lm_m_schedule(c);
      const auto frames = trajectory_to_drive_stream(lm_s_trajectory(c), &sc, array, Combiner::complex);
      std::ostringstream ss;
      write_field_csv(ss, time_averaged_map(array, frames, GridSpec::centered(c.center, 10.0, 0.5), o));
      return ss.str();
    };
    auto contact_text = [] {
      FingerModel finger;
      finger.noise_sigma = 0.3;
      finger.velocity = Vec3(2, 0, 0);
      DepthStreamSpec spec;
      spec.duration = 0.5;
      LmConfig c;
      c.samples_per_cycle = 82;
      const RenderLog log = run_render_loop(synth_depth_stream(finger, spec), DetectionBox{}, c, 0.5);
      std::ostringstream ss;
      write_center_timeline(ss, log.centers);
      write_drive_log(ss, log.drives);
      return ss.str();
    };
    if (field_text(1) != field_text(3) || field_text(2) != field_text(2)) bad << "replay-field ";
    if (contact_text() != contact_text()) bad << "replay-contact ";
  }
  return bad.str();
}

}  // namespace

int main() {
  const TransducerArray array = build_array(ArrayLayoutConfig::paper_default());
  const StimulusConfig base;  // centre (0,0,220), 5 Hz, 0.23 mm step, 4 foci 3 mm apart
  const ProbeConfig probe;    // 7.5 mm radius, 40 deg tilt
  const double half_lambda = 0.5 * wavelength(array);

  // 1. Single focus on a 40 mm, 0.2 mm grid.
  {
    const Vec3 target(0, 0, 220);
    const GridSpec grid = GridSpec::centered(target, 40.0, 0.2);
    const DriveFrame d{single_focus_phases(array, {target}), 1.0, 1.0};
    FieldOptions one;
    one.workers = 1;
    FieldOptions many;
    many.workers = 4;
    const auto t0 = std::chrono::steady_clock::now();
    const FieldGrid a = radiation_pressure_map(array, d, grid, one);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const FieldGrid b = radiation_pressure_map(array, d, grid, many);
    std::size_t best = 0;
    for (std::size_t k = 1; k < a.values.size(); ++k) {
      if (a.values[k] > a.values[best]) best = k;
    }
    const Vec3 peak = grid.point(best / grid.nv, best % grid.nv);
    const double dist = (peak - target).norm();
    const bool same = a.values == b.values;
    report(1, dist <= half_lambda && seconds <= 60.0 && same,
           "global peak " + fmt(dist) + " mm from target (limit " + fmt(half_lambda) + "), " +
               fmt(seconds) + " s on one worker, 1 vs 4 workers identical: " + (same ? "yes" : "no"));
  }

  FigureOptions opts;
  opts.instant_extent = 40.0;
  opts.instant_spacing = 0.2;
  opts.average_extent = 40.0;
  opts.average_spacing = 0.5;
  const FigureMetrics m = compute_figure_metrics(array, base, probe, opts);

  // 2. Frozen LM-M maxima.
  const bool c2 = criterion2(m, static_cast<std::size_t>(base.foci_count));
  report(2, c2, "LM-M A=6 complex: " + peaks_detail(m.multi_complex) + ", need exactly 4 within " +
                    fmt(half_lambda));

  // 3. Force equality and shift.
  report(3, m.force_ratio >= 0.85 && m.force_ratio <= 1.18 && m.force_shift_change < 0.15,
         "ratio LM-M/single " + fmt(m.force_ratio) + " in [0.85, 1.18], 6 mm shift change " +
             fmt(m.force_shift_change) + " < 0.15 (probe-only shift, recorded: " +
             fmt(m.force_probe_shift_change) + ")");

  // 4. Timing arithmetic.
  {
    const int n1 = samples_for_target_step(3.0, 0.23);
    const double d1 = step_width(3.0, n1);
    const DwellTiming t1 = dwell_time(n1, 5.0);
    const int n2 = samples_for_target_step(6.0, 4.0);
    const DwellTiming t2 = dwell_time(n2, 25.0);
    const bool ok = n1 == 82 && std::abs(d1 - kTwoPi * 3.0 / 82.0) <= 1e-12 &&
                    std::abs(d1 - 0.2299) < 5e-5 && std::abs(t1.dwell - 1.0 / 410.0) <= 1e-12 &&
                    std::abs(t1.dwell - 2.439e-3) < 5e-7 && std::abs(t1.update_rate - 410.0) <= 1e-12 &&
                    !t1.rate_violation && n2 == 10 && std::abs(t2.update_rate - 250.0) <= 1e-12 &&
                    !t2.rate_violation;
    report(4, ok,
           "N=" + std::to_string(n1) + " d_LM=" + fmt(d1) + " t_d=" + fmt(t1.dwell) + " rate=" +
               fmt(t1.update_rate) + " | N=" + std::to_string(n2) + " rate=" + fmt(t2.update_rate));
  }

  // 5. Spectrum maxima on the orbit.
  {
    bool ok = m.spectra.size() == 2;
    std::ostringstream o;
    for (const SpectrumReport& s : m.spectra) {
      ok = ok && !s.peak_radii.empty() && s.center_value < 0.5 * s.orbit_max;
      o << "LM-" << to_string(s.mode) << " radii [";
      for (std::size_t i = 0; i < s.peak_radii.size(); ++i) {
        ok = ok && std::abs(s.peak_radii[i] - 3.0) <= 0.5;
        o << (i ? " " : "") << fmt(s.peak_radii[i]);
      }
      o << "] centre/orbit max " << fmt(s.center_value / s.orbit_max) << "; ";
    }
    report(5, ok, o.str());
  }

  // 6. Time-average annulus and spread.
  {
    auto find = [&](LmMode mode, double a) -> const TimeAverageReport& {
      for (const TimeAverageReport& r : m.averages) {
        if (r.mode == mode && r.radius == a) return r;
      }
      throw std::logic_error("missing time-average case");
    };
    bool ok = true;
    std::ostringstream o;
    for (double a : {5.0, 6.0}) {
      const auto& r = find(LmMode::single, a);
      ok = ok && r.orbit_mean > r.center_value;
      o << "S A=" << a << " orbit " << fmt(r.orbit_mean) << " > centre " << fmt(r.center_value) << "; ";
    }
    for (double a : {3.0, 4.0}) {
      const auto& s = find(LmMode::single, a);
      const auto& mm = find(LmMode::multi, a);
      ok = ok && mm.second_moment <= s.second_moment;
      o << "A=" << a << " spread M " << fmt(mm.second_moment) << " <= S " << fmt(s.second_moment) << "; ";
    }
    report(6, ok, o.str());
  }

  // 7. Invariant suites.
  {
    const std::string bad = check_invariants(array);
    report(7, bad.empty(), bad.empty() ? "mirror, circle, chord, schedule, arrival phase, global phase, "
                                         "Parseval, smoother DC, replay"
                                       : "violated: " + bad);
  }

  // 8. Index example and its documentation in the validation report.
  {
    const IndexExample ex = index_example();
    const std::vector<std::size_t> expected{1, 14, 27, 40};
    const std::string rep = build_validation_report(RunConfig{}, false).to_json();
    const bool documented = rep.find("\"published\"") != std::string::npos &&
                            rep.find("\"agree\": false") != std::string::npos;
    std::ostringstream o;
    o << "formula (";
    for (std::size_t i = 0; i < ex.formula.size(); ++i) o << (i ? ", " : "") << ex.formula[i];
    o << ") vs published (1, 15, 29, 37), divergence in validation report: " << (documented ? "yes" : "no");
    report(8, ex.formula == expected && ex.published != expected && documented, o.str());
  }

  // 9. Combiner divergence.
  {
    const bool reported = std::isfinite(m.combiner_divergence) && m.combiner_divergence > 0.0;
    const bool literal_ok = m.multi_literal.match.peak_count == 4 && m.multi_literal.match.all_within;
    report(9, reported && c2,
           "L2 " + fmt(m.combiner_divergence) + ", complex map meets criterion 2: " +
               (c2 ? "yes" : "no") + ", literal map (recorded only): " + peaks_detail(m.multi_literal) +
               (literal_ok ? " meets" : " does not meet") + " criterion 2");
  }

  std::printf("failed: ");
  for (int f : failures) std::printf("%d ", f);
  std::printf("| documented known failures: ");
  for (int f : kKnownFailures) std::printf("%d ", f);
  std::printf("\n");
  return failures == kKnownFailures ? 0 : 1;
}
