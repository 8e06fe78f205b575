#include "lmstim/commands.hpp"

#include "lmstim/formats.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <utility>

namespace lmstim {

using nlohmann::ordered_json;

namespace {

std::filesystem::path out_dir(const RunConfig& c) { return c.output_dir; }

FieldOptions field_options(const RunConfig& c) {
  FieldOptions o;
  o.workers = c.workers;
  return o;
}

template <typename Writer>
std::string render(Writer&& w) {
  std::ostringstream ss;
  w(ss);
  return ss.str();
}

struct MapFiles {
  std::string csv;
  std::string pgm;
  std::string peaks;
};

MapFiles render_map(const FieldGrid& map, double prominence) {
  MapFiles f;
  f.csv = render([&](std::ostream& o) { write_field_csv(o, map); });
  f.pgm = render([&](std::ostream& o) { write_pgm(o, map); });
  f.peaks = render([&](std::ostream& o) { write_peaks(o, find_local_maxima(map, prominence)); });
  return f;
}

void write_map(const std::filesystem::path& dir, const std::string& name, const MapFiles& f) {
  write_text_file(dir / (name + ".csv"), f.csv);
  write_text_file(dir / (name + ".pgm"), f.pgm);
  write_text_file(dir / (name + ".peaks.txt"), f.peaks);
}

void print_timing(std::ostream& out, const PreparedStimulus& s) {
  out << "mode = " << to_string(s.lm.mode) << '\n'
      << "N = " << s.lm.samples_per_cycle << '\n'
      << "d_LM_mm = " << format_sig9(step_width(s.lm.radius, s.lm.samples_per_cycle)) << '\n'
      << "t_d_s = " << format_sig9(s.timing.dwell) << '\n'
      << "update_rate_hz = " << format_sig9(s.timing.update_rate) << '\n';
  if (s.schedule) out << "stride = " << s.schedule->stride << '\n';
  if (s.timing.rate_violation) {
    out << "warning: update rate " << format_sig9(s.timing.update_rate)
        << " Hz exceeds the " << kUpdateRateLimit << " Hz hardware limit\n";
  }
}

ordered_json vec_json(const Vec3& v) { return ordered_json::array({v.x(), v.y(), v.z()}); }

double in_plane_distance(const GridSpec& g, const Vec3& p, const Vec3& c) {
  const Vec3 d = p - c;
  const double du = d.dot(g.axis_u.normalized());
  const double dv = d.dot(g.axis_v.normalized());
  return std::hypot(du, dv);
}

}  // namespace

FieldKind field_kind_from_string(const std::string& name) {
  if (name == "instant") return FieldKind::instant;
  if (name == "time_avg") return FieldKind::time_avg;
  if (name == "spectrum") return FieldKind::spectrum;
  throw ConfigError("unknown field kind '" + name + "' (instant, time_avg, spectrum)");
}

const char* to_string(FieldKind kind) {
  switch (kind) {
    case FieldKind::instant: return "instant";
    case FieldKind::time_avg: return "time_avg";
    case FieldKind::spectrum: return "spectrum";
  }
  return "?";
}

void cmd_traj(const RunConfig& config, std::ostream& out) {
  const PreparedStimulus s = prepare_stimulus(config.stimulus);
  const std::string traj = render([&](std::ostream& o) { write_trajectory_table(o, s.trajectory); });
  std::string sched;
  if (s.schedule) sched = render([&](std::ostream& o) { write_schedule(o, *s.schedule); });

  write_text_file(out_dir(config) / "trajectory.txt", traj);
  if (s.schedule) write_text_file(out_dir(config) / "schedule.txt", sched);
  print_timing(out, s);
}

void cmd_drive(const RunConfig& config, std::ostream& out) {
  const PreparedStimulus s = prepare_stimulus(config.stimulus);
  const TransducerArray array = build_array(config.array);
  const auto frames =
      trajectory_to_drive_stream(s.trajectory, s.schedule_ptr(), array, config.stimulus.combiner);
  const std::string text = render([&](std::ostream& o) { write_drive_stream(o, frames); });
  write_text_file(out_dir(config) / "drive.txt", text);
  print_timing(out, s);
  out << "frames = " << frames.size() << "\nemitters = " << array.size() << '\n';
}

void cmd_field(const RunConfig& config, const FieldRequest& request, std::ostream& out) {
  const PreparedStimulus s = prepare_stimulus(config.stimulus);
  const TransducerArray array = build_array(config.array);
  const GridSpec grid = config.grid.to_spec(request.focus.value_or(s.driven_center));
  grid.validate();
  if (request.focus && request.kind != FieldKind::instant) {
    throw ConfigError("a static focus only supports instant maps");
  }
  if (!(request.prominence >= 0.0 && request.prominence <= 1.0)) {
    throw ConfigError("peak prominence must lie in [0, 1]");
  }
  if (request.kind == FieldKind::spectrum && !request.target_frequency) {
    throw ConfigError("spectrum maps need a target frequency");
  }
  if (request.kind == FieldKind::instant &&
      (request.step < 1 || request.step > static_cast<std::size_t>(s.lm.samples_per_cycle))) {
    throw ConfigError("instant step must lie in [1, N]");
  }
  const auto frames =
      trajectory_to_drive_stream(s.trajectory, s.schedule_ptr(), array, config.stimulus.combiner);
  if (request.kind == FieldKind::spectrum) spectrum_bin(frames, *request.target_frequency);

  FieldGrid map;
  switch (request.kind) {
    case FieldKind::instant:
      map = radiation_pressure_map(
          array,
          request.focus ? drive_for_foci(array, std::vector<FocusSpec>{{*request.focus}},
                                         config.stimulus.combiner, s.timing.dwell)
                        : frames[request.step - 1],
          grid, field_options(config));
      break;
    case FieldKind::time_avg:
      map = time_averaged_map(array, frames, grid, field_options(config));
      break;
    case FieldKind::spectrum:
      map = temporal_spectrum_map(array, frames, grid, *request.target_frequency,
                                  field_options(config));
      break;
  }
  const MapFiles files = render_map(map, request.prominence);
  const std::string name = std::string("field_") + to_string(request.kind);
  write_map(out_dir(config), name, files);
  const auto peaks = find_local_maxima(map, request.prominence);
  out << "kind = " << to_string(request.kind) << "\ngrid = " << grid.nu << " x " << grid.nv
      << "\npeaks = " << peaks.size() << '\n';
  for (const LocalMaximum& p : peaks) {
    out << "peak " << format_sig9(p.position.x()) << ' ' << format_sig9(p.position.y()) << ' '
        << format_sig9(p.position.z()) << ' ' << format_sig9(p.value) << '\n';
  }
}

void cmd_contact(const RunConfig& config, const std::filesystem::path& stream_path,
                 std::ostream& out) {
  const PreparedStimulus s = prepare_stimulus(config.stimulus);
  const ContactConfig& cc = config.contact;
  if (!(cc.duration > 0.0)) throw ConfigError("contact duration must be positive");
  const DepthStream stream = read_depth_stream(stream_path);

  RenderLoopOptions opts;
  opts.fps = stream.fps;
  opts.smoothing_window = cc.smoothing_window;
  opts.smoothing_sigma = cc.smoothing_sigma;
  opts.dropout_periods = cc.dropout_periods;
  opts.combiner = config.stimulus.combiner;
  const RenderLog log = run_render_loop(stream.frames, cc.box, s.lm, cc.duration, opts);

  const std::string centers = render([&](std::ostream& o) { write_center_timeline(o, log.centers); });
  const std::string drives = render([&](std::ostream& o) { write_drive_log(o, log.drives); });
  write_text_file(out_dir(config) / "centers.txt", centers);
  write_text_file(out_dir(config) / "drive_log.txt", drives);

  std::size_t contacts = 0;
  std::size_t active = 0;
  for (const auto& c : log.centers) contacts += c.contact ? 1 : 0;
  for (const auto& d : log.drives) active += d.output_on ? 1 : 0;
  out << "camera_frames = " << log.centers.size() << "\ncontact_frames = " << contacts
      << "\ndrive_ticks = " << log.drives.size() << "\nactive_ticks = " << active
      << "\ncamera_rate_hz = " << format_sig9(log.centers.size() / cc.duration)
      << "\ndrive_rate_hz = " << format_sig9(log.drives.size() / cc.duration) << '\n';
}

void cmd_synth_depth(const RunConfig& config, const FingerModel& finger, std::ostream& out) {
  DepthStreamSpec spec;
  spec.fps = config.contact.fps;
  spec.duration = config.contact.duration;
  const auto frames = synth_depth_stream(finger, spec);
  if (frames.empty()) throw ConfigError("synthetic stream would have no frames");
  const auto path = out_dir(config) / "depth.lmds";
  write_depth_stream(path, frames, spec.fps);
  out << "frames = " << frames.size() << "\npath = " << path.string() << '\n';
}

IndexExample index_example() {
  IndexExample ex;
  const std::size_t stride = foci_stride(ex.spacing, step_width(ex.radius, ex.samples));
  const FociSchedule sched = make_schedule(static_cast<std::size_t>(ex.samples), stride,
                                           static_cast<std::size_t>(ex.foci));
  for (std::size_t idx : sched.steps.front()) ex.formula.push_back(idx + 1);
  return ex;
}

ValidationReport build_validation_report(const RunConfig& config, bool with_divergence) {
  ValidationReport r;
  const StimulusConfig& st = config.stimulus;
  try {
    r.samples = st.resolved_samples();
    r.step_width = step_width(st.radius, *r.samples);
    const DwellTiming t = dwell_time(*r.samples, st.lm_frequency);
    r.dwell = t.dwell;
    r.update_rate = t.update_rate;
    r.update_rate_ok = !t.rate_violation;
    if (t.rate_violation) {
      r.warnings.push_back("update rate " + format_sig9(t.update_rate) + " Hz exceeds the " +
                           format_sig9(kUpdateRateLimit) + " Hz limit");
    }
    if (st.mode == LmMode::multi) {
      r.stride = foci_stride(st.foci_spacing, *r.step_width);
      r.foci_fit_ok = *r.stride >= 1 &&
                      *r.stride * static_cast<std::size_t>(std::max(st.foci_count, 0)) <
                          static_cast<std::size_t>(*r.samples);
      if (*r.stride == 0) {
        r.errors.push_back("foci spacing below step width");
      } else if (!r.foci_fit_ok) {
        r.errors.push_back("foci do not fit on the orbit (l * N_focus >= N)");
      }
    }
  } catch (const std::exception& e) {
    r.errors.push_back(e.what());
  }

  std::optional<PreparedStimulus> prepared;
  std::optional<TransducerArray> array;
  if (r.errors.empty()) {
    try {
      prepared = prepare_stimulus(st);
    } catch (const std::exception& e) {
      r.errors.push_back(e.what());
    }
  }
  try {
    array.emplace(build_array(config.array));
  } catch (const std::exception& e) {
    r.errors.push_back(std::string("array: ") + e.what());
  }
  std::optional<GridSpec> grid;
  if (prepared) {
    try {
      grid = config.grid.to_spec(prepared->driven_center);
      grid->validate();
    } catch (const std::exception& e) {
      r.errors.push_back(std::string("grid: ") + e.what());
      grid.reset();
    }
  }

  if (with_divergence && prepared && array && grid && st.mode == LmMode::multi) {
    try {
      const auto foci = foci_at_step(prepared->trajectory, prepared->schedule_ptr(), 0);
      std::vector<FocusSpec> specs;
      for (const Vec3& p : foci) specs.push_back({p});
      const FieldOptions fo = field_options(config);
      const FieldGrid a = radiation_pressure_map(
          *array, drive_for_foci(*array, specs, Combiner::complex, prepared->timing.dwell), *grid, fo);
      const FieldGrid b = radiation_pressure_map(
          *array, drive_for_foci(*array, specs, Combiner::literal, prepared->timing.dwell), *grid, fo);
      r.combiner_divergence = normalized_l2_distance(a, b);
    } catch (const std::exception& e) {
      r.errors.push_back(std::string("combiner divergence: ") + e.what());
    }
  }
  r.ok = r.errors.empty();
  return r;
}

std::string ValidationReport::to_json() const {
  ordered_json j;
  j["ok"] = ok;
  auto opt = [](const auto& v) { return v ? ordered_json(*v) : ordered_json(nullptr); };
  j["update_rate_check"] = {{"ok", update_rate_ok},
                            {"samples", opt(samples)},
                            {"step_width_mm", opt(step_width)},
                            {"dwell_s", opt(dwell)},
                            {"update_rate_hz", opt(update_rate)},
                            {"limit_hz", kUpdateRateLimit}};
  j["foci_fit_check"] = {{"ok", foci_fit_ok}, {"stride", opt(stride)}};
  j["combiner_divergence_l2"] = opt(combiner_divergence);
  const IndexExample ex = index_example();
  j["index_example"] = {{"radius_mm", ex.radius},
                        {"samples", ex.samples},
                        {"spacing_mm", ex.spacing},
                        {"foci", ex.foci},
                        {"formula", ex.formula},
                        {"published", ex.published},
                        {"agree", ex.formula == ex.published}};
  j["errors"] = errors;
  j["warnings"] = warnings;
  return j.dump(2) + "\n";
}

std::string ValidationReport::to_text() const {
  std::ostringstream o;
  o << "status: " << (ok ? "ok" : "invalid") << '\n';
  if (samples) o << "N = " << *samples << '\n';
  if (step_width) o << "d_LM_mm = " << format_sig9(*step_width) << '\n';
  if (dwell) o << "t_d_s = " << format_sig9(*dwell) << '\n';
  if (update_rate) {
    o << "update_rate_hz = " << format_sig9(*update_rate)
      << (update_rate_ok ? " (ok)" : " (exceeds limit)") << '\n';
  }
  if (stride) o << "stride = " << *stride << (foci_fit_ok ? " (fits)" : " (does not fit)") << '\n';
  if (combiner_divergence) {
    o << "combiner_divergence_l2 = " << format_sig9(*combiner_divergence) << '\n';
  }
  const IndexExample ex = index_example();
  o << "index_example formula:";
  for (auto i : ex.formula) o << ' ' << i;
  o << " | published:";
  for (auto i : ex.published) o << ' ' << i;
  o << (ex.formula == ex.published ? " (agree)" : " (differ)") << '\n';
  for (const auto& w : warnings) o << "warning: " << w << '\n';
  for (const auto& e : errors) o << "error: " << e << '\n';
  return o.str();
}

int cmd_validate(const RunConfig& config, std::ostream& out) {
  const ValidationReport r = build_validation_report(config);
  write_text_file(out_dir(config) / "validation_report.json", r.to_json());
  write_text_file(out_dir(config) / "validation_report.txt", r.to_text());
  out << r.to_text();
  return r.ok ? 0 : 2;
}

namespace {

StimulusConfig variant(const StimulusConfig& base, LmMode mode, double radius) {
  StimulusConfig s = base;
  s.mode = mode;
  s.radius = radius;
  s.samples.reset();
  s.reflection = false;
  return s;
}

PeakReport peak_report(const FieldGrid& map, std::vector<Vec3> targets, double prominence,
                       double tolerance) {
  PeakReport r;
  r.targets = std::move(targets);
  r.peaks = find_local_maxima(map, prominence);
  r.match = match_peaks(r.peaks, r.targets, tolerance);
  return r;
}

DriveFrame frame_for(const TransducerArray& array, const std::vector<Vec3>& foci,
                     Combiner combiner) {
  std::vector<FocusSpec> specs;
  for (const Vec3& p : foci) specs.push_back({p});
  return drive_for_foci(array, specs, combiner, 1.0);
}

}  // namespace

FigureMetrics compute_figure_metrics(const TransducerArray& array, const StimulusConfig& base,
                                     const ProbeConfig& probe, const FigureOptions& options,
                                     const MapSink& sink) {
  FigureMetrics m;
  m.wavelength = wavelength(array);
  const double tol = 0.5 * m.wavelength;
  const Vec3 c = base.center;
  const GridSpec instant = GridSpec::centered(c, options.instant_extent, options.instant_spacing);
  const GridSpec average = GridSpec::centered(c, options.average_extent, options.average_spacing);
  instant.validate();
  average.validate();
  FieldOptions fo;
  fo.workers = options.workers;
  auto emit = [&](const std::string& name, const FieldGrid& g) {
    if (sink) sink(name, g);
  };

  // Validate every case before the expensive maps.
  const PreparedStimulus multi = prepare_stimulus(variant(base, LmMode::multi, options.multi_radius));
  std::vector<std::pair<std::string, PreparedStimulus>> avg_cases;
  for (double a : options.average_radii) {
    for (LmMode mode : {LmMode::single, LmMode::multi}) {
      std::ostringstream name;
      name << "time_avg_LM-" << to_string(mode) << "_A" << a;
      avg_cases.emplace_back(name.str(), prepare_stimulus(variant(base, mode, a)));
    }
  }
  std::vector<PreparedStimulus> spec_cases;
  for (LmMode mode : {LmMode::single, LmMode::multi}) {
    spec_cases.push_back(prepare_stimulus(variant(base, mode, options.spectrum_radius)));
    spectrum_bin(std::vector<DriveFrame>(static_cast<std::size_t>(spec_cases.back().lm.samples_per_cycle),
                                         DriveFrame{{}, 1.0, spec_cases.back().timing.dwell}),
                 base.lm_frequency);
  }

  // Single focus.
  const DriveFrame single = frame_for(array, {c}, base.combiner);
  const FieldGrid single_map = radiation_pressure_map(array, single, instant, fo);
  m.single = peak_report(single_map, {c}, options.prominence, tol);
  emit("instant_single_focus", single_map);

  // Frozen LM-M, both combiners.
  const auto foci = foci_at_step(multi.trajectory, multi.schedule_ptr(), 0);
  const DriveFrame mc = frame_for(array, foci, Combiner::complex);
  const DriveFrame ml = frame_for(array, foci, Combiner::literal);
  const FieldGrid mc_map = radiation_pressure_map(array, mc, instant, fo);
  const FieldGrid ml_map = radiation_pressure_map(array, ml, instant, fo);
  m.multi_complex = peak_report(mc_map, foci, options.prominence, tol);
  m.multi_literal = peak_report(ml_map, foci, options.prominence, tol);
  m.combiner_divergence = normalized_l2_distance(mc_map, ml_map);
  {
    std::ostringstream n;
    n << "instant_LM-M_A" << options.multi_radius;
    emit(n.str() + "_complex", mc_map);
    emit(n.str() + "_literal", ml_map);
  }

  // Disk-integrated force.
  const DriveFrame multi_drive = frame_for(array, foci, base.combiner);
  m.force_single = integrated_force(array, single, probe.at(c));
  m.force_multi = integrated_force(array, multi_drive, probe.at(centroid(foci)));
  m.force_ratio = m.force_multi / m.force_single;
  const Vec3 shifted = c + options.shift * Vec3::UnitX();
  const double f_moved = integrated_force(array, frame_for(array, {shifted}, base.combiner),
                                          probe.at(shifted));
  m.force_shift_change = std::abs(f_moved / m.force_single - 1.0);
  m.force_probe_shift_change =
      std::abs(integrated_force(array, single, probe.at(shifted)) / m.force_single - 1.0);

  // Time-averaged maps.
  for (const auto& [name, s] : avg_cases) {
    const auto frames =
        trajectory_to_drive_stream(s.trajectory, s.schedule_ptr(), array, base.combiner);
    const FieldGrid map = time_averaged_map(array, frames, average, fo);
    TimeAverageReport r;
    r.mode = s.lm.mode;
    r.radius = s.lm.radius;
    r.samples = s.lm.samples_per_cycle;
    r.center_value = sample_bilinear(map, c);
    r.orbit_mean = circle_mean(map, c, s.lm.radius);
    r.second_moment = second_moment(map, c);
    m.averages.push_back(r);
    emit(name, map);
  }

  // Spectrum maps at the LM frequency.
  for (const PreparedStimulus& s : spec_cases) {
    const auto frames =
        trajectory_to_drive_stream(s.trajectory, s.schedule_ptr(), array, base.combiner);
    const FieldGrid map = temporal_spectrum_map(array, frames, average, base.lm_frequency, fo);
    SpectrumReport r;
    r.mode = s.lm.mode;
    for (const LocalMaximum& p : find_local_maxima(map, options.prominence)) {
      r.peak_radii.push_back(in_plane_distance(average, p.position, c));
    }
    r.center_value = sample_bilinear(map, c);
    r.orbit_max = circle_max(map, c, s.lm.radius);
    m.spectra.push_back(r);
    std::ostringstream n;
    n << "spectrum_" << format_sig9(base.lm_frequency) << "Hz_LM-" << to_string(s.lm.mode) << "_A"
      << s.lm.radius;
    emit(n.str(), map);
  }

  m.indices = index_example();
  return m;
}

namespace {

ordered_json peak_json(const PeakReport& r) {
  ordered_json j;
  j["targets"] = ordered_json::array();
  for (const Vec3& t : r.targets) j["targets"].push_back(vec_json(t));
  j["peaks"] = ordered_json::array();
  for (const LocalMaximum& p : r.peaks) {
    j["peaks"].push_back({{"position_mm", vec_json(p.position)}, {"value", p.value}});
  }
  j["peak_count"] = r.match.peak_count;
  ordered_json d = ordered_json::array();
  for (double x : r.match.distances) d.push_back(std::isfinite(x) ? ordered_json(x) : ordered_json(nullptr));
  j["target_distances_mm"] = d;
  j["all_within_half_wavelength"] = r.match.all_within;
  return j;
}

}  // namespace

std::string figure_report_json(const FigureMetrics& m) {
  ordered_json j;
  j["wavelength_mm"] = m.wavelength;
  j["single_focus"] = peak_json(m.single);
  j["multi_foci_complex"] = peak_json(m.multi_complex);
  j["multi_foci_literal"] = peak_json(m.multi_literal);
  j["combiner_divergence_l2"] = m.combiner_divergence;
  j["force"] = {{"single", m.force_single},
                {"multi", m.force_multi},
                {"ratio_multi_over_single", m.force_ratio},
                {"shift_change_stimulus_and_probe", m.force_shift_change},
                {"shift_change_probe_only", m.force_probe_shift_change}};
  j["spectrum"] = ordered_json::array();
  for (const SpectrumReport& s : m.spectra) {
    j["spectrum"].push_back({{"mode", to_string(s.mode)},
                             {"peak_radii_mm", s.peak_radii},
                             {"center_value", s.center_value},
                             {"orbit_max", s.orbit_max}});
  }
  j["time_average"] = ordered_json::array();
  for (const TimeAverageReport& a : m.averages) {
    j["time_average"].push_back({{"mode", to_string(a.mode)},
                                 {"radius_mm", a.radius},
                                 {"samples", a.samples},
                                 {"center_value", a.center_value},
                                 {"orbit_mean", a.orbit_mean},
                                 {"second_moment_mm2", a.second_moment}});
  }
  j["index_example"] = {{"formula", m.indices.formula},
                        {"published", m.indices.published},
                        {"agree", m.indices.formula == m.indices.published}};
  return j.dump(2) + "\n";
}

std::string figure_report_text(const FigureMetrics& m) {
  std::ostringstream o;
  auto peaks = [&](const char* label, const PeakReport& r) {
    o << label << ": " << r.match.peak_count << " maxima, target distances";
    for (double d : r.match.distances) o << ' ' << format_sig9(d);
    o << (r.match.all_within ? " (all within lambda/2)" : " (not all within lambda/2)") << '\n';
  };
  o << "wavelength_mm = " << format_sig9(m.wavelength) << '\n';
  peaks("single focus", m.single);
  peaks("LM-M frozen, complex", m.multi_complex);
  peaks("LM-M frozen, literal", m.multi_literal);
  o << "combiner_divergence_l2 = " << format_sig9(m.combiner_divergence) << '\n'
    << "force ratio LM-M / single = " << format_sig9(m.force_ratio) << '\n'
    << "force change, 6 mm shift of stimulus and probe = " << format_sig9(m.force_shift_change) << '\n'
    << "force change, 6 mm shift of probe only = " << format_sig9(m.force_probe_shift_change) << '\n';
  for (const SpectrumReport& s : m.spectra) {
    o << "spectrum LM-" << to_string(s.mode) << ": peak radii";
    for (double r : s.peak_radii) o << ' ' << format_sig9(r);
    o << ", center/orbit_max = " << format_sig9(s.center_value / s.orbit_max) << '\n';
  }
  for (const TimeAverageReport& a : m.averages) {
    o << "time_avg LM-" << to_string(a.mode) << " A=" << a.radius << " N=" << a.samples
      << ": center " << format_sig9(a.center_value) << ", orbit mean " << format_sig9(a.orbit_mean)
      << ", second moment " << format_sig9(a.second_moment) << " mm^2\n";
  }
  o << "index example formula:";
  for (auto i : m.indices.formula) o << ' ' << i;
  o << " | published:";
  for (auto i : m.indices.published) o << ' ' << i;
  o << '\n';
  return o.str();
}

void cmd_reproduce_figures(const RunConfig& config, std::ostream& out) {
  const TransducerArray array = build_array(config.array);
  FigureOptions opts;
  opts.instant_extent = config.grid.extent;
  opts.instant_spacing = config.grid.spacing;
  opts.average_extent = config.grid.extent;
  opts.average_spacing = config.grid.spacing;
  opts.workers = config.workers;

  std::vector<std::pair<std::string, MapFiles>> maps;
  const FigureMetrics m = compute_figure_metrics(
      array, config.stimulus, config.probe, opts, [&](const std::string& name, const FieldGrid& g) {
        maps.emplace_back(name, render_map(g, opts.prominence));
      });

  const auto dir = out_dir(config);
  for (const auto& [name, files] : maps) write_map(dir, name, files);
  write_text_file(dir / "report.json", figure_report_json(m));
  out << "maps = " << maps.size() << '\n' << figure_report_text(m);
}

}  // namespace lmstim
