#pragma once

#include "lmstim/analysis.hpp"
#include "lmstim/config.hpp"

#include <array>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace lmstim {

enum class FieldKind { instant, time_avg, spectrum };

FieldKind field_kind_from_string(const std::string& name);
const char* to_string(FieldKind kind);

struct FieldRequest {
  FieldKind kind = FieldKind::instant;
  std::optional<double> target_frequency;  // Hz, spectrum only
  std::size_t step = 1;                    // 1-based drive step for instant maps
  double prominence = 0.3;                 // peak sidecar threshold
  std::optional<Vec3> focus;               // instant map of a static focus instead of the orbit
};

/// Each command validates the whole configuration before writing anything,
/// prints a short summary to `out` and writes its files under config.output_dir.
void cmd_traj(const RunConfig& config, std::ostream& out);
void cmd_drive(const RunConfig& config, std::ostream& out);
void cmd_field(const RunConfig& config, const FieldRequest& request, std::ostream& out);
void cmd_contact(const RunConfig& config, const std::filesystem::path& stream_path,
                 std::ostream& out);
void cmd_synth_depth(const RunConfig& config, const FingerModel& finger, std::ostream& out);

struct ValidationReport {
  bool ok = true;
  std::vector<std::string> errors;
  std::vector<std::string> warnings;

  std::optional<int> samples;
  std::optional<double> step_width;
  std::optional<double> dwell;
  std::optional<double> update_rate;
  bool update_rate_ok = true;

  std::optional<std::size_t> stride;
  bool foci_fit_ok = true;

  std::optional<double> combiner_divergence;  // multi mode only

  std::string to_json() const;
  std::string to_text() const;
};

/// Never throws for configuration problems; they land in `errors`.
ValidationReport build_validation_report(const RunConfig& config, bool with_divergence = true);

/// Writes the report, then returns 0 when the configuration is usable and 2 otherwise.
int cmd_validate(const RunConfig& config, std::ostream& out);

/// LM-M foci indices (1-based) for A = 6 mm, N = 164, d = 3 mm, four foci,
/// alongside the indices printed in the source figure, which the formula does not reproduce.
struct IndexExample {
  double radius = 6.0;
  int samples = 164;
  double spacing = 3.0;
  int foci = 4;
  std::vector<std::size_t> formula;
  std::vector<std::size_t> published{1, 15, 29, 37};
};
IndexExample index_example();

struct PeakReport {
  std::vector<Vec3> targets;
  std::vector<LocalMaximum> peaks;
  PeakMatch match;
};

struct SpectrumReport {
  LmMode mode = LmMode::single;
  std::vector<double> peak_radii;
  double center_value = 0.0;
  double orbit_max = 0.0;
};

struct TimeAverageReport {
  LmMode mode = LmMode::single;
  double radius = 0.0;
  int samples = 0;
  double center_value = 0.0;
  double orbit_mean = 0.0;
  double second_moment = 0.0;
};

struct FigureMetrics {
  double wavelength = 0.0;
  PeakReport single;
  PeakReport multi_complex;
  PeakReport multi_literal;
  double combiner_divergence = 0.0;

  double force_single = 0.0;
  double force_multi = 0.0;
  double force_ratio = 0.0;
  double force_shift_change = 0.0;       // stimulus and probe moved 6 mm together
  double force_probe_shift_change = 0.0; // probe alone moved 6 mm

  std::vector<SpectrumReport> spectra;
  std::vector<TimeAverageReport> averages;
  IndexExample indices;
};

struct FigureOptions {
  // Square map windows centred on the stimulus.
  double instant_extent = 40.0;
  double instant_spacing = 0.2;
  double average_extent = 40.0;
  double average_spacing = 0.5;
  unsigned workers = 0;
  double prominence = 0.3;
  double multi_radius = 6.0;
  std::vector<double> average_radii{2, 3, 4, 5, 6};
  double spectrum_radius = 3.0;
  double shift = 6.0;          // mm, lateral force-probe shift
};

using MapSink = std::function<void(const std::string& name, const FieldGrid& map)>;

/// Computes every simulated figure and its metrics for `base` (its centre,
/// frequency, step target, foci count and spacing); each map is passed to `sink`.
FigureMetrics compute_figure_metrics(const TransducerArray& array, const StimulusConfig& base,
                                     const ProbeConfig& probe, const FigureOptions& options,
                                     const MapSink& sink = {});

std::string figure_report_json(const FigureMetrics& m);
std::string figure_report_text(const FigureMetrics& m);

void cmd_reproduce_figures(const RunConfig& config, std::ostream& out);

}  // namespace lmstim
