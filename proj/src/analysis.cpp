#include "lmstim/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace lmstim {

PreparedStimulus prepare_stimulus(const StimulusConfig& stimulus) {
  PreparedStimulus out;
  out.lm = stimulus.to_lm_config();
  out.lm.validate();
  if (stimulus.reflection) {
    out.trajectory = reflected_trajectory(out.lm, stimulus.plane, stimulus.tilt_deg);
    out.driven_center = mirror_point(out.lm.center, stimulus.plane);
  } else {
    out.trajectory = lm_s_trajectory(out.lm);
    out.driven_center = out.lm.center;
  }
  if (out.lm.mode == LmMode::multi) out.schedule = lm_m_schedule(out.lm);
  out.timing = dwell_time(out.lm.samples_per_cycle, out.lm.lm_frequency);
  return out;
}

Vec3 centroid(const std::vector<Vec3>& points) {
  if (points.empty()) throw ConfigError("centroid of an empty point set");
  Vec3 s = Vec3::Zero();
  for (const Vec3& p : points) s += p;
  return s / static_cast<double>(points.size());
}

double sample_bilinear(const FieldGrid& grid, const Vec3& p) {
  const GridSpec& g = grid.grid;
  const Vec3 d = p - g.origin;
  const double fu = d.dot(g.axis_u) / (g.axis_u.squaredNorm() * g.spacing);
  const double fv = d.dot(g.axis_v) / (g.axis_v.squaredNorm() * g.spacing);
  const double max_u = static_cast<double>(g.nu - 1);
  const double max_v = static_cast<double>(g.nv - 1);
  constexpr double eps = 1e-9;
  if (!(fu >= -eps && fu <= max_u + eps && fv >= -eps && fv <= max_v + eps)) {
    throw ConfigError("sample point lies outside the field grid");
  }
  const double cu = std::clamp(fu, 0.0, max_u);
  const double cv = std::clamp(fv, 0.0, max_v);
  const auto i0 = static_cast<std::size_t>(std::min(std::floor(cu), std::max(max_u - 1.0, 0.0)));
  const auto j0 = static_cast<std::size_t>(std::min(std::floor(cv), std::max(max_v - 1.0, 0.0)));
  const std::size_t i1 = std::min(i0 + 1, g.nu - 1);
  const std::size_t j1 = std::min(j0 + 1, g.nv - 1);
  const double tu = cu - static_cast<double>(i0);
  const double tv = cv - static_cast<double>(j0);
  return (1 - tu) * (1 - tv) * grid.at(i0, j0) + tu * (1 - tv) * grid.at(i1, j0) +
         (1 - tu) * tv * grid.at(i0, j1) + tu * tv * grid.at(i1, j1);
}

namespace {

template <typename F>
void for_circle(const FieldGrid& grid, const Vec3& center, double radius, std::size_t samples,
                F&& f) {
  if (samples == 0) throw ConfigError("circle needs at least one sample");
  const Vec3 u = grid.grid.axis_u.normalized();
  const Vec3 v = grid.grid.axis_v.normalized();
  for (std::size_t s = 0; s < samples; ++s) {
    const double t = kTwoPi * static_cast<double>(s) / static_cast<double>(samples);
    f(sample_bilinear(grid, center + radius * (std::cos(t) * u + std::sin(t) * v)));
  }
}

}  // namespace

double circle_mean(const FieldGrid& grid, const Vec3& center, double radius, std::size_t samples) {
  double sum = 0.0;
  for_circle(grid, center, radius, samples, [&](double x) { sum += x; });
  return sum / static_cast<double>(samples);
}

double circle_max(const FieldGrid& grid, const Vec3& center, double radius, std::size_t samples) {
  double best = -std::numeric_limits<double>::infinity();
  for_circle(grid, center, radius, samples, [&](double x) { best = std::max(best, x); });
  return best;
}

double second_moment(const FieldGrid& grid, const Vec3& center) {
  const GridSpec& g = grid.grid;
  const Vec3 u = g.axis_u.normalized();
  const Vec3 v = g.axis_v.normalized();
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < g.nu; ++i) {
    for (std::size_t j = 0; j < g.nv; ++j) {
      const Vec3 d = g.point(i, j) - center;
      const double du = d.dot(u);
      const double dv = d.dot(v);
      num += grid.at(i, j) * (du * du + dv * dv);
      den += grid.at(i, j);
    }
  }
  if (!(den > 0.0)) throw NumericalError("second moment of an all-zero map");
  return num / den;
}

double normalized_l2_distance(const FieldGrid& a, const FieldGrid& b) {
  if (a.values.size() != b.values.size() || a.grid.nu != b.grid.nu || a.grid.nv != b.grid.nv) {
    throw ConfigError("maps differ in shape");
  }
  const double ma = a.max_value();
  const double mb = b.max_value();
  if (!(ma > 0.0) || !(mb > 0.0)) throw NumericalError("cannot normalize an all-zero map");
  double acc = 0.0;
  for (std::size_t k = 0; k < a.values.size(); ++k) {
    const double d = a.values[k] / ma - b.values[k] / mb;
    acc += d * d;
  }
  return std::sqrt(acc / static_cast<double>(a.values.size()));
}

PeakMatch match_peaks(const std::vector<LocalMaximum>& peaks, const std::vector<Vec3>& targets,
                      double tolerance) {
  PeakMatch m;
  m.peak_count = peaks.size();
  m.distances.assign(targets.size(), std::numeric_limits<double>::infinity());
  std::vector<bool> peak_used(peaks.size(), false);
  std::vector<bool> target_done(targets.size(), false);
  for (std::size_t round = 0; round < std::min(peaks.size(), targets.size()); ++round) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t bp = 0;
    std::size_t bt = 0;
    for (std::size_t t = 0; t < targets.size(); ++t) {
      if (target_done[t]) continue;
      for (std::size_t p = 0; p < peaks.size(); ++p) {
        if (peak_used[p]) continue;
        const double d = (peaks[p].position - targets[t]).norm();
        if (d < best) {
          best = d;
          bp = p;
          bt = t;
        }
      }
    }
    peak_used[bp] = true;
    target_done[bt] = true;
    m.distances[bt] = best;
  }
  m.all_within = !targets.empty() &&
                 std::all_of(m.distances.begin(), m.distances.end(),
                             [&](double d) { return d <= tolerance; });
  return m;
}

}  // namespace lmstim
