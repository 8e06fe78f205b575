#include "lmstim/contact_pipeline.hpp"

#include <cmath>
#include <limits>
#include <random>

namespace lmstim {

double ContactState::surface_z_near(const Vec3& p) const {
  if (z_map.empty()) {
    throw ConfigError("contact state has no depth samples");
  }
  double best = std::numeric_limits<double>::infinity();
  double z = z_map.front().z();
  for (const Vec3& s : z_map) {
    const double d = (s.head<2>() - p.head<2>()).squaredNorm();
    if (d < best) {
      best = d;
      z = s.z();
    }
  }
  return z;
}

std::optional<ContactState> detect_contact(const DepthFrame& frame, const DetectionBox& box) {
  if (frame.depth.size() != frame.width * frame.height) {
    throw ConfigError("depth frame size does not match its dimensions");
  }
  ContactState state;
  state.timestamp = frame.timestamp;
  Vec3 sum = Vec3::Zero();
  for (std::size_t v = 0; v < frame.height; ++v) {
    for (std::size_t u = 0; u < frame.width; ++u) {
      const double d = frame.depth[v * frame.width + u];
      if (!(d > 0.0)) continue;
      const Vec3 p = frame.camera.back_project(u, v, d);
      if (!box.contains(p)) continue;
      sum += p;
      state.z_map.push_back(p);
    }
  }
  state.area_pixels = state.z_map.size();
  if (state.area_pixels == 0) {
    return std::nullopt;
  }
  state.centroid = sum / static_cast<double>(state.area_pixels);
  return state;
}

GaussianSmoother::GaussianSmoother(std::size_t window, double sigma) : window_(window) {
  if (window_ == 0 || !(sigma > 0.0)) {
    throw ConfigError("smoother needs a positive window and sigma");
  }
  double total = 0.0;
  for (std::size_t age = 0; age < window_; ++age) {
    const double a = static_cast<double>(age);
    weights_.push_back(std::exp(-a * a / (2.0 * sigma * sigma)));
    total += weights_.back();
  }
  for (double& w : weights_) w /= total;
}

Vec3 GaussianSmoother::push(const Vec3& centroid) {
  history_.push_front(centroid);
  if (history_.size() > window_) history_.pop_back();
  Vec3 acc = Vec3::Zero();
  double total = 0.0;
  for (std::size_t age = 0; age < history_.size(); ++age) {
    acc += weights_[age] * history_[age];
    total += weights_[age];
  }
  return acc / total;
}

std::vector<DepthFrame> synth_depth_stream(const FingerModel& finger, const DepthStreamSpec& spec) {
  if (!(finger.tip_radius > 0.0)) {
    throw ConfigError("finger tip radius must be positive");
  }
  if (!(spec.fps > 0.0) || !(spec.duration >= 0.0) || spec.width == 0 || spec.height == 0) {
    throw ConfigError("depth stream needs positive fps, size and non-negative duration");
  }
  std::mt19937_64 rng(finger.seed);
  std::normal_distribution<double> noise(0.0, finger.noise_sigma > 0.0 ? finger.noise_sigma : 1.0);
  const auto count = static_cast<std::size_t>(std::floor(spec.duration * spec.fps + 1e-9));
  const double r2 = finger.tip_radius * finger.tip_radius;

  std::vector<DepthFrame> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    DepthFrame f{spec.width, spec.height, std::vector<float>(spec.width * spec.height, 0.0f),
                 spec.camera, static_cast<double>(k) / spec.fps};
    const Vec3 c = finger.tip_start + finger.velocity * f.timestamp;
    for (std::size_t v = 0; v < spec.height; ++v) {
      for (std::size_t u = 0; u < spec.width; ++u) {
        const Vec3 ray = spec.camera.back_project(u, v, 0.0);
        const double rho2 = (ray.head<2>() - c.head<2>()).squaredNorm();
        if (rho2 >= r2) continue;
        double z = c.z() - std::sqrt(r2 - rho2);
        if (finger.noise_sigma > 0.0) z += noise(rng);
        f.depth[v * spec.width + u] = static_cast<float>(std::max(z - spec.camera.camera_z, 1e-3));
      }
    }
    out.push_back(std::move(f));
  }
  return out;
}

namespace {

struct PublishedCenter {
  Vec3 center;
  double time = 0.0;
  std::size_t version = 0;
  ContactState contact;
};

LmConfig config_for(const LmConfig& tmpl, const PublishedCenter& pub) {
  LmConfig cfg = tmpl;
  cfg.center = pub.center;
  cfg.z_profile.assign(static_cast<std::size_t>(cfg.samples_per_cycle), 0.0);
  for (std::size_t j = 0; j < cfg.z_profile.size(); ++j) {
    const double theta = kTwoPi * static_cast<double>(j) / cfg.samples_per_cycle;
    const Vec3 flat =
        pub.center + cfg.radius * (std::cos(theta) * cfg.basis_a + std::sin(theta) * cfg.basis_b);
    const Vec3 surface(flat.x(), flat.y(), pub.contact.surface_z_near(flat));
    cfg.z_profile[j] = (surface - flat).dot(cfg.basis_c);
  }
  return cfg;
}

}  // namespace

RenderLog run_render_loop(const std::vector<DepthFrame>& stream, const DetectionBox& box,
                          const LmConfig& lm_template, double duration,
                          const RenderLoopOptions& options) {
  lm_template.validate();
  if (!(duration > 0.0) || !(options.fps > 0.0)) {
    throw ConfigError("render loop needs a positive duration and camera rate");
  }
  for (std::size_t i = 1; i < stream.size(); ++i) {
    if (!(stream[i].timestamp > stream[i - 1].timestamp)) {
      throw ConfigError("depth stream timestamps must increase");
    }
  }

  const DwellTiming timing = dwell_time(lm_template.samples_per_cycle, lm_template.lm_frequency);
  const auto n = static_cast<std::size_t>(lm_template.samples_per_cycle);
  const double gap_limit = options.dropout_periods / options.fps;
  const auto ticks = static_cast<std::size_t>(std::ceil(duration / timing.dwell - 1e-9));

  GaussianSmoother smoother(options.smoothing_window, options.smoothing_sigma);
  std::optional<PublishedCenter> published;
  bool active = false;
  std::optional<double> last_frame_time;
  std::size_t next_frame = 0;

  std::size_t cached_version = 0;
  Trajectory trajectory;
  std::optional<FociSchedule> schedule;

  RenderLog log;
  for (std::size_t m = 0; m < ticks; ++m) {
    const double t = static_cast<double>(m) * timing.dwell;

    // Camera clock: publish every frame captured up to this drive tick.
    while (next_frame < stream.size() && stream[next_frame].timestamp <= t) {
      const DepthFrame& frame = stream[next_frame++];
      CenterSample sample;
      sample.timestamp = frame.timestamp;
      sample.dropout = last_frame_time && frame.timestamp - *last_frame_time > gap_limit;
      last_frame_time = frame.timestamp;
      if (auto contact = detect_contact(frame, box)) {
        sample.contact = true;
        sample.raw = contact->centroid;
        sample.smoothed = smoother.push(contact->centroid);
        const std::size_t version = published ? published->version + 1 : 1;
        published = PublishedCenter{sample.smoothed, frame.timestamp, version, std::move(*contact)};
        active = true;
      } else {
        smoother.reset();
        active = false;
      }
      log.centers.push_back(sample);
    }

    DriveLogEntry entry;
    entry.start_time = t;
    entry.step = m % n;
    entry.dropout = last_frame_time.has_value() && t - *last_frame_time > gap_limit;
    if (active && published) {
      if (published->version != cached_version) {
        const LmConfig cfg = config_for(lm_template, *published);
        trajectory = lm_s_trajectory(cfg);
        schedule.reset();
        if (cfg.mode == LmMode::multi) schedule = lm_m_schedule(cfg);
        cached_version = published->version;
      }
      entry.output_on = true;
      entry.center = published->center;
      entry.center_time = published->time;
      entry.foci = foci_at_step(trajectory, schedule ? &*schedule : nullptr, entry.step);
      if (options.array != nullptr) {
        std::vector<FocusSpec> foci;
        for (const Vec3& p : entry.foci) foci.push_back({p});
        entry.drive = drive_for_foci(*options.array, foci, options.combiner, timing.dwell);
      }
    }
    log.drives.push_back(std::move(entry));
  }
  return log;
}

}  // namespace lmstim
