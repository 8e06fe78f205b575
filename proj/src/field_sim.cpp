#include "lmstim/field_sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <mutex>
#include <thread>

namespace lmstim {

namespace {

// Split re/im phasors, emitter-major: phasor of emitter t in frame f at [t * F + f].
struct DrivePhasors {
  std::size_t emitters = 0;
  std::size_t frames = 0;
  std::vector<double> re;
  std::vector<double> im;
};

DrivePhasors make_phasors(const TransducerArray& array, std::span<const DriveFrame> frames) {
  DrivePhasors d{array.size(), frames.size(), {}, {}};
  d.re.resize(d.emitters * d.frames);
  d.im.resize(d.emitters * d.frames);
  for (std::size_t f = 0; f < frames.size(); ++f) {
    const DriveFrame& fr = frames[f];
    if (fr.phases.size() != array.size()) {
      throw ConfigError("drive frame length does not match the array");
    }
    if (!(fr.amplitude >= 0.0) || !std::isfinite(fr.amplitude)) {
      throw ConfigError("drive amplitude must be finite and non-negative");
    }
    for (std::size_t t = 0; t < d.emitters; ++t) {
      d.re[t * d.frames + f] = fr.amplitude * std::cos(fr.phases[t]);
      d.im[t * d.frames + f] = fr.amplitude * std::sin(fr.phases[t]);
    }
  }
  return d;
}

// Propagation factor D(theta)/r * exp(jkr) from every emitter to `point`.
void transfer_to(const TransducerArray& array, const Vec3& point, double r_min, double* re,
                 double* im) {
  const double k = array.wavenumber();
  const auto& ts = array.transducers();
  for (std::size_t t = 0; t < ts.size(); ++t) {
    const Vec3 d = point - ts[t].position;
    const double r = d.norm();
    if (!(r >= r_min)) {
      throw NumericalError("field point lies within r_min of an emitter");
    }
    const double cos_theta = ts[t].normal.dot(d) / r;
    double gain = 0.0;
    if (cos_theta > 0.0) {
      gain = array.gain_from_sine(std::sqrt(std::max(0.0, 1.0 - cos_theta * cos_theta)));
    }
    const double mag = gain / r;
    re[t] = mag * std::cos(k * r);
    im[t] = mag * std::sin(k * r);
  }
}

// Evaluates |p|^2 for every frame at every grid point and hands each point's
// series to `reduce`. Rows are independent and each point sums emitters in a
// fixed order, so results do not depend on the worker count.
std::vector<double> evaluate_series(const TransducerArray& array, const DrivePhasors& drive,
                                    const GridSpec& grid, const FieldOptions& options,
                                    const std::function<double(std::span<const double>)>& reduce) {
  grid.validate();
  const std::size_t T = array.size();
  const std::size_t F = drive.frames;
  std::vector<double> out(grid.size(), 0.0);

  std::atomic<std::size_t> next_row{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;

  auto worker = [&]() {
    std::vector<double> tre(T), tim(T), pr(F), pi(F), series(F);
    try {
      for (std::size_t i = next_row++; i < grid.nu && !failed; i = next_row++) {
        for (std::size_t j = 0; j < grid.nv; ++j) {
          transfer_to(array, grid.point(i, j), options.r_min, tre.data(), tim.data());
          std::fill(pr.begin(), pr.end(), 0.0);
          std::fill(pi.begin(), pi.end(), 0.0);
          // Frames form the inner loop so it vectorizes without reordering the
          // per-point emitter sum.
          for (std::size_t t = 0; t < T; ++t) {
            const double a = tre[t];
            const double b = tim[t];
            const double* dre = drive.re.data() + t * F;
            const double* dim = drive.im.data() + t * F;
            for (std::size_t f = 0; f < F; ++f) {
              pr[f] += a * dre[f] - b * dim[f];
              pi[f] += a * dim[f] + b * dre[f];
            }
          }
          for (std::size_t f = 0; f < F; ++f) series[f] = pr[f] * pr[f] + pi[f] * pi[f];
          out[i * grid.nv + j] = reduce(series);
        }
      }
    } catch (...) {
      std::lock_guard lock(error_mutex);
      if (!error) error = std::current_exception();
      failed = true;
    }
  };

  unsigned workers = options.workers != 0 ? options.workers : std::thread::hardware_concurrency();
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(grid.nu)));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (error) std::rethrow_exception(error);
  return out;
}

void normalize_in_place(FieldGrid& g, bool normalize) {
  if (!normalize) return;
  const double mx = g.max_value();
  if (mx > 0.0) {
    for (double& v : g.values) v /= mx;
    g.normalization = "max";
  }
}

}  // namespace

GridSpec GridSpec::centered(const Vec3& center, double extent, double spacing, const Vec3& axis_u,
                            const Vec3& axis_v) {
  if (!(spacing > 0.0) || !(extent >= 0.0)) {
    throw ConfigError("grid extent and spacing must be positive");
  }
  const auto n = static_cast<std::size_t>(std::llround(extent / spacing)) + 1;
  const double half = 0.5 * static_cast<double>(n - 1) * spacing;
  const Vec3 u = axis_u.normalized();
  const Vec3 v = axis_v.normalized();
  return GridSpec{center - half * u - half * v, u, v, spacing, n, n};
}

void GridSpec::validate() const {
  if (!(spacing > 0.0) || !std::isfinite(spacing)) {
    throw ConfigError("grid spacing must be positive");
  }
  if (nu == 0 || nv == 0) {
    throw ConfigError("grid must have at least one sample per axis");
  }
  if (!origin.allFinite() || !is_unit(axis_u) || !is_unit(axis_v)) {
    throw ConfigError("grid axes must be unit vectors and origin finite");
  }
}

double FieldGrid::max_value() const {
  return values.empty() ? 0.0 : *std::max_element(values.begin(), values.end());
}

ComplexPressure complex_pressure(const TransducerArray& array,
                                 std::span<const std::complex<double>> drive, const Vec3& point,
                                 double r_min) {
  if (drive.size() != array.size()) {
    throw ConfigError("drive length does not match the array");
  }
  std::vector<double> tre(array.size()), tim(array.size());
  transfer_to(array, point, r_min, tre.data(), tim.data());
  ComplexPressure p{0.0, 0.0};
  for (std::size_t t = 0; t < drive.size(); ++t) {
    p += std::complex<double>(tre[t], tim[t]) * drive[t];
  }
  return p;
}

ComplexPressure complex_pressure(const TransducerArray& array, const DriveFrame& frame,
                                 const Vec3& point, double r_min) {
  const DrivePhasors d = make_phasors(array, std::span<const DriveFrame>(&frame, 1));
  std::vector<std::complex<double>> drive(array.size());
  for (std::size_t t = 0; t < drive.size(); ++t) drive[t] = {d.re[t], d.im[t]};  // F == 1
  return complex_pressure(array, drive, point, r_min);
}

FieldGrid radiation_pressure_map(const TransducerArray& array, const DriveFrame& frame,
                                 const GridSpec& grid, const FieldOptions& options) {
  return time_averaged_map(array, std::span<const DriveFrame>(&frame, 1), grid, options);
}

FieldGrid time_averaged_map(const TransducerArray& array, std::span<const DriveFrame> frames,
                            const GridSpec& grid, const FieldOptions& options) {
  if (frames.empty()) {
    throw ConfigError("time average needs at least one frame");
  }
  double total = 0.0;
  for (const DriveFrame& f : frames) {
    if (!(f.duration > 0.0)) throw ConfigError("frame durations must be positive");
    total += f.duration;
  }
  std::vector<double> weights;
  weights.reserve(frames.size());
  for (const DriveFrame& f : frames) weights.push_back(f.duration / total);

  const DrivePhasors drive = make_phasors(array, frames);
  FieldGrid g{grid, {}, "radiation_pressure", "none"};
  g.values = evaluate_series(array, drive, grid, options, [&](std::span<const double> s) {
    double acc = 0.0;
    for (std::size_t f = 0; f < s.size(); ++f) acc += weights[f] * s[f];
    return acc;
  });
  if (frames.size() > 1) g.quantity = "time_averaged_radiation_pressure";
  normalize_in_place(g, options.normalize);
  return g;
}

std::size_t spectrum_bin(std::span<const DriveFrame> frames, double target_frequency) {
  if (frames.empty()) {
    throw ConfigError("spectrum needs at least one frame");
  }
  const double dwell = frames.front().duration;
  for (const DriveFrame& f : frames) {
    if (!(f.duration > 0.0) || std::abs(f.duration - dwell) > 1e-12 * dwell) {
      throw ConfigError("spectrum needs equal positive frame durations");
    }
  }
  if (!(target_frequency >= 0.0) || !std::isfinite(target_frequency)) {
    throw ConfigError("target frequency must be non-negative");
  }
  const double n = static_cast<double>(frames.size());
  const double bin = target_frequency * dwell * n;  // f / (1 / period)
  const double rounded = std::round(bin);
  if (std::abs(bin - rounded) > 1e-6) {
    throw ConfigError("target frequency is not a harmonic of the cycle frequency");
  }
  if (rounded > n / 2.0) {
    throw ConfigError("target frequency exceeds the Nyquist limit of the frame series");
  }
  return static_cast<std::size_t>(rounded);
}

FieldGrid temporal_spectrum_map(const TransducerArray& array, std::span<const DriveFrame> frames,
                                const GridSpec& grid, double target_frequency,
                                const FieldOptions& options) {
  const std::size_t k = spectrum_bin(frames, target_frequency);
  const std::size_t n = frames.size();
  std::vector<double> cs(n), sn(n);
  for (std::size_t t = 0; t < n; ++t) {
    const double a = kTwoPi * static_cast<double>((k * t) % n) / static_cast<double>(n);
    cs[t] = std::cos(a);
    sn[t] = std::sin(a);
  }
  const DrivePhasors drive = make_phasors(array, frames);
  FieldGrid g{grid, {}, "spectral_power", "none"};
  g.values = evaluate_series(array, drive, grid, options, [&](std::span<const double> s) {
    double xr = 0.0;
    double xi = 0.0;
    for (std::size_t t = 0; t < s.size(); ++t) {
      xr += s[t] * cs[t];
      xi -= s[t] * sn[t];
    }
    return xr * xr + xi * xi;
  });
  normalize_in_place(g, options.normalize);
  return g;
}

std::vector<double> pressure_time_series(const TransducerArray& array,
                                         std::span<const DriveFrame> frames, const Vec3& point) {
  std::vector<double> out;
  out.reserve(frames.size());
  for (const DriveFrame& f : frames) {
    out.push_back(std::norm(complex_pressure(array, f, point)));
  }
  return out;
}

std::vector<double> dft_power(std::span<const double> series) {
  const std::size_t n = series.size();
  std::vector<double> out(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    double xr = 0.0;
    double xi = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      const double a = kTwoPi * static_cast<double>((k * t) % n) / static_cast<double>(n);
      xr += series[t] * std::cos(a);
      xi -= series[t] * std::sin(a);
    }
    out[k] = xr * xr + xi * xi;
  }
  return out;
}

std::vector<DiskSample> disk_samples(const DiskProbe& probe) {
  if (!(probe.radius > 0.0) || !probe.center.allFinite() || !is_unit(probe.normal)) {
    throw ConfigError("disk probe needs a positive radius and a unit normal");
  }
  if (probe.sample_count == 0) {
    throw ConfigError("disk probe needs at least one sample");
  }
  const Vec3 u = any_orthogonal(probe.normal);
  const Vec3 v = probe.normal.cross(u);
  const double n = static_cast<double>(probe.sample_count);
  const auto rings =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(std::sqrt(n / kPi))));
  const double dr = probe.radius / static_cast<double>(rings);
  const double rings_sq = static_cast<double>(rings * rings);

  std::vector<DiskSample> out;
  out.reserve(probe.sample_count + rings);
  for (std::size_t m = 0; m < rings; ++m) {
    // Annulus m holds (2m + 1) / rings^2 of the disk area.
    const double share = static_cast<double>(2 * m + 1) / rings_sq;
    const auto count =
        std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(n * share)));
    const double weight = kPi * probe.radius * probe.radius * share / static_cast<double>(count);
    const double rho = (static_cast<double>(m) + 0.5) * dr;
    for (std::size_t q = 0; q < count; ++q) {
      const double a = kTwoPi * (static_cast<double>(q) + 0.5) / static_cast<double>(count);
      out.push_back({probe.center + rho * (std::cos(a) * u + std::sin(a) * v), weight});
    }
  }
  return out;
}

double integrated_force(const TransducerArray& array, const DriveFrame& frame,
                        const DiskProbe& probe) {
  double force = 0.0;
  for (const DiskSample& s : disk_samples(probe)) {
    force += s.weight * std::norm(complex_pressure(array, frame, s.position));
  }
  return force;
}

std::vector<LocalMaximum> find_local_maxima(const FieldGrid& grid, double min_prominence) {
  const std::size_t nu = grid.grid.nu;
  const std::size_t nv = grid.grid.nv;
  if (grid.values.size() != nu * nv || grid.values.empty()) {
    throw ConfigError("field grid is empty or inconsistent");
  }
  const double threshold = min_prominence * grid.max_value();
  std::vector<LocalMaximum> out;
  if (nu < 3 || nv < 3) return out;
  for (std::size_t i = 1; i + 1 < nu; ++i) {
    for (std::size_t j = 1; j + 1 < nv; ++j) {
      const double v = grid.at(i, j);
      if (!(v > 0.0) || v < threshold) continue;
      bool is_max = true;
      for (int di = -1; di <= 1 && is_max; ++di) {
        for (int dj = -1; dj <= 1; ++dj) {
          if (di == 0 && dj == 0) continue;
          const double w = grid.at(i + di, j + dj);
          // Ties go to the earlier sample in raster order so plateaus yield one peak.
          const bool earlier = di < 0 || (di == 0 && dj < 0);
          if (earlier ? !(v > w) : !(v >= w)) {
            is_max = false;
            break;
          }
        }
      }
      if (is_max) out.push_back({i, j, grid.grid.point(i, j), v});
    }
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const LocalMaximum& a, const LocalMaximum& b) { return a.value > b.value; });
  return out;
}

}  // namespace lmstim
