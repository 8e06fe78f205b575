#include "lmstim/formats.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace lmstim {

static_assert(std::endian::native == std::endian::little,
              "binary depth streams are written in host order, which must be little-endian");

namespace {

constexpr char kFieldMagic[] = "# lmstim field grid v1";
constexpr char kDepthMagic[4] = {'L', 'M', 'D', 'S'};
constexpr std::uint32_t kDepthVersion = 1;

double parse_double(std::string_view s, const char* what) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\r')) s.remove_suffix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ConfigError(std::string("malformed number in ") + what + ": '" + std::string(s) + "'");
  }
  return v;
}

std::string vec_text(const Vec3& v) {
  return format_exact(v.x()) + " " + format_exact(v.y()) + " " + format_exact(v.z());
}

Vec3 parse_vec(const std::string& text) {
  std::istringstream ss(text);
  std::string a, b, c;
  if (!(ss >> a >> b >> c)) throw ConfigError("field header vector needs three components");
  return {parse_double(a, "field header"), parse_double(b, "field header"),
          parse_double(c, "field header")};
}

template <typename T>
void put(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
  T v{};
  if (!in.read(reinterpret_cast<char*>(&v), sizeof(T))) {
    throw ConfigError("depth stream truncated");
  }
  return v;
}

std::string trimmed(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

DepthStream read_manifest(std::istream& in, const std::filesystem::path& path) {
  DepthStream ds;
  CameraModel cam;
  std::size_t width = 0;
  std::size_t height = 0;
  std::string line;
  std::getline(in, line);  // magic
  while (std::getline(in, line)) {
    line = trimmed(line);
    if (line.empty() || line.front() == '#') continue;
    std::istringstream ss(line);
    std::string key;
    ss >> key;
    if (key == "width") {
      ss >> width;
    } else if (key == "height") {
      ss >> height;
    } else if (key == "fps") {
      ss >> ds.fps;
    } else if (key == "scale") {
      ss >> cam.scale_x >> cam.scale_y;
    } else if (key == "origin") {
      ss >> cam.x0 >> cam.y0;
    } else if (key == "camera_z") {
      ss >> cam.camera_z;
    } else if (key == "frame") {
      double ts = 0.0;
      std::string file;
      ss >> ts >> file;
      if (width == 0 || height == 0) throw ConfigError("manifest frame before width/height");
      const auto raw_path = path.parent_path() / file;
      std::ifstream raw(raw_path, std::ios::binary);
      if (!raw) throw ConfigError("cannot open depth plane '" + raw_path.string() + "'");
      DepthFrame f{width, height, std::vector<float>(width * height), cam, ts};
      if (!raw.read(reinterpret_cast<char*>(f.depth.data()),
                    static_cast<std::streamsize>(f.depth.size() * sizeof(float)))) {
        throw ConfigError("depth plane '" + raw_path.string() + "' is truncated");
      }
      ds.frames.push_back(std::move(f));
      continue;
    } else {
      throw ConfigError("unknown manifest key '" + key + "'");
    }
    if (ss.fail()) throw ConfigError("malformed manifest line '" + line + "'");
  }
  if (!(ds.fps > 0.0)) throw ConfigError("manifest needs a positive fps");
  return ds;
}

}  // namespace

std::string format_exact(double v) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

std::string format_sig9(double v) {
  std::array<char, 64> buf{};
  std::snprintf(buf.data(), buf.size(), "%.9g", v);
  return buf.data();
}

void write_trajectory_table(std::ostream& out, const Trajectory& trajectory) {
  out << "# j x_mm y_mm z_mm theta_rad dwell_s\n";
  for (std::size_t j = 0; j < trajectory.positions.size(); ++j) {
    const Vec3& p = trajectory.positions[j];
    out << (j + 1) << ' ' << format_sig9(p.x()) << ' ' << format_sig9(p.y()) << ' '
        << format_sig9(p.z()) << ' ' << format_sig9(trajectory.theta[j]) << ' '
        << format_sig9(trajectory.dwell) << '\n';
  }
}

void write_schedule(std::ostream& out, const FociSchedule& schedule) {
  out << "# samples " << schedule.samples << "\n# stride " << schedule.stride
      << "\n# step focus_indices (1-based)\n";
  for (std::size_t j = 0; j < schedule.steps.size(); ++j) {
    out << (j + 1);
    for (std::size_t idx : schedule.steps[j]) out << ' ' << (idx + 1);
    out << '\n';
  }
}

void write_drive_stream(std::ostream& out, std::span<const DriveFrame> frames) {
  out << "# frame duration_s amplitude phases_rad...\n";
  for (std::size_t f = 0; f < frames.size(); ++f) {
    out << (f + 1) << ' ' << format_exact(frames[f].duration) << ' '
        << format_exact(frames[f].amplitude);
    for (double p : frames[f].phases.values()) out << ' ' << format_exact(p);
    out << '\n';
  }
}

void write_field_csv(std::ostream& out, const FieldGrid& grid) {
  const GridSpec& g = grid.grid;
  out << kFieldMagic << '\n'
      << "# quantity " << grid.quantity << '\n'
      << "# origin " << vec_text(g.origin) << '\n'
      << "# axis_u " << vec_text(g.axis_u) << '\n'
      << "# axis_v " << vec_text(g.axis_v) << '\n'
      << "# spacing " << format_exact(g.spacing) << '\n'
      << "# nu " << g.nu << '\n'
      << "# nv " << g.nv << '\n'
      << "# normalization " << grid.normalization << '\n'
      << "# dft forward-unnormalized X_k=sum_t s_t*exp(-2*pi*i*k*t/N) power=|X_k|^2\n"
      << "# layout row i = u index, column j = v index\n";
  for (std::size_t i = 0; i < g.nu; ++i) {
    for (std::size_t j = 0; j < g.nv; ++j) {
      if (j != 0) out << ',';
      out << format_exact(grid.at(i, j));
    }
    out << '\n';
  }
}

FieldGrid read_field_csv(std::istream& in) {
  FieldGrid grid;
  std::string line;
  if (!std::getline(in, line) || trimmed(line) != kFieldMagic) {
    throw ConfigError("not a field grid file");
  }
  bool have_nu = false;
  bool have_nv = false;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.front() == '#') {
      std::istringstream ss(line.substr(1));
      std::string key;
      ss >> key;
      std::string rest;
      std::getline(ss, rest);
      rest = trimmed(rest);
      if (key == "quantity") grid.quantity = rest;
      else if (key == "origin") grid.grid.origin = parse_vec(rest);
      else if (key == "axis_u") grid.grid.axis_u = parse_vec(rest);
      else if (key == "axis_v") grid.grid.axis_v = parse_vec(rest);
      else if (key == "spacing") grid.grid.spacing = parse_double(rest, "spacing");
      else if (key == "nu") { grid.grid.nu = std::stoul(rest); have_nu = true; }
      else if (key == "nv") { grid.grid.nv = std::stoul(rest); have_nv = true; }
      else if (key == "normalization") grid.normalization = rest;
      continue;
    }
    if (!have_nu || !have_nv) throw ConfigError("field grid data before nu/nv header");
    if (grid.values.empty()) grid.values.reserve(grid.grid.size());
    if (row >= grid.grid.nu) throw ConfigError("field grid has too many rows");
    std::size_t cols = 0;
    std::string_view rest(line);
    while (true) {
      const auto comma = rest.find(',');
      grid.values.push_back(parse_double(rest.substr(0, comma), "field grid"));
      ++cols;
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (cols != grid.grid.nv) throw ConfigError("field grid row has the wrong length");
    ++row;
  }
  if (row != grid.grid.nu) throw ConfigError("field grid has too few rows");
  return grid;
}

void write_pgm(std::ostream& out, const FieldGrid& grid) {
  const GridSpec& g = grid.grid;
  const double mx = grid.max_value();
  out << "P5\n" << g.nu << ' ' << g.nv << "\n255\n";
  for (std::size_t r = 0; r < g.nv; ++r) {
    const std::size_t j = g.nv - 1 - r;
    for (std::size_t i = 0; i < g.nu; ++i) {
      const double v = mx > 0.0 ? std::clamp(grid.at(i, j) / mx, 0.0, 1.0) : 0.0;
      out.put(static_cast<char>(static_cast<unsigned char>(std::lround(255.0 * v))));
    }
  }
}

void write_peaks(std::ostream& out, const std::vector<LocalMaximum>& peaks) {
  out << "# rank i j x_mm y_mm z_mm value\n";
  for (std::size_t k = 0; k < peaks.size(); ++k) {
    const LocalMaximum& p = peaks[k];
    out << (k + 1) << ' ' << p.i << ' ' << p.j << ' ' << format_sig9(p.position.x()) << ' '
        << format_sig9(p.position.y()) << ' ' << format_sig9(p.position.z()) << ' '
        << format_sig9(p.value) << '\n';
  }
}

void write_depth_stream(const std::filesystem::path& path, const std::vector<DepthFrame>& frames,
                        double fps) {
  if (frames.empty()) throw ConfigError("depth stream has no frames");
  const DepthFrame& first = frames.front();
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  out.write(kDepthMagic, sizeof kDepthMagic);
  put<std::uint32_t>(out, kDepthVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(first.width));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(first.height));
  put<double>(out, fps);
  put<double>(out, first.camera.scale_x);
  put<double>(out, first.camera.scale_y);
  put<double>(out, first.camera.x0);
  put<double>(out, first.camera.y0);
  put<double>(out, first.camera.camera_z);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(frames.size()));
  for (const DepthFrame& f : frames) {
    if (f.width != first.width || f.height != first.height) {
      throw ConfigError("depth frames differ in size");
    }
    put<double>(out, f.timestamp);
    out.write(reinterpret_cast<const char*>(f.depth.data()),
              static_cast<std::streamsize>(f.depth.size() * sizeof(float)));
  }
  if (!out) throw ConfigError("failed writing '" + path.string() + "'");
}

DepthStream read_depth_stream(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open depth stream '" + path.string() + "'");
  std::array<char, 4> magic{};
  if (!in.read(magic.data(), magic.size())) throw ConfigError("depth stream header truncated");
  if (std::memcmp(magic.data(), "lmds", 4) == 0) {
    in.seekg(0);
    std::string first;
    std::getline(in, first);
    if (trimmed(first) != "lmds-manifest 1") throw ConfigError("unsupported manifest version");
    in.seekg(0);
    return read_manifest(in, path);
  }
  if (std::memcmp(magic.data(), kDepthMagic, 4) != 0) {
    throw ConfigError("malformed depth stream header (bad magic)");
  }
  if (get<std::uint32_t>(in) != kDepthVersion) {
    throw ConfigError("unsupported depth stream version");
  }
  DepthStream ds;
  const auto width = get<std::uint32_t>(in);
  const auto height = get<std::uint32_t>(in);
  ds.fps = get<double>(in);
  CameraModel cam;
  cam.scale_x = get<double>(in);
  cam.scale_y = get<double>(in);
  cam.x0 = get<double>(in);
  cam.y0 = get<double>(in);
  cam.camera_z = get<double>(in);
  const auto count = get<std::uint32_t>(in);
  if (width == 0 || height == 0 || !(ds.fps > 0.0) || !(cam.scale_x > 0.0) ||
      !(cam.scale_y > 0.0)) {
    throw ConfigError("malformed depth stream header");
  }
  if (static_cast<std::uint64_t>(width) * height > (1u << 26)) {
    throw ConfigError("depth stream frame size is implausibly large");
  }
  ds.frames.reserve(count);
  for (std::uint32_t k = 0; k < count; ++k) {
    DepthFrame f{width, height, std::vector<float>(static_cast<std::size_t>(width) * height), cam,
                 get<double>(in)};
    if (!in.read(reinterpret_cast<char*>(f.depth.data()),
                 static_cast<std::streamsize>(f.depth.size() * sizeof(float)))) {
      throw ConfigError("depth stream truncated");
    }
    ds.frames.push_back(std::move(f));
  }
  return ds;
}

void write_center_timeline(std::ostream& out, const std::vector<CenterSample>& centers) {
  out << "# timestamp_s contact raw_x raw_y raw_z smooth_x smooth_y smooth_z dropout\n";
  for (const CenterSample& c : centers) {
    out << format_sig9(c.timestamp) << ' ' << (c.contact ? 1 : 0);
    for (int i = 0; i < 3; ++i) out << ' ' << format_sig9(c.raw[i]);
    for (int i = 0; i < 3; ++i) out << ' ' << format_sig9(c.smoothed[i]);
    out << ' ' << (c.dropout ? 1 : 0) << '\n';
  }
}

void write_drive_log(std::ostream& out, const std::vector<DriveLogEntry>& drives) {
  out << "# start_s step output dropout center_x center_y center_z center_time_s foci(x y z)...\n";
  for (const DriveLogEntry& d : drives) {
    out << format_sig9(d.start_time) << ' ' << (d.step + 1) << ' ' << (d.output_on ? 1 : 0) << ' '
        << (d.dropout ? 1 : 0);
    for (int i = 0; i < 3; ++i) out << ' ' << format_sig9(d.center[i]);
    out << ' ' << format_sig9(d.center_time);
    for (const Vec3& f : d.foci) {
      for (int i = 0; i < 3; ++i) out << ' ' << format_sig9(f[i]);
    }
    out << '\n';
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  out << content;
  if (!out) throw ConfigError("failed writing '" + path.string() + "'");
}

}  // namespace lmstim
