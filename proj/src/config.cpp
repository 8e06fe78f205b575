#include "lmstim/config.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace lmstim {

using nlohmann::json;

namespace {

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) {
    throw ConfigError(where + " must be an object");
  }
  for (const auto& [key, _] : obj.items()) {
    if (allowed.count(key) == 0) {
      throw ConfigError("unknown key '" + key + "' in " + where);
    }
  }
}

template <typename T>
T get_or(const json& obj, const char* key, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
  }
}

Vec3 vec3_of(const json& v, const std::string& what) {
  if (!v.is_array() || v.size() != 3) {
    throw ConfigError(what + " must be a 3-element array");
  }
  Vec3 out;
  for (int i = 0; i < 3; ++i) {
    if (!v[i].is_number()) throw ConfigError(what + " entries must be numbers");
    out[i] = v[i].get<double>();
  }
  if (!out.allFinite()) throw ConfigError(what + " must be finite");
  return out;
}

Vec3 vec3_or(const json& obj, const char* key, const Vec3& fallback) {
  return obj.contains(key) ? vec3_of(obj.at(key), key) : fallback;
}

json vec3_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

ArrayLayoutConfig array_from_json(const json& j) {
  check_keys(j,
             {"frequency_hz", "sound_speed_mm_s", "aperture_radius_mm", "grid", "units",
              "directivity_table"},
             "array layout");
  ArrayLayoutConfig cfg = ArrayLayoutConfig::paper_default();
  cfg.frequency = get_or(j, "frequency_hz", cfg.frequency);
  cfg.sound_speed = get_or(j, "sound_speed_mm_s", cfg.sound_speed);
  cfg.aperture_radius = get_or(j, "aperture_radius_mm", cfg.aperture_radius);
  if (j.contains("grid")) {
    const json& g = j.at("grid");
    check_keys(g, {"rows", "cols", "pitch_mm", "holes"}, "array grid");
    cfg.grid.rows = get_or(g, "rows", cfg.grid.rows);
    cfg.grid.cols = get_or(g, "cols", cfg.grid.cols);
    cfg.grid.pitch = get_or(g, "pitch_mm", cfg.grid.pitch);
    if (g.contains("holes")) {
      cfg.grid.holes.clear();
      for (const json& h : g.at("holes")) {
        if (!h.is_array() || h.size() != 2) throw ConfigError("grid holes are [row, col] pairs");
        cfg.grid.holes.emplace_back(h[0].get<int>(), h[1].get<int>());
      }
    }
  }
  if (j.contains("units")) {
    cfg.units.clear();
    for (const json& u : j.at("units")) {
      check_keys(u, {"origin_mm", "axis", "angle_deg"}, "array unit");
      const Vec3 origin = vec3_or(u, "origin_mm", Vec3::Zero());
      const Vec3 axis = vec3_or(u, "axis", Vec3::UnitZ());
      cfg.units.push_back(UnitPose::from_axis_angle(origin, axis, get_or(u, "angle_deg", 0.0)));
    }
  }
  if (j.contains("directivity_table")) {
    DirectivityTable table;
    for (const json& s : j.at("directivity_table")) {
      if (!s.is_array() || s.size() != 2) {
        throw ConfigError("directivity table rows are [angle_deg, gain] pairs");
      }
      table.emplace_back(s[0].get<double>(), s[1].get<double>());
    }
    cfg.directivity_table = std::move(table);
  }
  return cfg;
}

void apply_override(json& root, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("override '" + assignment + "' is not key=value");
  }
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;

  json* node = &root;
  std::size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? dot : dot - start);
    if (part.empty()) throw ConfigError("override key '" + key + "' has an empty segment");
    if (!node->is_object()) *node = json::object();
    if (dot == std::string::npos) {
      (*node)[part] = value;
      return;
    }
    node = &(*node)[part];
    start = dot + 1;
  }
}

LmMode mode_of(const std::string& s) {
  if (s == "S" || s == "single") return LmMode::single;
  if (s == "M" || s == "multi") return LmMode::multi;
  throw ConfigError("unknown stimulus mode '" + s + "' (expected S or M)");
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

RunConfig run_from_json(const json& root, const std::filesystem::path& base_dir) {
  check_keys(root, {"array", "stimulus", "grid", "probe", "contact", "output_dir", "workers", "seed"},
             "run config");
  RunConfig cfg;
  if (root.contains("array")) {
    const json& a = root.at("array");
    if (a.is_string()) {
      const auto path = resolve(base_dir, a.get<std::string>());
      cfg.array = load_array_layout(path);
      cfg.array_path = path.string();
    } else {
      cfg.array = array_from_json(a);
    }
  }

  if (root.contains("stimulus")) {
    const json& s = root.at("stimulus");
    check_keys(s,
               {"mode", "center_mm", "radius_mm", "lm_frequency_hz", "samples", "step_target_mm",
                "foci_count", "foci_spacing_mm", "combiner", "reflection"},
               "stimulus");
    StimulusConfig& st = cfg.stimulus;
    st.mode = mode_of(get_or<std::string>(s, "mode", "S"));
    st.center = vec3_or(s, "center_mm", st.center);
    st.radius = get_or(s, "radius_mm", st.radius);
    st.lm_frequency = get_or(s, "lm_frequency_hz", st.lm_frequency);
    if (s.contains("samples") && !s.at("samples").is_null()) st.samples = s.at("samples").get<int>();
    st.step_target = get_or(s, "step_target_mm", st.step_target);
    st.foci_count = get_or(s, "foci_count", st.foci_count);
    st.foci_spacing = get_or(s, "foci_spacing_mm", st.foci_spacing);
    st.combiner = combiner_from_string(get_or<std::string>(s, "combiner", "complex"));
    if (s.contains("reflection")) {
      const json& r = s.at("reflection");
      check_keys(r, {"enabled", "plane_point_mm", "plane_normal", "tilt_deg"}, "reflection");
      st.reflection = get_or(r, "enabled", true);
      st.plane.point = vec3_or(r, "plane_point_mm", st.plane.point);
      st.plane.normal = vec3_or(r, "plane_normal", st.plane.normal).normalized();
      st.tilt_deg = get_or(r, "tilt_deg", st.tilt_deg);
    }
  }

  if (root.contains("grid")) {
    const json& g = root.at("grid");
    check_keys(g, {"extent_mm", "spacing_mm", "center_mm", "axis_u", "axis_v"}, "grid");
    cfg.grid.extent = get_or(g, "extent_mm", cfg.grid.extent);
    cfg.grid.spacing = get_or(g, "spacing_mm", cfg.grid.spacing);
    if (g.contains("center_mm")) cfg.grid.center = vec3_of(g.at("center_mm"), "center_mm");
    cfg.grid.axis_u = vec3_or(g, "axis_u", cfg.grid.axis_u).normalized();
    cfg.grid.axis_v = vec3_or(g, "axis_v", cfg.grid.axis_v).normalized();
  }

  if (root.contains("probe")) {
    const json& p = root.at("probe");
    check_keys(p, {"radius_mm", "tilt_deg", "tilt_axis", "samples"}, "probe");
    cfg.probe.radius = get_or(p, "radius_mm", cfg.probe.radius);
    cfg.probe.tilt_deg = get_or(p, "tilt_deg", cfg.probe.tilt_deg);
    cfg.probe.tilt_axis = vec3_or(p, "tilt_axis", cfg.probe.tilt_axis);
    cfg.probe.samples = get_or(p, "samples", cfg.probe.samples);
  }

  if (root.contains("contact")) {
    const json& c = root.at("contact");
    check_keys(c,
               {"box_center_mm", "box_extents_mm", "fps", "duration_s", "smoothing_window",
                "smoothing_sigma", "dropout_periods", "stream"},
               "contact");
    ContactConfig& cc = cfg.contact;
    cc.box.center = vec3_or(c, "box_center_mm", cc.box.center);
    cc.box.extents = vec3_or(c, "box_extents_mm", cc.box.extents);
    cc.fps = get_or(c, "fps", cc.fps);
    cc.duration = get_or(c, "duration_s", cc.duration);
    cc.smoothing_window = get_or(c, "smoothing_window", cc.smoothing_window);
    cc.smoothing_sigma = get_or(c, "smoothing_sigma", cc.smoothing_sigma);
    cc.dropout_periods = get_or(c, "dropout_periods", cc.dropout_periods);
    if (c.contains("stream")) cc.stream_path = resolve(base_dir, c.at("stream").get<std::string>()).string();
  }

  cfg.output_dir = get_or<std::string>(root, "output_dir", cfg.output_dir);
  cfg.workers = get_or(root, "workers", cfg.workers);
  cfg.seed = get_or(root, "seed", cfg.seed);

  if ((cfg.contact.box.extents.array() <= 0.0).any()) {
    throw ConfigError("detection box extents must be positive");
  }
  return cfg;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ConfigError("cannot open '" + path.string() + "'");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json parse_json(std::string_view text, const std::string& what) {
  json j = json::parse(text, nullptr, false, true);
  if (j.is_discarded()) {
    throw ConfigError(what + " is not valid JSON");
  }
  return j;
}

}  // namespace

int StimulusConfig::resolved_samples() const {
  return samples ? *samples : samples_for_target_step(radius, step_target);
}

LmConfig StimulusConfig::to_lm_config() const {
  LmConfig cfg;
  cfg.center = center;
  cfg.radius = radius;
  cfg.lm_frequency = lm_frequency;
  cfg.samples_per_cycle = resolved_samples();
  cfg.mode = mode;
  cfg.foci_count = mode == LmMode::multi ? foci_count : 1;
  cfg.foci_spacing = foci_spacing;
  return cfg;
}

GridSpec GridConfig::to_spec(const Vec3& default_center) const {
  return GridSpec::centered(center.value_or(default_center), extent, spacing, axis_u, axis_v);
}

DiskProbe ProbeConfig::at(const Vec3& c) const {
  const Vec3 normal = axis_angle_rotation(tilt_axis, tilt_deg) * Vec3::UnitZ();
  return DiskProbe{c, normal.normalized(), radius, samples};
}

RunConfig parse_run_config(std::string_view json_text, const std::filesystem::path& base_dir,
                           std::span<const std::string> overrides) {
  json root = parse_json(json_text, "run config");
  for (const std::string& o : overrides) apply_override(root, o);
  try {
    return run_from_json(root, base_dir);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("run config: ") + e.what());
  }
}

RunConfig load_run_config(const std::filesystem::path& path,
                          std::span<const std::string> overrides) {
  return parse_run_config(read_file(path), path.parent_path(), overrides);
}

RunConfig default_run_config(std::span<const std::string> overrides) {
  return parse_run_config("{}", std::filesystem::current_path(), overrides);
}

ArrayLayoutConfig parse_array_layout(std::string_view json_text) {
  try {
    return array_from_json(parse_json(json_text, "array layout"));
  } catch (const json::exception& e) {
    throw ConfigError(std::string("array layout: ") + e.what());
  }
}

ArrayLayoutConfig load_array_layout(const std::filesystem::path& path) {
  return parse_array_layout(read_file(path));
}

std::string array_layout_to_json(const ArrayLayoutConfig& layout) {
  json j;
  j["frequency_hz"] = layout.frequency;
  j["sound_speed_mm_s"] = layout.sound_speed;
  j["aperture_radius_mm"] = layout.aperture_radius;
  json holes = json::array();
  for (const auto& [r, c] : layout.grid.holes) holes.push_back({r, c});
  j["grid"] = {{"rows", layout.grid.rows},
               {"cols", layout.grid.cols},
               {"pitch_mm", layout.grid.pitch},
               {"holes", holes}};
  json units = json::array();
  for (const UnitPose& u : layout.units) {
    const Eigen::AngleAxisd aa(u.rotation);
    units.push_back({{"origin_mm", vec3_json(u.origin)},
                     {"axis", vec3_json(aa.axis())},
                     {"angle_deg", rad_to_deg(aa.angle())}});
  }
  j["units"] = units;
  if (layout.directivity_table) {
    json t = json::array();
    for (const auto& [a, g] : *layout.directivity_table) t.push_back({a, g});
    j["directivity_table"] = t;
  }
  return j.dump(2) + "\n";
}

const char* to_string(LmMode mode) { return mode == LmMode::single ? "S" : "M"; }

}  // namespace lmstim
