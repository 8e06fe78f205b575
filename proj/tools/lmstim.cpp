// lmstim: stimulus synthesis and field simulation front end.

#include "lmstim/commands.hpp"
#include "lmstim/config.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

struct Common {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out;
  int workers = -1;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("-c,--config", c.config_path, "JSON run configuration")->check(CLI::ExistingFile);
  cmd->add_option("-s,--set", c.overrides, "override a config key, e.g. stimulus.radius_mm=4");
  cmd->add_option("-o,--out", c.out, "output directory (overrides output_dir)");
  cmd->add_option("-j,--workers", c.workers, "field worker threads, 0 = all cores")
      ->check(CLI::NonNegativeNumber);
}

// Precedence: built-in defaults < config file < --set overrides < dedicated flags.
lmstim::RunConfig resolve(const Common& c) {
  lmstim::RunConfig cfg = c.config_path.empty()
                              ? lmstim::default_run_config(c.overrides)
                              : lmstim::load_run_config(c.config_path, c.overrides);
  if (!c.out.empty()) cfg.output_dir = c.out;
  if (c.workers >= 0) cfg.workers = static_cast<unsigned>(c.workers);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lateral-modulation ultrasound stimulus synthesizer and field simulator"};
  app.require_subcommand(1);

  Common common;
  auto* traj = app.add_subcommand("traj", "write the focal trajectory and foci schedule");
  auto* drive = app.add_subcommand("drive", "write the per-step phase drive stream");
  auto* field = app.add_subcommand("field", "simulate a radiation-pressure map");
  auto* spectrum = app.add_subcommand("spectrum", "simulate a temporal-spectrum power map");
  auto* contact = app.add_subcommand("contact", "run the contact-tracking render loop on a depth stream");
  auto* synth = app.add_subcommand("synth-depth", "write a synthetic fingertip depth stream");
  auto* validate = app.add_subcommand("validate", "check a configuration and write a validation report");
  auto* figures = app.add_subcommand("reproduce-figures", "write the simulated figure set and metrics report");
  for (auto* cmd : {traj, drive, field, spectrum, contact, synth, validate, figures}) {
    add_common(cmd, common);
  }

  lmstim::FieldRequest request;
  std::string kind = "instant";
  double target = 0.0;
  field->add_option("-k,--kind", kind, "instant | time_avg | spectrum")
      ->check(CLI::IsMember({"instant", "time_avg", "spectrum"}));
  field->add_option("-f,--target-freq", target, "spectrum bin frequency in Hz");
  field->add_option("--step", request.step, "1-based drive step for instant maps");
  field->add_option("--prominence", request.prominence, "peak threshold as a fraction of the maximum");
  std::vector<double> focus;
  field->add_option("--focus", focus, "static focus x y z in mm (instant maps only)")->expected(3);
  spectrum->add_option("-f,--target-freq", target, "bin frequency in Hz (default: the LM frequency)");
  spectrum->add_option("--prominence", request.prominence, "peak threshold as a fraction of the maximum");

  std::string stream_path;
  contact->add_option("stream", stream_path, "depth stream (default: contact.stream from the config)");

  lmstim::FingerModel finger;
  std::vector<double> tip, velocity;
  synth->add_option("--tip", tip, "sphere centre at t = 0, mm")->expected(3);
  synth->add_option("--velocity", velocity, "finger velocity, mm/s")->expected(3);
  synth->add_option("--radius", finger.tip_radius, "fingertip radius, mm");
  synth->add_option("--noise", finger.noise_sigma, "depth noise sigma, mm");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const lmstim::RunConfig cfg = resolve(common);
    if (*traj) {
      lmstim::cmd_traj(cfg, std::cout);
    } else if (*drive) {
      lmstim::cmd_drive(cfg, std::cout);
    } else if (*field) {
      request.kind = lmstim::field_kind_from_string(kind);
      if (field->count("--target-freq") > 0) request.target_frequency = target;
      if (!focus.empty()) request.focus = lmstim::Vec3(focus[0], focus[1], focus[2]);
      lmstim::cmd_field(cfg, request, std::cout);
    } else if (*spectrum) {
      request.kind = lmstim::FieldKind::spectrum;
      request.target_frequency =
          spectrum->count("--target-freq") > 0 ? target : cfg.stimulus.lm_frequency;
      lmstim::cmd_field(cfg, request, std::cout);
    } else if (*contact) {
      const std::string path = stream_path.empty() ? cfg.contact.stream_path : stream_path;
      if (path.empty()) throw lmstim::ConfigError("no depth stream given");
      lmstim::cmd_contact(cfg, path, std::cout);
    } else if (*synth) {
      finger.seed = cfg.seed;
      if (!tip.empty()) finger.tip_start = lmstim::Vec3(tip[0], tip[1], tip[2]);
      if (!velocity.empty()) finger.velocity = lmstim::Vec3(velocity[0], velocity[1], velocity[2]);
      lmstim::cmd_synth_depth(cfg, finger, std::cout);
    } else if (*validate) {
      return lmstim::cmd_validate(cfg, std::cout);
    } else if (*figures) {
      lmstim::cmd_reproduce_figures(cfg, std::cout);
    }
  } catch (const lmstim::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const lmstim::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
