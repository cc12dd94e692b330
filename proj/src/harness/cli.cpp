#include <CLI11.hpp>
#include <cstdio>
#include <ostream>

#include "arpsim/errors.hpp"
#include "arpsim/harness.hpp"
#include "arpsim/units.hpp"

namespace arpsim {

using nlohmann::json;

namespace {

struct PulseFlags {
  double theta_pi = 20.0;
  double sigma0 = 1.62;
  double gdd = 40.0;
  double detuning = 0.0;
  double binding_energy = 4.0;

  void attach(CLI::App* app) {
    app->add_option("--theta-pi", theta_pi, "nominal pulse area in units of pi")->capture_default_str();
    app->add_option("--sigma0", sigma0, "transform-limited envelope width (ps)")->capture_default_str();
    app->add_option("--gdd", gdd, "group delay dispersion (ps^2)")->capture_default_str();
    app->add_option("--detuning", detuning, "detuning from two-photon resonance (meV)")->capture_default_str();
    app->add_option("--binding-energy", binding_energy, "biexciton binding energy (meV)")->capture_default_str();
  }
  ChirpedPulse pulse() const { return build_pulse(theta_pi * units::pi, sigma0, gdd, detuning); }
  DotModel dot() const { return DotModel{binding_energy}; }
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

void print_fields(std::ostream& out, ExportFormat format, const std::vector<std::pair<std::string, double>>& fields) {
  if (format == ExportFormat::json) {
    json j = json::object();
    for (const auto& [k, v] : fields) j[k] = v;
    out << j.dump(2) << "\n";
    return;
  }
  for (const auto& [k, v] : fields) out << k << " = " << fmt(v) << "\n";
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Chirped-pulse biexciton preparation simulator"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", version());

  std::string out_dir;
  std::size_t workers = 0;
  std::string format_name = "csv";
  app.add_option("--out-dir", out_dir, "output directory");
  app.add_option("--workers", workers, "worker threads (0 = SIM_WORKERS or all cores)");
  app.add_option("--format", format_name, "output format")->check(CLI::IsMember({"csv", "json"}));

  PulseFlags pulse_flags;
  auto* pulse_cmd = app.add_subcommand("pulse", "print derived pulse quantities");
  pulse_flags.attach(pulse_cmd);

  double lambda = 793e-9, focal = 0.75, distance = 0.20, grooves = 1200e3, aoi = 2.0;
  auto* stretcher_cmd = app.add_subcommand("stretcher", "GDD of a grating stretcher (SI units)");
  stretcher_cmd->add_option("--lambda", lambda, "central wavelength (m)")->capture_default_str();
  stretcher_cmd->add_option("--f", focal, "lens focal length (m)")->capture_default_str();
  stretcher_cmd->add_option("--s", distance, "grating-lens distance (m)")->capture_default_str();
  stretcher_cmd->add_option("--grooves", grooves, "groove density (lines/m)")->capture_default_str();
  stretcher_cmd->add_option("--aoi", aoi, "angle of incidence (deg)")->capture_default_str();

  PulseFlags dressed_flags;
  std::string dressed_name = "dressed";
  double dressed_dt = 0.0;
  auto* dressed_cmd = app.add_subcommand("dressed", "export a dressed-state trajectory");
  dressed_flags.attach(dressed_cmd);
  dressed_cmd->add_option("--name", dressed_name, "output base name")->capture_default_str();
  dressed_cmd->add_option("--dt", dressed_dt, "time step (ps), 0 = default");

  PulseFlags prop_flags;
  std::string propagator = "unitary";
  int truncation = 2;
  PhononBath bath;
  double prop_dt = 0.0;
  int fewmode_phonons = 4;
  std::string prop_name;
  auto* prop_cmd = app.add_subcommand("propagate", "run one propagation");
  prop_flags.attach(prop_cmd);
  prop_cmd->add_option("--propagator", propagator)
      ->check(CLI::IsMember({"unitary", "correlation_expansion", "fewmode_exact", "dressed_rates"}))
      ->capture_default_str();
  prop_cmd->add_option("--truncation", truncation, "phonon truncation order")->check(CLI::IsMember({1, 2}))
      ->capture_default_str();
  prop_cmd->add_option("--temperature", bath.temperature, "bath temperature (K)")->capture_default_str();
  prop_cmd->add_option("--modes", bath.mode_count, "number of phonon modes")->capture_default_str();
  prop_cmd->add_option("--cutoff", bath.cutoff, "highest mode energy (meV)")->capture_default_str();
  prop_cmd->add_option("--coupling-scale", bath.coupling_scale, "multiplier on all couplings")->capture_default_str();
  prop_cmd->add_option("--dt", prop_dt, "time step (ps), 0 = default");
  prop_cmd->add_option("--fewmode-phonons", fewmode_phonons, "Fock cutoff per mode")->capture_default_str();
  prop_cmd->add_option("--name", prop_name, "write the trajectory to <out-dir>/<name>.csv");

  std::string preset_name, config_path;
  auto* sweep_cmd = app.add_subcommand("sweep", "run a parameter sweep");
  auto* preset_opt = sweep_cmd->add_option("--preset", preset_name, "named preset");
  auto* config_opt = sweep_cmd->add_option("--config", config_path, "JSON config file");
  preset_opt->excludes(config_opt);
  sweep_cmd->require_option(1);

  auto* presets_cmd = app.add_subcommand("presets", "list preset names");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    const ExportFormat format = parse_export_format(format_name);
    const std::filesystem::path dir = out_dir.empty() ? std::filesystem::path(".") : std::filesystem::path(out_dir);

    if (*pulse_cmd) {
      const ChirpedPulse p = pulse_flags.pulse();
      print_fields(out, format,
                   {{"sigma0_ps", p.sigma0},
                    {"sigma_ps", p.sigma},
                    {"tau0_fwhm_ps", p.transform_limited_fwhm()},
                    {"tau_fwhm_ps", p.duration_fwhm()},
                    {"chirp_rate_rad_per_ps2", p.chirp_rate},
                    {"theta_nominal_pi", p.theta_nominal / units::pi},
                    {"theta_effective_pi", p.theta_effective / units::pi},
                    {"peak_rabi_rad_per_ps", p.peak_rabi()},
                    {"bandwidth_rad_per_ps", p.bandwidth()}});
    } else if (*stretcher_cmd) {
      const double gdd = stretcher_gdd(lambda * 1e9, focal * 1e3, distance * 1e3, grooves * 1e-3, aoi);
      print_fields(out, format, {{"gdd_ps2", gdd}});
    } else if (*dressed_cmd) {
      const ChirpedPulse p = dressed_flags.pulse();
      const DotModel dot = dressed_flags.dot();
      const double dt = dressed_dt > 0.0 ? dressed_dt : default_time_step(dot, p);
      const DressedTrajectory d = dressed_trajectory(dot, p, TimeGrid::with_max_step(-p.support(), p.support(), dt));
      std::filesystem::create_directories(dir);
      write_text(dir / (dressed_name + ".csv"), dressed_trajectory_csv(d));
      for (const SpectralEvent& e : d.events)
        out << (e.type == SpectralEventType::crossing ? "crossing" : "anticrossing") << " " << level_name(e.first)
            << "-" << level_name(e.second) << " t = " << fmt(e.time) << " ps, gap = " << fmt(e.gap) << " meV\n";
      out << "wrote " << (dir / (dressed_name + ".csv")).string() << "\n";
    } else if (*prop_cmd) {
      PointJob job;
      job.propagator = parse_propagator(propagator);
      job.truncation = static_cast<Truncation>(truncation);
      job.dot = prop_flags.dot();
      job.pulse = prop_flags.pulse();
      job.bath = bath;
      job.dt = prop_dt;
      job.fewmode_phonons = fewmode_phonons;
      job.memory_cap_bytes = std::size_t{1} << 30;
      const TimeGrid grid = job_time_grid(job);
      Trajectory t;
      switch (job.propagator) {
        case PropagatorKind::unitary: t = propagate_unitary(job.dot, job.pulse, grid); break;
        case PropagatorKind::correlation_expansion: {
          CorrelationOptions options;
          options.truncation = job.truncation;
          t = propagate_correlation_expansion(job.dot, job.pulse, discretize_bath(bath), grid, options);
          break;
        }
        case PropagatorKind::fewmode_exact:
          t = propagate_fewmode_exact(job.dot, job.pulse, discretize_bath(bath), fewmode_phonons, grid);
          break;
        case PropagatorKind::dressed_rates: t = propagate_dressed_rates(job.dot, job.pulse, bath, grid); break;
      }
      const Occupations o = t.final_state();
      print_fields(out, format, {{"Pg", o.g}, {"Px", o.x}, {"Pxx", o.xx}, {"min_eigenvalue", t.min_eigenvalue}});
      if (!prop_name.empty()) {
        std::filesystem::create_directories(dir);
        write_text(dir / (prop_name + ".csv"), trajectory_csv(t));
        write_text(dir / (prop_name + ".json"), final_state_json(job, grid, t).dump(2) + "\n");
      }
    } else if (*sweep_cmd) {
      SweepConfig config = preset_name.empty() ? load_config(config_path) : preset(preset_name);
      if (!out_dir.empty()) config.out_dir = out_dir;
      if (workers > 0) config.workers = workers;
      const SweepResult result = run_sweep(config);
      const std::filesystem::path path = export_result(result, format);
      std::size_t failed = 0;
      for (const PointResult& p : result.points) failed += p.status != PointStatus::ok;
      out << "wrote " << path.string() << " (" << result.points.size() << " points, " << failed << " failed, "
          << fmt(result.wall_seconds) << " s)\n";
    } else if (*presets_cmd) {
      for (const std::string& n : preset_names()) out << n << "\n";
    }
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return 1;
  } catch (const LookupError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const InvalidParameter& e) {
    err << "invalid parameter: " << e.what() << "\n";
    return 1;
  } catch (const EvanescentOrder& e) {
    err << "invalid geometry: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "runtime failure: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

}  // namespace arpsim
