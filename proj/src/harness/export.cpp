#include <cstdio>
#include <fstream>

#include "arpsim/errors.hpp"
#include "arpsim/harness.hpp"

namespace arpsim {

using nlohmann::json;

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string axis_column(AxisParameter p) {
  switch (p) {
    case AxisParameter::gdd: return "gdd_ps2";
    case AxisParameter::theta_nominal: return "theta_pi";
    case AxisParameter::detuning: return "detuning_meV";
    case AxisParameter::temperature: return "temperature_K";
  }
  return "?";
}

/// "series,<axis columns>" for every point row.
std::string row_prefix(const SweepResult& r, std::size_t series, std::size_t index) {
  std::string out = r.config.series[series].label;
  for (double v : r.coordinates(index)) out += "," + num(v);
  return out;
}

std::string header_prefix(const SweepResult& r) {
  std::string out = "series";
  for (const AxisSpec& a : r.config.axes) out += "," + axis_column(a.parameter);
  return out;
}

std::vector<std::string> point_columns(const SweepResult& r) {
  std::vector<std::string> cols{"series"};
  for (const AxisSpec& a : r.config.axes) cols.push_back(axis_column(a.parameter));
  for (const char* c : {"Pg", "Px", "Pxx", "status"}) cols.emplace_back(c);
  return cols;
}

}  // namespace

std::string sweep_csv(const SweepResult& r) {
  std::string out = header_prefix(r) + ",Pg,Px,Pxx,status\n";
  const std::size_t grid = r.grid_size();
  for (std::size_t s = 0; s < r.config.series.size(); ++s)
    for (std::size_t i = 0; i < grid; ++i) {
      const PointResult& p = r.at(s, i);
      out += row_prefix(r, s, i) + "," + num(p.occupations.g) + "," + num(p.occupations.x) + "," +
             num(p.occupations.xx) + "," + to_string(p.status) + "\n";
    }
  return out;
}

std::string dressed_csv(const SweepResult& r) {
  std::string out = header_prefix(r) + ",t_ps,E1_meV,E2_meV,E3_meV";
  for (int rank = 1; rank <= 3; ++rank)
    for (const char* level : {"g", "x", "xx"}) out += ",w" + std::to_string(rank) + "_" + level;
  out += ",branch1,branch2,branch3\n";
  const std::size_t grid = r.grid_size();
  for (std::size_t s = 0; s < r.config.series.size(); ++s)
    for (std::size_t i = 0; i < grid; ++i) {
      const std::string prefix = row_prefix(r, s, i);
      const DressedTrajectory& d = r.dressed[s * grid + i];
      for (std::size_t k = 0; k < d.times.size(); ++k) {
        out += prefix + "," + num(d.times[k]);
        for (double e : d.energies[k]) out += "," + num(e);
        for (std::size_t rank = 0; rank < 3; ++rank)
          for (Level level : {Level::g, Level::x, Level::xx}) out += "," + num(d.weight(k, rank, level));
        for (int b : d.branch[k]) out += "," + std::to_string(b);
        out += "\n";
      }
    }
  return out;
}

std::string events_csv(const SweepResult& r) {
  std::string out = header_prefix(r) +
                    ",type,t_ps,gap_meV,lower_rank,first,second,sweep_rate_meV_per_ps,diabatic_probability\n";
  const std::size_t grid = r.grid_size();
  for (std::size_t s = 0; s < r.config.series.size(); ++s)
    for (std::size_t i = 0; i < grid; ++i) {
      const std::string prefix = row_prefix(r, s, i);
      for (const SpectralEvent& e : r.dressed[s * grid + i].events)
        out += prefix + "," + (e.type == SpectralEventType::crossing ? "crossing" : "anticrossing") + "," +
               num(e.time) + "," + num(e.gap) + "," + std::to_string(e.lower_rank) + "," +
               level_name(e.first) + "," + level_name(e.second) + "," + num(e.sweep_rate) + "," +
               num(e.diabatic_probability) + "\n";
    }
  return out;
}

json sweep_json(const SweepResult& r) {
  json rows = json::array();
  const std::size_t grid = r.grid_size();
  for (std::size_t s = 0; s < r.config.series.size(); ++s)
    for (std::size_t i = 0; i < grid; ++i) {
      const PointResult& p = r.at(s, i);
      json row = json::array({r.config.series[s].label});
      for (double v : r.coordinates(i)) row.push_back(v);
      row.push_back(p.occupations.g);
      row.push_back(p.occupations.x);
      row.push_back(p.occupations.xx);
      row.push_back(to_string(p.status));
      rows.push_back(std::move(row));
    }
  return {{"name", r.config.name}, {"columns", point_columns(r)}, {"rows", rows}};
}

json manifest(const SweepResult& r) {
  json failures = json::array();
  const std::size_t grid = r.grid_size();
  for (std::size_t n = 0; n < r.points.size(); ++n)
    if (r.points[n].status != PointStatus::ok)
      failures.push_back({{"series", r.config.series[n / grid].label},
                          {"index", n % grid},
                          {"status", to_string(r.points[n].status)},
                          {"message", r.points[n].message}});
  return {{"version", version()},
          {"config", to_json(r.config)},
          {"columns", point_columns(r)},
          {"points", r.points.size()},
          {"failures", failures},
          {"workers", r.workers_used},
          {"wall_seconds", r.wall_seconds}};
}

json final_state_json(const PointJob& job, const TimeGrid& grid, const Trajectory& t) {
  const ChirpedPulse& p = job.pulse;
  const PhononBath& b = job.bath;
  const Occupations o = t.final_state();
  return {{"version", version()},
          {"propagator", to_string(job.propagator)},
          {"truncation", static_cast<int>(job.truncation)},
          {"dot", {{"binding_energy", job.dot.binding_energy}}},
          {"pulse",
           {{"theta_nominal", p.theta_nominal},
            {"sigma0", p.sigma0},
            {"gdd", p.gdd},
            {"detuning", p.detuning},
            {"phase", p.phase},
            {"sigma", p.sigma},
            {"chirp_rate", p.chirp_rate},
            {"theta_effective", p.theta_effective}}},
          {"bath",
           {{"mass_density", b.mass_density},
            {"sound_velocity", b.sound_velocity},
            {"deformation_electron", b.deformation_electron},
            {"deformation_hole", b.deformation_hole},
            {"localization_electron", b.electron_length()},
            {"localization_hole", b.hole_length()},
            {"temperature", b.temperature},
            {"mode_count", b.mode_count},
            {"cutoff", b.cutoff},
            {"coupling_scale", b.coupling_scale}}},
          {"fewmode_phonons", job.fewmode_phonons},
          {"grid", {{"start", grid.start}, {"stop", grid.stop}, {"intervals", grid.intervals}, {"dt", grid.step()}}},
          {"final", {{"Pg", o.g}, {"Px", o.x}, {"Pxx", o.xx}}},
          {"min_eigenvalue", t.min_eigenvalue},
          {"max_trace_error", t.max_trace_error},
          {"positivity_flagged", t.positivity_flagged}};
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open file for writing", path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.close();
  if (!out) throw IoError("failed writing file", path.string());
}

std::filesystem::path export_result(const SweepResult& r, ExportFormat format) {
  const std::filesystem::path dir = r.config.out_dir;
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory", dir.string());

  const std::string base = r.config.name;
  std::filesystem::path data;
  if (format == ExportFormat::csv) {
    data = dir / (base + ".csv");
    write_text(data, r.config.kind == SweepKind::dressed ? dressed_csv(r) : sweep_csv(r));
  } else {
    data = dir / (base + ".json");
    write_text(data, sweep_json(r).dump(2) + "\n");
  }
  if (r.config.kind == SweepKind::dressed) write_text(dir / (base + ".events.csv"), events_csv(r));
  write_text(dir / (base + ".manifest.json"), manifest(r).dump(2) + "\n");
  return data;
}

std::string trajectory_csv(const Trajectory& t) {
  std::string out = "t_ps,Pg,Px,Pxx,abs_rho_gx,abs_rho_gxx,abs_rho_xxx\n";
  for (std::size_t k = 0; k < t.times.size(); ++k) {
    const Occupations& o = t.occupations[k];
    out += num(t.times[k]) + "," + num(o.g) + "," + num(o.x) + "," + num(o.xx);
    for (double c : t.coherences[k]) out += "," + num(c);
    out += "\n";
  }
  return out;
}

std::string dressed_trajectory_csv(const DressedTrajectory& d) {
  std::string out = "t_ps,E1_meV,E2_meV,E3_meV";
  for (int rank = 1; rank <= 3; ++rank)
    for (const char* level : {"g", "x", "xx"}) out += ",w" + std::to_string(rank) + "_" + level;
  out += ",branch1,branch2,branch3\n";
  for (std::size_t k = 0; k < d.times.size(); ++k) {
    out += num(d.times[k]);
    for (double e : d.energies[k]) out += "," + num(e);
    for (std::size_t rank = 0; rank < 3; ++rank)
      for (Level level : {Level::g, Level::x, Level::xx}) out += "," + num(d.weight(k, rank, level));
    for (int b : d.branch[k]) out += "," + std::to_string(b);
    out += "\n";
  }
  return out;
}

std::string modes_csv(const DiscreteBath& bath) {
  std::string out = "energy_meV,coupling_rad_per_ps\n";
  for (const PhononMode& m : bath.modes) out += num(m.energy) + "," + num(m.coupling) + "\n";
  return out;
}

}  // namespace arpsim
