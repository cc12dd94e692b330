// Parameter sweeps over pulse, dot and bath settings, figure presets, file
// export and the command-line front end.

#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "arpsim/dynamics.hpp"
#include "arpsim/phonon.hpp"
#include "arpsim/pulse.hpp"
#include "arpsim/qdsystem.hpp"

namespace arpsim {

std::string version();

enum class AxisParameter { gdd, theta_nominal, detuning, temperature };
enum class PropagatorKind { unitary, correlation_expansion, fewmode_exact, dressed_rates };
enum class SweepKind { populations, dressed };
enum class ExportFormat { csv, json };

std::string to_string(AxisParameter p);
std::string to_string(PropagatorKind p);
std::string to_string(SweepKind k);
std::string to_string(ExportFormat f);
AxisParameter parse_axis_parameter(std::string_view s);
PropagatorKind parse_propagator(std::string_view s);
SweepKind parse_sweep_kind(std::string_view s);
ExportFormat parse_export_format(std::string_view s);

/// Evenly spaced values min..max inclusive; steps = 1 gives {min}.
/// theta_nominal axes are in units of pi.
struct AxisSpec {
  AxisParameter parameter = AxisParameter::detuning;
  double min = 0.0;
  double max = 0.0;
  std::size_t steps = 1;

  std::vector<double> values() const;
};

/// Pulse inputs; theta in units of pi.
struct PulseSpec {
  double theta_pi = 20.0;
  double sigma0 = 1.62;
  double gdd = 40.0;
  double detuning = 0.0;
  double phase = 0.0;
};

/// One curve or map of a sweep. Unset overrides inherit from the config.
struct SeriesSpec {
  std::string label;
  PropagatorKind propagator = PropagatorKind::unitary;
  Truncation truncation = Truncation::two_phonon;
  std::optional<double> theta_pi;
  std::optional<double> sigma0;
  std::optional<double> gdd;
  std::optional<double> detuning;
  std::optional<double> temperature;
};

struct SweepConfig {
  std::string name = "sweep";
  SweepKind kind = SweepKind::populations;
  std::vector<AxisSpec> axes;      // at most two, row-major with axes[0] slowest
  std::vector<SeriesSpec> series;  // at least one
  DotModel dot;
  PulseSpec pulse;
  PhononBath bath;
  double dt = 0.0;                 // ps, 0 selects default_time_step
  int fewmode_phonons = 4;         // Fock cutoff per mode for fewmode_exact
  std::size_t memory_cap_bytes = std::size_t{1} << 30;
  std::filesystem::path out_dir = ".";
  std::size_t workers = 0;         // 0 = hardware concurrency
  std::vector<std::string> defaults;  // settings chosen as defaults rather than taken from a source

  /// Throws ConfigError on the first violated constraint.
  void validate() const;
  std::size_t grid_size() const;
};

nlohmann::json to_json(const SweepConfig& config);
/// Unknown keys are rejected; missing keys keep their defaults.
SweepConfig config_from_json(const nlohmann::json& j);
/// Reads and validates a JSON config file. Throws ConfigError.
SweepConfig load_config(const std::filesystem::path& path);

/// Named configurations reproducing the published figures.
std::vector<std::string> preset_names();
/// Throws LookupError listing the valid names.
SweepConfig preset(std::string_view name);

/// Fully resolved inputs of one grid point.
struct PointJob {
  std::size_t series = 0;
  std::size_t index = 0;  // row-major position within the series grid
  PropagatorKind propagator = PropagatorKind::unitary;
  Truncation truncation = Truncation::two_phonon;
  DotModel dot;
  ChirpedPulse pulse;
  PhononBath bath;
  double dt = 0.0;
  int fewmode_phonons = 4;
  std::size_t memory_cap_bytes = 0;
};

enum class PointStatus { ok, integration_failure, error };
std::string to_string(PointStatus s);

struct PointResult {
  Occupations occupations;
  PointStatus status = PointStatus::ok;
  std::string message;
};

struct SweepResult {
  SweepConfig config;
  std::vector<std::vector<double>> axis_values;
  std::vector<PointResult> points;            // series-major, then row-major over axes
  std::vector<DressedTrajectory> dressed;     // same layout, dressed sweeps only
  double wall_seconds = 0.0;
  std::size_t workers_used = 0;

  std::size_t grid_size() const;
  const PointResult& at(std::size_t series, std::size_t index) const;
  /// Axis values of a row-major grid index.
  std::vector<double> coordinates(std::size_t index) const;
};

using PointEvaluator = std::function<Occupations(const PointJob&)>;

/// Runs the propagator named by each job.
Occupations evaluate_point(const PointJob& job);
/// Time grid used for a job: pulse support at job.dt or the default step.
TimeGrid job_time_grid(const PointJob& job);

/// Resolves every grid point of every series.
std::vector<PointJob> expand_jobs(const SweepConfig& config);

/// Evaluates all points on a worker pool. Failed points carry their status;
/// throws SweepFailure when no point succeeds.
SweepResult run_sweep(const SweepConfig& config, const PointEvaluator& evaluator = evaluate_point);

class SweepFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Worker count: config value, else SIM_WORKERS, else hardware concurrency.
std::size_t resolve_workers(std::size_t requested);

// Export. CSV numbers use 17 significant digits and '\n' line ends.
std::string sweep_csv(const SweepResult& result);
std::string dressed_csv(const SweepResult& result);
std::string events_csv(const SweepResult& result);
nlohmann::json sweep_json(const SweepResult& result);
nlohmann::json manifest(const SweepResult& result);
/// Writes <name>.csv or <name>.json plus <name>.manifest.json into
/// config.out_dir; dressed sweeps add <name>.events.csv. Returns the data file.
std::filesystem::path export_result(const SweepResult& result, ExportFormat format);

std::string trajectory_csv(const Trajectory& trajectory);
/// Final occupations of a single propagation with every input that produced them.
nlohmann::json final_state_json(const PointJob& job, const TimeGrid& grid, const Trajectory& trajectory);
std::string dressed_trajectory_csv(const DressedTrajectory& trajectory);
std::string modes_csv(const DiscreteBath& bath);
/// Throws IoError carrying the path.
void write_text(const std::filesystem::path& path, std::string_view text);

/// Command-line entry point. Returns 0 on success, 1 on usage or config
/// errors, 2 on runtime failures.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace arpsim
