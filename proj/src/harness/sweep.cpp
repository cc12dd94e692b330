#include <atomic>
#include <chrono>
#include <cstdlib>
#include <string>
#include <thread>

#include "arpsim/errors.hpp"
#include "arpsim/harness.hpp"
#include "arpsim/units.hpp"

namespace arpsim {

std::string to_string(PointStatus s) {
  switch (s) {
    case PointStatus::ok: return "ok";
    case PointStatus::integration_failure: return "integration_failure";
    case PointStatus::error: return "error";
  }
  return "?";
}

std::size_t SweepResult::grid_size() const {
  std::size_t n = 1;
  for (const auto& axis : axis_values) n *= axis.size();
  return n;
}

const PointResult& SweepResult::at(std::size_t series, std::size_t index) const {
  return points.at(series * grid_size() + index);
}

std::vector<double> SweepResult::coordinates(std::size_t index) const {
  std::vector<double> out(axis_values.size());
  for (std::size_t a = axis_values.size(); a-- > 0;) {
    out[a] = axis_values[a][index % axis_values[a].size()];
    index /= axis_values[a].size();
  }
  return out;
}

std::size_t resolve_workers(std::size_t requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("SIM_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<PointJob> expand_jobs(const SweepConfig& config) {
  config.validate();
  std::vector<std::vector<double>> axis_values;
  for (const AxisSpec& a : config.axes) axis_values.push_back(a.values());
  const std::size_t grid = config.grid_size();

  std::vector<PointJob> jobs;
  jobs.reserve(grid * config.series.size());
  for (std::size_t s = 0; s < config.series.size(); ++s) {
    const SeriesSpec& series = config.series[s];
    for (std::size_t index = 0; index < grid; ++index) {
      PulseSpec p = config.pulse;
      PhononBath bath = config.bath;
      if (series.theta_pi) p.theta_pi = *series.theta_pi;
      if (series.sigma0) p.sigma0 = *series.sigma0;
      if (series.gdd) p.gdd = *series.gdd;
      if (series.detuning) p.detuning = *series.detuning;
      if (series.temperature) bath.temperature = *series.temperature;

      std::size_t rest = index;
      for (std::size_t a = config.axes.size(); a-- > 0;) {
        const double v = axis_values[a][rest % axis_values[a].size()];
        rest /= axis_values[a].size();
        switch (config.axes[a].parameter) {
          case AxisParameter::gdd: p.gdd = v; break;
          case AxisParameter::theta_nominal: p.theta_pi = v; break;
          case AxisParameter::detuning: p.detuning = v; break;
          case AxisParameter::temperature: bath.temperature = v; break;
        }
      }

      PointJob job;
      job.series = s;
      job.index = index;
      job.propagator = series.propagator;
      job.truncation = series.truncation;
      job.dot = config.dot;
      job.pulse = build_pulse(p.theta_pi * units::pi, p.sigma0, p.gdd, p.detuning, p.phase);
      job.bath = bath;
      job.dt = config.dt;
      job.fewmode_phonons = config.fewmode_phonons;
      job.memory_cap_bytes = config.memory_cap_bytes;
      jobs.push_back(job);
    }
  }
  return jobs;
}

TimeGrid job_time_grid(const PointJob& job) {
  double cutoff = 0.0;
  if (job.propagator == PropagatorKind::correlation_expansion && job.bath.mode_count > 0)
    cutoff = job.bath.cutoff;
  if (job.propagator == PropagatorKind::fewmode_exact && job.bath.mode_count > 0)
    cutoff = job.bath.cutoff * (1.0 + job.fewmode_phonons * static_cast<double>(job.bath.mode_count));
  const double dt = job.dt > 0.0 ? job.dt : default_time_step(job.dot, job.pulse, cutoff);
  return TimeGrid::with_max_step(-job.pulse.support(), job.pulse.support(), dt);
}

Occupations evaluate_point(const PointJob& job) {
  const TimeGrid grid = job_time_grid(job);
  const PropagationOptions sparse{grid.intervals};
  switch (job.propagator) {
    case PropagatorKind::unitary:
      return propagate_unitary(job.dot, job.pulse, grid, sparse).final_state();
    case PropagatorKind::correlation_expansion: {
      CorrelationOptions options;
      options.truncation = job.truncation;
      options.memory_cap_bytes = job.memory_cap_bytes;
      options.record_every = grid.intervals;
      return propagate_correlation_expansion(job.dot, job.pulse, discretize_bath(job.bath), grid, options)
          .final_state();
    }
    case PropagatorKind::fewmode_exact:
      return propagate_fewmode_exact(job.dot, job.pulse, discretize_bath(job.bath), job.fewmode_phonons,
                                     grid, sparse)
          .final_state();
    case PropagatorKind::dressed_rates:
      return propagate_dressed_rates(job.dot, job.pulse, job.bath, grid, sparse).final_state();
  }
  throw InvalidParameter("unknown propagator");
}

SweepResult run_sweep(const SweepConfig& config, const PointEvaluator& evaluator) {
  const auto started = std::chrono::steady_clock::now();
  const std::vector<PointJob> jobs = expand_jobs(config);

  SweepResult result;
  result.config = config;
  for (const AxisSpec& a : config.axes) result.axis_values.push_back(a.values());
  result.points.resize(jobs.size());
  if (config.kind == SweepKind::dressed) result.dressed.resize(jobs.size());
  result.workers_used = std::min(resolve_workers(config.workers), std::max<std::size_t>(jobs.size(), 1));

  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      PointResult& slot = result.points[i];
      try {
        if (config.kind == SweepKind::dressed)
          result.dressed[i] = dressed_trajectory(jobs[i].dot, jobs[i].pulse, job_time_grid(jobs[i]));
        else
          slot.occupations = evaluator(jobs[i]);
      } catch (const IntegrationFailure& e) {
        slot.status = PointStatus::integration_failure;
        slot.message = e.what();
      } catch (const std::exception& e) {
        slot.status = PointStatus::error;
        slot.message = e.what();
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 1; w < result.workers_used; ++w) pool.emplace_back(work);
    work();
  }

  std::size_t failed = 0;
  for (const PointResult& p : result.points)
    if (p.status != PointStatus::ok) ++failed;
  if (!jobs.empty() && failed == jobs.size())
    throw SweepFailure("all " + std::to_string(failed) + " points failed; first: " + result.points[0].message);

  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return result;
}

}  // namespace arpsim
