#include "arpsim/errors.hpp"
#include "arpsim/harness.hpp"

namespace arpsim {

namespace {

// Parameters shared by every preset: 20 pi nominal area, tau0 = 2.72 ps
// (sigma0 = 1.62 ps), two-photon resonance, 4 meV binding energy, 1 K.
SweepConfig base(std::string name, SweepKind kind) {
  SweepConfig c;
  c.name = std::move(name);
  c.kind = kind;
  c.pulse = PulseSpec{20.0, 1.62, 40.0, 0.0, 0.0};
  c.dot.binding_energy = 4.0;
  c.bath = PhononBath::gaas(1.0);
  c.defaults = {"bath material parameters (GaAs)", "bath.mode_count", "bath.cutoff", "dt"};
  return c;
}

SeriesSpec hierarchy(std::string label, std::optional<double> gdd = std::nullopt) {
  SeriesSpec s;
  s.label = std::move(label);
  s.propagator = PropagatorKind::correlation_expansion;
  s.truncation = Truncation::two_phonon;
  s.gdd = gdd;
  return s;
}

SeriesSpec unitary(std::string label, std::optional<double> gdd = std::nullopt) {
  SeriesSpec s;
  s.label = std::move(label);
  s.propagator = PropagatorKind::unitary;
  s.gdd = gdd;
  return s;
}

SweepConfig fig2a() {
  SweepConfig c = base("fig2a", SweepKind::populations);
  c.axes = {{AxisParameter::gdd, -60.0, 60.0, 25}, {AxisParameter::theta_nominal, 0.0, 25.0, 26}};
  c.series = {hierarchy("hierarchy")};
  // the +-60 ps^2 pulses span 4 sigma = 148 ps; 160 modes on 4 meV rephase after 165 ps
  c.bath.mode_count = 160;
  c.defaults.push_back("axes");
  return c;
}

SweepConfig fig2b() {
  SweepConfig c = base("fig2b", SweepKind::populations);
  c.axes = {{AxisParameter::detuning, -1.2, 1.2, 49}};
  c.series = {unitary("unitary_pos", 40.0), unitary("unitary_neg", -40.0),
              hierarchy("hierarchy_pos", 40.0), hierarchy("hierarchy_neg", -40.0)};
  return c;
}

SweepConfig fig3(std::string name, double gdd, double theta_max) {
  SweepConfig c = base(std::move(name), SweepKind::populations);
  c.pulse.gdd = gdd;
  c.axes = {{AxisParameter::detuning, -0.2, 0.2, 64}, {AxisParameter::theta_nominal, 0.0, theta_max, 48}};
  c.series = {hierarchy("hierarchy")};
  return c;
}

SweepConfig dressed(std::string name, double detuning_max, std::size_t steps) {
  SweepConfig c = base(std::move(name), SweepKind::dressed);
  c.axes = {{AxisParameter::detuning, -detuning_max, detuning_max, steps}};
  c.series = {unitary("dressed")};
  c.defaults = {"dt"};
  return c;
}

}  // namespace

std::vector<std::string> preset_names() {
  return {"fig2a", "fig2b", "fig3c", "fig3f", "dressed_fig5", "dressed_fig6", "dressed_fig7"};
}

SweepConfig preset(std::string_view name) {
  if (name == "fig2a") return fig2a();
  if (name == "fig2b") return fig2b();
  if (name == "fig3c") return fig3("fig3c", 0.0, 45.0);
  if (name == "fig3f") return fig3("fig3f", 40.0, 30.0);
  if (name == "dressed_fig5") return dressed("dressed_fig5", 0.2, 3);
  if (name == "dressed_fig6") {
    // the chirped 20 pi pulse's duration and area, without the chirp
    SweepConfig c = dressed("dressed_fig6", 1.0, 2);
    c.series[0].gdd = 0.0;
    c.series[0].theta_pi = 78.16;
    c.series[0].sigma0 = 24.74;
    return c;
  }
  if (name == "dressed_fig7") return dressed("dressed_fig7", 1.0, 2);

  std::string valid;
  for (const std::string& n : preset_names()) valid += (valid.empty() ? "" : ", ") + n;
  throw LookupError("unknown preset '" + std::string(name) + "' (valid: " + valid + ")");
}

}  // namespace arpsim
