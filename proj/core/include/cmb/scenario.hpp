// Scenario runner: flat key=value configuration, engine defaults, and the
// CSV/JSON data products for plotting and regression.

#pragma once

#include <limits>
#include <string>
#include <vector>

#include "cmb/medium.hpp"
#include "cmb/propagation.hpp"
#include "cmb/pulse.hpp"

namespace cmb {

enum class Scenario { propagate, area_curve, soliton_check, convergence_check };
enum class PulseShape { rect, sech };

const char* to_string(Scenario s);
const char* to_string(PulseShape s);

struct ScenarioConfig {
    Scenario scenario = Scenario::propagate;
    double alphaL = 5.0;
    double t2_us = std::numeric_limits<double>::infinity();
    PulseShape pulse_shape = PulseShape::rect;
    double area_pi_units = 1.0;  // fixed at 2 for sech
    double duration_us = 7.0;    // rect duration
    double tau_s_us = 1.0;       // sech width
    // grid overrides; 0 = derive from the pulse and window defaults
    int nz = 0;
    int n_omega = 0;
    double dmax = 0.0;    // rad/us
    double dt_us = 0.0;   // sample interval = solver step
    std::string out_dir = ".";

    bool operator==(const ScenarioConfig&) const = default;
};

// Parse a flat UTF-8 "key = value" document ('#' comments). Returns a
// fully-defaulted, validated config; unknown keys and invariant violations
// are ConfigErrors listing every problem with its line.
ScenarioConfig parse_config(const std::string& text);

// Inverse of parse_config: parse_config(serialize(c)) == c.
std::string serialize(const ScenarioConfig& cfg);

// Engine-level inputs resolved from a scenario config.
struct BuiltScenario {
    MediumConfig medium;
    PulseEnvelope input;
    double window_us = 0.0;
};
BuiltScenario build_scenario(const ScenarioConfig& cfg);

struct ScenarioOutcome {
    bool pass = true;
    std::vector<std::string> files;
};

// Single run; writes timeseries.csv, inversion.csv, metrics.json.
ScenarioOutcome scenario_propagate(const ScenarioConfig& cfg);

// Sweep A_in = 0.1pi .. 3.9pi step 0.1pi; writes area_curve.csv with the
// analytic columns filled for T2 = inf (left empty otherwise).
ScenarioOutcome scenario_area_curve(const ScenarioConfig& cfg);

// 2pi sech run; writes soliton.csv and fidelity.json.
ScenarioOutcome scenario_soliton_check(const ScenarioConfig& cfg);

// Refinement study; writes convergence.csv, pass = all axes below 0.5%.
ScenarioOutcome scenario_convergence(const ScenarioConfig& cfg);

ScenarioOutcome run_scenario(const ScenarioConfig& cfg);

// Format a double with 9 significant digits, locale-independent.
std::string format9(double x);

} // namespace cmb
