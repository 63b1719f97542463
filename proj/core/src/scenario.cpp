#include "cmb/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>
#include <sstream>

#include <json.hpp>

#include "cmb/analysis.hpp"
#include "cmb/errors.hpp"

namespace cmb {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

const char* const kConfigKeys[] = {
    "scenario",   "alphaL",  "t2_us", "pulse_shape", "area_pi_units",
    "duration_us", "tau_s_us", "nz",   "n_omega",     "dmax",
    "dt_us",      "out_dir",
};

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

bool parse_double(const std::string& v, double& out) {
    const char* begin = v.c_str();
    char* end = nullptr;
    out = std::strtod(begin, &end);
    return end == begin + v.size() && v.size() > 0 && std::isfinite(out);
}

bool parse_int(const std::string& v, int& out) {
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    return res.ec == std::errc{} && res.ptr == v.data() + v.size();
}

} // namespace

const char* to_string(Scenario s) {
    switch (s) {
        case Scenario::propagate: return "propagate";
        case Scenario::area_curve: return "area-curve";
        case Scenario::soliton_check: return "soliton-check";
        case Scenario::convergence_check: return "convergence-check";
    }
    return "?";
}

const char* to_string(PulseShape s) {
    return s == PulseShape::rect ? "rect" : "sech";
}

std::string format9(double x) {
    char buf[40];
    const auto res =
        std::to_chars(buf, buf + sizeof(buf), x, std::chars_format::general, 9);
    return std::string(buf, res.ptr);
}

ScenarioConfig parse_config(const std::string& text) {
    ScenarioConfig cfg;
    std::vector<std::string> errors;
    bool area_set = false;
    bool shape_set = false;

    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;

        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            errors.push_back("line " + std::to_string(line_no) +
                             ": expected 'key = value'");
            continue;
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        auto bad_value = [&](const std::string& why) {
            errors.push_back("line " + std::to_string(line_no) + ": key '" +
                             key + "': " + why);
        };

        if (key == "scenario") {
            if (value == "propagate") cfg.scenario = Scenario::propagate;
            else if (value == "area-curve") cfg.scenario = Scenario::area_curve;
            else if (value == "soliton-check") cfg.scenario = Scenario::soliton_check;
            else if (value == "convergence-check") cfg.scenario = Scenario::convergence_check;
            else bad_value("unknown scenario '" + value + "'");
        } else if (key == "alphaL") {
            if (!parse_double(value, cfg.alphaL)) bad_value("not a number");
        } else if (key == "t2_us") {
            if (value == "inf") cfg.t2_us = kInf;
            else if (!parse_double(value, cfg.t2_us)) bad_value("not a number or 'inf'");
        } else if (key == "pulse_shape") {
            shape_set = true;
            if (value == "rect") cfg.pulse_shape = PulseShape::rect;
            else if (value == "sech") cfg.pulse_shape = PulseShape::sech;
            else bad_value("must be 'rect' or 'sech'");
        } else if (key == "area_pi_units") {
            area_set = true;
            if (!parse_double(value, cfg.area_pi_units)) bad_value("not a number");
        } else if (key == "duration_us") {
            if (!parse_double(value, cfg.duration_us)) bad_value("not a number");
        } else if (key == "tau_s_us") {
            if (!parse_double(value, cfg.tau_s_us)) bad_value("not a number");
        } else if (key == "nz") {
            if (!parse_int(value, cfg.nz)) bad_value("not an integer");
        } else if (key == "n_omega") {
            if (!parse_int(value, cfg.n_omega)) bad_value("not an integer");
        } else if (key == "dmax") {
            if (!parse_double(value, cfg.dmax)) bad_value("not a number");
        } else if (key == "dt_us") {
            if (!parse_double(value, cfg.dt_us)) bad_value("not a number");
        } else if (key == "out_dir") {
            cfg.out_dir = value;
        } else {
            errors.push_back("line " + std::to_string(line_no) +
                             ": unknown key '" + key + "'");
        }
    }

    // soliton-check implies a sech pulse; sech pulses carry a fixed 2pi area
    if (cfg.scenario == Scenario::soliton_check && !shape_set)
        cfg.pulse_shape = PulseShape::sech;
    if (cfg.pulse_shape == PulseShape::sech && !area_set)
        cfg.area_pi_units = 2.0;

    if (!(cfg.alphaL > 0.0))
        errors.push_back("invariant: alphaL must be > 0");
    if (!(cfg.t2_us > 0.0))
        errors.push_back("invariant: t2_us must be > 0 (or 'inf')");
    if (cfg.scenario == Scenario::soliton_check &&
        cfg.pulse_shape != PulseShape::sech)
        errors.push_back("invariant: soliton-check requires pulse_shape = sech");
    if (cfg.pulse_shape == PulseShape::sech && cfg.area_pi_units != 2.0)
        errors.push_back("invariant: sech pulse area is fixed at 2 pi");
    if (cfg.pulse_shape == PulseShape::rect && !(cfg.area_pi_units > 0.0) &&
        cfg.scenario != Scenario::area_curve)
        errors.push_back("invariant: area_pi_units must be > 0");
    if (!(cfg.duration_us > 0.0))
        errors.push_back("invariant: duration_us must be > 0");
    if (!(cfg.tau_s_us > 0.0))
        errors.push_back("invariant: tau_s_us must be > 0");
    if (cfg.nz != 0) {
        if (cfg.nz < 2)
            errors.push_back("invariant: nz must be >= 2");
        else if (cfg.alphaL > 0.0 && cfg.alphaL / (cfg.nz - 1) > 0.1 + 1e-12)
            errors.push_back("invariant: slab spacing alphaL/(nz-1) must be <= 0.1");
    }
    if (cfg.n_omega != 0 && (cfg.n_omega < 3 || cfg.n_omega % 2 == 0))
        errors.push_back("invariant: n_omega must be odd and >= 3");
    if (cfg.dmax < 0.0) errors.push_back("invariant: dmax must be >= 0");
    if (cfg.dt_us < 0.0) errors.push_back("invariant: dt_us must be >= 0");

    if (!errors.empty()) {
        std::string msg = "config errors:";
        for (const auto& e : errors) msg += "\n  - " + e;
        throw ConfigError(msg);
    }
    return cfg;
}

std::string serialize(const ScenarioConfig& cfg) {
    std::ostringstream out;
    out << "scenario = " << to_string(cfg.scenario) << "\n";
    out << "alphaL = " << format9(cfg.alphaL) << "\n";
    out << "t2_us = "
        << (std::isinf(cfg.t2_us) ? std::string("inf") : format9(cfg.t2_us))
        << "\n";
    out << "pulse_shape = " << to_string(cfg.pulse_shape) << "\n";
    out << "area_pi_units = " << format9(cfg.area_pi_units) << "\n";
    out << "duration_us = " << format9(cfg.duration_us) << "\n";
    out << "tau_s_us = " << format9(cfg.tau_s_us) << "\n";
    out << "nz = " << cfg.nz << "\n";
    out << "n_omega = " << cfg.n_omega << "\n";
    out << "dmax = " << format9(cfg.dmax) << "\n";
    out << "dt_us = " << format9(cfg.dt_us) << "\n";
    out << "out_dir = " << cfg.out_dir << "\n";
    return out.str();
}

BuiltScenario build_scenario(const ScenarioConfig& cfg) {
    BuiltScenario built;

    PulseEnvelope pulse;
    double window = 0.0;
    if (cfg.pulse_shape == PulseShape::rect) {
        const double dt = cfg.dt_us > 0.0 ? cfg.dt_us : cfg.duration_us / 1280.0;
        pulse = rectangular_pulse(cfg.area_pi_units * kPi, cfg.duration_us,
                                  0.0, dt);
        window = 6.0 * cfg.duration_us;
    } else {
        const double dt = cfg.dt_us > 0.0 ? cfg.dt_us : cfg.tau_s_us / 640.0;
        const double span = 10.0;
        pulse = sech_pulse(cfg.tau_s_us, span * cfg.tau_s_us, dt, span);
        const double fwhm = 2.0 * std::acosh(2.0) * cfg.tau_s_us;
        window = std::max(6.0 * fwhm, 1.3 * pulse.duration());
    }
    built.input = padded_to(pulse, window);
    built.window_us = built.input.duration();

    built.medium.alphaL = cfg.alphaL;
    built.medium.t2 = cfg.t2_us;
    built.medium.nz = cfg.nz > 0 ? cfg.nz : 101;
    const double dmax = cfg.dmax > 0.0 ? cfg.dmax : 10.0 * pulse.bandwidth;
    if (cfg.n_omega > 0) {
        built.medium.grid = DetuningGrid::uniform(dmax, cfg.n_omega);
    } else {
        const double spacing = kPi / (4.0 * built.window_us);
        built.medium.grid = DetuningGrid::with_max_spacing(dmax, spacing);
    }

    auto issues = built.medium.violations();
    const StepControl step{built.input.dt, built.input.bandwidth};
    for (const auto& s : step.violations(built.input.peak_abs()))
        issues.push_back(s);
    if (!issues.empty()) {
        std::string msg = "scenario validation failed:";
        for (const auto& s : issues) msg += "\n  - " + s;
        throw ConfigError(msg);
    }
    return built;
}

namespace {

std::filesystem::path prepare_out_dir(const ScenarioConfig& cfg) {
    std::filesystem::path dir(cfg.out_dir);
    std::filesystem::create_directories(dir);
    return dir;
}

std::ofstream open_out(const std::filesystem::path& p) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + p.string());
    return f;
}

nlohmann::ordered_json metrics_json(const RunMetrics& m) {
    nlohmann::ordered_json j;
    j["a_in"] = m.a_in;
    j["a_out"] = m.a_out;
    j["area_ratio"] = m.area_ratio;
    j["energy_in"] = m.energy_in;
    j["energy_out"] = m.energy_out;
    j["rms_duration_in"] = m.rms_duration_in;
    j["rms_duration_out"] = m.rms_duration_out;
    j["tail_lobe_count"] = m.tail_lobe_count;
    j["resonant_inversion_min"] = m.resonant_inversion_min;
    j["energy_balance_residual"] = m.energy_balance_residual;
    return j;
}

} // namespace

ScenarioOutcome scenario_propagate(const ScenarioConfig& cfg) {
    if (!(cfg.area_pi_units != 0.0))
        throw ConfigError("propagate: zero-area pulse rejected");
    const BuiltScenario built = build_scenario(cfg);
    const RunResult result = run(built.medium, built.input);
    const auto dir = prepare_out_dir(cfg);

    ScenarioOutcome outcome;
    {
        auto f = open_out(dir / "timeseries.csv");
        f << "t_us,omega_in_rad_per_us,omega_out_rad_per_us\n";
        for (std::size_t k = 0; k < built.input.size(); ++k)
            f << format9(built.input.time(k)) << ','
              << format9(built.input.samples[k]) << ','
              << format9(result.omega_out.samples[k]) << '\n';
        outcome.files.push_back((dir / "timeseries.csv").string());
    }
    {
        auto f = open_out(dir / "inversion.csv");
        f << "zeta,delta_rad_per_us,w_final\n";
        const std::size_t na = result.grid.size();
        for (int i = 0; i < result.nz; ++i)
            for (std::size_t j = 0; j < na; ++j)
                f << format9(built.medium.zeta(i)) << ','
                  << format9(result.grid.deltas[j]) << ','
                  << format9(result.inversion_map[i * na + j]) << '\n';
        outcome.files.push_back((dir / "inversion.csv").string());
    }
    {
        auto f = open_out(dir / "metrics.json");
        f << metrics_json(result.metrics).dump(2) << '\n';
        outcome.files.push_back((dir / "metrics.json").string());
    }
    return outcome;
}

ScenarioOutcome scenario_area_curve(const ScenarioConfig& cfg) {
    ScenarioConfig row_cfg = cfg;
    row_cfg.pulse_shape = PulseShape::rect;
    row_cfg.area_pi_units = 1.0;
    const BuiltScenario probe = build_scenario(row_cfg);
    const bool analytic = std::isinf(cfg.t2_us);

    const auto dir = prepare_out_dir(cfg);
    auto f = open_out(dir / "area_curve.csv");
    f << "a_in_pi,a_out_pi_numeric,a_out_pi_analytic,ratio_numeric,"
         "ratio_analytic\n";

    for (int i = 1; i <= 39; ++i) {
        const double a_pi = static_cast<double>(i) / 10.0;
        PulseEnvelope input = padded_to(
            rectangular_pulse(a_pi * kPi, row_cfg.duration_us, 0.0,
                              probe.input.dt),
            probe.window_us);
        const RunResult result = run(probe.medium, input);
        const double a_in = pulse_area(input).radians;
        const double a_out = result.metrics.a_out;
        f << format9(a_pi) << ',' << format9(a_out / kPi) << ',';
        if (analytic) {
            const double a_ref = area_theorem({a_in}, cfg.alphaL).radians;
            f << format9(a_ref / kPi) << ',' << format9(a_out / a_in) << ','
              << format9(a_ref / a_in) << '\n';
        } else {
            f << ',' << format9(a_out / a_in) << ",\n";
        }
    }
    ScenarioOutcome outcome;
    outcome.files.push_back((dir / "area_curve.csv").string());
    return outcome;
}

ScenarioOutcome scenario_soliton_check(const ScenarioConfig& cfg) {
    ScenarioConfig sc = cfg;
    sc.pulse_shape = PulseShape::sech;
    sc.area_pi_units = 2.0;
    const BuiltScenario built = build_scenario(sc);
    const RunResult result = run(built.medium, built.input);
    const SolitonFidelity fid =
        soliton_fidelity(built.input, result.omega_out);
    const auto dir = prepare_out_dir(cfg);

    ScenarioOutcome outcome;
    {
        auto f = open_out(dir / "soliton.csv");
        f << "t_us,omega_in,omega_out\n";
        for (std::size_t k = 0; k < built.input.size(); ++k)
            f << format9(built.input.time(k)) << ','
              << format9(built.input.samples[k]) << ','
              << format9(result.omega_out.samples[k]) << '\n';
        outcome.files.push_back((dir / "soliton.csv").string());
    }
    {
        nlohmann::ordered_json j;
        j["best_delay_us"] = fid.delay_us;
        j["l2_residual"] = fid.residual;
        j["area_ratio"] = result.metrics.area_ratio;
        auto f = open_out(dir / "fidelity.json");
        f << j.dump(2) << '\n';
        outcome.files.push_back((dir / "fidelity.json").string());
    }
    outcome.pass = fid.residual <= 0.05;
    return outcome;
}

ScenarioOutcome scenario_convergence(const ScenarioConfig& cfg) {
    const BuiltScenario built = build_scenario(cfg);
    const ConvergenceReport report =
        convergence_check(built.medium, built.input);
    const auto dir = prepare_out_dir(cfg);

    auto f = open_out(dir / "convergence.csv");
    f << "axis,area_rel_change,l2_rel_change,pass\n";
    for (const auto& ax : report.axes)
        f << ax.name << ',' << format9(ax.area_rel_change) << ','
          << format9(ax.l2_rel_change) << ',' << (ax.pass ? 1 : 0) << '\n';

    ScenarioOutcome outcome;
    outcome.pass = report.all_pass;
    outcome.files.push_back((dir / "convergence.csv").string());
    return outcome;
}

ScenarioOutcome run_scenario(const ScenarioConfig& cfg) {
    switch (cfg.scenario) {
        case Scenario::propagate: return scenario_propagate(cfg);
        case Scenario::area_curve: return scenario_area_curve(cfg);
        case Scenario::soliton_check: return scenario_soliton_check(cfg);
        case Scenario::convergence_check: return scenario_convergence(cfg);
    }
    throw ConfigError("unknown scenario");
}

} // namespace cmb
