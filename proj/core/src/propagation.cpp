#include "cmb/propagation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "cmb/analysis.hpp"
#include "cmb/errors.hpp"

namespace cmb {

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<detail::ConvCoeffs> conv_tables(const DetuningGrid& grid,
                                            double tau) {
    std::vector<detail::ConvCoeffs> t(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j)
        t[j] = detail::conv_coeffs(grid.deltas[j], tau);
    return t;
}

// Polarization quadrature plus the per-slab saturation of the instantaneous
// response: the within-step drive acts on w, not on the ground-state -1, so
// the attenuation coefficient 1/2 is reduced by
//   corr(zeta) = (1/2pi) sum_j weight_j (w_j + 1) sin(delta_j tau)/delta_j.
// Dropping corr is only safe while w stays near -1; around pi-area inversion
// it is the leading error and the unstable fixed point amplifies it.
void polarization_kernel(const MediumState& state,
                         const std::vector<detail::ConvCoeffs>& tab,
                         std::vector<double>& P, std::vector<double>* corr) {
    const int nz = state.nz;
    const auto na = static_cast<std::ptrdiff_t>(state.n_delta());
    P.resize(nz);
    if (corr) corr->resize(nz);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < nz; ++i) {
        const BlochNode* row = state.nodes.data() + i * na;
        double acc = 0.0;
        double sat = 0.0;
        for (std::ptrdiff_t j = 0; j < na; ++j) {
            const BlochNode& n = row[j];
            const double U = n.u + n.s;
            const double V = n.v - n.c;
            const double wj = state.grid.weights[j];
            acc += wj * (V * tab[j].ca + U * tab[j].sa);
            sat += wj * (n.w + 1.0) * tab[j].inc_c;
        }
        P[i] = acc;
        if (corr) (*corr)[i] = sat / (2.0 * kPi);
    }
}

// Depth integration of d(Omega)/dzeta = -a(zeta) Omega - P/(2pi) with
// a(zeta) = 1/2 - corr(zeta), panel-wise trapezoid under the local
// integrating factor. corr = nullptr means the pure Bouguer kernel.
void field_kernel(double input_sample, const std::vector<double>& P,
                  const std::vector<double>* corr, double dz,
                  FieldSlice& field) {
    const auto nz = P.size();
    field.omega.resize(nz);
    field.omega[0] = input_sample;
    const double att0 = std::exp(-0.5 * dz);
    for (std::size_t i = 1; i < nz; ++i) {
        const double att =
            corr ? std::exp(-dz * (0.5 - 0.5 * ((*corr)[i - 1] + (*corr)[i])))
                 : att0;
        field.omega[i] = att * field.omega[i - 1] -
                         0.5 * dz * (att * P[i - 1] + P[i]) / (2.0 * kPi);
    }
}

void advance_kernel(MediumState& state, const FieldSlice& field, double tau,
                    const std::vector<detail::ConvCoeffs>& tab, double t2) {
    const auto na = static_cast<std::ptrdiff_t>(state.n_delta());
    const auto total = static_cast<std::ptrdiff_t>(state.nodes.size());
    const bool decay = !std::isinf(t2);
    const double df = decay ? std::exp(-tau / t2) : 1.0;
    const double* deltas = state.grid.deltas.data();
    const double* omega_of = field.omega.data();
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t idx = 0; idx < total; ++idx) {
        const std::ptrdiff_t j = idx % na;
        const double omega = omega_of[idx / na];
        BlochNode& n = state.nodes[idx];
        detail::rotate_uvw(n.u, n.v, n.w, omega, deltas[j], tau);
        detail::convolve_cs(n.c, n.s, omega, tab[j]);
        if (decay) {
            n.u *= df;
            n.v *= df;
        }
    }
    state.t_now += tau;
}

void check_step(const StepControl& step, const FieldSlice& field) {
    double peak = 0.0;
    for (double x : field.omega) peak = std::max(peak, std::fabs(x));
    const auto issues = step.violations(peak);
    if (!issues.empty()) {
        std::string msg = "advance: step bounds violated";
        for (const auto& s : issues) msg += "; " + s;
        throw ConfigError(msg);
    }
}

void validate_run_inputs(const MediumConfig& cfg, const PulseEnvelope& input) {
    auto issues = cfg.violations();
    if (input.samples.size() < 2 || !(input.dt > 0.0))
        issues.push_back("run: input envelope needs >= 2 samples and dt > 0");
    if (!input.samples.empty() &&
        (input.samples.front() != 0.0 || input.samples.back() != 0.0))
        issues.push_back("run: input envelope must start and end at zero");
    // quiet tail for readout of stretched pulses
    if (!input.samples.empty()) {
        const std::size_t tail = input.samples.size() / 5;
        for (std::size_t k = input.samples.size() - tail;
             k < input.samples.size(); ++k) {
            if (input.samples[k] != 0.0) {
                issues.push_back(
                    "run: input envelope must end with a quiet tail of at "
                    "least 20% of the record");
                break;
            }
        }
    }
    StepControl step{input.dt, input.bandwidth};
    for (const auto& s : step.violations(input.peak_abs())) issues.push_back(s);
    if (!issues.empty()) {
        std::string msg = "run: invalid configuration";
        for (const auto& s : issues) msg += "\n  - " + s;
        throw ConfigError(msg);
    }
}

void fill_metrics(const MediumConfig& cfg, const PulseEnvelope& input,
                  RunResult& result) {
    RunMetrics& m = result.metrics;
    m.a_in = pulse_area(input).radians;
    m.a_out = pulse_area(result.omega_out).radians;
    if (m.a_in != 0.0) m.area_ratio = m.a_out / m.a_in;
    m.energy_in = pulse_energy(input);
    m.energy_out = pulse_energy(result.omega_out);
    if (m.energy_in > 0.0) m.rms_duration_in = duration_metrics(input).rms;
    if (m.energy_out > 0.0)
        m.rms_duration_out = duration_metrics(result.omega_out).rms;
    m.tail_lobe_count = tail_lobe_count(result.omega_out);
    m.resonant_inversion_min = inversion_profile(result).min;
    if (std::isinf(cfg.t2)) m.energy_balance_residual = energy_balance(result);
}

// Resample to half the step by inserting midpoint averages; keeps the
// trapezoid area exact and sample times aligned with the original grid.
PulseEnvelope halved_step(const PulseEnvelope& p) {
    PulseEnvelope out;
    out.t0 = p.t0;
    out.dt = 0.5 * p.dt;
    out.bandwidth = p.bandwidth;
    out.samples.resize(2 * p.samples.size() - 1);
    for (std::size_t k = 0; k + 1 < p.samples.size(); ++k) {
        out.samples[2 * k] = p.samples[k];
        out.samples[2 * k + 1] = 0.5 * (p.samples[k] + p.samples[k + 1]);
    }
    out.samples.back() = p.samples.back();
    return out;
}

struct EnvelopeDelta {
    double area_rel = 0.0;
    double l2_rel = 0.0;
};

// Relative change of refined vs base, with the refined envelope read out on
// the base sample grid via stride.
EnvelopeDelta envelope_delta(const PulseEnvelope& base,
                             const PulseEnvelope& refined,
                             std::size_t stride) {
    const double a0 = pulse_area(base).radians;
    double a1 = pulse_area(refined).radians;
    double num = 0.0;
    double den = 0.0;
    for (std::size_t k = 0; k < base.samples.size(); ++k) {
        const double r = refined.samples[k * stride];
        const double d = r - base.samples[k];
        num += d * d;
        den += base.samples[k] * base.samples[k];
    }
    EnvelopeDelta out;
    out.area_rel = a0 != 0.0 ? std::fabs(a1 - a0) / std::fabs(a0)
                             : std::fabs(a1 - a0);
    out.l2_rel = den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
    return out;
}

} // namespace

std::vector<std::string> MediumConfig::violations() const {
    std::vector<std::string> out;
    if (!(alphaL > 0.0) || !std::isfinite(alphaL))
        out.push_back("MediumConfig: alphaL must be positive and finite");
    if (nz < 2) out.push_back("MediumConfig: nz must be >= 2");
    if (nz >= 2 && alphaL > 0.0 && zeta_spacing() > 0.1 + 1e-12)
        out.push_back("MediumConfig: slab spacing alphaL/(nz-1) must be <= 0.1");
    if (!(t2 > 0.0))
        out.push_back("MediumConfig: t2 must be positive (or inf)");
    if (grid.size() < 3 || grid.size() % 2 == 0)
        out.push_back("MediumConfig: detuning grid must have an odd count >= 3");
    return out;
}

MediumState MediumState::ground(const MediumConfig& cfg) {
    MediumState st;
    st.nz = cfg.nz;
    st.grid = cfg.grid;
    st.nodes.assign(static_cast<std::size_t>(cfg.nz) * cfg.grid.size(),
                    BlochNode{});
    st.t_now = 0.0;
    return st;
}

std::vector<double> polarization(const MediumState& state, double tau) {
    if (!(tau > 0.0))
        throw std::invalid_argument("polarization: tau must be positive");
    const auto tab = conv_tables(state.grid, tau);
    std::vector<double> P;
    polarization_kernel(state, tab, P, nullptr);
    return P;
}

std::vector<double> attenuation_correction(const MediumState& state,
                                           double tau) {
    if (!(tau > 0.0))
        throw std::invalid_argument("attenuation_correction: tau must be positive");
    const auto tab = conv_tables(state.grid, tau);
    std::vector<double> P;
    std::vector<double> corr;
    polarization_kernel(state, tab, P, &corr);
    return corr;
}

FieldSlice field_update(double input_sample, const std::vector<double>& P,
                        const MediumConfig& cfg) {
    if (P.size() != static_cast<std::size_t>(cfg.nz))
        throw std::invalid_argument("field_update: P size must equal nz");
    FieldSlice field;
    field_kernel(input_sample, P, nullptr, cfg.zeta_spacing(), field);
    return field;
}

FieldSlice field_update(double input_sample, const std::vector<double>& P,
                        const std::vector<double>& correction,
                        const MediumConfig& cfg) {
    if (P.size() != static_cast<std::size_t>(cfg.nz) ||
        correction.size() != P.size())
        throw std::invalid_argument("field_update: P/correction size must equal nz");
    FieldSlice field;
    field_kernel(input_sample, P, &correction, cfg.zeta_spacing(), field);
    return field;
}

void advance(MediumState& state, const FieldSlice& field,
             const StepControl& step, double t2) {
    if (field.omega.size() != static_cast<std::size_t>(state.nz))
        throw std::invalid_argument("advance: field size must equal nz");
    check_step(step, field);
    const auto tab = conv_tables(state.grid, step.tau);
    advance_kernel(state, field, step.tau, tab, t2);
}

RunResult run(const MediumConfig& cfg, const PulseEnvelope& input,
              const RunOptions& options) {
    validate_run_inputs(cfg, input);

    const double tau = input.dt;
    const auto n_steps = input.samples.size();
    const auto tab = conv_tables(cfg.grid, tau);
    const StepControl step{tau, input.bandwidth};

    MediumState state = MediumState::ground(cfg);
    state.t_now = input.t0;

    RunResult result;
    result.nz = cfg.nz;
    result.alphaL = cfg.alphaL;
    result.t2 = cfg.t2;
    result.grid = cfg.grid;
    result.snapshot_stride = options.snapshot_stride;
    result.omega_out.t0 = input.t0;
    result.omega_out.dt = tau;
    result.omega_out.bandwidth = input.bandwidth;
    result.omega_out.samples.assign(n_steps, 0.0);
    result.accumulated_area.assign(cfg.nz, 0.0);

    std::vector<double> P;
    std::vector<double> corr;
    FieldSlice field;
    for (std::size_t n = 1; n < n_steps; ++n) {
        polarization_kernel(state, tab, P, &corr);
        field_kernel(input.samples[n], P, &corr, cfg.zeta_spacing(), field);
        for (double x : field.omega) {
            if (!std::isfinite(x))
                throw NumericalError(
                    "run: non-finite field at step " + std::to_string(n) +
                    " (t = " + std::to_string(state.t_now + tau) + " us)");
        }
        check_step(step, field);
        advance_kernel(state, field, tau, tab, cfg.t2);
        result.omega_out.samples[n] = field.omega[cfg.nz - 1];
        for (int i = 0; i < cfg.nz; ++i)
            result.accumulated_area[i] += field.omega[i] * tau;
        if (options.snapshot_stride > 0 &&
            n % static_cast<std::size_t>(options.snapshot_stride) == 0)
            result.snapshots.push_back(field);
    }

    result.inversion_map.resize(state.nodes.size());
    for (std::size_t k = 0; k < state.nodes.size(); ++k)
        result.inversion_map[k] = state.nodes[k].w;

    fill_metrics(cfg, input, result);
    return result;
}

ConvergenceReport convergence_check(const MediumConfig& cfg,
                                    const PulseEnvelope& input) {
    const RunResult base = run(cfg, input);

    ConvergenceReport report;
    report.all_pass = true;
    auto add_axis = [&](const std::string& name, const PulseEnvelope& out,
                        std::size_t stride) {
        const EnvelopeDelta d = envelope_delta(base.omega_out, out, stride);
        ConvergenceAxis ax{name, d.area_rel, d.l2_rel,
                           d.area_rel < 0.005 && d.l2_rel < 0.005};
        report.all_pass = report.all_pass && ax.pass;
        report.axes.push_back(ax);
    };

    {
        MediumConfig c = cfg;
        const std::size_t half = cfg.grid.size() / 2;
        c.grid = DetuningGrid::uniform(2.0 * cfg.grid.dmax, 4 * half + 1);
        add_axis("dmax_x2", run(c, input).omega_out, 1);
    }
    {
        MediumConfig c = cfg;
        c.grid = DetuningGrid::uniform(cfg.grid.dmax, 2 * cfg.grid.size() - 1);
        add_axis("ddelta_half", run(c, input).omega_out, 1);
    }
    {
        add_axis("tau_half", run(cfg, halved_step(input)).omega_out, 2);
    }
    {
        MediumConfig c = cfg;
        c.nz = 2 * cfg.nz - 1;
        add_axis("nz_x2", run(c, input).omega_out, 1);
    }
    return report;
}

} // namespace cmb
