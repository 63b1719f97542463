#include "cmb/pulse.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace cmb {

namespace {

constexpr double kPi = std::numbers::pi;

double trapezoid(const std::vector<double>& y, double dt) {
    if (y.size() < 2) return 0.0;
    double acc = 0.5 * (y.front() + y.back());
    for (std::size_t k = 1; k + 1 < y.size(); ++k) acc += y[k];
    return acc * dt;
}

} // namespace

double PulseEnvelope::peak_abs() const {
    double m = 0.0;
    for (double x : samples) m = std::max(m, std::fabs(x));
    return m;
}

PulseEnvelope rectangular_pulse(double area, double duration, double t0,
                                double dt) {
    if (!(dt > 0.0) || !(duration > 0.0))
        throw std::invalid_argument("rectangular_pulse: dt and duration must be positive");
    if (duration < 10.0 * dt)
        throw std::invalid_argument("rectangular_pulse: duration must be >= 10*dt");
    const auto m = static_cast<std::size_t>(std::llround(duration / dt));
    PulseEnvelope p;
    p.t0 = t0;
    p.dt = dt;
    p.bandwidth = 2.0 * kPi / duration;
    p.samples.assign(m + 1, area / duration);
    p.samples.front() = 0.0;
    p.samples.back() = 0.0;
    return p;
}

PulseEnvelope sech_pulse(double tau_s, double center, double dt, double span) {
    if (!(tau_s > 0.0) || !(dt > 0.0))
        throw std::invalid_argument("sech_pulse: tau_s and dt must be positive");
    if (span < 10.0)
        throw std::invalid_argument("sech_pulse: span must be >= 10");
    const auto half = static_cast<std::size_t>(std::llround(span * tau_s / dt));
    PulseEnvelope p;
    p.dt = dt;
    p.t0 = center - static_cast<double>(half) * dt;
    p.bandwidth = 2.0 * kPi / tau_s;
    p.samples.resize(2 * half + 1);
    for (std::size_t k = 0; k < p.samples.size(); ++k) {
        const double arg = (p.time(k) - center) / tau_s;
        p.samples[k] = 2.0 / (tau_s * std::cosh(arg));
    }
    p.samples.front() = 0.0;
    p.samples.back() = 0.0;
    return p;
}

AreaValue pulse_area(const PulseEnvelope& p) {
    return {trapezoid(p.samples, p.dt)};
}

double pulse_energy(const PulseEnvelope& p) {
    double acc = 0.0;
    for (std::size_t k = 0; k < p.samples.size(); ++k) {
        const double y = p.samples[k] * p.samples[k];
        const bool edge = (k == 0 || k + 1 == p.samples.size());
        acc += edge ? 0.5 * y : y;
    }
    return p.samples.size() < 2 ? 0.0 : acc * p.dt;
}

AreaValue area_theorem(AreaValue a_in, double alphaL) {
    const double a = a_in.radians;
    if (!(a >= 0.0))
        throw std::invalid_argument("area_theorem: input area must be >= 0");
    if (!(alphaL >= 0.0))
        throw std::invalid_argument("area_theorem: alphaL must be >= 0");

    // Odd multiples of pi are fixed points of the map (tangent singularity).
    const double m = std::round(a / kPi);
    if (std::fabs(a - m * kPi) < 1e-9 && std::fmod(m, 2.0) != 0.0) return a_in;

    // Branch index: A_out must stay within (k-1/2, k+1/2) full turns of A_in.
    const double k = std::round(a / (2.0 * kPi));
    const double out =
        2.0 * (std::atan(std::exp(-0.5 * alphaL) * std::tan(0.5 * a)) + k * kPi);
    return {out};
}

double bouguer_transmission(double alphaL) {
    if (!(alphaL >= 0.0))
        throw std::invalid_argument("bouguer_transmission: alphaL must be >= 0");
    return std::exp(-0.5 * alphaL);
}

PulseEnvelope padded_to(const PulseEnvelope& p, double total_duration) {
    PulseEnvelope out = p;
    const auto n = static_cast<std::size_t>(std::llround(total_duration / p.dt)) + 1;
    if (n > out.samples.size()) out.samples.resize(n, 0.0);
    return out;
}

PulseEnvelope scaled(const PulseEnvelope& p, double factor) {
    PulseEnvelope out = p;
    for (double& x : out.samples) x *= factor;
    return out;
}

} // namespace cmb
