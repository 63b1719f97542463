// Input pulse construction, area/energy functionals and the analytic
// area-theorem and Bouguer transmission references.

#pragma once

#include <cstddef>
#include <vector>

namespace cmb {

// Sampled real Rabi-frequency envelope Omega(t) on a uniform time grid.
// Carrier frequency and phase are implicit (SVA/RWA frame, phi = 0); the
// envelope is real and may be signed. First and last samples are zero.
struct PulseEnvelope {
    double t0 = 0.0;              // start time, us
    double dt = 0.0;              // sample interval, us
    std::vector<double> samples;  // rad/us
    double bandwidth = 0.0;       // Delta_p, rad/us (builder metadata)

    std::size_t size() const { return samples.size(); }
    double time(std::size_t k) const { return t0 + static_cast<double>(k) * dt; }
    double duration() const {
        return samples.empty() ? 0.0 : static_cast<double>(samples.size() - 1) * dt;
    }
    double peak_abs() const;
};

struct AreaValue {
    double radians = 0.0;
};

// Flat-top pulse of the given area and duration, with one-sample edge ramps.
// The flat level is area/duration. Requires duration >= 10*dt.
PulseEnvelope rectangular_pulse(double area, double duration, double t0,
                                double dt);

// Omega(t) = (2/tau_s) sech((t - center)/tau_s), truncated at span*tau_s on
// both sides (span >= 10 keeps the area within 0.2% of 2 pi). Endpoint
// samples are forced to zero.
PulseEnvelope sech_pulse(double tau_s, double center, double dt,
                         double span = 10.0);

// Trapezoid integral of the envelope (rad).
AreaValue pulse_area(const PulseEnvelope& p);

// Trapezoid integral of Omega^2 (rad^2/us), proportional to pulse energy.
double pulse_energy(const PulseEnvelope& p);

// McCall-Hahn area map tan(A_out/2) = exp(-alphaL/2) tan(A_in/2), inverted
// on the branch that keeps the map continuous and reduces to the identity as
// alphaL -> 0. Odd multiples of pi are fixed points. Requires a_in >= 0.
AreaValue area_theorem(AreaValue a_in, double alphaL);

// Weak-field amplitude transmission exp(-alphaL/2).
double bouguer_transmission(double alphaL);

// Copy of p extended with trailing zeros to cover total_duration.
PulseEnvelope padded_to(const PulseEnvelope& p, double total_duration);

// Copy of p with every sample (and nothing else) multiplied by factor.
PulseEnvelope scaled(const PulseEnvelope& p, double factor);

} // namespace cmb
