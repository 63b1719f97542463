// Post-run metrics: transmission factors, duration and shape metrics,
// inversion diagnostics, energy balance and soliton fidelity.

#pragma once

#include <vector>

#include "cmb/propagation.hpp"
#include "cmb/pulse.hpp"

namespace cmb {

// pulse_area(output)/pulse_area(input). Throws on zero input area.
double transmission_factor(const PulseEnvelope& input,
                           const PulseEnvelope& output);

// Intensity-weighted (weight Omega^2) temporal moments plus the full width
// at half maximum of |Omega|. Throws on a zero envelope.
struct DurationMetrics {
    double centroid = 0.0;  // us
    double rms = 0.0;       // us
    double fwhm = 0.0;      // us
};
DurationMetrics duration_metrics(const PulseEnvelope& p);

// Resonant row of the final inversion map and its minimum over depth.
struct InversionProfile {
    std::vector<double> w;  // w(delta = 0, zeta_i)
    double min = 0.0;
};
InversionProfile inversion_profile(const RunResult& result);

// Residual of the energy balance identity
//   (1/2)[ int Omega^2(0,t) dt - int Omega^2(alphaL,t) dt ]
//     = (1/2pi) int dzeta int ddelta (w_final + 1)
// evaluated with the run's own quadratures and normalized by the incident
// energy (1/2) int Omega^2(0,t) dt, which stays well conditioned at the
// transparent fixed points where both sides vanish. Throws for finite-T2
// runs, where the identity does not hold.
double energy_balance(const RunResult& result);

// Best integer-sample delay aligning output to input and the remaining
// relative L2 residual at that delay.
struct SolitonFidelity {
    double delay_us = 0.0;
    double residual = 0.0;
};
SolitonFidelity soliton_fidelity(const PulseEnvelope& input,
                                 const PulseEnvelope& output);

// Local maxima of |Omega| above 5% of the global peak occurring after the
// main peak has first returned below 5%.
int tail_lobe_count(const PulseEnvelope& p);

// Reporting bins for the input-area propagation regimes.
enum class Region { I, II, III, IV };
Region region_classify(double a_in_rad);
const char* to_string(Region r);

} // namespace cmb
