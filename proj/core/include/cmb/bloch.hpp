// Per-atom state and its exact per-step evolution: free precession, driven
// rotation, field-convolution tracking, transverse decay and the renormalized
// coherence components that vanish far from resonance.
//
// Units: time in us, Rabi frequency and detuning in rad/us.

#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace cmb {

// Truncated symmetric grid of detunings with trapezoid quadrature weights,
// standing in for the infinite inhomogeneous linewidth.
struct DetuningGrid {
    std::vector<double> deltas;   // rad/us, strictly increasing, uniform spacing
    std::vector<double> weights;  // rad/us, sum = 2*dmax
    double dmax = 0.0;            // half-width, rad/us

    // Uniform grid of n_points (odd, >= 3) detunings on [-dmax, dmax].
    // Built mirror-symmetric so that -delta is present bit-exactly and the
    // center point is exactly zero.
    static DetuningGrid uniform(double dmax, std::size_t n_points);

    // Smallest odd point count such that the spacing does not exceed
    // max_spacing.
    static DetuningGrid with_max_spacing(double dmax, double max_spacing);

    std::size_t size() const { return deltas.size(); }
    std::size_t zero_index() const { return deltas.size() / 2; }
    double spacing() const {
        return deltas.size() > 1 ? deltas[deltas.size() / 2 + 1] : 0.0;
    }
};

// Bloch vector (u, v, w) plus the field-convolution accumulators
//   c(t) = int_0^inf Omega(t - a) cos(delta a) da
//   s(t) = int_0^inf Omega(t - a) sin(delta a) da
// for the node's local drive history. Ground state: (0, 0, -1), no history.
struct BlochNode {
    double u = 0.0;
    double v = 0.0;
    double w = -1.0;
    double c = 0.0;
    double s = 0.0;
};

// Step-size bounds for the piecewise-constant drive discretization.
struct StepControl {
    double tau = 0.0;              // sub-step duration, us
    double pulse_bandwidth = 0.0;  // Delta_p of the drive envelope, rad/us

    static constexpr double max_bandwidth_step = 0.01;  // Delta_p * tau
    static constexpr double max_drive_step = 0.02;      // Omega_max * tau, rad

    // Empty when the bounds hold for a drive of peak value |omega_max|.
    std::vector<std::string> violations(double omega_max) const;
};

namespace detail {

// sincos with a polynomial fast path for the small angles the stepping loop
// produces (|x| <= 0.1 keeps both series below 1 ulp).
inline void sincos_step(double x, double& sn, double& cs) {
    const double x2 = x * x;
    if (x2 <= 0.01) {
        sn = x * (1.0 +
                  x2 * (-1.0 / 6.0 +
                        x2 * (1.0 / 120.0 +
                              x2 * (-1.0 / 5040.0 + x2 * (1.0 / 362880.0)))));
        cs = 1.0 +
             x2 * (-0.5 +
                   x2 * (1.0 / 24.0 +
                         x2 * (-1.0 / 720.0 +
                               x2 * (1.0 / 40320.0 - x2 * (1.0 / 3628800.0)))));
    } else {
        sn = std::sin(x);
        cs = std::cos(x);
    }
}

// Exact rotation about the torque axis (omega, 0, delta) by the angle
// sqrt(omega^2 + delta^2) * tau. Identity when the axis vanishes.
inline void rotate_uvw(double& u, double& v, double& w, double omega,
                       double delta, double tau) {
    const double g2 = omega * omega + delta * delta;
    if (g2 == 0.0) return;
    const double g = std::sqrt(g2);
    double sp, cp;
    sincos_step(g * tau, sp, cp);
    const double nx = omega / g;
    const double nz = delta / g;
    const double k = (nx * u + nz * w) * (1.0 - cp);
    const double u1 = u * cp - nz * v * sp + nx * k;
    const double v1 = v * cp + (nz * u - nx * w) * sp;
    const double w1 = w * cp + nx * v * sp + nz * k;
    u = u1;
    v = v1;
    w = w1;
}

// Per-detuning coefficients of the convolution recursion for one step of
// duration tau: rotation pair (ca, sa) = (cos, sin)(delta tau) and the
// fresh-drive increments (inc_c, inc_s) per unit Rabi frequency.
struct ConvCoeffs {
    double ca = 1.0;
    double sa = 0.0;
    double inc_c = 0.0;  // sin(delta tau)/delta,      tau at delta -> 0
    double inc_s = 0.0;  // (1 - cos(delta tau))/delta, 0  at delta -> 0
};

inline ConvCoeffs conv_coeffs(double delta, double tau) {
    ConvCoeffs k;
    const double x = delta * tau;
    k.sa = std::sin(x);
    k.ca = std::cos(x);
    if (std::fabs(x) < 1e-6) {
        // analytic delta -> 0 limits, series in x
        k.inc_c = tau * (1.0 - x * x / 6.0);
        k.inc_s = tau * (0.5 * x) * (1.0 - x * x / 12.0);
    } else {
        const double sh = std::sin(0.5 * x);
        k.inc_c = k.sa / delta;
        k.inc_s = 2.0 * sh * sh / delta;
    }
    return k;
}

inline void convolve_cs(double& c, double& s, double omega,
                        const ConvCoeffs& k) {
    const double c1 = c * k.ca - s * k.sa + omega * k.inc_c;
    const double s1 = s * k.ca + c * k.sa + omega * k.inc_s;
    c = c1;
    s = s1;
}

} // namespace detail

// Rotate (u, v, w) exactly by sqrt(omega^2 + delta^2)*tau about the torque
// axis of du/dt = -delta v, dv/dt = delta u - omega w, dw/dt = omega v.
// (c, s) are unchanged. Throws std::invalid_argument on non-finite inputs or
// tau <= 0.
BlochNode rotate_step(const BlochNode& node, double omega, double delta,
                      double tau);

// Advance the convolution pair by one step of piecewise-constant drive.
// Exact closed form; the delta = 0 singular limit is handled analytically.
std::pair<double, double> convolution_step(double c, double s, double omega,
                                           double delta, double tau);

// Transverse decay: u, v damped by exp(-tau/t2); w, c, s unchanged.
// t2 may be +infinity (no decay).
BlochNode apply_decay(const BlochNode& node, double tau, double t2);

// Renormalized coherence pair (U, V) = (u + s, v - c). Vanishes far outside
// the drive bandwidth once the pulse has passed, which is what makes the
// detuning grid truncation valid.
inline std::pair<double, double> renormalized_components(const BlochNode& n) {
    return {n.u + n.s, n.v - n.c};
}

} // namespace cmb
