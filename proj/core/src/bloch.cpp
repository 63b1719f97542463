#include "cmb/bloch.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace cmb {

DetuningGrid DetuningGrid::uniform(double dmax, std::size_t n_points) {
    if (!(dmax > 0.0) || !std::isfinite(dmax))
        throw std::invalid_argument("DetuningGrid: dmax must be positive and finite");
    if (n_points < 3 || n_points % 2 == 0)
        throw std::invalid_argument("DetuningGrid: point count must be odd and >= 3");

    const std::size_t half = (n_points - 1) / 2;
    const double step = dmax / static_cast<double>(half);

    DetuningGrid g;
    g.deltas.resize(n_points);
    g.weights.resize(n_points);
    g.deltas[half] = 0.0;
    for (std::size_t k = 1; k <= half; ++k) {
        const double d = static_cast<double>(k) * step;
        g.deltas[half + k] = d;
        g.deltas[half - k] = -d;  // mirror bit-exactly
    }
    for (std::size_t j = 0; j < n_points; ++j) g.weights[j] = step;
    g.weights.front() = 0.5 * step;
    g.weights.back() = 0.5 * step;
    g.dmax = g.deltas.back();
    return g;
}

DetuningGrid DetuningGrid::with_max_spacing(double dmax, double max_spacing) {
    if (!(max_spacing > 0.0))
        throw std::invalid_argument("DetuningGrid: spacing must be positive");
    const auto half = static_cast<std::size_t>(std::ceil(dmax / max_spacing));
    return uniform(dmax, 2 * (half > 0 ? half : 1) + 1);
}

std::vector<std::string> StepControl::violations(double omega_max) const {
    std::vector<std::string> out;
    if (!(tau > 0.0) || !std::isfinite(tau)) {
        out.push_back("StepControl: tau must be positive and finite");
        return out;
    }
    if (pulse_bandwidth * tau > max_bandwidth_step)
        out.push_back("StepControl: Delta_p*tau = " +
                      std::to_string(pulse_bandwidth * tau) + " exceeds " +
                      std::to_string(max_bandwidth_step));
    if (std::fabs(omega_max) * tau > max_drive_step)
        out.push_back("StepControl: Omega_max*tau = " +
                      std::to_string(std::fabs(omega_max) * tau) + " exceeds " +
                      std::to_string(max_drive_step));
    return out;
}

BlochNode rotate_step(const BlochNode& node, double omega, double delta,
                      double tau) {
    if (!std::isfinite(omega) || !std::isfinite(delta) || !std::isfinite(tau))
        throw std::invalid_argument("rotate_step: non-finite input");
    if (!(tau > 0.0))
        throw std::invalid_argument("rotate_step: tau must be positive");
    BlochNode out = node;
    detail::rotate_uvw(out.u, out.v, out.w, omega, delta, tau);
    return out;
}

std::pair<double, double> convolution_step(double c, double s, double omega,
                                           double delta, double tau) {
    if (!std::isfinite(omega) || !std::isfinite(delta) || !std::isfinite(tau))
        throw std::invalid_argument("convolution_step: non-finite input");
    if (!(tau > 0.0))
        throw std::invalid_argument("convolution_step: tau must be positive");
    const detail::ConvCoeffs k = detail::conv_coeffs(delta, tau);
    detail::convolve_cs(c, s, omega, k);
    return {c, s};
}

BlochNode apply_decay(const BlochNode& node, double tau, double t2) {
    if (!(t2 > 0.0))
        throw std::invalid_argument("apply_decay: t2 must be positive (or inf)");
    if (std::isinf(t2)) return node;
    BlochNode out = node;
    const double f = std::exp(-tau / t2);
    out.u *= f;
    out.v *= f;
    return out;
}

} // namespace cmb
