// Brute-force reference solver used to validate the renormalized engine.
//
// No renormalized variables and no analytic attenuation factor: plain Bloch
// nodes on a (much wider) detuning grid, with the field profile integrated
// directly in depth from the raw coherence quadrature
//   dOmega/dzeta = -(1/2pi) int ddelta v(delta; zeta, t).
// Nodes advance with the previous step's field slice; the instantaneous
// response is carried numerically by the wide grid, which is exactly the
// cost the production engine avoids.

#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "cmb/bloch.hpp"
#include "cmb/pulse.hpp"

namespace cmb::test {

inline PulseEnvelope run_raw(double alphaL, int nz, const DetuningGrid& grid,
                             const PulseEnvelope& input) {
    const double dz = alphaL / (nz - 1);
    const double tau = input.dt;
    const auto na = grid.size();

    struct Raw {
        double u = 0.0, v = 0.0, w = -1.0;
    };
    std::vector<Raw> nodes(static_cast<std::size_t>(nz) * na);

    PulseEnvelope out;
    out.t0 = input.t0;
    out.dt = tau;
    out.bandwidth = input.bandwidth;
    out.samples.assign(input.samples.size(), 0.0);

    std::vector<double> field(nz, 0.0);
    std::vector<double> q(nz, 0.0);
    for (std::size_t n = 1; n < input.samples.size(); ++n) {
        // advance with the previous field profile
        for (int i = 0; i < nz; ++i) {
            const double omega = field[i];
            Raw* row = nodes.data() + static_cast<std::size_t>(i) * na;
            for (std::size_t j = 0; j < na; ++j)
                detail::rotate_uvw(row[j].u, row[j].v, row[j].w, omega,
                                   grid.deltas[j], tau);
        }
        // raw coherence quadrature at the current time
        for (int i = 0; i < nz; ++i) {
            const Raw* row = nodes.data() + static_cast<std::size_t>(i) * na;
            double acc = 0.0;
            for (std::size_t j = 0; j < na; ++j)
                acc += grid.weights[j] * row[j].v;
            q[i] = acc;
        }
        // depth integration of the wave equation
        field[0] = input.samples[n];
        for (int i = 1; i < nz; ++i)
            field[i] = field[i - 1] -
                       dz * 0.5 * (q[i - 1] + q[i]) / (2.0 * std::numbers::pi);
        out.samples[n] = field[nz - 1];
    }
    return out;
}

} // namespace cmb::test
