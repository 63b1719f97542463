// Medium configuration and the depth x detuning lattice of Bloch nodes.

#pragma once

#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "cmb/bloch.hpp"

namespace cmb {

// Depth is the dimensionless opacity coordinate zeta = alpha*z in [0, alphaL].
struct MediumConfig {
    double alphaL = 5.0;
    int nz = 101;  // depth slabs, spacing alphaL/(nz-1) <= 0.1
    double t2 = std::numeric_limits<double>::infinity();  // us
    DetuningGrid grid;

    double zeta_spacing() const { return alphaL / (nz - 1); }
    double zeta(int i) const { return zeta_spacing() * i; }

    // Empty when all invariants hold.
    std::vector<std::string> violations() const;
};

// Field profile Omega(zeta_i, t) at one instant.
struct FieldSlice {
    std::vector<double> omega;  // rad/us, one entry per slab
};

// Lattice of nodes over depth (outer) x detuning (inner), plus current time.
struct MediumState {
    int nz = 0;
    DetuningGrid grid;
    std::vector<BlochNode> nodes;  // [i * grid.size() + j]
    double t_now = 0.0;

    static MediumState ground(const MediumConfig& cfg);

    std::size_t n_delta() const { return grid.size(); }
    BlochNode& node(int i, std::size_t j) { return nodes[i * grid.size() + j]; }
    const BlochNode& node(int i, std::size_t j) const {
        return nodes[i * grid.size() + j];
    }
};

} // namespace cmb
