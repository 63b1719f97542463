// Independent reference computations used by the test suites.

#pragma once

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

namespace cmb::test {

// One piecewise-constant drive segment.
struct DriveStep {
    double omega;  // rad/us
    double tau;    // us
};

// Direct evaluation of the convolution integrals
//   c = int_0^inf Omega(t - a) cos(delta a) da
//   s = int_0^inf Omega(t - a) sin(delta a) da
// for a piecewise-constant history, summing the closed form of every
// segment. Independent of the per-step recursion it is used to check.
inline std::pair<double, double> convolution_reference(
    const std::vector<DriveStep>& history, double delta) {
    double total = 0.0;
    for (const auto& st : history) total += st.tau;

    double c = 0.0;
    double s = 0.0;
    double elapsed = 0.0;  // time from history start to segment start
    for (const auto& st : history) {
        const double age_new = total - (elapsed + st.tau);  // segment end age
        const double age_old = total - elapsed;             // segment start age
        if (delta == 0.0) {
            c += st.omega * st.tau;
        } else {
            c += st.omega *
                 (std::sin(delta * age_old) - std::sin(delta * age_new)) / delta;
            s += st.omega *
                 (std::cos(delta * age_new) - std::cos(delta * age_old)) / delta;
        }
        elapsed += st.tau;
    }
    return {c, s};
}

// xorshift-style deterministic generator so expected values never depend on
// library distributions.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ull) {}

    std::uint64_t next() {
        std::uint64_t x = state_;
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        state_ = x;
        return x;
    }

    // uniform in [lo, hi)
    double uniform(double lo, double hi) {
        const double u = static_cast<double>(next() >> 11) * 0x1.0p-53;
        return lo + (hi - lo) * u;
    }

private:
    std::uint64_t state_;
};

} // namespace cmb::test
