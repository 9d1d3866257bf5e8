#pragma once

// Closed-form lattice dispersions, band edges and the re-centred
// two-particle energy.  Everything here is exact algebra; no quadrature.

#include <array>
#include <cmath>
#include <stdexcept>

#include "friedrichs/torus.hpp"

namespace friedrichs {

// One-particle dispersion 3 - cos x1 - cos x2 - cos x3; range [0, 6].
inline double dispersion(const TorusPoint& p) {
    return 3.0 - std::cos(p.x1) - std::cos(p.x2) - std::cos(p.x3);
}

// Two-particle energy surface at total quasi-momentum p.
// Symmetric under q -> p - q and even under (p, q) -> (-p, -q).
inline double pair_dispersion(const TorusPoint& p, const TorusPoint& q) {
    return dispersion(p) + dispersion(p - q) + dispersion(q);
}

// cos(p_i / 2) per axis.  Components sit in (-pi, pi], so the values are
// nonnegative; an axis with |p_i| = pi gets an exact zero so that the
// degenerate closed forms hold exactly in floating point.
inline std::array<double, 3> axis_half_cos(const TorusPoint& p) {
    auto h = [](double x) { return x == M_PI ? 0.0 : std::cos(0.5 * x); };
    return {h(p.x1), h(p.x2), h(p.x3)};
}

inline bool axis_degenerate(const TorusPoint& p, std::size_t i) { return p[i] == M_PI; }

inline bool fully_degenerate(const TorusPoint& p) {
    return p.x1 == M_PI && p.x2 == M_PI && p.x3 == M_PI;
}

inline bool any_degenerate(const TorusPoint& p) {
    return p.x1 == M_PI || p.x2 == M_PI || p.x3 == M_PI;
}

struct BandEdges {
    double lower = 0.0;  // min_q of pair_dispersion(p, .)
    double upper = 0.0;  // max_q of pair_dispersion(p, .)

    double width() const { return upper - lower; }
    bool collapsed() const { return lower == upper; }
};

// Essential-spectrum interval [m(p), M(p)] in closed form:
//   m(p) = dispersion(p) + sum_i (2 - 2 cos(p_i/2)),
//   M(p) = dispersion(p) + sum_i (2 + 2 cos(p_i/2)).
inline BandEdges band_edges(const TorusPoint& p) {
    const double e = dispersion(p);
    const auto c = axis_half_cos(p);
    const double span = 2.0 * (c[0] + c[1] + c[2]);
    return {e + 6.0 - span, e + 6.0 + span};
}

struct MinimumPoint {
    TorusPoint point;                        // q0(p) = p/2 on the non-degenerate axes
    std::array<bool, 3> degenerate_axis{};   // axis minimizer non-unique (|p_i| = pi)
    bool degenerate = false;
};

// Minimizer of pair_dispersion(p, .).  Unique and equal to p/2 when all
// |p_i| < pi; axes at |p_i| = pi are flagged (the energy does not depend
// on that coordinate at all).
inline MinimumPoint minimum_point(const TorusPoint& p) {
    MinimumPoint res;
    res.point = half_point(p);
    for (std::size_t i = 0; i < 3; ++i) {
        res.degenerate_axis[i] = axis_degenerate(p, i);
        res.degenerate = res.degenerate || res.degenerate_axis[i];
    }
    return res;
}

// Hot-path form of the re-centred energy, taking precomputed cos(p_i/2).
inline double reduced_dispersion_raw(const std::array<double, 3>& half_cos,
                                     double q1, double q2, double q3) {
    return 2.0 * (half_cos[0] * (1.0 - std::cos(q1)) +
                  half_cos[1] * (1.0 - std::cos(q2)) +
                  half_cos[2] * (1.0 - std::cos(q3)));
}

// Two-particle energy re-centred at its minimum:
//   pair_dispersion(p, q + p/2) - band_edges(p).lower
// reduced to the exact algebraic form 2 sum_i cos(p_i/2) (1 - cos q_i).
// Nonnegative, vanishes at q = 0.
inline double reduced_dispersion(const TorusPoint& p, const TorusPoint& q) {
    return reduced_dispersion_raw(axis_half_cos(p), q.x1, q.x2, q.x3);
}

}  // namespace friedrichs
