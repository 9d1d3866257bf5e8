#pragma once

// Points of the three-torus, identified with the cube (-pi, pi]^3.

#include <array>
#include <cmath>
#include <cstddef>

namespace friedrichs {

inline constexpr double two_pi = 6.283185307179586476925286766559;

// Volume of the fundamental cell, (2*pi)^3.
inline constexpr double torus_volume = two_pi * two_pi * two_pi;

// Wraps an angle into (-pi, pi].
inline double wrap_angle(double x) {
    const double r = std::remainder(x, two_pi);   // lands in [-pi, pi]
    return r <= -M_PI ? r + two_pi : r;
}

struct TorusPoint {
    double x1 = 0.0;
    double x2 = 0.0;
    double x3 = 0.0;

    TorusPoint() = default;
    TorusPoint(double a, double b, double c)
        : x1(wrap_angle(a)), x2(wrap_angle(b)), x3(wrap_angle(c)) {}

    double operator[](std::size_t i) const { return i == 0 ? x1 : (i == 1 ? x2 : x3); }

    TorusPoint operator-() const { return {-x1, -x2, -x3}; }

    friend TorusPoint operator+(const TorusPoint& a, const TorusPoint& b) {
        return {a.x1 + b.x1, a.x2 + b.x2, a.x3 + b.x3};
    }
    friend TorusPoint operator-(const TorusPoint& a, const TorusPoint& b) {
        return {a.x1 - b.x1, a.x2 - b.x2, a.x3 - b.x3};
    }

    // Euclidean distance from the origin within the fundamental cell.
    double norm() const { return std::sqrt(x1 * x1 + x2 * x2 + x3 * x3); }

    bool is_zero() const { return x1 == 0.0 && x2 == 0.0 && x3 == 0.0; }

    std::array<double, 3> to_array() const { return {x1, x2, x3}; }
};

// Half of p, componentwise on the representatives; stays inside the cell.
inline TorusPoint half_point(const TorusPoint& p) {
    return {0.5 * p.x1, 0.5 * p.x2, 0.5 * p.x3};
}

}  // namespace friedrichs
