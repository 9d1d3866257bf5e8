#pragma once

// Torus quadrature.  Two rules:
//
//  * integrate_smooth: tensor-product midpoint rule on (-pi, pi]^3.  For
//    smooth periodic integrands this converges spectrally; the error
//    estimate comes from one grid doubling.
//
//  * integrate_peaked: hybrid rule for integrands g(q) / (u0(p,q) + w^2)
//    with a single quadratic-minimum near-singularity at q = 0, including
//    the integrable w = 0 case.  Inside a ball of radius gamma (measured in
//    coordinates rescaled by sqrt(cos(p_i/2)), which make the quadratic
//    part of u0 isotropic) a spherical rule is used; the r^2 Jacobian
//    cancels the 1/r^2 singularity.  Outside, the midpoint rule integrates
//    the complement under a C4 partition of unity, so no tensor node ever
//    sees the singular point.
//
// PeakedRule separates node construction from evaluation: the node set and
// weights do not depend on w, so a determinant profile over many spectral
// parameters reuses one rule.  All accumulations run in a fixed index
// order; results are bit-identical regardless of caller-side parallelism.

#include <cmath>
#include <cstdint>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "friedrichs/dispersion.hpp"
#include "friedrichs/torus.hpp"

namespace friedrichs {

struct QuadratureSpec {
    int n_grid = 48;             // tensor nodes per axis; even, >= 8
    double patch_radius = 0.8;   // gamma, in (0, 1.2]
    int n_radial = 64;           // Gauss-Legendre nodes on [0, gamma]
    int n_angular = 86;          // target node count of the spherical product rule
    double target_rel_tol = 1e-8;
    int max_refine = 4;

    void validate() const {
        if (n_grid < 8 || n_grid % 2 != 0)
            throw std::invalid_argument("QuadratureSpec: n_grid must be even and >= 8");
        if (!(patch_radius > 0.0) || patch_radius > 1.2)
            throw std::invalid_argument("QuadratureSpec: patch_radius must lie in (0, 1.2]");
        if (n_radial < 4)
            throw std::invalid_argument("QuadratureSpec: n_radial must be >= 4");
        if (n_angular < 8)
            throw std::invalid_argument("QuadratureSpec: n_angular must be >= 8");
        if (!(target_rel_tol > 1e-14) || !(target_rel_tol < 1e-2))
            throw std::invalid_argument("QuadratureSpec: target_rel_tol must lie in (1e-14, 1e-2)");
        if (max_refine < 0)
            throw std::invalid_argument("QuadratureSpec: max_refine must be >= 0");
    }

    // One refinement level: doubled tensor grid and radial rule, and a
    // doubled polar order of the spherical product rule.
    QuadratureSpec doubled() const {
        QuadratureSpec s = *this;
        s.n_grid *= 2;
        s.n_radial *= 2;
        s.n_angular *= 4;
        return s;
    }
};

struct IntegralValue {
    double value = 0.0;
    double err_est = 0.0;   // absolute, from one level difference
    std::int64_t n_evals = 0;
};

class QuadratureNonConvergence : public std::runtime_error {
public:
    QuadratureNonConvergence(const std::string& what, double previous, double last)
        : std::runtime_error(what), previous_value(previous), last_value(last) {}
    double previous_value;
    double last_value;
};

namespace detail {

struct GaussLegendre {
    std::vector<double> node;    // on (-1, 1)
    std::vector<double> weight;
};

// Nodes by Newton iteration on the Legendre recurrence.
inline GaussLegendre make_gauss_legendre(int n) {
    GaussLegendre gl;
    gl.node.resize(n);
    gl.weight.resize(n);
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        gl.node[i] = -x;
        gl.node[n - 1 - i] = x;
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        gl.weight[i] = w;
        gl.weight[n - 1 - i] = w;
    }
    return gl;
}

inline const GaussLegendre& gauss_legendre(int n) {
    static std::map<int, GaussLegendre> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, make_gauss_legendre(n)).first;
    return it->second;
}

struct SphereRule {
    std::vector<std::array<double, 3>> node;   // unit vectors
    std::vector<double> weight;                // sums to 4*pi
};

// Product rule: Gauss-Legendre in cos(theta) x midpoint in phi.  The node
// set is symmetric under each coordinate sign flip, which the evenness
// properties of the integrands rely on.
inline SphereRule sphere_product_rule(int target_nodes) {
    int n_theta = 4;
    while (2 * n_theta * n_theta < target_nodes) ++n_theta;
    const int n_phi = 2 * n_theta;
    const GaussLegendre& gl = gauss_legendre(n_theta);
    SphereRule rule;
    rule.node.reserve(static_cast<std::size_t>(n_theta) * n_phi);
    rule.weight.reserve(static_cast<std::size_t>(n_theta) * n_phi);
    for (int i = 0; i < n_theta; ++i) {
        const double ct = gl.node[i];
        const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
        for (int k = 0; k < n_phi; ++k) {
            const double phi = two_pi * (k + 0.5) / n_phi;
            rule.node.push_back({st * std::cos(phi), st * std::sin(phi), ct});
            rule.weight.push_back(gl.weight[i] * two_pi / n_phi);
        }
    }
    return rule;
}

// C4 partition of unity: 1 on [0, 0.6 gamma], degree-9 smoothstep down to 0
// at gamma.  Four matched derivatives keep the outer midpoint rule at ~N^-6.
inline double patch_blend(double r, double gamma) {
    const double r0 = 0.6 * gamma;
    if (r <= r0) return 1.0;
    if (r >= gamma) return 0.0;
    const double t = (r - r0) / (gamma - r0);
    const double t2 = t * t;
    return 1.0 - t2 * t2 * t * (126.0 + t * (-420.0 + t * (540.0 + t * (-315.0 + t * 70.0))));
}

[[noreturn]] inline void throw_nonfinite(const char* where, double q1, double q2, double q3,
                                         double value) {
    std::ostringstream os;
    os << where << ": non-finite integrand value " << value << " at node (" << q1 << ", " << q2
       << ", " << q3 << ")";
    throw std::runtime_error(os.str());
}

}  // namespace detail

// Single-level tensor midpoint sum with nodes q_j = -pi + (j + 1/2) h.
// Exposed because the discrete oracle shares exactly this node set.
template <class F>
double tensor_midpoint_sum(F&& f, int n_grid) {
    const double h = two_pi / n_grid;
    double acc = 0.0;
    for (int j1 = 0; j1 < n_grid; ++j1) {
        const double q1 = -M_PI + (j1 + 0.5) * h;
        for (int j2 = 0; j2 < n_grid; ++j2) {
            const double q2 = -M_PI + (j2 + 0.5) * h;
            double row = 0.0;
            for (int j3 = 0; j3 < n_grid; ++j3) {
                const double q3 = -M_PI + (j3 + 0.5) * h;
                const double v = f(q1, q2, q3);
                if (!std::isfinite(v)) detail::throw_nonfinite("integrate_smooth", q1, q2, q3, v);
                row += v;
            }
            acc += row;
        }
    }
    return acc * h * h * h;
}

// Smooth periodic integrand over the torus; value from the doubled grid,
// error estimate from the level difference.
template <class F>
IntegralValue integrate_smooth(F&& f, const QuadratureSpec& spec) {
    spec.validate();
    const double coarse = tensor_midpoint_sum(f, spec.n_grid);
    const double fine = tensor_midpoint_sum(f, 2 * spec.n_grid);
    const std::int64_t n = spec.n_grid;
    return {fine, std::abs(fine - coarse), n * n * n * 9};
}

// Precomputed node set for integrands g(q) / (u0(p, q) + w^2).  Weights
// absorb g, the partition of unity and all Jacobians, so evaluation at a
// given w is a single pass.
class PeakedRule {
public:
    template <class G>
    PeakedRule(G&& g, const TorusPoint& p, const QuadratureSpec& spec) {
        spec.validate();
        const auto c = axis_half_cos(p);
        if (!(c[0] > 0.0 && c[1] > 0.0 && c[2] > 0.0))
            throw std::invalid_argument(
                "integrate_peaked: momentum touches a degenerate axis (|p_i| = pi)");

        // The stretched patch has semi-axes gamma / sqrt(c_i); keep it
        // strictly inside the fundamental cell.
        const double cmin = std::min(c[0], std::min(c[1], c[2]));
        const double gamma = std::min(spec.patch_radius, 0.9 * M_PI * std::sqrt(cmin));
        const double stretch[3] = {1.0 / std::sqrt(c[0]), 1.0 / std::sqrt(c[1]),
                                   1.0 / std::sqrt(c[2])};
        const double jac = stretch[0] * stretch[1] * stretch[2];

        // Radial rule: Gauss-Legendre panels split at the blend knot 0.6 gamma,
        // so each panel sees an analytic integrand.
        const int n_inner = std::max(4, spec.n_radial / 2);
        const int n_outer = std::max(4, spec.n_radial - n_inner);
        const detail::GaussLegendre& gl_a = detail::gauss_legendre(n_inner);
        const detail::GaussLegendre& gl_b = detail::gauss_legendre(n_outer);
        std::vector<std::pair<double, double>> radial;   // (r, weight)
        radial.reserve(static_cast<std::size_t>(n_inner) + n_outer);
        const double knot = 0.6 * gamma;
        for (int i = 0; i < n_inner; ++i)
            radial.emplace_back(0.5 * knot * (gl_a.node[i] + 1.0), 0.5 * knot * gl_a.weight[i]);
        for (int i = 0; i < n_outer; ++i)
            radial.emplace_back(knot + 0.5 * (gamma - knot) * (gl_b.node[i] + 1.0),
                                0.5 * (gamma - knot) * gl_b.weight[i]);

        const detail::SphereRule sphere = detail::sphere_product_rule(spec.n_angular);

        weight_.reserve(sphere.node.size() * radial.size());
        u0_.reserve(weight_.capacity());

        for (const auto& [r, wr] : radial) {
            const double chi = detail::patch_blend(r, gamma);
            if (chi == 0.0) continue;
            const double shell = chi * wr * r * r * jac;
            for (std::size_t a = 0; a < sphere.node.size(); ++a) {
                const double q1 = r * sphere.node[a][0] * stretch[0];
                const double q2 = r * sphere.node[a][1] * stretch[1];
                const double q3 = r * sphere.node[a][2] * stretch[2];
                const double gv = g(q1, q2, q3);
                if (!std::isfinite(gv)) detail::throw_nonfinite("integrate_peaked", q1, q2, q3, gv);
                weight_.push_back(shell * sphere.weight[a] * gv);
                u0_.push_back(reduced_dispersion_raw(c, q1, q2, q3));
            }
        }

        const double h = two_pi / spec.n_grid;
        const double cell = h * h * h;
        for (int j1 = 0; j1 < spec.n_grid; ++j1) {
            const double q1 = -M_PI + (j1 + 0.5) * h;
            for (int j2 = 0; j2 < spec.n_grid; ++j2) {
                const double q2 = -M_PI + (j2 + 0.5) * h;
                for (int j3 = 0; j3 < spec.n_grid; ++j3) {
                    const double q3 = -M_PI + (j3 + 0.5) * h;
                    const double r =
                        std::sqrt(c[0] * q1 * q1 + c[1] * q2 * q2 + c[2] * q3 * q3);
                    const double b = 1.0 - detail::patch_blend(r, gamma);
                    if (b == 0.0) continue;
                    const double gv = g(q1, q2, q3);
                    if (!std::isfinite(gv))
                        detail::throw_nonfinite("integrate_peaked", q1, q2, q3, gv);
                    weight_.push_back(b * cell * gv);
                    u0_.push_back(reduced_dispersion_raw(c, q1, q2, q3));
                }
            }
        }
    }

    // Integral value at edge distance w >= 0.  Strictly decreasing in w for
    // nonnegative g.
    double evaluate(double w) const {
        if (!(w >= 0.0)) throw std::invalid_argument("PeakedRule: w must be >= 0");
        const double w2 = w * w;
        double acc = 0.0;
        for (std::size_t i = 0; i < weight_.size(); ++i) acc += weight_[i] / (u0_[i] + w2);
        return acc;
    }

    std::int64_t node_count() const { return static_cast<std::int64_t>(weight_.size()); }

private:
    std::vector<double> weight_;
    std::vector<double> u0_;
};

// One-shot hybrid integration of g(q) / (u0(p,q) + w^2) with the level
// difference as error estimate.
template <class G>
IntegralValue integrate_peaked(G&& g, const TorusPoint& p, double w, const QuadratureSpec& spec) {
    if (!(w >= 0.0)) throw std::invalid_argument("integrate_peaked: w must be >= 0");
    const PeakedRule coarse(g, p, spec);
    const PeakedRule fine(g, p, spec.doubled());
    const double v0 = coarse.evaluate(w);
    const double v1 = fine.evaluate(w);
    return {v1, std::abs(v1 - v0), coarse.node_count() + fine.node_count()};
}

// Repeats an integration job at doubled resolutions until the successive
// relative difference drops below tol, or max_refine is exhausted.  The job
// maps a QuadratureSpec to a single-level IntegralValue.
template <class Job>
IntegralValue refine_until(Job&& job, QuadratureSpec spec, double tol) {
    if (!(tol >= 1e-14))
        throw std::invalid_argument("refine_until: tol below the supported minimum (1e-14)");
    const int max_refine = spec.max_refine;
    IntegralValue cur = job(spec);
    std::int64_t evals = cur.n_evals;
    double previous = cur.value;
    for (int level = 0; level < max_refine; ++level) {
        spec = spec.doubled();
        previous = cur.value;
        cur = job(spec);
        evals += cur.n_evals;
        const double diff = std::abs(cur.value - previous);
        if (diff <= tol * std::max(std::abs(cur.value), 1e-300))
            return {cur.value, diff, evals};
    }
    std::ostringstream os;
    os << "refine_until: no convergence after " << max_refine << " refinements; last two values "
       << previous << " and " << cur.value << ", wanted rel tol " << tol;
    throw QuadratureNonConvergence(os.str(), previous, cur.value);
}

}  // namespace friedrichs
