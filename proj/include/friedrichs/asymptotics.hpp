#pragma once

// Numerical verification of the low-energy expansions: the w-slope of
// Delta_mu(0, -w^2), the |p|-slope of Delta_mu0(p, 0), the uniform O(p^2)
// remainder of D(p, w), the finite-difference Hessian of Lambda(., 0) at
// p = 0, and the quadratic lower bound in the zero-eigenvalue regime.
//
// Fits are unweighted least squares of the two-term model a1 s + a2 s^2 on
// geometric grids; the constant term is computed, not fitted.

#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "friedrichs/determinant.hpp"

namespace friedrichs {

struct SlopeFit {
    std::vector<std::array<double, 2>> samples;   // (s, value)
    double fitted_slope = 0.0;
    double fitted_curvature = 0.0;
    double residual_rms = 0.0;
    double theoretical_slope = 0.0;
    double rel_error = 0.0;   // |fitted - theoretical| / |theoretical| when defined
};

namespace detail {

// Least squares for y ~ a1 s + a2 s^2 (no constant term); 2x2 normal equations.
inline void fit_two_term(SlopeFit& fit) {
    if (fit.samples.size() < 2)
        throw std::invalid_argument("fit_two_term: need at least two samples");
    double s2 = 0, s3 = 0, s4 = 0, sy = 0, s2y = 0;
    for (const auto& [s, y] : fit.samples) {
        const double ss = s * s;
        s2 += ss;
        s3 += ss * s;
        s4 += ss * ss;
        sy += s * y;
        s2y += ss * y;
    }
    const double det = s2 * s4 - s3 * s3;
    if (det == 0.0) throw std::runtime_error("fit_two_term: singular normal equations");
    fit.fitted_slope = (sy * s4 - s2y * s3) / det;
    fit.fitted_curvature = (s2y * s2 - sy * s3) / det;
    double rss = 0.0;
    for (const auto& [s, y] : fit.samples) {
        const double r = y - fit.fitted_slope * s - fit.fitted_curvature * s * s;
        rss += r * r;
    }
    fit.residual_rms = std::sqrt(rss / fit.samples.size());
    if (fit.theoretical_slope != 0.0)
        fit.rel_error =
            std::abs(fit.fitted_slope - fit.theoretical_slope) / std::abs(fit.theoretical_slope);
    else
        fit.rel_error = std::abs(fit.fitted_slope);
}

inline void require_unit_direction(std::array<double, 3>& d) {
    const double n = std::sqrt(d[0] * d[0] + d[1] * d[1] + d[2] * d[2]);
    if (!(n > 0.0)) throw std::invalid_argument("direction must be nonzero");
    for (double& x : d) x /= n;
}

}  // namespace detail

// Fits Delta_mu(0, -w^2) - Delta_mu(0, 0) to a1 w + a2 w^2 over a decreasing
// positive w grid in (0, 0.3].  Theoretical slope: pi^2 mu phi(0)^2.
inline SlopeFit fit_w_slope(const ModelParams& params, const QuadratureSpec& quad,
                            const std::vector<double>& w_grid) {
    if (w_grid.size() < 4) throw std::invalid_argument("fit_w_slope: need at least 4 grid points");
    for (std::size_t i = 0; i < w_grid.size(); ++i) {
        if (!(w_grid[i] > 0.0) || w_grid[i] > 0.3)
            throw std::invalid_argument("fit_w_slope: w grid must lie in (0, 0.3]");
        if (i > 0 && !(w_grid[i] < w_grid[i - 1]))
            throw std::invalid_argument("fit_w_slope: w grid must decrease");
    }
    if (!(params.mu > 0.0)) throw std::invalid_argument("fit_w_slope: mu must be > 0");
    const LambdaEvaluator lam(TorusPoint(), params.phi, quad);
    const double delta0 = 1.0 - params.mu * lam.at_w(0.0).value;
    SlopeFit fit;
    const double phi0 = params.phi.value_at_zero();
    fit.theoretical_slope = M_PI * M_PI * params.mu * phi0 * phi0;
    fit.samples.reserve(w_grid.size());
    for (double w : w_grid) {
        const double delta = 1.0 - params.mu * lam.at_w(w).value;
        fit.samples.push_back({w, delta - delta0});
    }
    detail::fit_two_term(fit);
    return fit;
}

// Fits Delta_mu0(s * direction, 0) to a1 s + a2 s^2 over s in (0, 0.2].
// Theoretical slope: (sqrt(3)/2) pi^2 mu0 phi(0)^2; requires mu = mu0.
inline SlopeFit fit_p_slope(const ModelParams& params, const QuadratureSpec& quad,
                            std::array<double, 3> direction, const std::vector<double>& s_grid) {
    if (s_grid.size() < 2) throw std::invalid_argument("fit_p_slope: need at least 2 grid points");
    for (std::size_t i = 0; i < s_grid.size(); ++i) {
        if (!(s_grid[i] > 0.0) || s_grid[i] > 0.2)
            throw std::invalid_argument("fit_p_slope: s grid must lie in (0, 0.2]");
        if (i > 0 && !(s_grid[i] < s_grid[i - 1]))
            throw std::invalid_argument("fit_p_slope: s grid must decrease");
    }
    detail::require_unit_direction(direction);
    const double mu0 = critical_coupling(params.phi, quad);
    if (!(std::abs(params.mu - mu0) <= 1e-4 * mu0))
        throw std::invalid_argument("fit_p_slope: coupling must be set to the critical value");
    SlopeFit fit;
    const double phi0 = params.phi.value_at_zero();
    fit.theoretical_slope = 0.5 * std::sqrt(3.0) * M_PI * M_PI * mu0 * phi0 * phi0;
    fit.samples.reserve(s_grid.size());
    for (double s : s_grid) {
        const TorusPoint p(s * direction[0], s * direction[1], s * direction[2]);
        const LambdaEvaluator lam(p, params.phi, quad);
        const double delta = 1.0 - params.mu * lam.at_w(std::sqrt(lam.edge())).value;
        fit.samples.push_back({s, delta});
    }
    detail::fit_two_term(fit);
    return fit;
}

enum class LowerBoundAt {
    threshold_of_origin,   // z = 0 = m(0): the bound that holds
    band_edge              // z = m(p): kept for comparison; negative in practice
};

// Minimum of Delta_mu0(p, z_mode) / |p|^2 over the sample momenta, in the
// zero-eigenvalue regime (phi(0) = 0, mu = mu0).  Throws when the minimum is
// not positive, reporting the violating value.
inline double quadratic_lower_bound(const ModelParams& params, const QuadratureSpec& quad,
                                    const std::vector<TorusPoint>& p_samples,
                                    LowerBoundAt at = LowerBoundAt::threshold_of_origin) {
    if (p_samples.empty()) throw std::invalid_argument("quadratic_lower_bound: no samples");
    if (std::abs(params.phi.value_at_zero()) > 1e-9)
        throw std::invalid_argument("quadratic_lower_bound: requires phi(0) = 0");
    const double mu0 = critical_coupling(params.phi, quad);
    if (!(std::abs(params.mu - mu0) <= 1e-4 * mu0))
        throw std::invalid_argument("quadratic_lower_bound: coupling must be critical");
    double c_min = std::numeric_limits<double>::infinity();
    double worst_p2 = 0.0;
    for (const TorusPoint& p : p_samples) {
        const double p2 = p.x1 * p.x1 + p.x2 * p.x2 + p.x3 * p.x3;
        if (!(p2 > 0.0)) throw std::invalid_argument("quadratic_lower_bound: sample at p = 0");
        const LambdaEvaluator lam(p, params.phi, quad);
        const double w = at == LowerBoundAt::band_edge ? 0.0 : std::sqrt(lam.edge());
        const double delta = 1.0 - params.mu * lam.at_w(w).value;
        const double ratio = delta / p2;
        if (ratio < c_min) {
            c_min = ratio;
            worst_p2 = p2;
        }
    }
    if (!(c_min > 0.0))
        throw std::runtime_error("quadratic_lower_bound: theorem violation, min ratio " +
                                 std::to_string(c_min) + " at |p|^2 = " + std::to_string(worst_p2));
    return c_min;
}

// Max over samples and w of |D(p, w) - D(0, w)| / |p|^2; finiteness and
// stability under halving |p| is the uniform-remainder check.
inline double uniform_p2_residual(const ModelParams& params, const QuadratureSpec& quad,
                                  const std::vector<TorusPoint>& p_samples,
                                  const std::vector<double>& w_grid) {
    if (p_samples.empty() || w_grid.empty())
        throw std::invalid_argument("uniform_p2_residual: empty sample set");
    for (const TorusPoint& p : p_samples)
        if (!(p.norm() <= 0.3) || p.is_zero())
            throw std::invalid_argument("uniform_p2_residual: samples must satisfy 0 < |p| <= 0.3");
    for (double w : w_grid)
        if (!(w >= 0.0) || w > 1.0)
            throw std::invalid_argument("uniform_p2_residual: w grid must lie in [0, 1]");
    const LambdaEvaluator at_zero(TorusPoint(), params.phi, quad);
    double worst = 0.0;
    for (const TorusPoint& p : p_samples) {
        const LambdaEvaluator lam(p, params.phi, quad);
        const double p2 = p.x1 * p.x1 + p.x2 * p.x2 + p.x3 * p.x3;
        for (double w : w_grid) {
            const double diff = std::abs(lam.at_w(w).value - at_zero.at_w(w).value);
            worst = std::max(worst, diff / p2);
        }
    }
    return worst;
}

// Central-difference Hessian of Lambda(., 0) at p = 0.  In the resonance
// regime Lambda has a conical |p| term, so the diagonal entries grow like
// -1/h_step; signs and symmetry are the meaningful output.
inline std::array<std::array<double, 3>, 3> hessian_at_zero(const ModelParams& params,
                                                            const QuadratureSpec& quad,
                                                            double h_step) {
    if (!(h_step >= 1e-3 && h_step <= 1e-1))
        throw std::invalid_argument("hessian_at_zero: h_step must lie in [1e-3, 1e-1]");
    auto lambda_at = [&](double a, double b, double c) {
        const TorusPoint p(a, b, c);
        const LambdaEvaluator lam(p, params.phi, quad);
        return lam.at_w(std::sqrt(lam.edge())).value;
    };
    const double center = lambda_at(0.0, 0.0, 0.0);
    std::array<std::array<double, 3>, 3> hess{};
    const double h = h_step;
    for (int i = 0; i < 3; ++i) {
        std::array<double, 3> e{};
        e[i] = h;
        const double plus = lambda_at(e[0], e[1], e[2]);
        const double minus = lambda_at(-e[0], -e[1], -e[2]);
        hess[i][i] = (plus - 2.0 * center + minus) / (h * h);
    }
    for (int i = 0; i < 3; ++i) {
        for (int j = i + 1; j < 3; ++j) {
            std::array<double, 3> pp{}, pm{};
            pp[i] = h;
            pp[j] = h;
            pm[i] = h;
            pm[j] = -h;
            const double vpp = lambda_at(pp[0], pp[1], pp[2]);
            const double vpm = lambda_at(pm[0], pm[1], pm[2]);
            const double vmp = lambda_at(-pm[0], -pm[1], -pm[2]);
            const double vmm = lambda_at(-pp[0], -pp[1], -pp[2]);
            hess[i][j] = hess[j][i] = (vpp - vpm - vmp + vmm) / (4.0 * h * h);
        }
    }
    return hess;
}

}  // namespace friedrichs
