#pragma once

// The scalar objects carrying the spectral analysis: Lambda(p, z), the
// Fredholm determinant Delta_mu(p, z) = 1 - mu Lambda(p, z), its w-variable
// form D(p, w) = Lambda(p, m(p) - w^2), the Birman-Schwinger eigenvalue,
// the critical coupling mu0 = 1 / Lambda(0, 0), and the threshold
// classification.
//
// Spectral parameters are real with z <= m(p).  Lambda is always evaluated
// through the re-centred variables, where the integrand is
// phi^2(q + p/2) / (u0(p,q) + w^2) with w = sqrt(m(p) - z); this is where
// the peaked rule applies.  At the fully degenerate momentum (pi,pi,pi) the
// band collapses to the point 12 and Lambda has the closed form
// ||phi||^2 / (12 - z).  At partially degenerate momenta the edge value
// does not exist (logarithmic divergence); only z < m(p) is served, by the
// plain smooth rule.

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "friedrichs/dispersion.hpp"
#include "friedrichs/form_factor.hpp"
#include "friedrichs/quadrature.hpp"
#include "friedrichs/torus.hpp"

namespace friedrichs {

struct ModelParams {
    double mu = 1.0;      // coupling, > 0
    FormFactor phi = FormFactor::constant(1.0);
};

struct DeterminantValue {
    double value = 0.0;
    double err_est = 0.0;
    TorusPoint p;
    double z = 0.0;
};

enum class EdgeRegime { regular, partially_degenerate, fully_degenerate };

// Fixed-(p, phi) evaluator of Lambda along the spectral axis.  Builds the
// peaked rules once (base level plus one doubling for the error estimate)
// and then serves any w >= 0 in a single pass per level.
class LambdaEvaluator {
public:
    LambdaEvaluator(const TorusPoint& p, const FormFactor& phi, const QuadratureSpec& spec)
        : p_(p), phi_(phi), spec_(spec), edges_(band_edges(p)) {
        spec_.validate();
        const auto c = axis_half_cos(p);
        const int degenerate = (c[0] == 0.0) + (c[1] == 0.0) + (c[2] == 0.0);
        regime_ = degenerate == 0 ? EdgeRegime::regular
                : degenerate == 3 ? EdgeRegime::fully_degenerate
                                  : EdgeRegime::partially_degenerate;
        if (regime_ == EdgeRegime::regular) {
            const TorusPoint shift = half_point(p);
            const FormFactor ff = phi;
            auto g = [ff, shift](double q1, double q2, double q3) {
                const double v = ff(q1 + shift.x1, q2 + shift.x2, q3 + shift.x3);
                return v * v;
            };
            coarse_.emplace(g, p, spec_);
            fine_.emplace(g, p, spec_.doubled());
        }
    }

    const TorusPoint& momentum() const { return p_; }
    double edge() const { return edges_.lower; }
    const BandEdges& edges() const { return edges_; }
    EdgeRegime regime() const { return regime_; }

    // Lambda(p, m(p) - w^2).
    IntegralValue at_w(double w) const {
        if (!(w >= 0.0)) throw std::invalid_argument("LambdaEvaluator: w must be >= 0");
        switch (regime_) {
            case EdgeRegime::fully_degenerate: {
                // Band collapsed to the point 12: Lambda = ||phi||^2 / w^2.
                if (w == 0.0)
                    throw std::invalid_argument(
                        "Lambda: z = 12 at the fully degenerate momentum is out of contract");
                return {phi_.l2_norm_sq() / (w * w), 0.0, 0};
            }
            case EdgeRegime::partially_degenerate: {
                if (w == 0.0)
                    throw std::invalid_argument(
                        "Lambda: the edge value at a partially degenerate momentum is "
                        "unsupported");
                return smooth_at_z(edges_.lower - w * w);
            }
            case EdgeRegime::regular:
            default: {
                const double fine = fine_->evaluate(w);
                const double coarse = coarse_->evaluate(w);
                return {fine, std::abs(fine - coarse), coarse_->node_count() + fine_->node_count()};
            }
        }
    }

    // Lambda(p, z) for z <= m(p).
    IntegralValue at_z(double z) const {
        if (z > edges_.lower)
            throw std::invalid_argument("Lambda: spectral parameter above the lower band edge");
        return at_w(std::sqrt(edges_.lower - z));
    }

private:
    IntegralValue smooth_at_z(double z) const {
        const double e = dispersion(p_);
        const auto c = axis_half_cos(p_);
        const TorusPoint shift = half_point(p_);
        const FormFactor& ff = phi_;
        auto f = [&](double q1, double q2, double q3) {
            const double u = e + 6.0 -
                             2.0 * (c[0] * std::cos(q1 - shift.x1) + c[1] * std::cos(q2 - shift.x2) +
                                    c[2] * std::cos(q3 - shift.x3));
            const double v = ff(q1, q2, q3);
            return v * v / (u - z);
        };
        return integrate_smooth(f, spec_);
    }

    TorusPoint p_;
    FormFactor phi_;
    QuadratureSpec spec_;
    BandEdges edges_;
    EdgeRegime regime_;
    std::optional<PeakedRule> coarse_;
    std::optional<PeakedRule> fine_;
};

// Lambda(p, z) = integral of phi^2(t) / (u(p,t) - z) over the torus.
inline IntegralValue lambda_value(const TorusPoint& p, double z, const ModelParams& params,
                                  const QuadratureSpec& quad) {
    return LambdaEvaluator(p, params.phi, quad).at_z(z);
}

// D(p, w) = Lambda(p, m(p) - w^2), the determinant integral in the natural
// threshold variable.  Requires all |p_i| < pi.
inline IntegralValue lambda_w(const TorusPoint& p, double w, const ModelParams& params,
                              const QuadratureSpec& quad) {
    if (!(w >= 0.0)) throw std::invalid_argument("lambda_w: w must be >= 0");
    if (any_degenerate(p))
        throw std::invalid_argument("lambda_w: momentum touches a degenerate axis (|p_i| = pi)");
    return LambdaEvaluator(p, params.phi, quad).at_w(w);
}

// Fredholm determinant Delta_mu(p, z) = 1 - mu Lambda(p, z).  Strictly
// decreasing in z on (-inf, m(p)], with limit 1 as z -> -inf.
inline DeterminantValue fredholm_determinant(const TorusPoint& p, double z,
                                             const ModelParams& params,
                                             const QuadratureSpec& quad) {
    if (!(params.mu > 0.0)) throw std::invalid_argument("fredholm_determinant: mu must be > 0");
    const IntegralValue lam = lambda_value(p, z, params, quad);
    return {1.0 - params.mu * lam.value, params.mu * lam.err_est, p, z};
}

// The unique nontrivial eigenvalue mu * Lambda(p, z) of the rank-one
// Birman-Schwinger operator; Delta = 1 - bs_eigenvalue identically.
inline double bs_eigenvalue(const TorusPoint& p, double z, const ModelParams& params,
                            const QuadratureSpec& quad) {
    if (!(params.mu > 0.0)) throw std::invalid_argument("bs_eigenvalue: mu must be > 0");
    return params.mu * lambda_value(p, z, params, quad).value;
}

// Critical coupling mu0 = 1 / Lambda(0, 0), refined until the spec's
// relative tolerance holds between successive levels.
inline IntegralValue critical_coupling_value(const FormFactor& phi, const QuadratureSpec& quad) {
    auto job = [&phi](const QuadratureSpec& s) -> IntegralValue {
        auto g = [&phi](double q1, double q2, double q3) {
            const double v = phi(q1, q2, q3);
            return v * v;
        };
        const PeakedRule rule(g, TorusPoint(), s);
        return {rule.evaluate(0.0), 0.0, rule.node_count()};
    };
    const IntegralValue lam = refine_until(job, quad, quad.target_rel_tol);
    const double mu0 = 1.0 / lam.value;
    return {mu0, mu0 * lam.err_est / lam.value, lam.n_evals};
}

inline double critical_coupling(const FormFactor& phi, const QuadratureSpec& quad) {
    return critical_coupling_value(phi, quad).value;
}

enum class ThresholdClass { zero_energy_resonance, zero_eigenvalue, subcritical, supercritical };

inline const char* to_string(ThresholdClass c) {
    switch (c) {
        case ThresholdClass::zero_energy_resonance: return "zero_energy_resonance";
        case ThresholdClass::zero_eigenvalue: return "zero_eigenvalue";
        case ThresholdClass::subcritical: return "subcritical";
        case ThresholdClass::supercritical: return "supercritical";
    }
    return "unknown";
}

struct ThresholdClassification {
    ThresholdClass cls = ThresholdClass::subcritical;
    double mu0 = 0.0;
};

// Criticality to working precision: |mu - mu0| <= mu_tol * mu0 splits on
// phi(0) into resonance versus zero eigenvalue; otherwise the coupling is
// sub- or supercritical.
inline ThresholdClassification classify_threshold(const ModelParams& params,
                                                  const QuadratureSpec& quad,
                                                  double mu_tol = 1e-6,
                                                  double phi0_tol = 1e-9) {
    if (!(params.mu > 0.0)) throw std::invalid_argument("classify_threshold: mu must be > 0");
    const double mu0 = critical_coupling(params.phi, quad);
    ThresholdClassification out;
    out.mu0 = mu0;
    if (std::abs(params.mu - mu0) <= mu_tol * mu0) {
        out.cls = std::abs(params.phi.value_at_zero()) > phi0_tol
                      ? ThresholdClass::zero_energy_resonance
                      : ThresholdClass::zero_eigenvalue;
    } else {
        out.cls = params.mu < mu0 ? ThresholdClass::subcritical : ThresholdClass::supercritical;
    }
    return out;
}

struct ThresholdDiagnosticsRow {
    double radius = 0.0;
    double l1_tail = 0.0;   // integral of |phi / u(0,.)| outside the ball of this radius
    double l2_tail = 0.0;   // integral of (phi / u(0,.))^2 outside the ball
};

// Truncated L1/L2 integrals of the threshold function f = phi / u(0, .).
// In the resonance regime (phi(0) != 0) the L2 tail grows like 1/radius
// while L1 stays bounded; in the zero-eigenvalue regime both stay bounded.
inline std::vector<ThresholdDiagnosticsRow> threshold_function_diagnostics(
    const ModelParams& params, const std::vector<double>& radii, const QuadratureSpec& quad) {
    quad.validate();
    if (radii.empty())
        throw std::invalid_argument("threshold_function_diagnostics: empty radius list");
    const double gamma = quad.patch_radius;
    for (std::size_t i = 0; i < radii.size(); ++i) {
        if (!(radii[i] > 0.0) || radii[i] > 1.0)
            throw std::invalid_argument("threshold_function_diagnostics: radii must lie in (0, 1]");
        if (i > 0 && !(radii[i] < radii[i - 1]))
            throw std::invalid_argument("threshold_function_diagnostics: radii must decrease");
        if (!(radii[i] < 0.6 * gamma))
            throw std::invalid_argument(
                "threshold_function_diagnostics: radius must be below 0.6 * patch_radius");
    }

    const FormFactor& phi = params.phi;
    auto f_abs = [&phi](double q1, double q2, double q3) {
        const double u = 2.0 * (3.0 - std::cos(q1) - std::cos(q2) - std::cos(q3));
        return std::abs(phi(q1, q2, q3)) / u;
    };

    // Outer complement (independent of the truncation radius): midpoint rule
    // under the same partition of unity used by the peaked rule.
    const QuadratureSpec fine = quad.doubled();
    double outer_l1 = 0.0, outer_l2 = 0.0;
    {
        auto sum_outer = [&](int n_grid, double& l1, double& l2) {
            const double h = two_pi / n_grid;
            double a1 = 0.0, a2 = 0.0;
            for (int j1 = 0; j1 < n_grid; ++j1) {
                const double q1 = -M_PI + (j1 + 0.5) * h;
                for (int j2 = 0; j2 < n_grid; ++j2) {
                    const double q2 = -M_PI + (j2 + 0.5) * h;
                    for (int j3 = 0; j3 < n_grid; ++j3) {
                        const double q3 = -M_PI + (j3 + 0.5) * h;
                        const double r = std::sqrt(q1 * q1 + q2 * q2 + q3 * q3);
                        const double b = 1.0 - detail::patch_blend(r, gamma);
                        if (b == 0.0) continue;
                        const double v = f_abs(q1, q2, q3);
                        a1 += b * v;
                        a2 += b * v * v;
                    }
                }
            }
            l1 = a1 * h * h * h;
            l2 = a2 * h * h * h;
        };
        sum_outer(fine.n_grid, outer_l1, outer_l2);
    }

    // Annulus radius <= r <= gamma in spherical coordinates, per truncation
    // radius; the integrand is steep but analytic on the annulus.
    const detail::SphereRule sphere = detail::sphere_product_rule(fine.n_angular);
    const detail::GaussLegendre& radial = detail::gauss_legendre(fine.n_radial);
    std::vector<ThresholdDiagnosticsRow> rows;
    rows.reserve(radii.size());
    for (double delta : radii) {
        double l1 = 0.0, l2 = 0.0;
        for (int i = 0; i < fine.n_radial; ++i) {
            const double r = delta + 0.5 * (gamma - delta) * (radial.node[i] + 1.0);
            const double wr = 0.5 * (gamma - delta) * radial.weight[i];
            const double chi = detail::patch_blend(r, gamma);
            if (chi == 0.0) continue;
            double ring1 = 0.0, ring2 = 0.0;
            for (std::size_t a = 0; a < sphere.node.size(); ++a) {
                const double v =
                    f_abs(r * sphere.node[a][0], r * sphere.node[a][1], r * sphere.node[a][2]);
                ring1 += sphere.weight[a] * v;
                ring2 += sphere.weight[a] * v * v;
            }
            l1 += chi * wr * r * r * ring1;
            l2 += chi * wr * r * r * ring2;
        }
        rows.push_back({delta, outer_l1 + l1, outer_l2 + l2});
    }
    return rows;
}

}  // namespace friedrichs
