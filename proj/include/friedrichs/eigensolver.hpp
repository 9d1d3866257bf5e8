#pragma once

// Bound states below the essential spectrum.  Delta_mu(p, .) is strictly
// decreasing on (-inf, m(p)] with limit 1, so existence reduces to the sign
// of the edge value Delta_mu(p, m(p)) = 1 - mu D(p, 0), and the eigenvalue
// is the unique root.  The root search runs in the threshold variable
// w = sqrt(m(p) - z), where h(w) = Delta_mu(p, m(p) - w^2) is strictly
// increasing, the bracket expansion cannot fail (h -> 1), and the slope
// dDelta/dw stays bounded near the edge.
//
// Special momenta: at (pi,pi,pi) the closed form e = 12 - mu ||phi||^2
// applies.  At partially degenerate p the edge value diverges to -inf
// (the minimum of u(p,.) is a manifold), so the edge test is unsupported
// there; the solver probes strictly below the edge instead.

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "friedrichs/determinant.hpp"
#include "friedrichs/rootfind.hpp"

namespace friedrichs {

enum class Existence { absent, present, inconclusive };

inline const char* to_string(Existence e) {
    switch (e) {
        case Existence::absent: return "absent";
        case Existence::present: return "present";
        case Existence::inconclusive: return "inconclusive";
    }
    return "unknown";
}

struct BoundState {
    double energy = 0.0;
    double z_lo = 0.0;      // final bracket in the spectral variable
    double z_hi = 0.0;
    double residual = 0.0;  // |Delta_mu(p, energy)|
    double gap = 0.0;       // m(p) - energy, > 0
    int iterations = 0;
};

struct SolverOptions {
    double tol = 1e-10;          // bracket width in z
    double edge_tol = 1e-7;      // dead band for the edge-sign existence test
    int max_bracket_doublings = 60;
    int max_iterations = 200;
};

namespace detail {

// Solver-side quadrature: tightened relative target per the root-finding
// contract (root error ~ quadrature error / |Delta'|).
inline QuadratureSpec solver_spec(QuadratureSpec quad) {
    quad.target_rel_tol = std::min(quad.target_rel_tol, 1e-9);
    return quad;
}

}  // namespace detail

// Edge-sign existence test.  Throws for partially degenerate p, where the
// edge value does not exist.
inline Existence has_bound_state(const TorusPoint& p, const ModelParams& params,
                                 const QuadratureSpec& quad,
                                 const SolverOptions& opts = SolverOptions()) {
    if (!(params.mu > 0.0)) throw std::invalid_argument("has_bound_state: mu must be > 0");
    if (fully_degenerate(p)) return Existence::present;   // root 12 - mu ||phi||^2 < 12 always
    const LambdaEvaluator lam(p, params.phi, detail::solver_spec(quad));
    if (lam.regime() == EdgeRegime::partially_degenerate)
        throw std::invalid_argument(
            "has_bound_state: edge value unsupported at a partially degenerate momentum");
    const double edge_value = 1.0 - params.mu * lam.at_w(0.0).value;
    if (edge_value < -opts.edge_tol) return Existence::present;
    if (edge_value > opts.edge_tol) return Existence::absent;
    return Existence::inconclusive;
}

// Unique eigenvalue below m(p) when it exists; absent otherwise (including
// the inconclusive near-critical band).
inline std::optional<BoundState> solve_bound_state(const TorusPoint& p, const ModelParams& params,
                                                   const QuadratureSpec& quad,
                                                   const SolverOptions& opts = SolverOptions()) {
    if (!(params.mu > 0.0)) throw std::invalid_argument("solve_bound_state: mu must be > 0");
    if (!(opts.tol > 0.0)) throw std::invalid_argument("solve_bound_state: tol must be > 0");
    const BandEdges edges = band_edges(p);
    const double m = edges.lower;

    if (fully_degenerate(p)) {
        BoundState s;
        s.gap = params.mu * params.phi.l2_norm_sq();
        s.energy = 12.0 - s.gap;
        s.z_lo = s.energy;
        s.z_hi = s.energy;
        s.residual = 0.0;
        s.iterations = 0;
        return s;
    }

    const LambdaEvaluator lam(p, params.phi, detail::solver_spec(quad));

    if (lam.regime() == EdgeRegime::partially_degenerate) {
        // No computable edge value; probe a ladder approaching the edge.
        // The true edge limit is -inf here, so a sign change must show up
        // once the probe is close enough, unless the root is absent at the
        // resolution of the ladder.
        double step = 1.0;
        double z_neg = m;       // z with Delta < 0, once found
        bool found = false;
        for (int k = 0; k < 24 && !found; ++k) {
            const double z = m - step;
            if (1.0 - params.mu * lam.at_z(z).value < 0.0) {
                z_neg = z;
                found = true;
            }
            step *= 0.25;
        }
        if (!found) return std::nullopt;
        auto h = [&](double w) { return 1.0 - params.mu * lam.at_w(w).value; };
        double w_lo = std::sqrt(m - z_neg);
        double f_lo = h(w_lo);
        double w_hi = std::max(2.0 * w_lo, 1e-3);
        double f_hi = h(w_hi);
        int doublings = 0;
        while (f_hi <= 0.0) {
            if (++doublings > opts.max_bracket_doublings)
                throw std::runtime_error("solve_bound_state: bracket expansion failed");
            w_hi *= 2.0;
            f_hi = h(w_hi);
        }
        const auto root = detail::find_increasing_root(
            h, w_lo, w_hi, f_lo, f_hi,
            opts.tol / std::max(1.0, 2.0 * w_hi), 1e-13, opts.max_iterations);
        BoundState s;
        s.energy = m - root.x * root.x;
        s.z_lo = m - root.hi * root.hi;
        s.z_hi = m - root.lo * root.lo;
        s.residual = std::abs(root.fx);
        s.gap = root.x * root.x;
        s.iterations = root.iterations;
        return s;
    }

    auto h = [&](double w) { return 1.0 - params.mu * lam.at_w(w).value; };
    const double at_edge = h(0.0);
    if (!(at_edge < 0.0)) return std::nullopt;   // no sign change below the band

    // Expand upward until Delta is positive; h -> 1 as w grows.
    double w_hi = std::sqrt(std::max(m, 1e-8));
    double f_hi = h(w_hi);
    int doublings = 0;
    while (f_hi <= 0.0) {
        if (++doublings > opts.max_bracket_doublings)
            throw std::runtime_error("solve_bound_state: bracket expansion failed");
        w_hi *= 2.0;
        f_hi = h(w_hi);
    }

    // Bracket-width tolerance in z maps to w via dz = 2 w dw.
    const double wtol = opts.tol / std::max(1.0, 2.0 * w_hi);
    const auto root =
        detail::find_increasing_root(h, 0.0, w_hi, at_edge, f_hi, wtol, 1e-13, opts.max_iterations);

    BoundState s;
    s.energy = m - root.x * root.x;
    s.z_lo = m - root.hi * root.hi;
    s.z_hi = m - root.lo * root.lo;
    s.residual = std::abs(root.fx);
    s.gap = root.x * root.x;
    s.iterations = root.iterations;
    return s;
}

struct BandScanRow {
    TorusPoint p;
    BandEdges edges;
    Existence exists = Existence::inconclusive;
    std::optional<BoundState> state;
    std::string error;   // empty on success
};

// Tabulates edges and bound states along a list of momenta.  Per-row
// failures are recorded in the error column and the scan continues.
inline std::vector<BandScanRow> band_scan(const ModelParams& params,
                                          const std::vector<TorusPoint>& path,
                                          const QuadratureSpec& quad,
                                          const SolverOptions& opts = SolverOptions()) {
    if (path.empty()) throw std::invalid_argument("band_scan: empty path");
    std::vector<BandScanRow> rows(path.size());
    for (std::size_t i = 0; i < path.size(); ++i) {
        BandScanRow& row = rows[i];
        row.p = path[i];
        row.edges = band_edges(path[i]);
        try {
            if (any_degenerate(row.p) && !fully_degenerate(row.p)) {
                row.state = solve_bound_state(row.p, params, quad, opts);
                row.exists = row.state ? Existence::present : Existence::inconclusive;
            } else {
                row.exists = has_bound_state(row.p, params, quad, opts);
                if (row.exists == Existence::present)
                    row.state = solve_bound_state(row.p, params, quad, opts);
            }
        } catch (const std::exception& e) {
            row.error = e.what();
        }
    }
    return rows;
}

// Checks that the eigenvalue decreases strictly along an increasing list of
// couplings.  A missing bound state for mu >= mu0 at p != 0 violates the
// monotone-eigenvalue theorem and is reported as an error.
inline bool monotonicity_check(const TorusPoint& p, const std::vector<double>& mu_list,
                               const FormFactor& phi, const QuadratureSpec& quad,
                               const SolverOptions& opts = SolverOptions()) {
    if (mu_list.size() < 2)
        throw std::invalid_argument("monotonicity_check: need at least two couplings");
    for (std::size_t i = 1; i < mu_list.size(); ++i)
        if (!(mu_list[i] > mu_list[i - 1]))
            throw std::invalid_argument("monotonicity_check: couplings must increase");
    std::vector<double> energies;
    energies.reserve(mu_list.size());
    for (double mu : mu_list) {
        const auto state = solve_bound_state(p, {mu, phi}, quad, opts);
        if (!state)
            throw std::runtime_error(
                "monotonicity_check: theorem violation, no bound state at mu = " +
                std::to_string(mu));
        energies.push_back(state->energy);
    }
    for (std::size_t i = 1; i < energies.size(); ++i)
        if (!(energies[i] < energies[i - 1] + 2.0 * opts.tol)) return false;
    return true;
}

}  // namespace friedrichs
