#pragma once

// Independent brute-force oracle: the model restricted to an n^3 midpoint
// grid becomes the symmetric matrix  H = diag(u(p, q_j)) - mu h^3 phi_j phi_k.
// Its lowest eigenvalue is computed two ways that share nothing but the
// grid: a dense eigensolve of the assembled matrix, and the exact rank-one
// secular equation  1 - mu h^3 sum_j phi_j^2 / (u_j - z) = 0  solved by the
// same monotone bracketing as the continuum solver.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "friedrichs/determinant.hpp"
#include "friedrichs/dispersion.hpp"
#include "friedrichs/rootfind.hpp"

namespace friedrichs {

struct GridModel {
    int n = 0;                        // nodes per axis
    double cell_weight = 0.0;         // h^3 = (2 pi / n)^3
    TorusPoint p;
    double mu = 0.0;
    std::vector<double> site_energy;  // u(p, q_j), j in lexicographic order
    std::vector<double> phi_value;    // phi(q_j)
};

inline GridModel build_grid_model(const TorusPoint& p, const ModelParams& params, int n) {
    if (n < 4 || n > 16 || n % 2 != 0)
        throw std::invalid_argument("build_grid_model: n must be even and within [4, 16]");
    if (!(params.mu > 0.0)) throw std::invalid_argument("build_grid_model: mu must be > 0");
    GridModel model;
    model.n = n;
    const double h = two_pi / n;
    model.cell_weight = h * h * h;
    model.p = p;
    model.mu = params.mu;
    const std::size_t size = static_cast<std::size_t>(n) * n * n;
    model.site_energy.reserve(size);
    model.phi_value.reserve(size);
    const double e = dispersion(p);
    const auto c = axis_half_cos(p);
    const TorusPoint half = half_point(p);
    for (int j1 = 0; j1 < n; ++j1) {
        const double q1 = -M_PI + (j1 + 0.5) * h;
        for (int j2 = 0; j2 < n; ++j2) {
            const double q2 = -M_PI + (j2 + 0.5) * h;
            for (int j3 = 0; j3 < n; ++j3) {
                const double q3 = -M_PI + (j3 + 0.5) * h;
                const double u = e + 6.0 -
                                 2.0 * (c[0] * std::cos(q1 - half.x1) +
                                        c[1] * std::cos(q2 - half.x2) +
                                        c[2] * std::cos(q3 - half.x3));
                model.site_energy.push_back(u);
                model.phi_value.push_back(params.phi(q1, q2, q3));
            }
        }
    }
    return model;
}

// Smallest eigenvalue of the assembled dense matrix.
inline double lowest_eigenvalue_dense(const GridModel& model) {
    const std::size_t size = model.site_energy.size();
    if (size > 4096) throw std::invalid_argument("lowest_eigenvalue_dense: matrix larger than 4096");
    Eigen::MatrixXd H(size, size);
    const double coupling = model.mu * model.cell_weight;
    for (std::size_t j = 0; j < size; ++j)
        for (std::size_t k = 0; k < size; ++k)
            H(j, k) = -coupling * model.phi_value[j] * model.phi_value[k];
    for (std::size_t j = 0; j < size; ++j) H(j, j) += model.site_energy[j];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(H, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("lowest_eigenvalue_dense: eigensolver failed");
    return solver.eigenvalues()(0);
}

// Discrete secular determinant 1 - mu h^3 sum phi_j^2 / (u_j - z) at z below
// the diagonal range; strictly decreasing in z there.
inline double secular_determinant(const GridModel& model, double z) {
    double acc = 0.0;
    for (std::size_t j = 0; j < model.site_energy.size(); ++j) {
        const double f = model.phi_value[j];
        acc += f * f / (model.site_energy[j] - z);
    }
    return 1.0 - model.mu * model.cell_weight * acc;
}

// Unique root of the secular determinant below min_j u_j, when it exists.
inline std::optional<double> secular_root(const GridModel& model) {
    const std::size_t size = model.site_energy.size();
    double diag_min = std::numeric_limits<double>::infinity();
    for (double u : model.site_energy) diag_min = std::min(diag_min, u);

    // Limit of the determinant as z -> diag_min from below: -inf if any
    // weight sits on a minimal site, else the finite sum.
    double min_site_weight = 0.0;
    double finite_limit_sum = 0.0;
    for (std::size_t j = 0; j < size; ++j) {
        const double f2 = model.phi_value[j] * model.phi_value[j];
        if (model.site_energy[j] == diag_min)
            min_site_weight += f2;
        else
            finite_limit_sum += f2 / (model.site_energy[j] - diag_min);
    }
    const bool edge_divergent = min_site_weight > 0.0;
    if (!edge_divergent) {
        const double limit = 1.0 - model.mu * model.cell_weight * finite_limit_sum;
        if (limit >= 0.0) return std::nullopt;
    }

    // Root find in s = diag_min - z > 0; g is strictly increasing in s.
    auto g = [&](double s) { return secular_determinant(model, diag_min - s); };
    double s_lo = 1e-14;
    double f_lo = g(s_lo);
    int shrink = 0;
    while (f_lo >= 0.0) {
        // Edge-divergent case only: push the probe closer to the edge.
        if (!edge_divergent || ++shrink > 60) return std::nullopt;
        s_lo *= 1e-2;
        f_lo = g(s_lo);
    }
    double s_hi = 1.0;
    double f_hi = g(s_hi);
    int doublings = 0;
    while (f_hi <= 0.0) {
        if (++doublings > 60) throw std::runtime_error("secular_root: bracket expansion failed");
        s_hi *= 2.0;
        f_hi = g(s_hi);
    }
    const auto root = detail::find_increasing_root(g, s_lo, s_hi, f_lo, f_hi, 1e-13, 0.0, 200);
    return diag_min - root.x;
}

}  // namespace friedrichs
