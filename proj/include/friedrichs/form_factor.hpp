#pragma once

// Perturbation form factors.  The built-in family consists of even cosine
// polynomials  phi(q) = a0 + a1 cos q1 + a2 cos q2 + a3 cos q3,  which keeps
// the L2 norm and the critical coupling exactly computable by cosine
// orthogonality.  The two canonical instances are constant(1), which has
// phi(0) != 0, and epsilon_type (phi equal to the one-particle dispersion),
// which has phi(0) = 0 together with a vanishing gradient at the origin.

#include <array>
#include <cmath>
#include <random>
#include <stdexcept>

#include "friedrichs/torus.hpp"

namespace friedrichs {

class FormFactor {
public:
    enum class Kind { constant, epsilon_type, cosine_poly };

    static FormFactor constant(double value) {
        return FormFactor(Kind::constant, {value, 0.0, 0.0, 0.0});
    }

    static FormFactor epsilon_type() {
        return FormFactor(Kind::epsilon_type, {3.0, -1.0, -1.0, -1.0});
    }

    static FormFactor cosine_poly(double a0, double a1, double a2, double a3) {
        return FormFactor(Kind::cosine_poly, {a0, a1, a2, a3});
    }

    double operator()(double q1, double q2, double q3) const {
        return a_[0] + a_[1] * std::cos(q1) + a_[2] * std::cos(q2) + a_[3] * std::cos(q3);
    }

    double operator()(const TorusPoint& q) const { return (*this)(q.x1, q.x2, q.x3); }

    double value_at_zero() const { return at_zero_; }

    // Integral of phi^2 over the torus, exact by orthogonality:
    // (2 pi)^3 (a0^2 + (1/2) sum_i a_i^2).
    double l2_norm_sq() const { return l2_sq_; }

    Kind kind() const { return kind_; }
    const std::array<double, 4>& coefficients() const { return a_; }

private:
    FormFactor(Kind kind, std::array<double, 4> a) : kind_(kind), a_(a) {
        at_zero_ = a_[0] + a_[1] + a_[2] + a_[3];
        l2_sq_ = torus_volume *
                 (a_[0] * a_[0] + 0.5 * (a_[1] * a_[1] + a_[2] * a_[2] + a_[3] * a_[3]));
        if (!(l2_sq_ > 0.0))
            throw std::invalid_argument("FormFactor: phi is identically zero");
    }

    Kind kind_;
    std::array<double, 4> a_;
    double at_zero_ = 0.0;
    double l2_sq_ = 0.0;
};

// Samples |f(q) - f(-q)| over a fixed pseudorandom point set.  Validates the
// standing evenness hypothesis; also usable against arbitrary callables.
template <class F>
bool check_evenness(F&& f, int n_samples, double tol = 1e-13) {
    if (n_samples < 1)
        throw std::invalid_argument("check_evenness: n_samples must be >= 1");
    std::mt19937_64 rng(0x9e3779b97f4a7c15ull);
    std::uniform_real_distribution<double> angle(-M_PI, M_PI);
    for (int k = 0; k < n_samples; ++k) {
        const TorusPoint q(angle(rng), angle(rng), angle(rng));
        if (std::abs(f(q) - f(-q)) > tol) return false;
    }
    return true;
}

inline bool check_evenness(const FormFactor& phi, int n_samples, double tol = 1e-13) {
    return check_evenness([&phi](const TorusPoint& q) { return phi(q); }, n_samples, tol);
}

}  // namespace friedrichs
