#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "friedrichs/form_factor.hpp"
#include "friedrichs/quadrature.hpp"

using namespace friedrichs;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// (1/(2pi)^3) * integral of 1/dispersion over the torus (simple-cubic
// lattice Green value at the origin), Gamma-function closed form.
constexpr double kGreenConstant = 0.505462019717326006;

// integral of 1 / (2 dispersion) over the torus.
constexpr double kLambdaZeroConst = 0.5 * torus_volume * kGreenConstant;

double one(double, double, double) { return 1.0; }

}  // namespace

TEST_CASE("smooth rule basics", "[quadrature]") {
    QuadratureSpec spec;

    REQUIRE_THAT(integrate_smooth(one, spec).value, WithinRel(torus_volume, 1e-13));

    auto cos1 = [](double a, double, double) { return std::cos(a); };
    REQUIRE_THAT(integrate_smooth(cos1, spec).value, WithinAbs(0.0, 1e-12));

    // 1-D residue formula: int dq / (a - b cos q) = 2 pi / sqrt(a^2 - b^2).
    auto lorentz = [](double a, double, double) { return 1.0 / (3.0 - 2.0 * std::cos(a)); };
    REQUIRE_THAT(integrate_smooth(lorentz, spec).value,
                 WithinRel(torus_volume / std::sqrt(5.0), 1e-12));
}

TEST_CASE("smooth rule integrates low-degree cosine polynomials exactly", "[quadrature]") {
    QuadratureSpec spec;
    spec.n_grid = 16;
    auto f = [](double a, double b, double) {
        const double c = std::cos(3 * a) * std::cos(2 * b);
        return 0.25 + c + std::cos(a) * std::cos(a);
    };
    // 0.25 (2pi)^3 + 0 + (1/2)(2pi)^3 * ... : cos^2 contributes 1/2 per full period.
    const double expected = 0.25 * torus_volume + 0.5 * torus_volume;
    REQUIRE_THAT(integrate_smooth(f, spec).value, WithinRel(expected, 1e-12));
}

TEST_CASE("smooth rule rejects non-finite integrands", "[quadrature]") {
    QuadratureSpec spec;
    auto bad = [](double a, double, double) { return 1.0 / (a - a); };
    REQUIRE_THROWS_AS(integrate_smooth(bad, spec), std::runtime_error);
}

TEST_CASE("spec validation", "[quadrature]") {
    QuadratureSpec spec;
    spec.n_grid = 7;
    REQUIRE_THROWS_AS(spec.validate(), std::invalid_argument);
    spec = QuadratureSpec();
    spec.patch_radius = 1.5;
    REQUIRE_THROWS_AS(spec.validate(), std::invalid_argument);
    spec = QuadratureSpec();
    spec.target_rel_tol = 0.5;
    REQUIRE_THROWS_AS(spec.validate(), std::invalid_argument);
}

TEST_CASE("peaked rule at the singular threshold", "[quadrature]") {
    QuadratureSpec spec;
    const IntegralValue v = integrate_peaked(one, TorusPoint(), 0.0, spec);
    REQUIRE_THAT(v.value, WithinRel(kLambdaZeroConst, 1e-6));
    REQUIRE(std::abs(v.value - kLambdaZeroConst) <= v.err_est);

    // Numerator with a double zero at the singular point: the integrand
    // reduces to dispersion / 2, an exact cosine polynomial.
    const FormFactor eps = FormFactor::epsilon_type();
    auto g = [&eps](double a, double b, double c) {
        const double v2 = eps(a, b, c);
        return v2 * v2;
    };
    const IntegralValue w0 = integrate_peaked(g, TorusPoint(), 0.0, spec);
    REQUIRE_THAT(w0.value, WithinRel(1.5 * torus_volume, 1e-7));
}

TEST_CASE("peaked rule monotone bounds for large w", "[quadrature]") {
    QuadratureSpec spec;
    const double w = 10.0;   // w^2 = 100
    const double v = integrate_peaked(one, TorusPoint(), w, spec).value;
    REQUIRE(v < torus_volume / (w * w));
    REQUIRE(v > torus_volume / (12.0 + w * w));
}

TEST_CASE("peaked and smooth rules agree away from the threshold", "[quadrature]") {
    QuadratureSpec spec;
    const FormFactor eps = FormFactor::epsilon_type();
    for (double w : {0.5, 1.0, 2.0}) {
        for (const TorusPoint& p : {TorusPoint(), TorusPoint(0.8, -0.4, 0.2)}) {
            const auto c = axis_half_cos(p);
            auto g = [&eps, &p](double a, double b, double cq) {
                const TorusPoint h = half_point(p);
                const double v = eps(a + h.x1, b + h.x2, cq + h.x3);
                return v * v;
            };
            const double peaked_value = integrate_peaked(g, p, w, spec).value;
            auto direct = [&](double a, double b, double cq) {
                return g(a, b, cq) / (reduced_dispersion_raw(c, a, b, cq) + w * w);
            };
            const double smooth_value = integrate_smooth(direct, spec).value;
            REQUIRE_THAT(peaked_value, WithinRel(smooth_value, 1e-8));
        }
    }
}

TEST_CASE("peaked rule symmetry and monotonicity", "[quadrature]") {
    QuadratureSpec spec;
    const FormFactor eps = FormFactor::epsilon_type();
    auto g_even = [&eps](double a, double b, double c) {
        const double v = eps(a, b, c);
        return v * v;
    };
    const TorusPoint p(0.9, -0.3, 1.4);
    const double plus = integrate_peaked(g_even, p, 0.25, spec).value;
    const double minus = integrate_peaked(g_even, -p, 0.25, spec).value;
    REQUIRE_THAT(plus, WithinRel(minus, 1e-12));

    double prev = integrate_peaked(one, TorusPoint(), 0.0, spec).value;
    for (double w : {0.1, 0.2, 0.5, 1.0}) {
        const double cur = integrate_peaked(one, TorusPoint(), w, spec).value;
        REQUIRE(cur < prev);
        prev = cur;
    }
}

TEST_CASE("peaked rule rejects bad inputs", "[quadrature]") {
    QuadratureSpec spec;
    REQUIRE_THROWS_AS(integrate_peaked(one, TorusPoint(), -0.1, spec), std::invalid_argument);
    REQUIRE_THROWS_AS(integrate_peaked(one, TorusPoint(M_PI, 0, 0), 0.1, spec),
                      std::invalid_argument);
}

TEST_CASE("refinement loop", "[quadrature]") {
    QuadratureSpec spec;
    spec.n_grid = 8;

    auto job_const = [](const QuadratureSpec& s) -> IntegralValue {
        const std::int64_t n = s.n_grid;
        return {tensor_midpoint_sum(one, s.n_grid), 0.0, n * n * n};
    };
    const IntegralValue v = refine_until(job_const, spec, 1e-10);
    REQUIRE_THAT(v.value, WithinRel(torus_volume, 1e-12));

    // Near-threshold peaked value converges under refinement.
    QuadratureSpec pspec;
    pspec.n_grid = 24;
    pspec.n_radial = 32;
    auto job_peaked = [](const QuadratureSpec& s) -> IntegralValue {
        const PeakedRule rule(one, TorusPoint(), s);
        return {rule.evaluate(1e-3), 0.0, rule.node_count()};
    };
    const IntegralValue nearly = refine_until(job_peaked, pspec, 1e-6);
    REQUIRE(nearly.err_est <= 1e-6 * std::abs(nearly.value));
    REQUIRE(nearly.value < kLambdaZeroConst);
    REQUIRE(nearly.value > kLambdaZeroConst - M_PI * M_PI * 1e-3 - 1e-3);

    // Deliberately non-integrable probe: numerator 1/u0 makes the target
    // 1/u0^2, which diverges; the ladder must refuse to converge.
    auto job_divergent = [](const QuadratureSpec& s) -> IntegralValue {
        const auto c = axis_half_cos(TorusPoint());
        auto spike = [&c](double a, double b, double q3) {
            return 1.0 / reduced_dispersion_raw(c, a, b, q3);
        };
        const PeakedRule rule(spike, TorusPoint(), s);
        return {rule.evaluate(0.0), 0.0, rule.node_count()};
    };
    QuadratureSpec dspec;
    dspec.n_grid = 8;
    dspec.n_radial = 8;
    REQUIRE_THROWS_AS(refine_until(job_divergent, dspec, 1e-8), QuadratureNonConvergence);

    REQUIRE_THROWS_AS(refine_until(job_const, spec, 1e-15), std::invalid_argument);
}
