#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "friedrichs/determinant.hpp"

using namespace friedrichs;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

constexpr double kGreenConstant = 0.505462019717326006;
constexpr double kLambdaZeroConst = 0.5 * torus_volume * kGreenConstant;   // Lambda(0,0), phi = 1
constexpr double kMu0Const = 1.0 / kLambdaZeroConst;                        // 0.0159515122675...
const double kMu0Eps = 1.0 / (12.0 * M_PI * M_PI * M_PI);                   // 1/(12 pi^3)

const QuadratureSpec kSpec;

}  // namespace

TEST_CASE("Lambda closed form at the fully degenerate momentum", "[determinant]") {
    const TorusPoint r(M_PI, M_PI, M_PI);
    const ModelParams params{1.0, FormFactor::constant(1.0)};
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> zdist(-50.0, 11.0);
    for (int k = 0; k < 20; ++k) {
        const double z = zdist(rng);
        REQUIRE_THAT(lambda_value(r, z, params, kSpec).value,
                     WithinRel(torus_volume / (12.0 - z), 1e-14));
    }
    REQUIRE_THROWS_AS(lambda_value(r, 12.0, params, kSpec), std::invalid_argument);
}

TEST_CASE("Lambda at the origin threshold", "[determinant]") {
    const ModelParams params{1.0, FormFactor::constant(1.0)};
    const IntegralValue v = lambda_value(TorusPoint(), 0.0, params, kSpec);
    REQUIRE_THAT(v.value, WithinRel(kLambdaZeroConst, 1e-6));

    // Decays far below the spectrum.
    REQUIRE(lambda_value(TorusPoint(), -1e9, params, kSpec).value < 1e-6);

    // Above the edge is out of contract.
    REQUIRE_THROWS_AS(lambda_value(TorusPoint(), 0.1, params, kSpec), std::invalid_argument);
}

TEST_CASE("determinant identities and monotonicity", "[determinant]") {
    const ModelParams params{0.01, FormFactor::constant(1.0)};
    const TorusPoint r(M_PI, M_PI, M_PI);
    REQUIRE_THAT(fredholm_determinant(r, 0.0, params, kSpec).value,
                 WithinRel(1.0 - 0.01 * torus_volume / 12.0, 1e-13));

    // Delta = 1 - mu Lambda = 1 - bs_eigenvalue, exactly.
    const TorusPoint p(0.7, -0.2, 0.4);
    for (double z : {-3.0, -0.5, 0.1}) {
        const double delta = fredholm_determinant(p, z, params, kSpec).value;
        const double bs = bs_eigenvalue(p, z, params, kSpec);
        REQUIRE(delta == 1.0 - bs);
    }

    // Strict decrease in z and the z -> -inf limit.
    double prev = fredholm_determinant(p, -1e9, params, kSpec).value;
    REQUIRE(prev > 1.0 - 1e-6);
    REQUIRE(prev <= 1.0);
    for (double z : {-100.0, -10.0, -1.0, 0.0, 0.3}) {
        const double cur = fredholm_determinant(p, z, params, kSpec).value;
        REQUIRE(cur < prev);
        prev = cur;
    }
}

TEST_CASE("critical coupling values", "[determinant]") {
    // Exact by cosine orthogonality: integrand reduces to dispersion / 2.
    const double mu0_eps = critical_coupling(FormFactor::epsilon_type(), kSpec);
    REQUIRE_THAT(mu0_eps, WithinRel(kMu0Eps, 1e-8));

    // Green-constant cross-check.
    const double mu0_one = critical_coupling(FormFactor::constant(1.0), kSpec);
    REQUIRE_THAT(mu0_one, WithinRel(kMu0Const, 1e-5));

    // Scaling in the constant amplitude.
    const double mu0_scaled = critical_coupling(FormFactor::constant(2.0), kSpec);
    REQUIRE_THAT(mu0_scaled, WithinRel(mu0_one / 4.0, 1e-12));
}

TEST_CASE("determinant vanishes at criticality", "[determinant]") {
    const double mu0 = critical_coupling(FormFactor::constant(1.0), kSpec);
    const ModelParams critical{mu0, FormFactor::constant(1.0)};
    REQUIRE_THAT(fredholm_determinant(TorusPoint(), 0.0, critical, kSpec).value,
                 WithinAbs(0.0, 1e-8));

    const ModelParams half{0.5 * mu0, FormFactor::constant(1.0)};
    REQUIRE_THAT(fredholm_determinant(TorusPoint(), 0.0, half, kSpec).value,
                 WithinAbs(0.5, 1e-7));

    // Birman-Schwinger eigenvalue 1 at criticality, 2 at twice the coupling.
    REQUIRE_THAT(bs_eigenvalue(TorusPoint(), 0.0, critical, kSpec), WithinAbs(1.0, 1e-8));
    const ModelParams twice{2.0 * mu0, FormFactor::constant(1.0)};
    REQUIRE_THAT(bs_eigenvalue(TorusPoint(), 0.0, twice, kSpec), WithinAbs(2.0, 2e-8));
}

TEST_CASE("w-variable form matches the spectral form", "[determinant]") {
    const ModelParams params{1.0, FormFactor::constant(1.0)};

    // Same singular structure on both routes at p = 0.
    const double via_w = lambda_w(TorusPoint(), 0.3, params, kSpec).value;
    const double via_z = lambda_value(TorusPoint(), -0.09, params, kSpec).value;
    REQUIRE_THAT(via_w, WithinRel(via_z, 1e-10));

    // Shifted-variable identity at p != 0, within combined error estimates.
    const TorusPoint p(0.4, 0.2, -0.1);
    const IntegralValue d0 = lambda_w(p, 0.0, params, kSpec);
    const IntegralValue lam = lambda_value(p, band_edges(p).lower, params, kSpec);
    REQUIRE_THAT(d0.value, WithinAbs(lam.value, d0.err_est + lam.err_est + 1e-12));

    // Monotone decrease in w.
    REQUIRE(lambda_w(TorusPoint(), 0.1, params, kSpec).value >
            lambda_w(TorusPoint(), 0.2, params, kSpec).value);

    REQUIRE_THROWS_AS(lambda_w(TorusPoint(), -0.2, params, kSpec), std::invalid_argument);
    REQUIRE_THROWS_AS(lambda_w(TorusPoint(M_PI, 0, 0), 0.2, params, kSpec), std::invalid_argument);
}

TEST_CASE("shifted and unshifted integrals agree on random points", "[determinant]") {
    // lambda_w is built in re-centred coordinates; integrate the raw
    // spectral integrand directly as the independent route.
    const FormFactor eps = FormFactor::epsilon_type();
    const ModelParams params{1.0, eps};
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> angle(-2.0, 2.0);
    std::uniform_real_distribution<double> wdist(0.5, 2.0);
    for (int k = 0; k < 10; ++k) {
        const TorusPoint p(angle(rng), angle(rng), angle(rng));
        const double w = wdist(rng);
        const double z = band_edges(p).lower - w * w;
        auto raw = [&](double a, double b, double c) {
            const double v = eps(a, b, c);
            return v * v / (pair_dispersion(p, TorusPoint(a, b, c)) - z);
        };
        const IntegralValue direct = integrate_smooth(raw, kSpec);
        const IntegralValue shifted = lambda_w(p, w, params, kSpec);
        REQUIRE_THAT(shifted.value,
                     WithinAbs(direct.value, 10 * (direct.err_est + shifted.err_est) + 1e-10));
    }
}

TEST_CASE("partially degenerate momenta", "[determinant]") {
    const ModelParams params{1.0, FormFactor::constant(1.0)};
    const TorusPoint x(M_PI, 0, 0);
    const double m = band_edges(x).lower;
    REQUIRE_THAT(m, WithinAbs(4.0, 1e-14));

    // Strictly below the edge the smooth route serves values.
    const IntegralValue v = lambda_value(x, m - 1.0, params, kSpec);
    REQUIRE(v.value > 0.0);

    // The edge value itself does not exist.
    REQUIRE_THROWS_AS(lambda_value(x, m, params, kSpec), std::invalid_argument);
}

TEST_CASE("edge maximum across momenta at critical coupling", "[determinant]") {
    // At mu0: Delta(p, m(p)) < 0 and Delta(p, 0) > 0 for p != 0 (the band
    // bottom never supports the threshold value of the origin).
    const FormFactor one = FormFactor::constant(1.0);
    const double mu0 = critical_coupling(one, kSpec);
    const ModelParams critical{mu0, one};
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> angle(-3.0, 3.0);
    for (int k = 0; k < 8; ++k) {
        TorusPoint p(angle(rng), angle(rng), angle(rng));
        if (p.norm() < 0.2) p = TorusPoint(0.5, -0.7, 1.1);
        const LambdaEvaluator lam(p, one, kSpec);
        const double at_edge = 1.0 - mu0 * lam.at_w(0.0).value;
        const double at_zero = 1.0 - mu0 * lam.at_w(std::sqrt(lam.edge())).value;
        REQUIRE(at_edge < 0.0);
        REQUIRE(at_zero > 0.0);
    }
}

TEST_CASE("threshold classification", "[determinant]") {
    const FormFactor one = FormFactor::constant(1.0);
    const double mu0 = critical_coupling(one, kSpec);

    REQUIRE(classify_threshold({mu0, one}, kSpec).cls == ThresholdClass::zero_energy_resonance);
    REQUIRE(classify_threshold({0.5 * mu0, one}, kSpec).cls == ThresholdClass::subcritical);
    REQUIRE(classify_threshold({2.0 * mu0, one}, kSpec).cls == ThresholdClass::supercritical);

    const FormFactor eps = FormFactor::epsilon_type();
    const double mu0_eps = critical_coupling(eps, kSpec);
    REQUIRE_THAT(mu0_eps, WithinRel(kMu0Eps, 1e-8));
    REQUIRE(classify_threshold({kMu0Eps, eps}, kSpec).cls == ThresholdClass::zero_eigenvalue);
}

TEST_CASE("threshold function tails", "[determinant]") {
    const std::vector<double> radii{0.2, 0.1, 0.05, 0.025};

    // Resonance regime: L2 tail grows like 1/radius, L1 stays bounded.
    const auto res = threshold_function_diagnostics({1.0, FormFactor::constant(1.0)}, radii, kSpec);
    REQUIRE(res.size() == 4);
    for (std::size_t i = 0; i + 1 < res.size(); ++i) {
        const double ratio = res[i + 1].l2_tail / res[i].l2_tail;
        REQUIRE(ratio > 1.7);
        REQUIRE(ratio < 2.3);
    }
    REQUIRE(res[2].l1_tail / res[0].l1_tail < 1.5);

    // Zero-eigenvalue regime: both tails converge.
    const auto eig = threshold_function_diagnostics({1.0, FormFactor::epsilon_type()}, radii, kSpec);
    REQUIRE(eig[2].l2_tail / eig[0].l2_tail < 1.2);

    REQUIRE_THROWS_AS(
        threshold_function_diagnostics({1.0, FormFactor::constant(1.0)}, {0.1, 0.2}, kSpec),
        std::invalid_argument);
}
