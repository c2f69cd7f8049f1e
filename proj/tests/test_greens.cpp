#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "anderson/greens.hpp"

using namespace anderson;
using namespace anderson::greens;

TEST_CASE("green function values") {
    CHECK(green_value(EquationKind::wave, 1.0, 0.5) == 0.5);
    CHECK(green_value(EquationKind::wave, 1.0, 2.0) == 0.0);
    CHECK_THAT(green_value(EquationKind::heat, 1.0, 0.0),
               Catch::Matchers::WithinAbs(0.3989422804014327, 1e-12));
    CHECK_THROWS_AS(green_value(EquationKind::wave, 0.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(green_value(EquationKind::heat, -1.0, 0.0), std::invalid_argument);
}

TEST_CASE("green fourier transforms") {
    CHECK_THAT(green_fourier(EquationKind::wave, 2.0, 1e-12),
               Catch::Matchers::WithinRel(2.0, 1e-6));
    CHECK(green_fourier(EquationKind::heat, 1.0, 0.0) == 1.0);
    CHECK(std::abs(green_fourier(EquationKind::wave, 1.0, M_PI)) < 1e-12);
    // |FG_wave| <= t and <= 1/|xi|; FG_heat in (0, 1]
    for (double t : {0.1, 0.7, 2.0})
        for (double xi : {0.01, 0.5, 3.0, 50.0}) {
            const double w = std::abs(green_fourier(EquationKind::wave, t, xi));
            CHECK(w <= t * (1.0 + 1e-12));
            CHECK(w <= 1.0 / xi + 1e-12);
            const double h = green_fourier(EquationKind::heat, t, xi);
            CHECK(h > 0.0);
            CHECK(h <= 1.0);
        }
}

TEST_CASE("hurst index range is strict") {
    CHECK_THROWS_AS(HurstIndex(0.25), std::invalid_argument);
    CHECK_THROWS_AS(HurstIndex(1.0), std::invalid_argument);
    CHECK(HurstIndex(0.26).rough());
    CHECK_FALSE(HurstIndex(0.5).rough());
}

TEST_CASE("spectral constants") {
    // c_{1/2} = Gamma(2) sin(pi/2) / (2 pi) = 1/(2 pi)
    CHECK_THAT(noise_density_constant(0.5),
               Catch::Matchers::WithinRel(1.0 / (2.0 * M_PI), 1e-12));
    CHECK(lemma_constant(0.0) == M_PI / 2.0);
    // positivity of C_alpha on both sides of 0
    for (double a : {-0.9, -0.5, -0.2, 0.2, 0.5, 0.9}) CHECK(lemma_constant(a) > 0.0);
    CHECK_THROWS_AS(gagliardo_constant(0.5), std::invalid_argument);
    CHECK_THAT(gagliardo_constant(0.3), Catch::Matchers::WithinRel(0.3 * 0.4 / 2.0, 1e-12));
}

TEST_CASE("c_H is Lipschitz on a dense grid of (1/4,1)") {
    // numerically max |dc/dH| is ~1.0 on the interval
    const double delta = 1e-3;
    for (double h = 0.2501; h + delta < 0.9999; h += 0.0007) {
        const double d = std::abs(noise_density_constant(h + delta) - noise_density_constant(h));
        CHECK(d <= 1.1 * delta);
    }
}

TEST_CASE("closed-form spectral energy vs direct 2-D quadrature") {
    for (EquationKind kind : {EquationKind::wave, EquationKind::heat})
        for (double alpha : {-0.5, -0.2, 0.0, 0.2, 0.5})
            for (double T : {0.5, 1.0}) {
                const double closed = spectral_energy(kind, alpha, T);
                const double quad = spectral_energy_quadrature(kind, alpha, T, 1e-6);
                INFO(kind_name(kind) << " alpha=" << alpha << " T=" << T);
                CHECK_THAT(quad, Catch::Matchers::WithinRel(closed, 1e-4));
            }
}

TEST_CASE("lemma 3.1 pinned values") {
    CHECK_THAT(spectral_energy(EquationKind::wave, 0.0, 1.0),
               Catch::Matchers::WithinRel(M_PI / 2.0, 1e-12));
    CHECK_THAT(spectral_energy(EquationKind::heat, 0.0, 1.0),
               Catch::Matchers::WithinRel(2.0 * std::sqrt(M_PI), 1e-12));
    // frozen regression value for (wave, alpha=0.3, T=1), fixed by quadrature
    CHECK_THAT(spectral_energy(EquationKind::wave, 0.3, 1.0),
               Catch::Matchers::WithinRel(1.8540431, 1e-6));
    CHECK_THROWS_AS(spectral_energy(EquationKind::wave, 1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(spectral_energy(EquationKind::heat, -1.0, 1.0), std::invalid_argument);
}

TEST_CASE("cos increment energy: limits, bound, scaling sweep") {
    CHECK(cos_increment_energy(EquationKind::wave, 0.0, 1.0, 0.0) == 0.0);
    const double v = cos_increment_energy(EquationKind::heat, 0.0, 1.0, 0.1);
    CHECK(v > 0.0);
    CHECK(v <= cos_increment_bound(EquationKind::heat, 0.0, 1.0, 0.1));
    for (EquationKind kind : {EquationKind::wave, EquationKind::heat}) {
        double prev_ratio = 0.0;
        for (int k = 2; k <= 8; ++k) {
            const double h = std::pow(2.0, -k);
            const double val = cos_increment_energy(kind, 0.0, 1.0, h);
            const double ratio = val / std::pow(h, 1.0);
            CHECK(val <= cos_increment_bound(kind, 0.0, 1.0, h) * (1.0 + 1e-6));
            if (k > 2) CHECK(ratio <= prev_ratio * 1.05 + 1e-12);  // bounded, near-monotone
            prev_ratio = ratio;
        }
    }
}

TEST_CASE("time increment energy: limits and scaling sweeps") {
    CHECK(time_increment_energy(EquationKind::heat, 0.0, 1.0, 0.0) == 0.0);
    double prev = 1e300;
    for (int k = 2; k <= 8; ++k) {  // heat: value/h^{1/2} bounded
        const double h = std::pow(2.0, -k);
        const double r = time_increment_energy(EquationKind::heat, 0.0, 1.0, h) / std::sqrt(h);
        CHECK(r <= time_increment_bound(EquationKind::heat, 0.0, 1.0, h) / std::sqrt(h) + 1e-9);
        CHECK(r < prev * 1.05);
        prev = r;
    }
    prev = 1e300;
    for (int k = 2; k <= 8; ++k) {  // wave: value/h bounded
        const double h = std::pow(2.0, -k);
        const double r = time_increment_energy(EquationKind::wave, 0.0, 1.0, h) / h;
        CHECK(r <= time_increment_bound(EquationKind::wave, 0.0, 1.0, h) / h + 1e-9);
        CHECK(r < prev * 1.05);
        prev = r;
    }
}

TEST_CASE("riesz identity: closed form vs defining integral") {
    for (double h : {0.26, 0.3, 0.4, 0.49})
        for (double xi : {0.5, 1.0, 3.0}) {
            const HurstIndex H(h);
            const double rhs = riesz_identity(H, xi);
            const double lhs = riesz_identity_quadrature(H, xi);
            INFO("H=" << h << " xi=" << xi);
            CHECK_THAT(lhs, Catch::Matchers::WithinRel(rhs, 1e-4));
        }
    // homogeneity: value(xi=2)/value(xi=1) = 2^{1-2H} exactly
    const HurstIndex H(0.3);
    CHECK_THAT(riesz_identity(H, 2.0) / riesz_identity(H, 1.0),
               Catch::Matchers::WithinRel(std::pow(2.0, 0.4), 1e-12));
    // limiting value quoted at H -> 1/4, xi = 1
    CHECK_THAT(riesz_identity(HurstIndex(0.2500001), 1.0),
               Catch::Matchers::WithinAbs(10.0265, 2e-3));
    CHECK_THROWS_AS(riesz_identity(HurstIndex(0.5 + 1e-9), 1.0), std::invalid_argument);
}
