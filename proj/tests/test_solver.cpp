#include <catch2/catch_amalgamated.hpp>

#include <cstring>

#include "anderson/solver.hpp"
#include "anderson/stats.hpp"

using namespace anderson;
using namespace anderson::solver;

namespace {

noise::SpectralWhiteNoise zero_noise(const SpaceTimeGrid& g) {
    noise::SpectralWhiteNoise wn;
    wn.grid = g;
    wn.seed = 0;
    wn.z.assign(size_t(g.n_t) * g.n_xi, {0.0, 0.0});
    return wn;
}

}  // namespace

TEST_CASE("zero noise and zero initial condition are fixed points") {
    const SpaceTimeGrid g(1.0, 16, 2.0, 64);
    const HurstIndex H(0.5);
    const auto wn0 = zero_noise(g);
    const auto u = solve_fixed_point(wn0, H, EquationKind::wave, 1.7);
    for (double v : u.u) CHECK(v == 1.7);

    const auto wn = noise::sample_white_noise(g, 4);
    const auto uz = solve_fixed_point(wn, H, EquationKind::heat, 0.0);
    for (double v : uz.u) CHECK(v == 0.0);
}

TEST_CASE("solve with m_max=1 equals one picard step from the constant iterate") {
    const SpaceTimeGrid g(1.0, 16, 2.0, 128);
    const HurstIndex H(0.45);
    const auto wn = noise::sample_white_noise(g, 9);
    SolverConfig cfg;
    cfg.m_max = 1;
    const auto a = solve(wn, H, EquationKind::wave, 1.0, cfg);
    const auto dW = noise::noise_increments(wn, H);
    const auto u0 = initial_iterate(g, EquationKind::wave, 0.45, 1.0, wn.seed);
    const auto b = picard_step(u0, dW);
    REQUIRE(a.u == b.u);
    CHECK(a.iterate == 1);
}

TEST_CASE("the one-pass sweep is the Picard fixed point") {
    const SpaceTimeGrid g(0.5, 8, 2.0, 64);
    const HurstIndex H(0.5);
    const auto wn = noise::sample_white_noise(g, 12);
    for (EquationKind kind : {EquationKind::wave, EquationKind::heat}) {
        const auto sweep = solve_fixed_point(wn, H, kind, 1.0);
        SolverConfig cfg;
        cfg.m_max = g.n_t;  // nilpotent: exact convergence after n_t steps
        const auto picard = solve(wn, H, kind, 1.0, cfg);
        double worst = 0.0;
        for (size_t i = 0; i < sweep.u.size(); ++i)
            worst = std::max(worst, std::abs(sweep.u[i] - picard.u[i]));
        CHECK(worst < 1e-12);
    }
}

TEST_CASE("picard iterates converge geometrically on a fixed realization") {
    const SpaceTimeGrid g(1.0, 64, 2.0, 256);
    const HurstIndex H(0.5);
    const auto wn = noise::sample_white_noise(g, 33);
    const auto dW = noise::noise_increments(wn, H);
    SolutionField u = initial_iterate(g, EquationKind::wave, 0.5, 1.0, wn.seed);
    std::vector<double> change;
    for (int m = 0; m < 6; ++m) {
        SolutionField next = picard_step(u, dW);
        change.push_back(grid_l2_distance(next, u));
        u = std::move(next);
    }
    for (size_t m = 2; m < change.size(); ++m) CHECK(change[m] < change[m - 1]);
}

TEST_CASE("solve stops by tolerance and reports it") {
    const SpaceTimeGrid g(1.0, 32, 2.0, 128);
    const auto wn = noise::sample_white_noise(g, 5);
    SolverConfig cfg;
    cfg.mode = SolverConfig::Mode::iterate_to_tolerance;
    cfg.m_max = 32;
    cfg.fixed_point_tol = 1e-10;
    const auto u = solve(wn, HurstIndex(0.5), EquationKind::wave, 1.0, cfg);
    CHECK(cfg.stopped_by_tolerance);
    CHECK(u.iterate < 32);
}

TEST_CASE("adaptedness: perturbing slice i leaves all earlier and current slices bit-identical") {
    const SpaceTimeGrid g(1.0, 16, 2.0, 128);
    const HurstIndex H(0.4);
    auto wn = noise::sample_white_noise(g, 8);
    const auto base = solve_fixed_point(wn, H, EquationKind::wave, 1.0);
    const int islice = 5;
    wn.at(islice, 3) += noise::cplx(0.5, 0.25);
    wn.at(islice, g.n_xi - 3) = std::conj(wn.at(islice, 3));
    const auto pert = solve_fixed_point(wn, H, EquationKind::wave, 1.0);
    for (int i = 0; i <= islice; ++i)
        REQUIRE(std::memcmp(base.row(i), pert.row(i), sizeof(double) * g.n_x) == 0);
    bool differs = false;
    for (int k = 0; k < g.n_x; ++k)
        differs = differs || base.at(islice + 1, k) != pert.at(islice + 1, k);
    CHECK(differs);
}

TEST_CASE("blow-up guard names the offending slice") {
    const SpaceTimeGrid g(1.0, 16, 2.0, 128);
    const auto wn = noise::sample_white_noise(g, 3);
    CHECK_THROWS_WITH(solve_fixed_point(noise::noise_increments(wn, HurstIndex(0.5)),
                                        EquationKind::wave, 1.0, 1e-12),
                      Catch::Matchers::ContainsSubstring("slice"));
}

TEST_CASE("first picard step has the chaos-order-1 variance") {
    const SpaceTimeGrid g(1.0, 128, 4.0, 512);
    const HurstIndex H(0.5);
    for (EquationKind kind : {EquationKind::wave, EquationKind::heat}) {
        const double target = picard1_variance(g, kind, H, 1.0, 1.0);
        double s = 0, s2 = 0;
        const int reps = 2500;
        const int k0 = g.n_x / 2;
        for (int r = 0; r < reps; ++r) {
            const auto wn = noise::sample_white_noise(g, replicate_seed(71, r));
            const auto dW = noise::noise_increments(wn, H);
            const auto u0 = initial_iterate(g, kind, 0.5, 1.0, wn.seed);
            const auto u1 = picard_step(u0, dW);
            const double v = u1.at(g.n_t, k0) - 1.0;
            s += v * v;
            s2 += v * v * v * v;
        }
        const double var = s / reps;
        const double se = std::sqrt(std::max(s2 / reps - var * var, 0.0) / reps);
        const double closed =
            greens::noise_density_constant(0.5) * greens::spectral_energy(kind, 0.0, 1.0);
        INFO(kind_name(kind) << ": emp=" << var << " disc=" << target << " closed=" << closed);
        CHECK(std::abs(var - target) < 3.0 * se);
        CHECK(std::abs(target - closed) < 0.01 * closed);  // slice kernels keep bias small
    }
}

TEST_CASE("mean preservation across iterates") {
    const SpaceTimeGrid g(1.0, 32, 2.0, 128);
    const HurstIndex H(0.5);
    double s = 0, s2 = 0;
    const int reps = 2000;
    for (int r = 0; r < reps; ++r) {
        const auto wn = noise::sample_white_noise(g, replicate_seed(91, r));
        const auto u = solve_fixed_point(wn, H, EquationKind::heat, 1.0);
        const double v = u.at(g.n_t, g.n_x / 2);
        s += v;
        s2 += v * v;
    }
    const double mean = s / reps;
    const double se = std::sqrt(std::max(s2 / reps - mean * mean, 0.0) / reps);
    CHECK(std::abs(mean - 1.0) < 3.0 * se);
}

TEST_CASE("ito integral: degenerate cases, linearity, spatial-dot identity") {
    const SpaceTimeGrid g(1.0, 16, 2.0, 128);
    const HurstIndex H(0.4);
    const auto wn = noise::sample_white_noise(g, 44);
    std::vector<double> zero(size_t(g.n_t) * g.n_x, 0.0);
    CHECK(ito_integral(zero, wn, H) == 0.0);
    std::vector<double> S(size_t(g.n_t) * g.n_x);
    for (int i = 0; i < g.n_t; ++i)
        for (int k = 0; k < g.n_x; ++k)
            S[size_t(i) * g.n_x + k] =
                std::exp(-g.cell_center(k) * g.cell_center(k)) * (1.0 + g.time(i));
    const double one = ito_integral(S, wn, H);
    std::vector<double> S3 = S;
    for (double& v : S3) v *= 3.0;
    CHECK_THAT(ito_integral(S3, wn, H), Catch::Matchers::WithinRel(3.0 * one, 1e-12));
    // spectral evaluation == sum S * dW
    const auto dW = noise::noise_increments(wn, H);
    double dot = 0.0;
    for (size_t i = 0; i < S.size(); ++i) dot += S[i] * dW.dW[i];
    CHECK_THAT(one, Catch::Matchers::WithinAbs(dot, 1e-9 * std::abs(dot) + 1e-12));
}

TEST_CASE("ito isometry: empirical variance matches the spectral target") {
    const SpaceTimeGrid g(1.0, 32, 2.0, 256);
    const HurstIndex H(0.5);
    std::vector<double> S(size_t(g.n_t) * g.n_x);
    for (int i = 0; i < g.n_t; ++i)
        for (int k = 0; k < g.n_x; ++k) {
            const double x = g.cell_center(k);
            S[size_t(i) * g.n_x + k] = std::cos(2.0 * x) * std::exp(-x * x / 2.0);
        }
    const double target = ito_isometry_target(S, g, H);
    double s = 0, s2 = 0;
    const int reps = 3000;
    for (int r = 0; r < reps; ++r) {
        const auto wn = noise::sample_white_noise(g, replicate_seed(7, r));
        const double v = ito_integral(S, wn, H);
        s += v * v;
        s2 += v * v * v * v;
    }
    const double var = s / reps;
    const double se = std::sqrt(std::max(s2 / reps - var * var, 0.0) / reps);
    CHECK(std::abs(var - target) < 3.0 * se);
}

TEST_CASE("gagliardo form of the isometry for a step-function integrand (H < 1/2)") {
    // c_H int |FS|^2 |xi|^{1-2H} dxi == c~_H int int |S(x)-S(y)|^2 |x-y|^{2H-2}
    // for the piecewise-constant S, including the mass outside the window.
    const double Hval = 0.3;
    const int n = 32;
    const double L = 2.0, dx = 2.0 * L / n;
    std::vector<double> S(n), xc(n);
    for (int k = 0; k < n; ++k) {
        xc[k] = -L + (k + 0.5) * dx;
        S[k] = std::exp(-xc[k] * xc[k]);
    }
    // right side: exact cell-pair weights + analytic outside tails
    auto G2 = [&](double u) {
        return std::pow(std::abs(u), 2.0 * Hval) / ((2.0 * Hval - 1.0) * (2.0 * Hval));
    };
    double pairs = 0.0;
    for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
            if (k == l) continue;
            const double a = xc[k] - dx / 2, b = xc[k] + dx / 2;
            const double c = xc[l] - dx / 2, d = xc[l] + dx / 2;
            pairs += (S[k] - S[l]) * (S[k] - S[l]) *
                     (G2(b - c) - G2(a - c) - G2(b - d) + G2(a - d));
        }
    // (x in cell, y outside [-L, L]) and mirrored: 2 * sum_k S_k^2 * tail weight,
    // with int_a^b int_L^inf (y-x)^{2H-2} dy dx = ((L-a)^{2H} - (L-b)^{2H}) / (2H (1-2H))
    double outside = 0.0;
    const double q = 2.0 * Hval;
    for (int k = 0; k < n; ++k) {
        const double a = xc[k] - dx / 2, b = xc[k] + dx / 2;
        const double w_r = (std::pow(L - a, q) - std::pow(L - b, q)) / (q * (1.0 - q));
        const double w_l = (std::pow(b + L, q) - std::pow(a + L, q)) / (q * (1.0 - q));
        outside += 2.0 * S[k] * S[k] * (w_r + w_l);
    }
    const double rhs = greens::gagliardo_constant(Hval) * (pairs + outside);
    // left side: 1-D quadrature of |FS|^2 xi^{1-2H} with the periodic-average tail
    auto FS2 = [&](double xi) {
        std::complex<double> z(0.0, 0.0);
        for (int k = 0; k < n; ++k) z += S[k] * std::exp(std::complex<double>(0.0, -xi * xc[k]));
        const double u = xi * dx / 2.0;
        const double shape = std::abs(u) < 1e-10 ? dx : dx * std::sin(u) / u;
        return std::norm(z) * shape * shape;
    };
    const double P = 2.0 * M_PI / dx;
    PanelOptions opt;
    opt.rel_tol = 1e-8;
    opt.max_panel_width = P / 64.0;
    const double cut = 60.0 * P;
    const double body = 2.0 * power_weighted_integral(FS2, 1.0 - 2.0 * Hval, 0.0, cut, opt);
    // tail: 4 avg(phi) int_cut^inf xi^{-1-2H}, phi = sin^2(xi dx/2)|D|^2 periodic,
    // avg(phi) = (1/2) sum S_k^2 - (1/2) sum S_k S_{k+1}
    double avg_phi = 0.0;
    for (int k = 0; k < n; ++k) {
        avg_phi += 0.5 * S[k] * S[k];
        if (k + 1 < n) avg_phi -= 0.5 * S[k] * S[k + 1];
    }
    const double tail = 2.0 * 4.0 * avg_phi * std::pow(cut, -2.0 * Hval) / (2.0 * Hval);
    const double lhs = greens::noise_density_constant(Hval) * (body + tail);
    INFO("lhs=" << lhs << " rhs=" << rhs);
    CHECK_THAT(lhs, Catch::Matchers::WithinRel(rhs, 1e-3));
}

TEST_CASE("solution field export round-trips header fields") {
    const SpaceTimeGrid g(1.0, 8, 2.0, 64);
    const auto wn = noise::sample_white_noise(g, 2);
    const auto u = solve_fixed_point(wn, HurstIndex(0.5), EquationKind::heat, 1.0);
    write_solution_field("test_sol_dump.sol", u);
    std::ifstream is("test_sol_dump.sol", std::ios::binary);
    char magic[4];
    is.read(magic, 4);
    CHECK(std::memcmp(magic, "SOL1", 4) == 0);
    std::remove("test_sol_dump.sol");
    std::ostringstream os;
    write_solution_csv(os, u, 4, 16);
    CHECK(os.str().rfind("t,x,u\n", 0) == 0);
}
