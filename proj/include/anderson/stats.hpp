#pragma once

// Statistical estimators turning the limit theorems into measurable
// experiments: moment bounds, Holder increment fits, chi-norm seminorms,
// coupled L2 convergence in H, and two-sample distribution distance.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "anderson/chaos.hpp"
#include "anderson/greens.hpp"
#include "anderson/grid.hpp"
#include "anderson/noise.hpp"
#include "anderson/parallel.hpp"
#include "anderson/solver.hpp"

namespace anderson {
namespace stats {

// How a field realization is produced for an estimator.
struct IteratePolicy {
    enum class Kind { fixed_point, fixed_iterates, to_tolerance };
    Kind kind = Kind::fixed_point;
    int m = 2;
    double tol = 1e-8;

    std::string to_string() const {
        switch (kind) {
            case Kind::fixed_point: return "fixed_point";
            case Kind::fixed_iterates: return "m=" + std::to_string(m);
            default: return "tol=" + std::to_string(tol);
        }
    }
};

inline solver::SolutionField realize(const SpaceTimeGrid& g, EquationKind kind,
                                     const HurstIndex& H, double eta, uint64_t seed,
                                     const IteratePolicy& policy) {
    const noise::SpectralWhiteNoise wn = noise::sample_white_noise(g, seed);
    if (policy.kind == IteratePolicy::Kind::fixed_point)
        return solver::solve_fixed_point(wn, H, kind, eta);
    solver::SolverConfig cfg;
    cfg.m_max = policy.kind == IteratePolicy::Kind::fixed_iterates ? policy.m : g.n_t;
    cfg.mode = policy.kind == IteratePolicy::Kind::fixed_iterates
                   ? solver::SolverConfig::Mode::fixed_iterates
                   : solver::SolverConfig::Mode::iterate_to_tolerance;
    cfg.fixed_point_tol = policy.tol;
    return solver::solve(wn, H, kind, eta, cfg);
}

// ---- moment report -------------------------------------------------------

struct MomentReport {
    int p = 2;
    std::vector<std::pair<double, double>> probes;  // (t, x)
    std::vector<double> mean, mean_se;
    std::vector<double> moment, moment_se;  // p-th absolute moment
    double sup_moment = 0.0;
    int replicates = 0;
};

inline MomentReport moment_report(const SpaceTimeGrid& g, EquationKind kind,
                                  const HurstIndex& H, double eta, int p,
                                  const std::vector<std::pair<double, double>>& probes,
                                  int replicates, uint64_t seed,
                                  const IteratePolicy& policy = {}, int threads = 1) {
    if (p != 2 && p != 4 && p != 8) throw std::invalid_argument("moment_report: p in {2,4,8}");
    const int P = int(probes.size());
    const long chunk = 64;
    const long chunks = (replicates + chunk - 1) / chunk;
    std::vector<std::vector<double>> psum(chunks, std::vector<double>(4 * P, 0.0));
    parallel_chunks(replicates, threads, chunk, [&](long c, long lo, long hi) {
        auto& acc = psum[c];
        for (long r = lo; r < hi; ++r) {
            const auto f = realize(g, kind, H, eta, replicate_seed(seed, uint64_t(r)), policy);
            for (int q = 0; q < P; ++q) {
                const double v = f.value(probes[q].first, probes[q].second);
                const double vp = std::pow(std::abs(v), p);
                acc[4 * q] += v;
                acc[4 * q + 1] += v * v;
                acc[4 * q + 2] += vp;
                acc[4 * q + 3] += vp * vp;
            }
        }
    });
    MomentReport rep;
    rep.p = p;
    rep.probes = probes;
    rep.replicates = replicates;
    rep.mean.resize(P);
    rep.mean_se.resize(P);
    rep.moment.resize(P);
    rep.moment_se.resize(P);
    const double N = replicates;
    for (int q = 0; q < P; ++q) {
        double s = 0, s2 = 0, mp = 0, mp2 = 0;
        for (long c = 0; c < chunks; ++c) {
            s += psum[c][4 * q];
            s2 += psum[c][4 * q + 1];
            mp += psum[c][4 * q + 2];
            mp2 += psum[c][4 * q + 3];
        }
        rep.mean[q] = s / N;
        rep.mean_se[q] = std::sqrt(std::max(s2 / N - rep.mean[q] * rep.mean[q], 0.0) / N);
        rep.moment[q] = mp / N;
        rep.moment_se[q] = std::sqrt(std::max(mp2 / N - rep.moment[q] * rep.moment[q], 0.0) / N);
        rep.sup_moment = std::max(rep.sup_moment, rep.moment[q]);
    }
    return rep;
}

// ---- Holder increment fit -------------------------------------------------

enum class Direction { time, space };

struct HolderFit {
    Direction direction = Direction::space;
    std::vector<double> lags;      // physical lags
    std::vector<double> moments;   // E|increment|^2 per lag
    std::vector<double> se;        // standard errors
    double slope = 0.0;
    double slope_se = 0.0;
    double intercept = 0.0;
    double max_residual = 0.0;     // max |log moment - fit|
    int replicates = 0;
};

// Regresses log E|u(base+h)-u(base)|^2 on log h. Time increments look
// backward from base_t; space increments go right from base_x. Lags below
// four cells sit on the discretization floor and are rejected.
inline HolderFit holder_fit(const SpaceTimeGrid& g, EquationKind kind, const HurstIndex& H,
                            double eta, Direction dir, double base_t, double base_x,
                            const std::vector<double>& lags, int replicates, uint64_t seed,
                            const IteratePolicy& policy = {}, int threads = 1) {
    if (lags.size() < 4) throw std::invalid_argument("holder_fit: need >= 4 lags");
    const double cell = dir == Direction::space ? g.dx : g.dt;
    std::vector<int> lag_cells;
    for (double h : lags) {
        const int c = int(std::lround(h / cell));
        if (c < 4) throw std::invalid_argument("holder_fit: lag below 4 cells is discretization-dominated");
        lag_cells.push_back(c);
    }
    const int base_i = int(std::lround(base_t / g.dt));
    const int base_k = g.cell_of(base_x);
    const int Lg = int(lags.size());
    const long chunk = 64;
    const long chunks = (replicates + chunk - 1) / chunk;
    std::vector<std::vector<double>> psum(chunks, std::vector<double>(2 * Lg, 0.0));
    parallel_chunks(replicates, threads, chunk, [&](long c, long lo, long hi) {
        auto& acc = psum[c];
        for (long r = lo; r < hi; ++r) {
            const auto f = realize(g, kind, H, eta, replicate_seed(seed, uint64_t(r)), policy);
            const double b = f.at(base_i, base_k);
            for (int l = 0; l < Lg; ++l) {
                double d;
                if (dir == Direction::space)
                    d = f.at(base_i, base_k + lag_cells[l]) - b;
                else
                    d = b - f.at(base_i - lag_cells[l], base_k);
                acc[2 * l] += d * d;
                acc[2 * l + 1] += d * d * d * d;
            }
        }
    });
    HolderFit fit;
    fit.direction = dir;
    fit.replicates = replicates;
    const double N = replicates;
    for (int l = 0; l < Lg; ++l) {
        double s = 0, s2 = 0;
        for (long c = 0; c < chunks; ++c) {
            s += psum[c][2 * l];
            s2 += psum[c][2 * l + 1];
        }
        const double m = s / N;
        fit.lags.push_back(lag_cells[l] * cell);
        fit.moments.push_back(m);
        fit.se.push_back(std::sqrt(std::max(s2 / N - m * m, 0.0) / N));
    }
    // ordinary least squares in log-log coordinates
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int l = 0; l < Lg; ++l) {
        const double x = std::log(fit.lags[l]);
        const double y = std::log(fit.moments[l]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double n = Lg;
    const double det = n * sxx - sx * sx;
    fit.slope = (n * sxy - sx * sy) / det;
    fit.intercept = (sy * sxx - sx * sxy) / det;
    double var_slope = 0.0;
    for (int l = 0; l < Lg; ++l) {
        const double x = std::log(fit.lags[l]);
        const double resid =
            std::log(fit.moments[l]) - (fit.intercept + fit.slope * x);
        fit.max_residual = std::max(fit.max_residual, std::abs(resid));
        const double dlog = fit.se[l] / fit.moments[l];  // delta method
        const double wgt = (n * x - sx) / det;
        var_slope += wgt * wgt * dlog * dlog;
    }
    fit.slope_se = std::sqrt(var_slope);
    return fit;
}

// ---- Gagliardo-type seminorm ----------------------------------------------

struct GagliardoEstimate {
    double value = 0.0;
    int replicates = 0;
};

namespace detail {

// Exact pair integral of |y-z|^{2H-2} over two grid cells: the power-law
// singularity is integrated in closed form (double antiderivative).
inline double pair_weight(double a, double b, double c, double d, double H) {
    auto G2 = [H](double u) {
        return std::pow(std::abs(u), 2.0 * H) / ((2.0 * H - 1.0) * (2.0 * H));
    };
    return G2(b - c) - G2(a - c) - G2(b - d) + G2(a - d);
}

}  // namespace detail

// Monte Carlo estimate of
//   c~_H int_0^t int int G^2_{t-s}(x-y) (E|u(s,y)-u(s,z)|^p)^{2/p}
//        |y-z|^{2H-2} dy dz ds
// with the |y-z| singularity integrated exactly per cell pair and Monte
// Carlo used only for the expectations.
inline GagliardoEstimate gagliardo_seminorm(const SpaceTimeGrid& g, EquationKind kind,
                                            const HurstIndex& H, double eta, double t,
                                            double x, int replicates, int p,
                                            uint64_t seed, const IteratePolicy& policy = {},
                                            int threads = 1) {
    if (!H.rough()) throw std::invalid_argument("gagliardo_seminorm needs H < 1/2");
    if (g.n_x > 256) throw std::invalid_argument("gagliardo_seminorm: n_x > 256 would need O(n_x^2 n_t) memory");
    const int it = g.slices_before(t);
    const int n = g.n_x;
    const long chunk = 64;
    const long chunks = (replicates + chunk - 1) / chunk;
    // accumulate E|u(s,y)-u(s,z)|^p per (slice, pair)
    std::vector<std::vector<float>> psum(chunks);
    parallel_chunks(replicates, threads, chunk, [&](long c, long lo, long hi) {
        auto& acc = psum[c];
        acc.assign(size_t(it) * n * n, 0.0f);
        for (long r = lo; r < hi; ++r) {
            const auto f = realize(g, kind, H, eta, replicate_seed(seed, uint64_t(r)), policy);
            for (int i = 0; i < it; ++i) {
                const double* row = f.row(i);
                float* arow = acc.data() + size_t(i) * n * n;
                for (int k = 0; k < n; ++k)
                    for (int l = 0; l < n; ++l) {
                        const double d = row[k] - row[l];
                        arow[size_t(k) * n + l] += float(std::pow(std::abs(d), p));
                    }
            }
        }
    });
    std::vector<double> mom(size_t(it) * n * n, 0.0);
    for (auto& acc : psum)
        for (size_t i = 0; i < mom.size(); ++i) mom[i] += acc[i];
    const double invN = 1.0 / replicates;
    double total = 0.0;
    const double h = H.value();
    for (int i = 0; i < it; ++i) {
        const double lag = t - i * g.dt;
        double slice = 0.0;
        for (int k = 0; k < n; ++k) {
            const double Gk = greens::green_cell_average(kind, lag, x - g.cell_center(k), g.dx);
            if (Gk == 0.0) continue;
            for (int l = 0; l < n; ++l) {
                if (l == k) continue;
                const double m = mom[size_t(i) * n * n + size_t(k) * n + l] * invN;
                if (m <= 0.0) continue;
                const double w = detail::pair_weight(
                    g.cell_center(k) - g.dx / 2, g.cell_center(k) + g.dx / 2,
                    g.cell_center(l) - g.dx / 2, g.cell_center(l) + g.dx / 2, h);
                slice += Gk * Gk * std::pow(m, 2.0 / p) * w;  // w carries dy dz
            }
        }
        total += slice * g.dt;
    }
    GagliardoEstimate est;
    est.value = greens::gagliardo_constant(h) * total;
    est.replicates = replicates;
    return est;
}

// Sup-L^p part of the chi norm over a probe set, companion to the
// seminorm for embedding checks.
inline double chi_sup_norm(const SpaceTimeGrid& g, EquationKind kind, const HurstIndex& H,
                           double eta, const std::vector<std::pair<double, double>>& probes,
                           int replicates, int p, uint64_t seed,
                           const IteratePolicy& policy = {}, int threads = 1) {
    MomentReport rep =
        moment_report(g, kind, H, eta, p, probes, replicates, seed, policy, threads);
    return std::pow(rep.sup_moment, 1.0 / p);
}

// ---- coupled L2 convergence in H -------------------------------------------

struct CouplingCurve {
    double H0 = 0.5;
    std::vector<double> H_n;
    std::vector<double> gap;  // E|u^{Hn}(t,x) - u^{H0}(t,x)|^2
    std::vector<double> se;
    std::pair<double, double> probe{1.0, 0.0};
    std::string policy;
    int replicates = 0;
};

// Same white-noise realization drives every H: the curve measures the
// pathwise L2 distance at the probe.
inline CouplingCurve coupling_curve(const SpaceTimeGrid& g, EquationKind kind, double H0,
                                    const std::vector<double>& H_list, double eta,
                                    std::pair<double, double> probe, int replicates,
                                    uint64_t seed, const IteratePolicy& policy,
                                    int threads = 1) {
    const HurstIndex H0v(H0);
    const int M = int(H_list.size());
    const long chunk = 16;
    const long chunks = (replicates + chunk - 1) / chunk;
    std::vector<std::vector<double>> psum(chunks, std::vector<double>(2 * M, 0.0));
    const int probe_i = int(std::lround(probe.first / g.dt));
    parallel_chunks(replicates, threads, chunk, [&](long c, long lo, long hi) {
        auto& acc = psum[c];
        for (long r = lo; r < hi; ++r) {
            const uint64_t rs = replicate_seed(seed, uint64_t(r));
            const noise::SpectralWhiteNoise wn = noise::sample_white_noise(g, rs);
            auto run = [&](double h) {
                const noise::NoiseIncrementField dW = noise::noise_increments(wn, HurstIndex(h));
                if (policy.kind == IteratePolicy::Kind::fixed_point)
                    return solver::solve_fixed_point(dW, kind, eta);
                solver::SolutionField u = solver::initial_iterate(g, kind, h, eta, rs);
                const int m_cap =
                    policy.kind == IteratePolicy::Kind::fixed_iterates ? policy.m : g.n_t;
                for (int m = 0; m < m_cap; ++m) {
                    solver::SolutionField next = solver::picard_step(u, dW);
                    const double change = solver::grid_l2_distance(next, u);
                    u = std::move(next);
                    if (policy.kind == IteratePolicy::Kind::to_tolerance &&
                        change < policy.tol)
                        break;
                }
                return u;
            };
            const solver::SolutionField u0 = run(H0);
            const double v0 = u0.at(probe_i, g.cell_of(probe.second));
            for (int j = 0; j < M; ++j) {
                const double vn = H_list[j] == H0
                                      ? v0
                                      : run(H_list[j]).at(probe_i, g.cell_of(probe.second));
                const double d2 = (vn - v0) * (vn - v0);
                acc[2 * j] += d2;
                acc[2 * j + 1] += d2 * d2;
            }
        }
    });
    CouplingCurve curve;
    curve.H0 = H0;
    curve.H_n = H_list;
    curve.probe = probe;
    curve.policy = policy.to_string();
    curve.replicates = replicates;
    const double N = replicates;
    for (int j = 0; j < M; ++j) {
        double s = 0, s2 = 0;
        for (long c = 0; c < chunks; ++c) {
            s += psum[c][2 * j];
            s2 += psum[c][2 * j + 1];
        }
        const double m = s / N;
        curve.gap.push_back(m);
        curve.se.push_back(std::sqrt(std::max(s2 / N - m * m, 0.0) / N));
    }
    return curve;
}

// ---- two-sample Kolmogorov-Smirnov -----------------------------------------

struct KsResult {
    double statistic = 0.0;
    double p_value = 1.0;
};

inline KsResult ks_distance(std::vector<double> a, std::vector<double> b) {
    if (a.size() < 500 || b.size() < 500)
        throw std::invalid_argument("ks_distance: need >= 500 samples per group");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double d = 0.0;
    size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] <= b[j])
            ++i;
        else
            ++j;
        d = std::max(d, std::abs(double(i) / a.size() - double(j) / b.size()));
    }
    const double ne = double(a.size()) * b.size() / double(a.size() + b.size());
    const double lam = (std::sqrt(ne) + 0.12 + 0.11 / std::sqrt(ne)) * d;
    double p = 0.0;
    for (int k = 1; k <= 100; ++k)
        p += 2.0 * (k % 2 == 1 ? 1.0 : -1.0) * std::exp(-2.0 * k * k * lam * lam);
    return {d, std::min(1.0, std::max(0.0, p))};
}

// Marginal samples of u(t,x) with independent seeds, for KS experiments.
inline std::vector<double> marginal_samples(const SpaceTimeGrid& g, EquationKind kind,
                                            const HurstIndex& H, double eta,
                                            std::pair<double, double> probe, int count,
                                            uint64_t seed, const IteratePolicy& policy = {},
                                            int threads = 1) {
    std::vector<double> out(count);
    const long chunk = 64;
    parallel_chunks(count, threads, chunk, [&](long, long lo, long hi) {
        for (long r = lo; r < hi; ++r) {
            const auto f = realize(g, kind, H, eta, replicate_seed(seed, uint64_t(r)), policy);
            out[size_t(r)] = f.value(probe.first, probe.second);
        }
    });
    return out;
}

// ---- tightness probe --------------------------------------------------------

struct TightnessProbe {
    double delta = 0.0;  // exponent in the Kolmogorov-Centsov ratio
    int p = 8;
    std::vector<double> H_grid;
    std::vector<double> sup_ratio;           // per H
    std::vector<std::vector<double>> ratios;  // per H, per pair
    std::string status;                      // uniform_ok | investigate | insufficient_p
};

// Increment pairs are (dt_cells, dx_cells) offsets from the base point.
inline TightnessProbe tightness_probe(const SpaceTimeGrid& g, EquationKind kind,
                                      const std::vector<double>& H_grid, double eta, int p,
                                      const std::vector<std::pair<int, int>>& pairs,
                                      int replicates, uint64_t seed,
                                      const IteratePolicy& policy = {}, int threads = 1) {
    TightnessProbe probe;
    probe.p = p;
    probe.H_grid = H_grid;
    double eta1 = 1.0;
    for (double h : H_grid) eta1 = std::min(eta1, h);
    const double gamma_t = kind == EquationKind::wave ? eta1 : eta1 / 2.0;
    probe.delta = p * std::min(eta1, gamma_t);
    if (probe.delta <= 2.0) {
        probe.status = "insufficient_p";
        return probe;
    }
    const int base_i = g.n_t;
    const int base_k = g.n_x / 2;
    for (double hval : H_grid) {
        const HurstIndex H(hval);
        const int Np = int(pairs.size());
        const long chunk = 64;
        const long chunks = (replicates + chunk - 1) / chunk;
        std::vector<std::vector<double>> psum(chunks, std::vector<double>(Np, 0.0));
        parallel_chunks(replicates, threads, chunk, [&](long c, long lo, long hi) {
            auto& acc = psum[c];
            for (long r = lo; r < hi; ++r) {
                const auto f =
                    realize(g, kind, H, eta, replicate_seed(seed, uint64_t(r)), policy);
                const double b = f.at(base_i, base_k);
                for (int q = 0; q < Np; ++q) {
                    const double v =
                        f.at(base_i - pairs[q].first, base_k + pairs[q].second) - b;
                    acc[q] += std::pow(std::abs(v), p);
                }
            }
        });
        std::vector<double> ratios(Np);
        double sup = 0.0;
        for (int q = 0; q < Np; ++q) {
            double s = 0;
            for (long c = 0; c < chunks; ++c) s += psum[c][q];
            const double m = s / replicates;
            const double dist = pairs[q].first * g.dt + pairs[q].second * g.dx;
            ratios[q] = m / std::pow(dist, probe.delta);
            sup = std::max(sup, ratios[q]);
        }
        probe.ratios.push_back(ratios);
        probe.sup_ratio.push_back(sup);
    }
    double lo = probe.sup_ratio[0], hi = probe.sup_ratio[0];
    for (double v : probe.sup_ratio) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    probe.status = hi <= 3.0 * lo ? "uniform_ok" : "investigate";
    return probe;
}

}  // namespace stats
}  // namespace anderson
