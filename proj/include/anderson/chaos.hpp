#pragma once

// Chaos-level second moments of the Picard iterates, computed from the
// explicit kernels g_n by stratified / importance-sampled Monte Carlo
// quadrature, plus small-order simulated multiple Wiener integrals
// against a SpectralWhiteNoise realization.
//
// After the change of variables eta_l = xi_1 + ... + xi_l the n-th
// chaos moment reads
//   E[I_n(g_n(.,t,x))^2] = eta^2 c_H^n int_{T_n(t)} int_{R^n}
//       prod_l |FG_{t_{l+1}-t_l}(eta_l)|^2
//       |eta_1|^{1-2H} prod_{l>=2} |eta_l - eta_{l-1}|^{1-2H}  deta dt,
// independent of x.

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "anderson/fft.hpp"
#include "anderson/greens.hpp"
#include "anderson/noise.hpp"
#include "anderson/quadrature.hpp"
#include "anderson/rng.hpp"

namespace anderson {
namespace chaos {

using cplx = std::complex<double>;

struct QuadratureBudget {
    long samples = 400000;
    uint64_t seed = 20240901;
};

struct QuadratureEstimate {
    double value = 0.0;
    double se = 0.0;
    long samples = 0;
    bool flagged = false;  // se exceeded 10% of |value|
};

struct ChaosMomentResult {
    EquationKind kind;
    double H;
    double t;
    double eta;
    std::vector<QuadratureEstimate> per_order;  // orders 1..m
    double cumulative = 0.0;                    // eta^2 + sum of per-order values
    bool flagged = false;
};

// Fourier transform of the n-th Picard kernel in the partial-sum
// variables: eta * prod_l FG_{t_{l+1}-t_l}(eta_l), t_{n+1} = t. The
// spatial phase e^{-i eta_n x} has unit modulus and is dropped, so the
// value is x-independent.
inline cplx kernel_fourier(EquationKind kind, const std::vector<double>& times,
                           const std::vector<double>& etas, double t, double eta0) {
    if (times.size() != etas.size()) throw std::invalid_argument("times/etas size mismatch");
    for (size_t l = 0; l < times.size(); ++l) {
        const double lo = l == 0 ? 0.0 : times[l - 1];
        if (!(times[l] > lo) || !(times[l] < t))
            throw std::invalid_argument("kernel times must be strictly ordered inside (0,t)");
    }
    double prod = eta0;
    for (size_t l = 0; l < times.size(); ++l) {
        const double next = l + 1 < times.size() ? times[l + 1] : t;
        prod *= greens::green_fourier(kind, next - times[l], etas[l]);
    }
    return cplx(prod, 0.0);
}

namespace detail {

// Deterministic draw stream for one quadrature sample.
struct SampleStream {
    const CounterRng& rng;
    uint64_t sample;
    uint64_t slot = 0;
    double u() { return rng.uniform2(sample, slot++)[0]; }
    std::array<double, 2> u2() { return rng.uniform2(sample, slot++); }
    double gauss() { return rng.gaussian2(sample, slot++)[0]; }
};

// Frequency-increment proposal density (unnormalized, one-sided):
//   g(z) = min(1, z^{1-2H}) ... for z<1 the power branch, else 1, over (1+z^2).
// The same formula serves H below and above 1/2: near zero it matches the
// |z|^{1-2H} weight, and the Cauchy tail dominates the wave kernel tails.
inline double proposal_g(double z, double H) {
    const double az = std::abs(z);
    const double p = az <= 1.0 ? std::pow(az, 1.0 - 2.0 * H) : 1.0;
    return p / (1.0 + z * z);
}

inline double proposal_norm(double H) {
    PanelOptions opt;
    opt.rel_tol = 1e-11;
    const double body = power_weighted_integral(
        [](double z) { return 1.0 / (1.0 + z * z); }, 1.0 - 2.0 * H, 0.0, 1.0, opt);
    return body + M_PI / 4.0;  // int_1^inf dz/(1+z^2)
}

// Draw |z| from g, exactly on (1,inf), by rejection on (0,1).
inline double proposal_draw(SampleStream& s, double H, double norm) {
    const double m1 = norm - M_PI / 4.0;
    for (;;) {
        if (s.u() * norm < m1) {
            const double z = std::pow(s.u(), 1.0 / (2.0 - 2.0 * H));
            if (s.u() * (1.0 + z * z) <= 1.0) return z;
        } else {
            return std::tan(M_PI / 4.0 * (1.0 + s.u()));
        }
    }
}

inline double signed_draw(SampleStream& s, double H, double norm) {
    const double z = proposal_draw(s, H, norm);
    return s.u() < 0.5 ? -z : z;
}

// Gamma(alpha) sampler (Marsaglia-Tsang with the alpha<1 boost).
inline double gamma_draw(SampleStream& s, double alpha) {
    double boost = 1.0;
    if (alpha < 1.0) {
        boost = std::pow(s.u(), 1.0 / alpha);
        alpha += 1.0;
    }
    const double d = alpha - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        const double x = s.gauss();
        const double v = (1.0 + c * x) * (1.0 + c * x) * (1.0 + c * x);
        if (v <= 0.0) continue;
        const double u = s.u();
        if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v)) return boost * d * v;
    }
}

inline double sq(double x) { return x * x; }

struct ISParams {
    double Hq;    // shapes the frequency proposal
    double beta;  // Dirichlet gap exponent (heat only)
};

// One quadrature sample of the weighted kernel square. `wa`/`wb` receive
// the two H-amplitudes so the same pass serves both the plain moment
// (wa == wb) and the coupled gap.
template <class Accumulate>
inline void run_quadrature(EquationKind kind, double Ha, double Hb, int order, double t,
                           const QuadratureBudget& budget, const ISParams& is,
                           Accumulate&& accumulate) {
    const CounterRng rng(budget.seed, streams::kQuadrature);
    const double norm = proposal_norm(is.Hq);
    const double ca = greens::noise_density_constant(Ha);
    const double cb = greens::noise_density_constant(Hb);
    const int n = order;
    std::vector<double> gaps(n + 1), etas(n);
    double lgamma_beta_sum = 0.0;
    if (kind == EquationKind::heat) {
        lgamma_beta_sum = std::lgamma(1.0 + n * is.beta) - n * std::lgamma(is.beta);
    }
    for (long sidx = 0; sidx < budget.samples; ++sidx) {
        SampleStream s{rng, uint64_t(sidx)};
        double log_common = 0.0;  // log of F / q_total (H-independent part)
        double la = 0.0, lb = 0.0;
        if (kind == EquationKind::wave) {
            // uniform order statistics on [0,t]^n
            std::vector<double> ts(n);
            for (int l = 0; l < n; ++l) ts[l] = t * s.u();
            std::sort(ts.begin(), ts.end());
            double lgamma_n1 = std::lgamma(double(n) + 1.0);
            log_common += n * std::log(t) - lgamma_n1;  // simplex volume factor
            double eta_prev = 0.0;
            for (int l = 0; l < n; ++l) {
                const double z = signed_draw(s, is.Hq, norm);
                const double q = proposal_g(z, is.Hq) / (2.0 * norm);
                const double eta = eta_prev + z;
                const double lag = (l + 1 < n ? ts[l + 1] : t) - ts[l];
                const double fg = greens::green_fourier(kind, std::max(lag, 1e-300), eta);
                log_common += std::log(std::max(fg * fg, 1e-300)) - std::log(q);
                la += (0.5 - Ha) * std::log(std::abs(z) + 1e-300);
                lb += (0.5 - Hb) * std::log(std::abs(z) + 1e-300);
                eta_prev = eta;
            }
        } else {
            // Dirichlet(1, beta, ..., beta) gaps absorb the lag^{H-1}
            // endpoint singularities of the heat spectral integrals.
            double gsum = 0.0;
            gaps[0] = gamma_draw(s, 1.0);
            gsum = gaps[0];
            for (int l = 1; l <= n; ++l) {
                gaps[l] = gamma_draw(s, is.beta);
                gsum += gaps[l];
            }
            double log_qt = lgamma_beta_sum - n * std::log(t);
            for (int l = 1; l <= n; ++l) {
                gaps[l] = gaps[l] / gsum;  // unit-simplex coordinates
                log_qt += (is.beta - 1.0) * std::log(std::max(gaps[l], 1e-300));
            }
            log_common -= log_qt;
            double eta_prev = 0.0;
            for (int l = 0; l < n; ++l) {
                const double lag = std::max(gaps[l + 1] * t, 1e-300);
                const double S = 1.0 / std::sqrt(lag);
                double z;
                if (s.u() < 0.5) {
                    z = signed_draw(s, is.Hq, norm) * S;
                } else {
                    z = -eta_prev + s.gauss() * std::sqrt(0.5 / lag);
                }
                const double d1 = proposal_g(z / S, is.Hq) / (2.0 * norm) / S;
                const double d2 =
                    std::sqrt(lag / M_PI) * std::exp(-lag * sq(z + eta_prev));
                const double q = 0.5 * d1 + 0.5 * d2;
                const double eta = eta_prev + z;
                log_common += -lag * eta * eta - std::log(std::max(q, 1e-300));
                la += (0.5 - Ha) * std::log(std::abs(z) + 1e-300);
                lb += (0.5 - Hb) * std::log(std::abs(z) + 1e-300);
                eta_prev = eta;
            }
        }
        const double common = std::exp(log_common);
        const double amp_a = std::pow(ca, n / 2.0) * std::exp(la);
        const double amp_b = std::pow(cb, n / 2.0) * std::exp(lb);
        accumulate(common, amp_a, amp_b);
    }
}

}  // namespace detail

// E[I_n^H(g_n(.,t,x))^2] with standard error.
inline QuadratureEstimate chaos_second_moment(EquationKind kind, const HurstIndex& H,
                                              int order, double t, double eta,
                                              const QuadratureBudget& budget = {}) {
    if (order < 1 || order > 4)
        throw std::invalid_argument("chaos_second_moment supports orders 1..4");
    if (!(t > 0.0)) throw std::invalid_argument("need t > 0");
    if (eta == 0.0) return {0.0, 0.0, budget.samples, false};
    const detail::ISParams is{H.value(), H.value()};
    double sum = 0.0, sumsq = 0.0;
    detail::run_quadrature(kind, H.value(), H.value(), order, t, budget, is,
                           [&](double common, double amp_a, double) {
                               const double x = eta * eta * common * amp_a * amp_a;
                               sum += x;
                               sumsq += x * x;
                           });
    QuadratureEstimate est;
    est.samples = budget.samples;
    est.value = sum / budget.samples;
    const double var = sumsq / budget.samples - est.value * est.value;
    est.se = std::sqrt(std::max(var, 0.0) / budget.samples);
    est.flagged = est.se > 0.10 * std::abs(est.value);
    return est;
}

// E[|u_m(t,x)|^2] via chaos orthogonality: eta^2 + sum of the order moments.
inline ChaosMomentResult truncated_second_moment(EquationKind kind, const HurstIndex& H,
                                                 int m, double t, double eta,
                                                 const QuadratureBudget& budget = {}) {
    if (m < 0 || m > 4) throw std::invalid_argument("truncated_second_moment supports m <= 4");
    ChaosMomentResult res;
    res.kind = kind;
    res.H = H.value();
    res.t = t;
    res.eta = eta;
    res.cumulative = eta * eta;
    for (int n = 1; n <= m; ++n) {
        QuadratureBudget b = budget;
        b.seed = budget.seed + uint64_t(n) * 0x9E3779B9u;
        QuadratureEstimate e = chaos_second_moment(kind, H, n, t, eta, b);
        res.cumulative += e.value;
        res.flagged = res.flagged || e.flagged;
        res.per_order.push_back(e);
    }
    return res;
}

// Coupled-integrand gap E[|I_n^{Ha}(g_n) - I_n^{Hb}(g_n)|^2]: the squared
// difference of the two spectral amplitudes inside one quadrature. With a
// fixed seed and shared proposal parameters the sweep over Hb is smooth
// in Hb (common random numbers).
inline QuadratureEstimate chaos_moment_gap(EquationKind kind, double t, double eta,
                                           int order, const HurstIndex& Ha,
                                           const HurstIndex& Hb,
                                           const QuadratureBudget& budget = {},
                                           double proposal_H = 0.0,
                                           double gap_beta = 0.0) {
    if (order < 1 || order > 4) throw std::invalid_argument("chaos_moment_gap supports orders 1..4");
    const double Hq = proposal_H > 0.0 ? proposal_H : std::max(Ha.value(), Hb.value());
    const double beta = gap_beta > 0.0 ? gap_beta : std::min(Ha.value(), Hb.value());
    const detail::ISParams is{Hq, beta};
    double sum = 0.0, sumsq = 0.0;
    detail::run_quadrature(kind, Ha.value(), Hb.value(), order, t, budget, is,
                           [&](double common, double amp_a, double amp_b) {
                               const double d = amp_a - amp_b;
                               const double x = eta * eta * common * d * d;
                               sum += x;
                               sumsq += x * x;
                           });
    QuadratureEstimate est;
    est.samples = budget.samples;
    est.value = sum / budget.samples;
    const double var = sumsq / budget.samples - est.value * est.value;
    est.se = std::sqrt(std::max(var, 0.0) / budget.samples);
    est.flagged = Ha.value() != Hb.value() && est.se > 0.10 * std::abs(est.value);
    return est;
}

// Per-(Ha,Hb) decomposition gap = Var_a + Var_b - 2 Cov on the same sample
// set; used by an algebraic-identity test.
struct GapDecomposition {
    double gap, var_a, var_b, cov;
};

inline GapDecomposition chaos_gap_decomposition(EquationKind kind, double t, double eta,
                                                int order, const HurstIndex& Ha,
                                                const HurstIndex& Hb,
                                                const QuadratureBudget& budget = {}) {
    const detail::ISParams is{std::max(Ha.value(), Hb.value()),
                              std::min(Ha.value(), Hb.value())};
    double g = 0.0, va = 0.0, vb = 0.0, cv = 0.0;
    detail::run_quadrature(kind, Ha.value(), Hb.value(), order, t, budget, is,
                           [&](double common, double a, double b) {
                               const double w = eta * eta * common;
                               g += w * (a - b) * (a - b);
                               va += w * a * a;
                               vb += w * b * b;
                               cv += w * a * b;
                           });
    const double inv = 1.0 / budget.samples;
    return {g * inv, va * inv, vb * inv, cv * inv};
}

// ---- simulated multiple Wiener integrals against a noise realization ----

namespace detail {

// Slice-averaged spectral kernel, matching the solver's convention.
inline double slice_kernel(EquationKind kind, double lag, double dt, double xi) {
    if (kind == EquationKind::wave) {
        const double lm = lag - dt / 2.0;
        const double u = dt * xi / 2.0;
        const double snc = std::abs(u) < 1e-8 ? 1.0 : std::sin(u) / u;
        return (xi == 0.0 ? lm : std::sin(lm * xi) / xi) * snc;
    }
    const double x = dt * xi * xi;
    const double D = x < 1e-12 ? 1.0 - x / 4.0 : std::sqrt(-std::expm1(-x) / x);
    return std::exp(-(lag - dt) * xi * xi / 2.0) * D;
}

}  // namespace detail

// Discrete multiple Wiener integral of the Picard kernel g_n against the
// complex white noise, order n in {1,2}; real part. Order 2 runs over
// strictly ordered slice pairs (no repeated or mirrored cell can occur),
// and is rescaled by the ordered-pair count ratio to compensate the
// excluded diagonal slices.
inline double simulate_multiple_integral(const noise::SpectralWhiteNoise& wn,
                                         const HurstIndex& H, int order,
                                         EquationKind kind, double t, double x,
                                         double eta) {
    if (order < 1 || order > 2) throw std::invalid_argument("simulate_multiple_integral: order in {1,2}");
    const SpaceTimeGrid& g = wn.grid;
    const int it = g.slices_before(t);
    if (it == 0 || eta == 0.0) return 0.0;
    const double root_c = std::sqrt(greens::noise_density_constant(H.value()));
    const std::vector<double> w = noise::bin_weights(g, H);

    if (order == 1) {
        cplx acc(0.0, 0.0);
        for (int i = 0; i < it; ++i) {
            const double lag = t - i * g.dt;
            for (int b = 0; b < g.n_xi; ++b) {
                const double xi = g.frequency(b);
                const double K = detail::slice_kernel(kind, lag, g.dt, xi);
                acc += K * w[b] * std::exp(cplx(0.0, -xi * x)) * wn.at(i, b);
            }
        }
        return eta * root_c * acc.real();
    }

    // order 2: I_2 = eta c_H sum_{i1<i2} sum_{b1,b2}
    //   K(t_{i2}-t_{i1}, xi_{b1}) K(t-t_{i2}, xi_{b1}+xi_{b2})
    //   e^{-i (xi_{b1}+xi_{b2}) x} w_{b1} w_{b2} z(i1,b1) z(i2,b2)
    const int n = g.n_xi;
    const int N2 = 2 * n;
    // E(i2, b1) = sum_{i1<i2} K(t_{i2}-t_{i1}, xi_{b1}) z(i1, b1): kernel recursion.
    std::vector<cplx> E(n, cplx());
    std::vector<cplx> Ec(n, cplx());  // cos-companion for the wave recursion
    std::vector<double> cdt(n), sdt(n), s_over(n), sh_over(n), ch(n), nus(n), dec(n), damp(n);
    for (int b = 0; b < n; ++b) {
        const double xi = g.frequency(b);
        if (kind == EquationKind::wave) {
            cdt[b] = std::cos(g.dt * xi);
            sdt[b] = std::sin(g.dt * xi);
            s_over[b] = xi == 0.0 ? g.dt : sdt[b] / xi;
            sh_over[b] = xi == 0.0 ? g.dt / 2.0 : std::sin(g.dt * xi / 2.0) / xi;
            ch[b] = std::cos(g.dt * xi / 2.0);
            nus[b] = xi * sdt[b];
        } else {
            const double xx = g.dt * xi * xi;
            dec[b] = std::exp(-xx / 2.0);
            damp[b] = xx < 1e-12 ? 1.0 - xx / 4.0 : std::sqrt(-std::expm1(-xx) / xx);
        }
    }
    const double wave_snc = 1.0;  // sinc folded into sh_over/ch push
    (void)wave_snc;
    std::vector<cplx> hbuf(N2), bbuf(N2);
    cplx acc(0.0, 0.0);
    for (int i2 = 0; i2 < it; ++i2) {
        if (i2 > 0) {
            // D(b1) = sum_{b2} K(t - t_{i2}, (j1+j2) dxi) e^{-i (j1+j2) dxi x} w_{b2} z(i2-? , b2)
            const double lag2 = t - i2 * g.dt;
            std::fill(hbuf.begin(), hbuf.end(), cplx());
            std::fill(bbuf.begin(), bbuf.end(), cplx());
            // h indexed by total signed frequency u in [-n, n-1] at slot u+n
            for (int u = -n; u < n; ++u) {
                const double xi = u * g.dxi;
                hbuf[size_t(u + n)] =
                    detail::slice_kernel(kind, lag2, g.dt, xi) * std::exp(cplx(0.0, -xi * x));
            }
            // b indexed by signed j2 in [-n/2, n/2-1] at slot j2 + n/2;
            // stored conjugated so the correlation below yields plain b.
            for (int b = 0; b < n; ++b) {
                const int j2 = g.signed_index(b);
                bbuf[size_t(j2 + n / 2)] = std::conj(w[b] * wn.at(i2, b));
            }
            // D(j1) = sum_{j2} h[j1 + j2 + n] b[j2 + n/2]
            //       = circular-corr via FFT on N2 points (no wrap: |j1+j2| < n)
            Fft::forward(hbuf);
            Fft::forward(bbuf);
            for (int m = 0; m < N2; ++m) hbuf[m] *= std::conj(bbuf[m]);
            Fft::inverse(hbuf);
            // slot algebra: D(j1) = IFFT[H conj(B)] at index (j1 + n - n/2) mod N2
            for (int b1 = 0; b1 < n; ++b1) {
                const int j1 = g.signed_index(b1);
                const int slot = (j1 + n - n / 2 + N2) % N2;
                acc += E[b1] * w[b1] * hbuf[size_t(slot)];
            }
        }
        // push slice i2 into the E recursion
        if (kind == EquationKind::wave) {
            for (int b = 0; b < n; ++b) {
                const cplx R = wn.at(i2, b) *
                               (std::abs(g.dt * g.frequency(b) / 2.0) < 1e-8
                                    ? 1.0
                                    : std::sin(g.dt * g.frequency(b) / 2.0) /
                                          (g.dt * g.frequency(b) / 2.0));
                const cplx e_new = cdt[b] * E[b] + s_over[b] * Ec[b] + sh_over[b] * R;
                Ec[b] = cdt[b] * Ec[b] - nus[b] * E[b] + ch[b] * R;
                E[b] = e_new;
            }
        } else {
            for (int b = 0; b < n; ++b) E[b] = dec[b] * E[b] + damp[b] * wn.at(i2, b);
        }
    }
    const double renorm = it > 1 ? std::sqrt(double(it) / double(it - 1)) : 1.0;
    const double c = greens::noise_density_constant(H.value());
    return eta * c * acc.real() * renorm;
}

}  // namespace chaos
}  // namespace anderson
