#pragma once

// Spectral synthesis of the fractional noise. One complex white-noise
// realization (per seed) drives the whole family {W^H, H in (1/4,1)}:
// increments for any H are deterministic functions of it, which is what
// makes coupled-in-H experiments possible.

#include <complex>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <vector>

#include "anderson/fft.hpp"
#include "anderson/greens.hpp"
#include "anderson/grid.hpp"
#include "anderson/rng.hpp"

namespace anderson {
namespace noise {

using cplx = std::complex<double>;

// Hermitian complex Gaussian array over (time slice, frequency bin).
// Independent entries have E|z|^2 = dt*dxi; z(i,-xi) = conj(z(i,xi));
// the xi=0 bin is real and the unpaired Nyquist bin is zeroed.
struct SpectralWhiteNoise {
    SpaceTimeGrid grid;
    uint64_t seed = 0;
    std::vector<cplx> z;  // n_t * n_xi, row-major in time

    const cplx& at(int slice, int bin) const { return z[size_t(slice) * grid.n_xi + bin]; }
    cplx& at(int slice, int bin) { return z[size_t(slice) * grid.n_xi + bin]; }
};

// Per-(time slice, space cell) increments of W^H derived from one
// SpectralWhiteNoise realization.
struct NoiseIncrementField {
    SpaceTimeGrid grid;
    double H = 0.5;
    uint64_t source_seed = 0;
    std::vector<double> dW;  // n_t * n_x, row-major in time

    double at(int slice, int cell) const { return dW[size_t(slice) * grid.n_x + cell]; }
    const double* row(int slice) const { return dW.data() + size_t(slice) * grid.n_x; }
};

// sqrt of the bin-averaged spectral density |xi|^{1-2H}; exact power
// integral per bin. Pointwise bin-center evaluation would badly
// underestimate the low-frequency energy for H > 1/2.
inline std::vector<double> bin_weights(const SpaceTimeGrid& g, const HurstIndex& H) {
    const double p = 2.0 - 2.0 * H.value();
    std::vector<double> w(g.n_xi);
    for (int i = 0; i < g.n_xi; ++i) {
        if (i == g.nyquist_bin()) {
            w[i] = 0.0;
            continue;
        }
        const double xi = std::abs(g.frequency(i));
        double avg;
        if (xi < g.dxi / 2.0 * 1e-12 || g.signed_index(i) == 0) {
            avg = 2.0 * std::pow(g.dxi / 2.0, p) / (p * g.dxi);
        } else {
            const double a = xi - g.dxi / 2.0, b = xi + g.dxi / 2.0;
            avg = (std::pow(b, p) - std::pow(a, p)) / (p * g.dxi);
        }
        w[i] = std::sqrt(avg);
    }
    return w;
}

inline SpectralWhiteNoise sample_white_noise(const SpaceTimeGrid& g, uint64_t seed) {
    SpectralWhiteNoise wn;
    wn.grid = g;
    wn.seed = seed;
    wn.z.assign(size_t(g.n_t) * g.n_xi, cplx(0.0, 0.0));
    const CounterRng rng(seed, streams::kWhiteNoise);
    const double m = g.dt * g.dxi;
    const double s_pair = std::sqrt(m / 2.0);
    const double s_real = std::sqrt(m);
    for (int i = 0; i < g.n_t; ++i) {
        for (int b = 1; b < g.n_xi / 2; ++b) {
            const auto gpair = rng.gaussian2(uint64_t(i), uint64_t(b));
            const cplx v(s_pair * gpair[0], s_pair * gpair[1]);
            wn.at(i, b) = v;
            wn.at(i, g.n_xi - b) = std::conj(v);
        }
        wn.at(i, 0) = cplx(s_real * rng.gaussian2(uint64_t(i), 0)[0], 0.0);
        // Nyquist bin stays zero: it has no Hermitian partner on this grid.
    }
    return wn;
}

namespace detail {

// Fourier transform of the cell indicator centred at x_k, split as
// e^{-i xi x_k} * s(xi) with s(xi) = dx * sinc(xi dx / 2).
inline double cell_shape(double xi, double dx) {
    const double u = xi * dx / 2.0;
    return std::abs(u) < 1e-8 ? dx * (1.0 - u * u / 6.0) : dx * std::sin(u) / u;
}

}  // namespace detail

inline NoiseIncrementField noise_increments(const SpectralWhiteNoise& wn,
                                            const HurstIndex& H) {
    const SpaceTimeGrid& g = wn.grid;
    NoiseIncrementField out;
    out.grid = g;
    out.H = H.value();
    out.source_seed = wn.seed;
    out.dW.assign(size_t(g.n_t) * g.n_x, 0.0);

    const double root_c = std::sqrt(greens::noise_density_constant(H.value()));
    const std::vector<double> w = bin_weights(g, H);
    std::vector<cplx> coef(g.n_xi);
    std::vector<cplx> base(g.n_xi);
    const double x0 = g.cell_center(0);
    for (int b = 0; b < g.n_xi; ++b) {
        const double xi = g.frequency(b);
        base[b] = root_c * detail::cell_shape(xi, g.dx) * w[b] *
                  std::exp(cplx(0.0, -xi * x0));
    }
    if (g.fft_aligned() && g.n_xi >= g.n_x) {
        for (int i = 0; i < g.n_t; ++i) {
            for (int b = 0; b < g.n_xi; ++b) coef[b] = base[b] * wn.at(i, b);
            Fft::forward(coef);  // sum_j coef_j e^{-2 pi i j k / n_xi}
            for (int k = 0; k < g.n_x; ++k) out.dW[size_t(i) * g.n_x + k] = coef[k].real();
        }
    } else {
        for (int i = 0; i < g.n_t; ++i) {
            for (int k = 0; k < g.n_x; ++k) {
                const double xk = g.cell_center(k) - x0;
                cplx acc(0.0, 0.0);
                for (int b = 0; b < g.n_xi; ++b) {
                    const double xi = g.frequency(b);
                    acc += base[b] * wn.at(i, b) * std::exp(cplx(0.0, -xi * xk));
                }
                out.dW[size_t(i) * g.n_x + k] = acc.real();
            }
        }
    }
    return out;
}

// Largest imaginary residue of the Hermitian synthesis relative to the
// field RMS; a realness diagnostic used by tests.
inline double imaginary_residue(const SpectralWhiteNoise& wn, const HurstIndex& H) {
    const SpaceTimeGrid& g = wn.grid;
    const double root_c = std::sqrt(greens::noise_density_constant(H.value()));
    const std::vector<double> w = bin_weights(g, H);
    const double x0 = g.cell_center(0);
    std::vector<cplx> coef(g.n_xi);
    double max_im = 0.0, sum_sq = 0.0;
    size_t count = 0;
    for (int i = 0; i < g.n_t; ++i) {
        for (int b = 0; b < g.n_xi; ++b) {
            const double xi = g.frequency(b);
            coef[b] = root_c * detail::cell_shape(xi, g.dx) * w[b] *
                      std::exp(cplx(0.0, -xi * x0)) * wn.at(i, b);
        }
        Fft::forward(coef);
        for (int k = 0; k < g.n_x; ++k) {
            max_im = std::max(max_im, std::abs(coef[k].imag()));
            sum_sq += coef[k].real() * coef[k].real();
            ++count;
        }
    }
    const double rms = std::sqrt(sum_sq / double(count));
    return max_im / (rms > 0 ? rms : 1.0);
}

// Discretized W^H(t, x) = sqrt(c_H) sum_{i: t_i < t} sum_j F[1_{[0,x]}](xi_j)
// |xi_j|^{1/2-H} z(i, j), with the exact indicator transform.
inline double field_value(const SpectralWhiteNoise& wn, const HurstIndex& H, double t,
                          double x) {
    const SpaceTimeGrid& g = wn.grid;
    if (t < -1e-12 || t > g.T + 1e-12) throw std::invalid_argument("field_value: t outside [0,T]");
    if (std::abs(x) > g.L + 1e-12) throw std::invalid_argument("field_value: |x| > L");
    const int it = g.slices_before(t);
    if (it == 0 || x == 0.0) return 0.0;
    const double root_c = std::sqrt(greens::noise_density_constant(H.value()));
    const std::vector<double> w = bin_weights(g, H);
    std::vector<cplx> a(g.n_xi);
    for (int b = 0; b < g.n_xi; ++b) {
        const double xi = g.frequency(b);
        const cplx ind = std::abs(xi * x) < 1e-10
                             ? cplx(x, 0.0)
                             : (1.0 - std::exp(cplx(0.0, -xi * x))) / cplx(0.0, xi);
        a[b] = root_c * ind * w[b];
    }
    cplx acc(0.0, 0.0);
    for (int i = 0; i < it; ++i)
        for (int b = 0; b < g.n_xi; ++b) acc += a[b] * wn.at(i, b);
    return acc.real();
}

struct CovarianceReport {
    std::vector<std::pair<double, double>> points;  // (t, x)
    std::vector<double> mean;                       // per point
    std::vector<double> cov;                        // row-major matrix
    std::vector<double> se;                         // standard errors of cov entries
    int replicates = 0;
};

// Monte Carlo covariance of field_value at the given points. Replicates
// use independent counter streams derived from `seed`.
inline CovarianceReport empirical_covariance(const SpaceTimeGrid& g, const HurstIndex& H,
                                             const std::vector<std::pair<double, double>>& pts,
                                             int replicates, uint64_t seed) {
    if (replicates < 100) throw std::invalid_argument("empirical_covariance: need >= 100 replicates");
    const int P = int(pts.size());
    const double root_c = std::sqrt(greens::noise_density_constant(H.value()));
    const std::vector<double> w = bin_weights(g, H);
    // coefficient arrays per point
    std::vector<std::vector<cplx>> A(P, std::vector<cplx>(size_t(g.n_t) * g.n_xi, cplx()));
    for (int p = 0; p < P; ++p) {
        const double t = pts[p].first, x = pts[p].second;
        const int it = g.slices_before(t);
        for (int b = 0; b < g.n_xi; ++b) {
            const double xi = g.frequency(b);
            const cplx ind = std::abs(xi * x) < 1e-10
                                 ? cplx(x, 0.0)
                                 : (1.0 - std::exp(cplx(0.0, -xi * x))) / cplx(0.0, xi);
            const cplx v = root_c * ind * w[b];
            for (int i = 0; i < it; ++i) A[p][size_t(i) * g.n_xi + b] = v;
        }
    }
    const double m = g.dt * g.dxi;
    const double s_pair = std::sqrt(m / 2.0), s_real = std::sqrt(m);
    std::vector<double> sum(P, 0.0), prod(size_t(P) * P, 0.0), prod2(size_t(P) * P, 0.0);
    std::vector<double> v(P);
    for (int r = 0; r < replicates; ++r) {
        const CounterRng rng(replicate_seed(seed, r), streams::kWhiteNoise);
        std::fill(v.begin(), v.end(), 0.0);
        for (int i = 0; i < g.n_t; ++i) {
            for (int b = 1; b < g.n_xi / 2; ++b) {
                const auto gp = rng.gaussian2(uint64_t(i), uint64_t(b));
                const cplx z(s_pair * gp[0], s_pair * gp[1]);
                for (int p = 0; p < P; ++p) {
                    const size_t idx = size_t(i) * g.n_xi;
                    // pair (b, n-b) of a Hermitian coefficient doubles the real part
                    const cplx c = A[p][idx + b];
                    v[p] += 2.0 * (c.real() * z.real() - c.imag() * z.imag());
                }
            }
            const double z0 = s_real * rng.gaussian2(uint64_t(i), 0)[0];
            for (int p = 0; p < P; ++p) v[p] += A[p][size_t(i) * g.n_xi].real() * z0;
        }
        for (int p = 0; p < P; ++p) {
            sum[p] += v[p];
            for (int q = 0; q < P; ++q) {
                const double pr = v[p] * v[q];
                prod[size_t(p) * P + q] += pr;
                prod2[size_t(p) * P + q] += pr * pr;
            }
        }
    }
    CovarianceReport rep;
    rep.points = pts;
    rep.replicates = replicates;
    rep.mean.resize(P);
    rep.cov.assign(size_t(P) * P, 0.0);
    rep.se.assign(size_t(P) * P, 0.0);
    for (int p = 0; p < P; ++p) rep.mean[p] = sum[p] / replicates;
    for (int p = 0; p < P; ++p)
        for (int q = 0; q < P; ++q) {
            const double mpq = prod[size_t(p) * P + q] / replicates;
            rep.cov[size_t(p) * P + q] = mpq - rep.mean[p] * rep.mean[q];
            const double var =
                prod2[size_t(p) * P + q] / replicates - mpq * mpq;
            rep.se[size_t(p) * P + q] = std::sqrt(std::max(var, 0.0) / replicates);
        }
    return rep;
}

// Closed-form covariance of W^H for cross-checks:
// E[W(t,x) W(s,y)] = (s^t)/2 (|x|^{2H} + |y|^{2H} - |x-y|^{2H}).
inline double covariance_closed_form(const HurstIndex& H, double t, double x, double s,
                                     double y) {
    const double p = 2.0 * H.value();
    return 0.5 * std::min(s, t) *
           (std::pow(std::abs(x), p) + std::pow(std::abs(y), p) -
            std::pow(std::abs(x - y), p));
}

// ---- binary dump (magic "FNZ1"), little-endian, 64-byte header ----

namespace detail {
template <class T>
void put(std::ofstream& os, T v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <class T>
T get(std::ifstream& is) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    return v;
}
}  // namespace detail

inline void write_noise_field(const std::string& path, const NoiseIncrementField& f) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + path);
    os.write("FNZ1", 4);
    detail::put<uint32_t>(os, uint32_t(f.grid.n_t));
    detail::put<uint32_t>(os, uint32_t(f.grid.n_x));
    detail::put<double>(os, f.grid.T);
    detail::put<double>(os, f.grid.L);
    detail::put<double>(os, f.H);
    detail::put<uint64_t>(os, f.source_seed);
    const char pad[64 - 4 - 4 - 4 - 8 - 8 - 8 - 8] = {0};
    os.write(pad, sizeof(pad));
    os.write(reinterpret_cast<const char*>(f.dW.data()),
             std::streamsize(f.dW.size() * sizeof(double)));
}

inline NoiseIncrementField read_noise_field(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open " + path);
    char magic[4];
    is.read(magic, 4);
    if (std::memcmp(magic, "FNZ1", 4) != 0) throw std::runtime_error("bad magic in " + path);
    const uint32_t n_t = detail::get<uint32_t>(is);
    const uint32_t n_x = detail::get<uint32_t>(is);
    const double T = detail::get<double>(is);
    const double L = detail::get<double>(is);
    const double H = detail::get<double>(is);
    const uint64_t seed = detail::get<uint64_t>(is);
    is.seekg(64, std::ios::beg);
    NoiseIncrementField f;
    f.grid = SpaceTimeGrid(T, int(n_t), L, int(n_x));
    f.H = H;
    f.source_seed = seed;
    f.dW.resize(size_t(n_t) * n_x);
    is.read(reinterpret_cast<char*>(f.dW.data()),
            std::streamsize(f.dW.size() * sizeof(double)));
    if (!is) throw std::runtime_error("truncated noise field in " + path);
    return f;
}

}  // namespace noise
}  // namespace anderson
