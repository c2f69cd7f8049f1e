#pragma once

// Closed-form Green functions of the 1-D wave and heat equations, their
// Fourier transforms, and the spectral integrals / constants they enter.
// Everything here is deterministic and serves as the oracle layer for
// the stochastic modules.

#include <cmath>
#include <stdexcept>
#include <string>

#include "anderson/quadrature.hpp"

namespace anderson {

enum class EquationKind { wave, heat };

inline const char* kind_name(EquationKind k) {
    return k == EquationKind::wave ? "wave" : "heat";
}

inline EquationKind kind_from_name(const std::string& s) {
    if (s == "wave") return EquationKind::wave;
    if (s == "heat") return EquationKind::heat;
    throw std::invalid_argument("unknown equation kind: " + s);
}

// Hurst index restricted to the well-posedness range (1/4, 1).
class HurstIndex {
  public:
    explicit HurstIndex(double h) : h_(h) {
        if (!(h > 0.25) || !(h < 1.0))
            throw std::invalid_argument("Hurst index must lie strictly in (1/4, 1)");
    }
    double value() const { return h_; }
    bool rough() const { return h_ < 0.5; }

  private:
    double h_;
};

namespace greens {

// Spectral density constant of the noise: mu_H(dxi) = c_H |xi|^{1-2H} dxi.
inline double noise_density_constant(double h) {
    if (!(h > 0.0) || !(h < 1.0)) throw std::invalid_argument("c_H needs H in (0,1)");
    return std::tgamma(2.0 * h + 1.0) * std::sin(M_PI * h) / (2.0 * M_PI);
}

// Gagliardo normalization c~_H = H(1-2H)/2, defined for H < 1/2.
inline double gagliardo_constant(double h) {
    if (!(h > 0.0) || !(h < 0.5))
        throw std::invalid_argument("gagliardo constant needs H in (0,1/2)");
    return h * (1.0 - 2.0 * h) / 2.0;
}

// C_alpha with the removable singularity at alpha = 0 pinned to pi/2.
// For alpha in (-1,0) both Gamma(alpha) and sin(pi alpha/2) are negative,
// so the product stays positive; no branch issue.
inline double lemma_constant(double alpha) {
    if (!(alpha > -1.0) || !(alpha < 1.0))
        throw std::invalid_argument("C_alpha needs alpha in (-1,1)");
    if (alpha == 0.0) return M_PI / 2.0;
    return std::tgamma(alpha) * std::sin(M_PI * alpha / 2.0) / (1.0 - alpha);
}

struct SpectralConstants {
    double c_h;        // noise spectral density constant
    double c_tilde_h;  // Gagliardo constant (NaN for H >= 1/2)
    double c_alpha;    // Lemma constant at alpha = 1 - 2H
};

inline SpectralConstants spectral_constants(const HurstIndex& H) {
    const double h = H.value();
    return {noise_density_constant(h),
            h < 0.5 ? gagliardo_constant(h) : std::nan(""),
            lemma_constant(1.0 - 2.0 * h)};
}

inline double green_value(EquationKind kind, double t, double x) {
    if (!(t > 0.0)) throw std::invalid_argument("green_value needs t > 0");
    if (kind == EquationKind::wave) return std::abs(x) < t ? 0.5 : 0.0;
    return std::exp(-x * x / (2.0 * t)) / std::sqrt(2.0 * M_PI * t);
}

inline double green_fourier(EquationKind kind, double t, double xi) {
    if (!(t > 0.0)) throw std::invalid_argument("green_fourier needs t > 0");
    if (kind == EquationKind::heat) return std::exp(-t * xi * xi / 2.0);
    const double a = std::abs(xi);
    if (a * t < 1e-8) return t * (1.0 - (t * a) * (t * a) / 6.0);
    return std::sin(t * a) / a;
}

// Cell average of the Green function over [x-dx/2, x+dx/2]; the solver's
// spatial kernels are built from this.
inline double green_cell_average(EquationKind kind, double t, double x, double dx) {
    if (kind == EquationKind::wave) {
        const double lo = std::max(x - dx / 2.0, -t);
        const double hi = std::min(x + dx / 2.0, t);
        return hi > lo ? 0.5 * (hi - lo) / dx : 0.0;
    }
    const double s = std::sqrt(t);
    auto Phi = [](double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); };
    return (Phi((x + dx / 2.0) / s) - Phi((x - dx / 2.0) / s)) / dx;
}

// A_T(alpha) = int_0^T int_R |FG_t(xi)|^2 |xi|^alpha dxi dt, closed form.
inline double spectral_energy(EquationKind kind, double alpha, double T) {
    if (!(alpha > -1.0) || !(alpha < 1.0))
        throw std::invalid_argument("spectral energy diverges outside alpha in (-1,1)");
    if (!(T > 0.0)) throw std::invalid_argument("spectral_energy needs T > 0");
    if (kind == EquationKind::wave)
        return std::pow(2.0, 1.0 - alpha) * lemma_constant(alpha) *
               std::pow(T, 2.0 - alpha) / (2.0 - alpha);
    return 2.0 / (1.0 - alpha) * std::tgamma((alpha + 1.0) / 2.0) *
           std::pow(T, (1.0 - alpha) / 2.0);
}

namespace detail {

// int_R |FG_t(xi)|^2 |xi|^alpha dxi for fixed t, by power-weighted panels.
// Wave tails are integrated analytically with sin^2 -> 1/2 plus the first
// two oscillatory correction terms from integration by parts.
inline double frequency_energy_quadrature(EquationKind kind, double alpha, double t,
                                          double rel_tol) {
    if (kind == EquationKind::heat) {
        const double cut = std::sqrt(45.0 / t);
        PanelOptions opt;
        opt.rel_tol = rel_tol;
        opt.max_panel_width = cut / 64.0;
        auto f = [t](double xi) { return 2.0 * std::exp(-t * xi * xi); };
        return power_weighted_integral(f, alpha, 0.0, cut, opt);
    }
    const double cut = 300.0 * M_PI / t;
    PanelOptions opt;
    opt.rel_tol = rel_tol;
    opt.max_panel_width = M_PI / (4.0 * t);
    auto f = [t](double xi) {
        const double s = green_fourier(EquationKind::wave, t, xi);
        return 2.0 * s * s;
    };
    const double body = power_weighted_integral(f, alpha, 0.0, cut, opt);
    // tail: int_cut^inf (1 - cos(2 t xi)) xi^(alpha-2) dxi
    const double main = std::pow(cut, alpha - 1.0) / (1.0 - alpha);
    const double c1 = std::sin(2.0 * t * cut) * std::pow(cut, alpha - 2.0) / (2.0 * t);
    const double c2 = (alpha - 2.0) * std::cos(2.0 * t * cut) *
                      std::pow(cut, alpha - 3.0) / (4.0 * t * t);
    return body + main + c1 + c2;
}

}  // namespace detail

// Independent 2-D quadrature of A_T(alpha); the t -> T u^4 substitution
// absorbs the t^{-(alpha+1)/2} endpoint of the heat case.
inline double spectral_energy_quadrature(EquationKind kind, double alpha, double T,
                                         double rel_tol = 1e-7) {
    if (!(alpha > -1.0) || !(alpha < 1.0))
        throw std::invalid_argument("spectral energy diverges outside alpha in (-1,1)");
    auto g = [&](double u) {
        if (u <= 0.0) return 0.0;
        const double t = T * u * u * u * u;
        return detail::frequency_energy_quadrature(kind, alpha, t, rel_tol) * 4.0 * T *
               u * u * u;
    };
    return adaptive_simpson(g, 0.0, 1.0,
                            rel_tol * spectral_energy(kind, alpha, T) / 30.0);
}

namespace detail {

// int_a^inf (1 - cos(h xi)) xi^{alpha-2} dxi, a > 0, by panels up to the
// point where the cosine has swept ~Z periods, then the closed power tail
// plus the leading integration-by-parts correction.
inline double cos_complement_tail(double alpha, double a, double h, double scale,
                                  double rel_tol) {
    const double Z = 600.0;
    const double far = std::max(a * 1.0000001, Z / h);
    double body = 0.0;
    if (far > a * 1.0000001) {
        PanelOptions opt;
        opt.rel_tol = rel_tol;
        opt.max_panel_width = M_PI / (4.0 * h);
        auto w = [&](double xi) {
            return xi * h < 1e-6 ? h * h / 2.0 : (1.0 - std::cos(h * xi)) / (xi * xi);
        };
        body = scale * power_weighted_integral(w, alpha, a, far, opt);
    }
    const double main = scale * std::pow(far, alpha - 1.0) / (1.0 - alpha);
    const double c1 = scale * std::sin(h * far) * std::pow(far, alpha - 2.0) / h;
    return body + main + c1;
}

}  // namespace detail

// int_0^T int_R (1 - cos(xi h)) |FG_t|^2 |xi|^alpha dxi dt. The time
// integral is done in closed form; the remaining xi axis is split into a
// near region (time-kernel structure resolved numerically) and a far
// region where only the slow (1 - cos(h xi)) factor survives.
inline double cos_increment_energy(EquationKind kind, double alpha, double T, double h,
                                   double rel_tol = 1e-7) {
    if (!(alpha > -1.0) || !(alpha < 1.0))
        throw std::invalid_argument("divergent: alpha outside (-1,1)");
    if (!(h >= 0.0) || !(T > 0.0)) throw std::invalid_argument("need h >= 0, T > 0");
    if (h == 0.0) return 0.0;
    auto osc = [h](double xi) {
        return xi * h < 1e-6 ? h * h / 2.0 : (1.0 - std::cos(h * xi)) / (xi * xi);
    };
    if (kind == EquationKind::heat) {
        const double cut = 2.0 * std::sqrt(45.0 / T) + 1.0;  // e^{-T xi^2} dead beyond
        PanelOptions opt;
        opt.rel_tol = rel_tol;
        opt.max_panel_width = std::min(cut / 32.0, M_PI / (4.0 * h));
        auto w = [&](double xi) {
            const double tt = T * xi * xi;
            const double timeint = tt < 1e-10 ? T : -std::expm1(-tt) / (xi * xi);
            return 2.0 * osc(xi) * timeint * xi * xi;
        };
        const double body = power_weighted_integral(w, alpha, 0.0, cut, opt);
        return body + detail::cos_complement_tail(alpha, cut, h, 2.0, rel_tol);
    }
    // wave: near region keeps the sin(2 T xi)/(4 xi) time-integral term,
    // beyond it that term is O(xi^{-3}) and is dropped (IBP-small).
    const double cut = std::max(400.0, 40.0 / T);
    PanelOptions opt;
    opt.rel_tol = rel_tol;
    opt.max_panel_width = std::min({M_PI / (8.0 * T), M_PI / (4.0 * h), cut / 64.0});
    auto w = [&](double xi) {
        const double timeint =
            xi * T < 1e-8 ? T * T * T * xi * xi / 6.0
                          : T / 2.0 - std::sin(2.0 * T * xi) / (4.0 * xi);
        return 2.0 * osc(xi) * timeint;
    };
    const double body = power_weighted_integral(w, alpha, 0.0, cut, opt);
    return body + detail::cos_complement_tail(alpha, cut, h, T, rel_tol);
}

// Upper bound of Lemma 3.4 with C = int_R (1 - cos eta) |eta|^{alpha-2} deta.
inline double cos_increment_bound(EquationKind kind, double alpha, double T, double h) {
    const double C = 2.0 * lemma_constant(alpha);
    return kind == EquationKind::heat ? C * std::pow(h, 1.0 - alpha)
                                      : C * T * std::pow(h, 1.0 - alpha);
}

// int_0^T int_R |FG_{t+h} - FG_t|^2 |xi|^alpha dxi dt, time integral exact.
inline double time_increment_energy(EquationKind kind, double alpha, double T, double h,
                                    double rel_tol = 1e-7) {
    if (!(alpha > -1.0) || !(alpha < 1.0))
        throw std::invalid_argument("divergent: alpha outside (-1,1)");
    if (!(h >= 0.0) || !(T > 0.0)) throw std::invalid_argument("need h >= 0, T > 0");
    if (h == 0.0) return 0.0;
    if (kind == EquationKind::heat) {
        const double cut = std::sqrt(45.0 / h) + std::sqrt(45.0 / T);
        PanelOptions opt;
        opt.rel_tol = rel_tol;
        opt.max_panel_width = cut / 128.0;
        auto w = [&](double xi) {
            const double d = -std::expm1(-h * xi * xi / 2.0);
            const double tt = T * xi * xi;
            const double timeint = tt < 1e-10 ? T : -std::expm1(-tt) / (xi * xi);
            return 2.0 * d * d * timeint * xi * xi;
        };
        const double body = power_weighted_integral(w, alpha, 0.0, cut, opt);
        const double main = 2.0 * std::pow(cut, alpha - 1.0) / (1.0 - alpha);
        return body + main;
    }
    // wave: 4 sin^2(h xi / 2) = 2 (1 - cos(h xi)); the fast sin((2T+h)xi)
    // time-integral term is resolved in the near region and dropped beyond
    // (it decays like xi^{-3}).
    const double cut = std::max(400.0, 40.0 / T);
    PanelOptions opt;
    opt.rel_tol = rel_tol;
    opt.max_panel_width = std::min({M_PI / (8.0 * T), M_PI / (4.0 * h), cut / 64.0});
    auto w = [&](double xi) {
        const double sh = std::sin(h * xi / 2.0);
        const double osc = xi < 1e-10 ? h * h : 4.0 * sh * sh / (xi * xi);
        const double corr =
            xi < 1e-10 ? 0.0
                       : (std::sin((2.0 * T + h) * xi) - std::sin(h * xi)) / (4.0 * xi);
        return osc * (T / 2.0 + corr) * 2.0;
    };
    const double body = power_weighted_integral(w, alpha, 0.0, cut, opt);
    return body + detail::cos_complement_tail(alpha, cut, h, 2.0 * T, rel_tol);
}

// Upper-bound constants of Lemma 3.5, evaluated by quadrature of their
// defining integrals.
inline double time_increment_bound(EquationKind kind, double alpha, double T, double h) {
    PanelOptions opt;
    opt.rel_tol = 1e-8;
    if (kind == EquationKind::heat) {
        auto f = [](double e) {
            const double d = -std::expm1(-e * e / 2.0);
            return 2.0 * d * d / (e * e);
        };
        const double C = 2.0 * power_weighted_integral(f, alpha, 0.0, 40.0, opt) +
                         2.0 * std::pow(40.0, alpha - 1.0) / (1.0 - alpha);
        return C * std::pow(h, (1.0 - alpha) / 2.0);
    }
    auto f = [](double e) { return 4.0 * std::min(1.0, e * e) / (e * e); };
    opt.max_panel_width = 0.25;
    const double C = 2.0 * power_weighted_integral(f, alpha, 0.0, 400.0, opt) +
                     2.0 * 4.0 * std::pow(400.0, alpha - 1.0) / (1.0 - alpha);
    return C * T * std::pow(h, 1.0 - alpha);
}

// Riesz identity of Lemma D.2 (closed form), H in (0, 1/2), xi != 0:
// int_R |1 - e^{-i xi x}|^2 / |x|^{2-2H} dx.
inline double riesz_identity(const HurstIndex& H, double xi) {
    const double h = H.value();
    if (!(h < 0.5)) throw std::invalid_argument("riesz identity needs H < 1/2");
    if (xi == 0.0) throw std::invalid_argument("riesz identity needs xi != 0");
    return std::pow(std::abs(xi), 1.0 - 2.0 * h) * 2.0 * std::tgamma(2.0 * h + 1.0) *
           std::sin(M_PI * h) / (h * (1.0 - 2.0 * h));
}

// Direct quadrature of the defining integral, for oracle tests.
inline double riesz_identity_quadrature(const HurstIndex& H, double xi,
                                        double rel_tol = 1e-8) {
    const double h = H.value();
    if (!(h < 0.5)) throw std::invalid_argument("riesz identity needs H < 1/2");
    const double a = std::abs(xi);
    const double cut = 1200.0 * M_PI / a;
    PanelOptions opt;
    opt.rel_tol = rel_tol;
    opt.max_panel_width = M_PI / (8.0 * a);
    auto f = [&](double x) {
        return x * a < 1e-8 ? a * a : 2.0 * (1.0 - std::cos(a * x)) / (x * x);
    };
    // integrand = f(x) * x^{2H} = 2(1 - cos(a x)) x^{2H-2}; one-sided, then doubled
    const double body = 2.0 * power_weighted_integral(f, 2.0 * h, 0.0, cut, opt);
    const double main = 4.0 * std::pow(cut, 2.0 * h - 1.0) / (1.0 - 2.0 * h);
    const double c1 = 4.0 * std::sin(a * cut) * std::pow(cut, 2.0 * h - 2.0) / a;
    const double c2 = 4.0 * (2.0 * h - 2.0) * std::cos(a * cut) *
                      std::pow(cut, 2.0 * h - 3.0) / (a * a);
    return body + main + c1 + c2;
}

}  // namespace greens
}  // namespace anderson
