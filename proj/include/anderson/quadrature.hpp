#pragma once

// Quadrature helpers used by the closed-form oracles.
//
// The central routine integrates f(x) * x^alpha over [a,b] with the
// power weight handled exactly per panel: f is replaced by its linear
// interpolant on each panel and the moments of x^alpha are integrated
// in closed form. Panels refine adaptively, so the |x|^alpha endpoint
// singularity never sees a naive quadrature rule.

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace anderson {

struct PanelOptions {
    double rel_tol = 1e-9;
    double max_panel_width = 0.0;  // 0 = no cap
    int max_depth = 40;
};

namespace detail {

inline double power_moment0(double alpha, double a, double b) {
    return (std::pow(b, alpha + 1.0) - std::pow(a, alpha + 1.0)) / (alpha + 1.0);
}
inline double power_moment1(double alpha, double a, double b) {
    return (std::pow(b, alpha + 2.0) - std::pow(a, alpha + 2.0)) / (alpha + 2.0);
}

// Linear-interpolant panel value of int_a^b f(x) x^alpha dx.
inline double panel_linear(const std::function<double(double)>& f, double alpha,
                           double a, double b, double fa, double fb) {
    const double m0 = power_moment0(alpha, a, b);
    const double m1 = power_moment1(alpha, a, b);
    const double slope = (fb - fa) / (b - a);
    (void)f;
    return fa * m0 + slope * (m1 - a * m0);
}

}  // namespace detail

// Integrates f(x) * x^alpha on [a,b], 0 <= a < b, alpha > -1.
inline double power_weighted_integral(const std::function<double(double)>& f,
                                      double alpha, double a, double b,
                                      const PanelOptions& opt = {}) {
    if (!(alpha > -1.0)) throw std::invalid_argument("power weight not integrable");
    if (!(b > a) || a < 0.0) throw std::invalid_argument("bad interval");

    struct Panel {
        double a, b, fa, fb, estimate;
        int depth;
    };

    std::vector<Panel> stack;
    std::vector<Panel> seed;
    // Seed panels: geometric from the left edge (resolves the weight and
    // any integrand structure near 0), then uniform capped panels.
    const double width = b - a;
    const double cap = opt.max_panel_width > 0 ? opt.max_panel_width : width / 8.0;
    double x = a;
    double first = std::min(cap, width / 1024.0);
    if (a == 0.0) first = std::min(first, width * 1e-6);
    double w = std::max(first, width * 1e-12);
    while (x < b) {
        double nx = std::min(b, x + w);
        seed.push_back({x, nx, f(x == 0.0 ? 0.0 : x), f(nx), 0.0, 0});
        x = nx;
        w = std::min(2.0 * w, cap);
    }
    double total_scale = 0.0;
    for (auto& p : seed) {
        p.estimate = detail::panel_linear(f, alpha, p.a, p.b, p.fa, p.fb);
        total_scale += std::abs(p.estimate);
        stack.push_back(p);
    }
    if (total_scale == 0.0) total_scale = 1e-300;

    double total = 0.0;
    while (!stack.empty()) {
        Panel p = stack.back();
        stack.pop_back();
        const double mid = 0.5 * (p.a + p.b);
        const double fm = f(mid);
        const double left = detail::panel_linear(f, alpha, p.a, mid, p.fa, fm);
        const double right = detail::panel_linear(f, alpha, mid, p.b, fm, p.fb);
        const double refined = left + right;
        const double err = std::abs(refined - p.estimate);
        if (p.depth >= opt.max_depth ||
            err <= opt.rel_tol * (std::abs(refined) + 1e-3 * total_scale)) {
            total += refined + (refined - p.estimate) / 3.0;  // Richardson
        } else {
            stack.push_back({p.a, mid, p.fa, fm, left, p.depth + 1});
            stack.push_back({mid, p.b, fm, p.fb, right, p.depth + 1});
        }
    }
    return total;
}

// Adaptive Simpson on [a,b] for smooth integrands.
inline double adaptive_simpson(const std::function<double(double)>& f, double a,
                               double b, double tol = 1e-10, int max_depth = 30) {
    struct Frame {
        double a, b, fa, fm, fb, whole;
        int depth;
    };
    auto simpson = [](double a, double b, double fa, double fm, double fb) {
        return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    };
    const double m0 = 0.5 * (a + b);
    std::vector<Frame> stack{{a, b, f(a), f(m0), f(b), 0.0, 0}};
    stack[0].whole = simpson(a, b, stack[0].fa, stack[0].fm, stack[0].fb);
    double total = 0.0;
    while (!stack.empty()) {
        Frame fr = stack.back();
        stack.pop_back();
        const double m = 0.5 * (fr.a + fr.b);
        const double lm = 0.5 * (fr.a + m), rm = 0.5 * (m + fr.b);
        const double flm = f(lm), frm = f(rm);
        const double left = simpson(fr.a, m, fr.fa, flm, fr.fm);
        const double right = simpson(m, fr.b, fr.fm, frm, fr.fb);
        const double err = left + right - fr.whole;
        if (fr.depth >= max_depth || std::abs(err) <= 15.0 * tol) {
            total += left + right + err / 15.0;
        } else {
            stack.push_back({fr.a, m, fr.fa, flm, fr.fm, left, fr.depth + 1});
            stack.push_back({m, fr.b, fr.fm, frm, fr.fb, right, fr.depth + 1});
        }
    }
    return total;
}

}  // namespace anderson
