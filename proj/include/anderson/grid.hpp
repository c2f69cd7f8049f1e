#pragma once

// Space-time-frequency discretization shared by every stochastic module.

#include <cmath>
#include <stdexcept>
#include <vector>

namespace anderson {

struct SpaceTimeGrid {
    double T = 1.0;       // time horizon
    int n_t = 256;        // time-step count (slices)
    double L = 4.0;       // spatial half-width, cells cover [-L, L)
    int n_x = 1024;       // spatial cell count
    int n_xi = 1024;      // frequency bin count
    double xi_max = 0.0;  // frequency cutoff; 0 = spatial Nyquist pi/dx

    double dt = 0.0, dx = 0.0, dxi = 0.0;

    static bool power_of_two(int n) { return n >= 1 && (n & (n - 1)) == 0; }

    void finalize() {
        if (!(T > 0.0) || !(L > 0.0)) throw std::invalid_argument("grid: T, L must be > 0");
        if (n_t < 2 || n_x < 2 || n_xi < 2)
            throw std::invalid_argument("grid: n_t, n_x, n_xi must be >= 2");
        if (!power_of_two(n_x) || !power_of_two(n_xi))
            throw std::invalid_argument("grid: n_x and n_xi must be powers of two");
        dt = T / n_t;
        dx = 2.0 * L / n_x;
        if (xi_max == 0.0) xi_max = M_PI / dx;
        if (!(xi_max > 0.0)) throw std::invalid_argument("grid: xi_max must be > 0");
        dxi = 2.0 * xi_max / n_xi;
    }

    SpaceTimeGrid() = default;
    SpaceTimeGrid(double T_, int n_t_, double L_, int n_x_, int n_xi_ = 0,
                  double xi_max_ = 0.0)
        : T(T_), n_t(n_t_), L(L_), n_x(n_x_), n_xi(n_xi_ ? n_xi_ : n_x_),
          xi_max(xi_max_) {
        finalize();
    }

    double cell_center(int k) const { return -L + (k + 0.5) * dx; }
    double time(int i) const { return i * dt; }

    // Signed frequency index of FFT bin i: 0,1,..,n/2-1,-n/2,..,-1.
    int signed_index(int i) const { return i < n_xi / 2 ? i : i - n_xi; }
    double frequency(int i) const { return signed_index(i) * dxi; }
    int nyquist_bin() const { return n_xi / 2; }

    // The synthesis collapses to one FFT per slice iff dxi*dx*n_xi = 2*pi.
    bool fft_aligned() const { return std::abs(dxi * dx * n_xi / (2.0 * M_PI) - 1.0) < 1e-12; }

    // Number of noise slices strictly below time t (slice i covers [t_i, t_{i+1})).
    int slices_before(double t) const {
        if (t < -1e-12 || t > T + 1e-12) throw std::invalid_argument("time outside [0, T]");
        return std::min(n_t, int(std::floor(t / dt + 1e-9)));
    }

    int cell_of(double x) const {
        if (x < -L - 1e-12 || x > L + 1e-12) throw std::invalid_argument("x outside [-L, L]");
        return std::min(n_x - 1, std::max(0, int(std::floor((x + L) / dx))));
    }

    bool same_shape(const SpaceTimeGrid& o) const {
        return T == o.T && n_t == o.n_t && L == o.L && n_x == o.n_x && n_xi == o.n_xi &&
               xi_max == o.xi_max;
    }
};

}  // namespace anderson
