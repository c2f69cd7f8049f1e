#pragma once

// Thin wrapper over FFTW complex transforms with a process-wide plan
// cache. Plan creation is serialized (the FFTW planner is not
// thread-safe); execution on distinct buffers is.

#include <fftw3.h>

#include <complex>
#include <map>
#include <mutex>
#include <vector>

namespace anderson {

class Fft {
  public:
    // In-place forward DFT, unnormalized: X_k = sum_j x_j e^{-2pi i jk/N}.
    static void forward(std::vector<std::complex<double>>& data) {
        execute(data, FFTW_FORWARD);
    }

    // In-place inverse DFT including the 1/N factor.
    static void inverse(std::vector<std::complex<double>>& data) {
        execute(data, FFTW_BACKWARD);
        const double s = 1.0 / double(data.size());
        for (auto& v : data) v *= s;
    }

  private:
    static void execute(std::vector<std::complex<double>>& data, int sign) {
        fftw_plan plan = plan_for(int(data.size()), sign);
        fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(data.data()),
                         reinterpret_cast<fftw_complex*>(data.data()));
    }

    static fftw_plan plan_for(int n, int sign) {
        static std::mutex mu;
        static std::map<std::pair<int, int>, fftw_plan> cache;
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find({n, sign});
        if (it != cache.end()) return it->second;
        // Plan on a scratch buffer; FFTW_ESTIMATE keeps planning deterministic
        // and leaves the buffer contents untouched.
        std::vector<std::complex<double>> scratch(n);
        fftw_plan plan = fftw_plan_dft_1d(
            n, reinterpret_cast<fftw_complex*>(scratch.data()),
            reinterpret_cast<fftw_complex*>(scratch.data()), sign, FFTW_ESTIMATE);
        cache.emplace(std::make_pair(n, sign), plan);
        return plan;
    }
};

inline int next_pow2(int n) {
    int p = 1;
    while (p < n) p *= 2;
    return p;
}

}  // namespace anderson
