#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "osl/signal.hpp"

namespace testutil {

inline std::vector<double> random_signal(std::mt19937_64& rng, std::size_t n,
                                         double scale = 1.0) {
    std::uniform_real_distribution<double> dist(-scale, scale);
    std::vector<double> out(n);
    for (auto& v : out) v = dist(rng);
    return out;
}

inline osl::Signal tone(double freq, std::size_t n, double amplitude = 1.0,
                        double phase = 0.0) {
    std::vector<double> s(n);
    for (std::size_t i = 0; i < n; ++i)
        s[i] = amplitude *
               std::cos(2.0 * std::numbers::pi * freq * static_cast<double>(i) + phase);
    return osl::Signal(std::move(s));
}

// Direct O(N^2) DFT, the independent oracle for the FFT.
inline std::vector<std::complex<double>> dft_oracle(const std::vector<double>& x) {
    const std::size_t n = x.size();
    std::vector<std::complex<double>> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        std::complex<double> acc(0.0, 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            const double ang = -2.0 * std::numbers::pi * static_cast<double>(k) *
                               static_cast<double>(j) / static_cast<double>(n);
            acc += x[j] * std::complex<double>(std::cos(ang), std::sin(ang));
        }
        out[k] = acc;
    }
    return out;
}

inline double rel_l2(const std::vector<double>& a, const std::vector<double>& b) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += (a[i] - b[i]) * (a[i] - b[i]);
        den += a[i] * a[i];
    }
    return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

}  // namespace testutil
