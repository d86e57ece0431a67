#include "osl/vmd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace osl {

void VMDParams::validate() const {
    if (k < 1 || k > 32) throw std::invalid_argument("VMDParams: K must be in [1,32]");
    if (!(alpha > 0.0)) throw std::invalid_argument("VMDParams: alpha must be > 0");
    if (tau < 0.0) throw std::invalid_argument("VMDParams: tau must be >= 0");
    if (!(tolerance > 0.0)) throw std::invalid_argument("VMDParams: tolerance must be > 0");
    if (max_iterations < 1) throw std::invalid_argument("VMDParams: max_iterations must be > 0");
}

IMFSet vmd_decompose(const Signal& signal, const VMDParams& params) {
    params.validate();
    const std::size_t n = signal.size();
    if (n < 2 * static_cast<std::size_t>(params.k))
        throw std::invalid_argument("vmd_decompose: signal shorter than 2K");
    require_finite(signal, "vmd_decompose");

    const Signal extended = mirror_extend(signal);
    const std::size_t t = extended.size();   // 2N, even
    const std::size_t half = t / 2;          // positive-half bins 0..half
    const std::size_t hb = half + 1;
    const int k_modes = params.k;

    // Positive half of the extended signal's spectrum; the solve lives here
    // and Hermitian symmetry restores the real modes at the end.
    std::vector<std::complex<double>> full(t);
    for (std::size_t i = 0; i < t; ++i) full[i] = extended.samples[i];
    fft_complex(full, false);
    std::vector<std::complex<double>> f_plus(full.begin(), full.begin() + hb);

    std::vector<double> freq(hb);
    for (std::size_t i = 0; i < hb; ++i)
        freq[i] = static_cast<double>(i) / static_cast<double>(t);

    std::vector<std::vector<std::complex<double>>> u_hat(
        k_modes, std::vector<std::complex<double>>(hb, {0.0, 0.0}));
    std::vector<std::complex<double>> lambda_hat(hb, {0.0, 0.0});
    std::vector<std::complex<double>> sum_u(hb, {0.0, 0.0});

    // Center frequencies start uniformly spread over (0, 0.5).
    std::vector<double> omega(k_modes);
    for (int k = 0; k < k_modes; ++k)
        omega[k] = 0.5 * static_cast<double>(k + 1) / static_cast<double>(k_modes + 1);
    if (params.dc_mode) omega[0] = 0.0;

    double update_norm = 0.0;
    int iter = 0;
    std::vector<std::complex<double>> prev(hb);
    for (iter = 1; iter <= params.max_iterations; ++iter) {
        update_norm = 0.0;
        for (int k = 0; k < k_modes; ++k) {
            prev = u_hat[k];
            double num = 0.0, den = 0.0;
            for (std::size_t i = 0; i < hb; ++i) {
                sum_u[i] -= u_hat[k][i];
                const double d = freq[i] - omega[k];
                u_hat[k][i] = (f_plus[i] - sum_u[i] + lambda_hat[i] * 0.5) /
                              (1.0 + 2.0 * params.alpha * d * d);
                sum_u[i] += u_hat[k][i];
                const double p = std::norm(u_hat[k][i]);
                num += freq[i] * p;
                den += p;
            }
            if (!(params.dc_mode && k == 0) && den > 0.0)
                omega[k] = std::clamp(num / den, 0.0, 0.5);
            double dn = 0.0, pn = 0.0;
            for (std::size_t i = 0; i < hb; ++i) {
                dn += std::norm(u_hat[k][i] - prev[i]);
                pn += std::norm(prev[i]);
            }
            update_norm += dn / (pn + 1e-30);
        }
        for (std::size_t i = 0; i < hb; ++i)
            lambda_hat[i] += params.tau * (f_plus[i] - sum_u[i]);
        if (update_norm < params.tolerance) break;
    }

    IMFSet out;
    out.iterations_used = std::min(iter, params.max_iterations);
    out.final_update_norm = update_norm;

    // Modes sorted so index 0 carries the lowest frequency band.
    std::vector<int> order(k_modes);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return omega[a] < omega[b]; });

    const std::size_t crop = n / 2;  // center segment of the mirror extension
    for (int k : order) {
        std::vector<std::complex<double>> spec(t, {0.0, 0.0});
        for (std::size_t i = 0; i < hb; ++i) spec[i] = u_hat[k][i];
        for (std::size_t i = 1; i < half; ++i) spec[t - i] = std::conj(u_hat[k][i]);
        fft_complex(spec, true);
        Signal mode;
        mode.index_unit = signal.index_unit;
        mode.sample_rate = signal.sample_rate;
        mode.samples.resize(n);
        for (std::size_t i = 0; i < n; ++i) mode.samples[i] = spec[crop + i].real();
        out.modes.push_back(std::move(mode));
        out.center_frequencies.push_back(omega[k]);
    }
    out.residual = Signal(std::vector<double>(n, 0.0), signal.index_unit,
                          signal.sample_rate);
    return out;
}

double reconstruction_error(const Signal& original, const IMFSet& imfs) {
    const std::size_t n = original.size();
    for (const auto& m : imfs.modes) {
        if (m.size() != n)
            throw std::invalid_argument("reconstruction_error: length mismatch");
    }
    if (!imfs.residual.samples.empty() && imfs.residual.size() != n)
        throw std::invalid_argument("reconstruction_error: residual length mismatch");
    double err2 = 0.0, ref2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double sum = 0.0;
        for (const auto& m : imfs.modes) sum += m.samples[i];
        if (!imfs.residual.samples.empty()) sum += imfs.residual.samples[i];
        const double d = original.samples[i] - sum;
        err2 += d * d;
        ref2 += original.samples[i] * original.samples[i];
    }
    if (ref2 == 0.0) return err2 == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return std::sqrt(err2 / ref2);
}

}  // namespace osl
