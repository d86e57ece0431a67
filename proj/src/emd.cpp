#include "osl/emd.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace osl {

void EMDParams::validate() const {
    if (max_imfs < 1) throw std::invalid_argument("EMDParams: max_imfs must be > 0");
    if (!(sift_sd_threshold > 0.0))
        throw std::invalid_argument("EMDParams: sift_sd_threshold must be > 0");
    if (max_sifts_per_imf < 1)
        throw std::invalid_argument("EMDParams: max_sifts_per_imf must be > 0");
}

namespace {

std::size_t interior_extrema_count(const Signal& s) {
    if (s.size() < 3) return 0;
    const Extrema ext = local_extrema(s);
    return ext.maxima.size() + ext.minima.size();
}

}  // namespace

IMFSet emd_decompose(const Signal& signal, const EMDParams& params) {
    params.validate();
    if (signal.size() < 8)
        throw std::invalid_argument("emd_decompose: need length >= 8");
    require_finite(signal, "emd_decompose");

    const std::size_t n = signal.size();
    Signal remainder = signal;
    IMFSet out;

    while (static_cast<int>(out.modes.size()) < params.max_imfs &&
           interior_extrema_count(remainder) >= 2) {
        Signal h = remainder;
        for (int sift = 0; sift < params.max_sifts_per_imf; ++sift) {
            if (interior_extrema_count(h) < 2) break;
            const auto [upper, lower] = spline_envelopes(h);
            double num = 0.0, den = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double mean = 0.5 * (upper.samples[i] + lower.samples[i]);
                num += mean * mean;
                den += h.samples[i] * h.samples[i];
                h.samples[i] -= mean;
            }
            // SD criterion: the subtracted envelope mean is already
            // (h_prev - h), so num/den is the Huang ratio.
            if (den > 0.0 && num / den < params.sift_sd_threshold) break;
        }
        for (std::size_t i = 0; i < n; ++i)
            remainder.samples[i] -= h.samples[i];
        out.modes.push_back(std::move(h));
    }

    // Highest-frequency mode was sifted first; flip to the low-first layout.
    std::reverse(out.modes.begin(), out.modes.end());
    out.center_frequencies.assign(out.modes.size(), 0.0);
    for (std::size_t k = 0; k < out.modes.size(); ++k) {
        // Spectral centroid of the positive half, reported for parity with VMD.
        Spectrum spec = fft(out.modes[k]);
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i <= n / 2; ++i) {
            const double p = std::norm(spec.bins[i]);
            num += (static_cast<double>(i) / static_cast<double>(n)) * p;
            den += p;
        }
        out.center_frequencies[k] = den > 0.0 ? num / den : 0.0;
    }
    out.residual = std::move(remainder);
    out.iterations_used = static_cast<int>(out.modes.size());
    out.final_update_norm = 0.0;
    return out;
}

}  // namespace osl
