#include "osl/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace osl {

void EnvelopeEntropyConfig::validate() const {
    if (!(epsilon_floor > 0.0) || epsilon_floor > 1e-6)
        throw std::invalid_argument(
            "EnvelopeEntropyConfig: epsilon_floor must be in (0, 1e-6]");
}

double envelope_entropy(const IMFSet& imfs, const EnvelopeEntropyConfig& config) {
    config.validate();
    if (imfs.modes.empty())
        throw std::invalid_argument("envelope_entropy: no modes");

    double total = 0.0;
    double minimum = std::numeric_limits<double>::infinity();
    for (const auto& mode : imfs.modes) {
        const std::size_t n = mode.size();
        if (n < 3)
            throw std::invalid_argument("envelope_entropy: mode length < 3");
        std::vector<double> env(n);
        if (config.envelope_kind == EnvelopeKind::spline_mean_abs) {
            const auto [upper, lower] = spline_envelopes(mode);
            for (std::size_t i = 0; i < n; ++i)
                env[i] = std::abs(0.5 * (upper.samples[i] + lower.samples[i])) +
                         config.epsilon_floor;
        } else {
            env = analytic_envelope(mode);
            for (auto& e : env) e += config.epsilon_floor;
        }
        double sum = 0.0;
        for (double e : env) sum += e;
        double h = 0.0;
        for (double e : env) {
            const double p = e / sum;
            if (p > 0.0) h -= p * std::log(p);
        }
        total += h;
        minimum = std::min(minimum, h);
    }
    return config.min_over_modes ? minimum : total;
}

}  // namespace osl
