#pragma once

#include "osl/vmd.hpp"

namespace osl {

enum class EnvelopeKind {
    /// |(upper + lower)/2| + floor from the spline envelopes.
    spline_mean_abs,
    /// Magnitude of the analytic signal (Hilbert envelope).
    analytic_magnitude,
};

struct EnvelopeEntropyConfig {
    double epsilon_floor = 1e-12;
    EnvelopeKind envelope_kind = EnvelopeKind::spline_mean_abs;
    /// Experimental variant: score the minimum per-mode entropy instead of
    /// the sum over modes. Off by default.
    bool min_over_modes = false;

    void validate() const;
};

/// Envelope entropy of a decomposition: per mode, Shannon entropy (nats) of
/// the envelope amplitudes normalized to a probability distribution, summed
/// over modes. Low values indicate concentrated, feature-rich modes.
double envelope_entropy(const IMFSet& imfs, const EnvelopeEntropyConfig& config);

}  // namespace osl
