#pragma once

#include <complex>
#include <string>
#include <utility>
#include <vector>

namespace osl {

/// Uniformly sampled real-valued series. For battery data the samples are
/// discharge capacities in Ah and the index unit is "cycle".
struct Signal {
    std::vector<double> samples;
    std::string index_unit = "cycle";
    double sample_rate = 1.0;  // samples per index unit

    Signal() = default;
    explicit Signal(std::vector<double> s, std::string unit = "cycle",
                    double rate = 1.0)
        : samples(std::move(s)), index_unit(std::move(unit)), sample_rate(rate) {}

    std::size_t size() const { return samples.size(); }
    double operator[](std::size_t i) const { return samples[i]; }
    double& operator[](std::size_t i) { return samples[i]; }
};

/// Full complex DFT of a signal; bin count equals the input length.
struct Spectrum {
    std::vector<std::complex<double>> bins;
    double frequency_resolution = 0.0;  // cycles/sample per bin

    std::size_t size() const { return bins.size(); }
};

/// Throws std::invalid_argument if any sample is NaN or Inf.
void require_finite(const Signal& s, const char* what);

/// Forward DFT (unnormalized). Arbitrary lengths; radix-2 when possible,
/// Bluestein otherwise.
Spectrum fft(const Signal& signal);

/// Inverse DFT, 1/N normalized. Imaginary residue is discarded.
Signal ifft(const Spectrum& spectrum);

/// In-place complex FFT, arbitrary length. inverse=true applies 1/N.
void fft_complex(std::vector<std::complex<double>>& data, bool inverse);

/// Reflects half the signal across each end: [1,2,3,4] -> [2,1,1,2,3,4,4,3].
/// Output length is exactly 2N; the center N samples equal the input.
Signal mirror_extend(const Signal& signal);

/// Interior local extrema. A maximum at i satisfies
/// samples[i-1] < samples[i] >= samples[i+1]; plateau ties resolve to the
/// leftmost plateau index. Endpoints are never extrema.
struct Extrema {
    std::vector<std::size_t> maxima;
    std::vector<std::size_t> minima;
};
Extrema local_extrema(const Signal& signal);

/// Natural cubic spline through strictly increasing knot abscissae.
class CubicSpline {
public:
    CubicSpline(std::vector<double> x, std::vector<double> y);
    double operator()(double x) const;

private:
    std::vector<double> x_, y_, m_;  // m_: second derivatives at knots
};

/// Upper/lower envelopes through local maxima/minima, endpoint-anchored.
/// A side with no interior extrema degrades to a constant at the signal
/// max (resp. min).
std::pair<Signal, Signal> spline_envelopes(const Signal& signal);

/// |x + i*H(x)|: magnitude of the analytic signal, computed in the
/// frequency domain.
std::vector<double> analytic_envelope(const Signal& signal);

}  // namespace osl
