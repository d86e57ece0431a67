#include "osl/signal.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace osl {

namespace {

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// Iterative radix-2 Cooley-Tukey; n must be a power of two.
void fft_radix2(std::vector<std::complex<double>>& a, bool inverse) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang =
            (inverse ? 2.0 : -2.0) * std::numbers::pi / static_cast<double>(len);
        const std::complex<double> wlen(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const std::complex<double> u = a[i + k];
                const std::complex<double> v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
    if (inverse) {
        for (auto& x : a) x /= static_cast<double>(n);
    }
}

// Bluestein's algorithm: turns a length-n DFT into a convolution of
// power-of-two size, so arbitrary n works.
void fft_bluestein(std::vector<std::complex<double>>& a, bool inverse) {
    const std::size_t n = a.size();
    std::size_t m = 1;
    while (m < 2 * n + 1) m <<= 1;

    // Chirp: w_j = exp(-i*pi*j^2/n) for forward transform.
    std::vector<std::complex<double>> chirp(n);
    for (std::size_t j = 0; j < n; ++j) {
        // j^2 mod 2n keeps the phase argument small for long inputs
        const std::size_t j2 = (j * j) % (2 * n);
        const double ang = (inverse ? 1.0 : -1.0) * std::numbers::pi *
                           static_cast<double>(j2) / static_cast<double>(n);
        chirp[j] = {std::cos(ang), std::sin(ang)};
    }

    std::vector<std::complex<double>> x(m, {0.0, 0.0}), y(m, {0.0, 0.0});
    for (std::size_t j = 0; j < n; ++j) x[j] = a[j] * chirp[j];
    y[0] = std::conj(chirp[0]);
    for (std::size_t j = 1; j < n; ++j) {
        y[j] = std::conj(chirp[j]);
        y[m - j] = std::conj(chirp[j]);
    }
    fft_radix2(x, false);
    fft_radix2(y, false);
    for (std::size_t j = 0; j < m; ++j) x[j] *= y[j];
    fft_radix2(x, true);

    for (std::size_t j = 0; j < n; ++j) a[j] = x[j] * chirp[j];
    if (inverse) {
        for (auto& v : a) v /= static_cast<double>(n);
    }
}

}  // namespace

void require_finite(const Signal& s, const char* what) {
    for (std::size_t i = 0; i < s.samples.size(); ++i) {
        if (!std::isfinite(s.samples[i])) {
            throw std::invalid_argument(std::string(what) +
                                        ": non-finite sample at index " +
                                        std::to_string(i));
        }
    }
}

void fft_complex(std::vector<std::complex<double>>& data, bool inverse) {
    if (data.empty()) throw std::invalid_argument("fft: empty input");
    if (data.size() == 1) return;
    if (is_pow2(data.size())) {
        fft_radix2(data, inverse);
    } else {
        fft_bluestein(data, inverse);
    }
}

Spectrum fft(const Signal& signal) {
    if (signal.size() < 1) throw std::invalid_argument("fft: empty signal");
    require_finite(signal, "fft");
    std::vector<std::complex<double>> data(signal.size());
    for (std::size_t i = 0; i < signal.size(); ++i) data[i] = signal.samples[i];
    fft_complex(data, false);
    Spectrum out;
    out.bins = std::move(data);
    out.frequency_resolution = 1.0 / static_cast<double>(signal.size());
    return out;
}

Signal ifft(const Spectrum& spectrum) {
    if (spectrum.size() < 1) throw std::invalid_argument("ifft: empty spectrum");
    std::vector<std::complex<double>> data = spectrum.bins;
    fft_complex(data, true);
    Signal out;
    out.samples.resize(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) out.samples[i] = data[i].real();
    return out;
}

Signal mirror_extend(const Signal& signal) {
    const std::size_t n = signal.size();
    if (n < 2) throw std::invalid_argument("mirror_extend: need length >= 2");
    const std::size_t head = n / 2;        // floor(N/2) reversed and prepended
    const std::size_t tail = n - head;     // ceil(N/2) reversed and appended
    Signal out;
    out.index_unit = signal.index_unit;
    out.sample_rate = signal.sample_rate;
    out.samples.reserve(2 * n);
    for (std::size_t i = head; i-- > 0;) out.samples.push_back(signal.samples[i]);
    for (std::size_t i = 0; i < n; ++i) out.samples.push_back(signal.samples[i]);
    for (std::size_t i = n; i-- > n - tail;) out.samples.push_back(signal.samples[i]);
    return out;
}

Extrema local_extrema(const Signal& signal) {
    const std::size_t n = signal.size();
    if (n < 3) throw std::invalid_argument("local_extrema: need length >= 3");
    Extrema out;
    const auto& s = signal.samples;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (s[i - 1] < s[i] && s[i] >= s[i + 1]) out.maxima.push_back(i);
        if (s[i - 1] > s[i] && s[i] <= s[i + 1]) out.minima.push_back(i);
    }
    return out;
}

CubicSpline::CubicSpline(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
    const std::size_t n = x_.size();
    if (n < 2 || y_.size() != n)
        throw std::invalid_argument("CubicSpline: need >= 2 matching knots");
    for (std::size_t i = 1; i < n; ++i) {
        if (!(x_[i] > x_[i - 1]))
            throw std::invalid_argument("CubicSpline: knots must be increasing");
    }
    m_.assign(n, 0.0);
    if (n == 2) return;  // linear segment, second derivatives stay zero

    // Tridiagonal solve for natural boundary conditions (m_[0]=m_[n-1]=0).
    std::vector<double> diag(n, 0.0), rhs(n, 0.0), upper(n, 0.0);
    diag[0] = 1.0;
    diag[n - 1] = 1.0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double h0 = x_[i] - x_[i - 1];
        const double h1 = x_[i + 1] - x_[i];
        diag[i] = 2.0 * (h0 + h1);
        upper[i] = h1;
        rhs[i] = 6.0 * ((y_[i + 1] - y_[i]) / h1 - (y_[i] - y_[i - 1]) / h0);
    }
    // Forward elimination (lower diagonal is h0, zero in the boundary rows).
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double h0 = x_[i] - x_[i - 1];
        const double lower = (i == 1) ? 0.0 : h0;
        if (lower != 0.0) {
            const double f = lower / diag[i - 1];
            diag[i] -= f * upper[i - 1];
            rhs[i] -= f * rhs[i - 1];
        }
    }
    for (std::size_t i = n - 1; i-- > 1;) {
        rhs[i] -= upper[i] * m_[i + 1];
        m_[i] = rhs[i] / diag[i];
    }
}

double CubicSpline::operator()(double x) const {
    const std::size_t n = x_.size();
    std::size_t seg;
    if (x <= x_.front()) {
        seg = 0;
    } else if (x >= x_.back()) {
        seg = n - 2;
    } else {
        seg = static_cast<std::size_t>(
                  std::upper_bound(x_.begin(), x_.end(), x) - x_.begin()) -
              1;
    }
    const double h = x_[seg + 1] - x_[seg];
    const double a = (x_[seg + 1] - x) / h;
    const double b = (x - x_[seg]) / h;
    return a * y_[seg] + b * y_[seg + 1] +
           ((a * a * a - a) * m_[seg] + (b * b * b - b) * m_[seg + 1]) * h * h /
               6.0;
}

namespace {

Signal envelope_through(const Signal& signal,
                        const std::vector<std::size_t>& interior, bool upper) {
    const std::size_t n = signal.size();
    Signal env;
    env.index_unit = signal.index_unit;
    env.sample_rate = signal.sample_rate;
    env.samples.resize(n);
    if (interior.empty()) {
        const auto [mn, mx] =
            std::minmax_element(signal.samples.begin(), signal.samples.end());
        const double c = upper ? *mx : *mn;
        std::fill(env.samples.begin(), env.samples.end(), c);
        return env;
    }
    std::vector<double> xs, ys;
    xs.reserve(interior.size() + 2);
    ys.reserve(interior.size() + 2);
    if (interior.front() != 0) {
        xs.push_back(0.0);
        ys.push_back(signal.samples.front());
    }
    for (std::size_t idx : interior) {
        xs.push_back(static_cast<double>(idx));
        ys.push_back(signal.samples[idx]);
    }
    if (interior.back() != n - 1) {
        xs.push_back(static_cast<double>(n - 1));
        ys.push_back(signal.samples.back());
    }
    CubicSpline spline(std::move(xs), std::move(ys));
    for (std::size_t i = 0; i < n; ++i)
        env.samples[i] = spline(static_cast<double>(i));
    return env;
}

}  // namespace

std::pair<Signal, Signal> spline_envelopes(const Signal& signal) {
    if (signal.size() < 3)
        throw std::invalid_argument("spline_envelopes: need length >= 3");
    const Extrema ext = local_extrema(signal);
    return {envelope_through(signal, ext.maxima, true),
            envelope_through(signal, ext.minima, false)};
}

std::vector<double> analytic_envelope(const Signal& signal) {
    const std::size_t n = signal.size();
    if (n < 2) throw std::invalid_argument("analytic_envelope: need length >= 2");
    require_finite(signal, "analytic_envelope");
    std::vector<std::complex<double>> spec(n);
    for (std::size_t i = 0; i < n; ++i) spec[i] = signal.samples[i];
    fft_complex(spec, false);
    // Analytic signal: double positive frequencies, zero negative ones.
    for (std::size_t i = 1; i < (n + 1) / 2; ++i) spec[i] *= 2.0;
    for (std::size_t i = n / 2 + 1; i < n; ++i) spec[i] = 0.0;
    fft_complex(spec, true);
    std::vector<double> env(n);
    for (std::size_t i = 0; i < n; ++i) env[i] = std::abs(spec[i]);
    return env;
}

}  // namespace osl
