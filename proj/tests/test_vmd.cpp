#include <cmath>
#include <random>

#include "doctest.h"
#include "osl/vmd.hpp"
#include "test_util.hpp"

using namespace osl;
using testutil::tone;

namespace {

Signal two_tone(std::size_t n) {
    Signal a = tone(0.004, n);
    const Signal b = tone(0.048, n, 0.5);
    for (std::size_t i = 0; i < n; ++i) a.samples[i] += b.samples[i];
    return a;
}

}  // namespace

TEST_CASE("single tone is recovered") {
    const Signal f = tone(0.01, 1000);
    VMDParams p;
    p.k = 1;
    p.alpha = 2000.0;
    p.tau = 0.1;
    const IMFSet imfs = vmd_decompose(f, p);
    REQUIRE(imfs.modes.size() == 1);
    CHECK(std::abs(imfs.center_frequencies[0] - 0.01) < 0.02 * 0.01);
    CHECK(testutil::rel_l2(f.samples, imfs.modes[0].samples) <= 1e-2);
}

TEST_CASE("two tones separate into two modes") {
    const Signal f = two_tone(1000);
    VMDParams p;
    p.k = 2;
    p.alpha = 2000.0;
    p.tau = 0.1;
    const IMFSet imfs = vmd_decompose(f, p);
    REQUIRE(imfs.modes.size() == 2);
    CHECK(std::abs(imfs.center_frequencies[0] - 0.004) / 0.004 < 0.05);
    CHECK(std::abs(imfs.center_frequencies[1] - 0.048) / 0.048 < 0.05);
    CHECK(reconstruction_error(f, imfs) <= 1e-2);
}

TEST_CASE("constant signal with dc mode") {
    const Signal f(std::vector<double>(64, 3.25));
    VMDParams p;
    p.k = 1;
    p.dc_mode = true;
    p.alpha = 2000.0;
    const IMFSet imfs = vmd_decompose(f, p);
    CHECK(imfs.center_frequencies[0] == 0.0);
    for (double v : imfs.modes[0].samples)
        CHECK(v == doctest::Approx(3.25).epsilon(1e-6));
}

TEST_CASE("reconstruction_error trivial cases") {
    const Signal f(std::vector<double>{1, 2, 3, 4});
    IMFSet exact;
    exact.modes = {Signal({0.5, 1.0, 1.5, 2.0}), Signal({0.5, 1.0, 1.5, 2.0})};
    CHECK(reconstruction_error(f, exact) == doctest::Approx(0.0));

    IMFSet padded;
    padded.modes = {f, Signal({0, 0, 0, 0}), Signal({0, 0, 0, 0})};
    CHECK(reconstruction_error(f, padded) == doctest::Approx(0.0));

    IMFSet bad;
    bad.modes = {Signal({1, 2, 3})};
    CHECK_THROWS_AS(reconstruction_error(f, bad), std::invalid_argument);
}

TEST_CASE("mode spectral energy concentrates near its center frequency") {
    const Signal f = two_tone(1000);
    VMDParams p;
    p.k = 2;
    p.alpha = 2000.0;
    p.tau = 0.1;
    const IMFSet imfs = vmd_decompose(f, p);
    for (std::size_t k = 0; k < 2; ++k) {
        const Spectrum s = fft(imfs.modes[k]);
        const std::size_t n = s.size();
        double inside = 0.0, total = 0.0;
        for (std::size_t i = 0; i <= n / 2; ++i) {
            const double w = static_cast<double>(i) / static_cast<double>(n);
            const double e = std::norm(s.bins[i]);
            total += e;
            if (std::abs(w - imfs.center_frequencies[k]) <= 0.01) inside += e;
        }
        CHECK(inside / total >= 0.95);
    }
}

TEST_CASE("amplitude linearity") {
    const Signal f = two_tone(300);
    Signal scaled = f;
    const double c = 3.7;
    for (auto& v : scaled.samples) v *= c;
    VMDParams p;
    p.k = 2;
    p.alpha = 500.0;
    p.tau = 0.1;
    const IMFSet a = vmd_decompose(f, p);
    const IMFSet b = vmd_decompose(scaled, p);
    for (std::size_t k = 0; k < 2; ++k) {
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < f.size(); ++i) {
            const double d = b.modes[k].samples[i] - c * a.modes[k].samples[i];
            num += d * d;
            den += b.modes[k].samples[i] * b.modes[k].samples[i];
        }
        CHECK(std::sqrt(num / den) < 1e-6);
    }
}

TEST_CASE("center frequencies stay in the Nyquist band") {
    std::mt19937_64 rng(77);
    for (int rep = 0; rep < 10; ++rep) {
        const Signal f(testutil::random_signal(rng, 200));
        VMDParams p;
        p.k = 4;
        p.alpha = 200.0;
        p.max_iterations = 100;
        const IMFSet imfs = vmd_decompose(f, p);
        for (std::size_t k = 0; k + 1 < imfs.center_frequencies.size(); ++k)
            CHECK(imfs.center_frequencies[k] <= imfs.center_frequencies[k + 1]);
        for (double w : imfs.center_frequencies) {
            CHECK(w >= 0.0);
            CHECK(w <= 0.5);
        }
    }
}

TEST_CASE("convergence is reported through final_update_norm") {
    const Signal f = tone(0.05, 500);
    VMDParams p;
    p.k = 1;
    p.alpha = 2000.0;
    const IMFSet imfs = vmd_decompose(f, p);
    CHECK(imfs.converged(p.tolerance));
    CHECK(imfs.final_update_norm <= p.tolerance);
    CHECK(imfs.iterations_used <= p.max_iterations);
}

TEST_CASE("parameter validation") {
    const Signal f = tone(0.05, 100);
    VMDParams p;
    p.k = 0;
    CHECK_THROWS_AS(vmd_decompose(f, p), std::invalid_argument);
    p.k = 2;
    p.alpha = -1.0;
    CHECK_THROWS_AS(vmd_decompose(f, p), std::invalid_argument);
    CHECK_THROWS_AS(vmd_decompose(Signal({1, 2, 3}), VMDParams{}),
                    std::invalid_argument);
}
