#include <cmath>
#include <random>

#include "doctest.h"
#include "osl/emd.hpp"
#include "test_util.hpp"

using namespace osl;
using testutil::tone;

TEST_CASE("monotone ramp yields no modes, residual is the input") {
    std::vector<double> ramp(50);
    for (std::size_t i = 0; i < ramp.size(); ++i) ramp[i] = 0.1 * static_cast<double>(i);
    const IMFSet imfs = emd_decompose(Signal(ramp), EMDParams{});
    CHECK(imfs.modes.empty());
    CHECK(imfs.residual.samples == ramp);
}

TEST_CASE("first-sifted mode captures the high tone") {
    Signal f = tone(0.004, 1000);
    const Signal hi = tone(0.048, 1000, 0.5);
    for (std::size_t i = 0; i < f.size(); ++i) f.samples[i] += hi.samples[i];
    const IMFSet imfs = emd_decompose(f, EMDParams{});
    REQUIRE(!imfs.modes.empty());
    // modes are reversed to low-first, so the first-sifted one is at the back
    const Spectrum s = fft(imfs.modes.back());
    const std::size_t n = s.size();
    double above = 0.0, total = 0.0;
    for (std::size_t i = 1; i <= n / 2; ++i) {
        const double w = static_cast<double>(i) / static_cast<double>(n);
        const double e = std::norm(s.bins[i]);
        total += e;
        if (w > 0.02) above += e;
    }
    CHECK(above / total >= 0.80);
}

TEST_CASE("exact additivity on random signals") {
    std::mt19937_64 rng(9);
    for (int rep = 0; rep < 100; ++rep) {
        const auto x = testutil::random_signal(rng, 120);
        const IMFSet imfs = emd_decompose(Signal(x), EMDParams{});
        for (std::size_t i = 0; i < x.size(); ++i) {
            double sum = imfs.residual.samples[i];
            for (const auto& m : imfs.modes) sum += m.samples[i];
            CHECK(std::abs(sum - x[i]) < 1e-9);
        }
    }
}

TEST_CASE("mode cap respected") {
    std::mt19937_64 rng(10);
    const auto x = testutil::random_signal(rng, 400);
    EMDParams p;
    p.max_imfs = 3;
    const IMFSet imfs = emd_decompose(Signal(x), p);
    CHECK(imfs.modes.size() <= 3);
}

TEST_CASE("input validation") {
    CHECK_THROWS_AS(emd_decompose(Signal({1, 2, 3}), EMDParams{}),
                    std::invalid_argument);
    CHECK_THROWS_AS(
        emd_decompose(Signal({1, 2, 3, 4, 5, 6, 7, std::nan("")}), EMDParams{}),
        std::invalid_argument);
    EMDParams bad;
    bad.max_imfs = 0;
    CHECK_THROWS_AS(emd_decompose(Signal(std::vector<double>(32, 1.0)), bad),
                    std::invalid_argument);
}
