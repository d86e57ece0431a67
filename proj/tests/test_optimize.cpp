#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "osl/optimize.hpp"

using namespace osl;

TEST_CASE("pso reaches the sphere minimum") {
    // continuous 2-D sphere over [-5,5]^2 via a plain fitness lambda
    SearchSpace space;
    space.k_min = 1;
    space.k_max = 10;
    space.alpha_min = 1e-6;
    space.alpha_max = 10.0;
    PSOConfig cfg;
    cfg.seed = 7;
    // re-center so the optimum (0,0) maps inside the box at (5.5, 5.0)
    auto fitness = [](int k, double alpha) {
        const double x = static_cast<double>(k) - 5.0;
        const double y = alpha - 5.0;
        return x * x + y * y;
    };
    const OptimizeResult r = pso_optimize(space, cfg, fitness);
    CHECK(r.best_fitness <= 1e-3);
    CHECK(r.best_k == 5);
    CHECK(static_cast<int>(r.history.size()) == cfg.max_iterations);
}

TEST_CASE("pso history is non-increasing and deterministic") {
    PSOConfig cfg;
    cfg.seed = 123;
    auto fitness = [](int k, double alpha) {
        return std::sin(alpha) + static_cast<double>(k) * 0.1;
    };
    const OptimizeResult a = pso_optimize(SearchSpace{}, cfg, fitness);
    const OptimizeResult b = pso_optimize(SearchSpace{}, cfg, fitness);
    CHECK(a.history == b.history);
    CHECK(a.best_alpha == b.best_alpha);
    for (std::size_t i = 1; i < a.history.size(); ++i)
        CHECK(a.history[i] <= a.history[i - 1]);
}

TEST_CASE("constant fitness leaves the history flat") {
    PSOConfig cfg;
    cfg.seed = 1;
    const OptimizeResult r =
        pso_optimize(SearchSpace{}, cfg, [](int, double) { return 4.0; });
    for (double h : r.history) CHECK(h == 4.0);
}

TEST_CASE("failed evaluations do not kill the search") {
    PSOConfig cfg;
    cfg.seed = 5;
    auto flaky = [](int k, double alpha) -> double {
        if (alpha > 1000.0) throw std::runtime_error("unstable region");
        return std::abs(alpha - 500.0) + k;
    };
    const OptimizeResult r = pso_optimize(SearchSpace{}, cfg, flaky);
    CHECK(std::isfinite(r.best_fitness));
    CHECK(r.best_alpha <= 1000.0);
}

TEST_CASE("every evaluated point stays inside the box") {
    SearchSpace space;
    space.k_min = 2;
    space.k_max = 6;
    space.alpha_min = 50.0;
    space.alpha_max = 60.0;
    PSOConfig cfg;
    cfg.seed = 9;
    auto checked = [&](int k, double alpha) {
        CHECK(k >= space.k_min);
        CHECK(k <= space.k_max);
        CHECK(alpha >= space.alpha_min);
        CHECK(alpha <= space.alpha_max);
        return alpha;
    };
    pso_optimize(space, cfg, checked);
    GAConfig ga;
    ga.seed = 9;
    ga_optimize(space, ga, checked);
}

TEST_CASE("ga reaches the sphere region") {
    SearchSpace space;
    space.k_min = 1;
    space.k_max = 10;
    space.alpha_min = 1e-6;
    space.alpha_max = 10.0;
    GAConfig cfg;
    cfg.seed = 3;
    auto fitness = [](int k, double alpha) {
        const double x = static_cast<double>(k) - 5.0;
        const double y = alpha - 5.0;
        return x * x + y * y;
    };
    const OptimizeResult r = ga_optimize(space, cfg, fitness);
    CHECK(r.best_fitness <= 1e-2);
    for (std::size_t i = 1; i < r.history.size(); ++i)
        CHECK(r.history[i] <= r.history[i - 1]);
}

TEST_CASE("population and particle minimums") {
    PSOConfig pso;
    pso.particles = 1;
    CHECK_THROWS_AS(pso_optimize(SearchSpace{}, pso, [](int, double) { return 0.0; }),
                    std::invalid_argument);
    GAConfig ga;
    ga.population = 1;
    CHECK_THROWS_AS(ga_optimize(SearchSpace{}, ga, [](int, double) { return 0.0; }),
                    std::invalid_argument);
}

TEST_CASE("fitness cache returns identical values") {
    std::vector<double> sig(64);
    for (std::size_t i = 0; i < sig.size(); ++i)
        sig[i] = std::cos(0.3 * static_cast<double>(i)) +
                 0.2 * std::cos(1.1 * static_cast<double>(i));
    VmdEntropyFitness fitness{Signal(sig)};
    const double a = fitness(2, 100.0);
    const double b = fitness(2, 100.0);
    CHECK(a == b);
}
