#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "osl/entropy.hpp"
#include "osl/vmd.hpp"

namespace osl {

/// 2-D search box: dimension 0 is the (continuous, rounded at evaluation)
/// mode count K, dimension 1 is the bandwidth penalty alpha.
struct SearchSpace {
    int k_min = 3;
    int k_max = 10;
    double alpha_min = 10.0;
    double alpha_max = 2000.0;

    void validate() const;
};

/// Objective over (K, alpha); smaller is better. Throwing evaluations are
/// treated as +inf for that particle.
using FitnessFn = std::function<double(int k, double alpha)>;

enum class InertiaKind { constant, linear };

struct PSOConfig {
    int particles = 20;
    int max_iterations = 100;
    InertiaKind inertia = InertiaKind::linear;
    double inertia_start = 0.9;   // linear schedule; use inertia_start for constant(w)
    double inertia_end = 0.4;
    double cognitive_coeff = 2.05;
    double social_coeff = 2.05;
    std::uint64_t seed = 0;

    void validate() const;
};

struct GAConfig {
    int population = 20;
    int generations = 100;
    double crossover_rate = 0.9;
    double mutation_rate = 0.1;
    double mutation_sigma_frac = 0.1;  // sigma as a fraction of each range
    int elitism = 1;
    std::uint64_t seed = 0;

    void validate() const;
};

struct OptimizeResult {
    int best_k = 0;
    double best_alpha = 0.0;
    double best_fitness = 0.0;
    std::vector<double> history;  // best-so-far per iteration, non-increasing
};

OptimizeResult pso_optimize(const SearchSpace& space, const PSOConfig& config,
                            const FitnessFn& fitness);

OptimizeResult ga_optimize(const SearchSpace& space, const GAConfig& config,
                           const FitnessFn& fitness);

/// Envelope-entropy objective for a signal: decomposes with VMD at (K, alpha)
/// and scores the result. Evaluations are cached on (K, alpha quantized to
/// 1e-6) since the swarm revisits points once it contracts.
class VmdEntropyFitness {
public:
    explicit VmdEntropyFitness(Signal signal,
                               EnvelopeEntropyConfig entropy = {},
                               VMDParams base = default_params());

    double operator()(int k, double alpha) const;

    static VMDParams default_params();

private:
    Signal signal_;
    EnvelopeEntropyConfig entropy_;
    VMDParams base_;
    mutable std::vector<std::pair<std::pair<int, long long>, double>> cache_;
};

/// Writes `iteration,best_fitness` rows for convergence reporting.
void write_history_csv(const std::string& path, const std::vector<double>& history);

}  // namespace osl
