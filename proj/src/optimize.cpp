#include "osl/optimize.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

namespace osl {

void SearchSpace::validate() const {
    if (k_min < 1) throw std::invalid_argument("SearchSpace: k_min must be >= 1");
    if (k_max < k_min) throw std::invalid_argument("SearchSpace: empty K range");
    if (!(alpha_min > 0.0)) throw std::invalid_argument("SearchSpace: alpha_min must be > 0");
    if (!(alpha_max >= alpha_min)) throw std::invalid_argument("SearchSpace: empty alpha range");
}

void PSOConfig::validate() const {
    if (particles < 2) throw std::invalid_argument("PSOConfig: need >= 2 particles");
    if (max_iterations < 1) throw std::invalid_argument("PSOConfig: max_iterations must be > 0");
    if (!(cognitive_coeff > 0.0) || !(social_coeff > 0.0))
        throw std::invalid_argument("PSOConfig: coefficients must be > 0");
}

void GAConfig::validate() const {
    if (population < 2) throw std::invalid_argument("GAConfig: need population >= 2");
    if (generations < 1) throw std::invalid_argument("GAConfig: generations must be > 0");
    if (elitism < 0 || elitism >= population)
        throw std::invalid_argument("GAConfig: elitism out of range");
}

namespace {

double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double gaussian(std::mt19937_64& rng) {
    // Box-Muller, one sample per call; deterministic across platforms.
    double u1 = uniform01(rng);
    const double u2 = uniform01(rng);
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

int round_k(double pos, const SearchSpace& space) {
    const int k = static_cast<int>(std::lround(pos));
    return std::clamp(k, space.k_min, space.k_max);
}

double safe_eval(const FitnessFn& fitness, int k, double alpha) {
    try {
        const double f = fitness(k, alpha);
        return std::isfinite(f) ? f : std::numeric_limits<double>::infinity();
    } catch (...) {
        return std::numeric_limits<double>::infinity();
    }
}

}  // namespace

OptimizeResult pso_optimize(const SearchSpace& space, const PSOConfig& config,
                            const FitnessFn& fitness) {
    space.validate();
    config.validate();
    std::mt19937_64 rng(config.seed);

    const int p = config.particles;
    const double lo[2] = {static_cast<double>(space.k_min), space.alpha_min};
    const double hi[2] = {static_cast<double>(space.k_max), space.alpha_max};

    std::vector<std::array<double, 2>> pos(p), vel(p, {0.0, 0.0}), pbest(p);
    std::vector<double> pbest_fit(p);
    for (int i = 0; i < p; ++i) {
        for (int d = 0; d < 2; ++d)
            pos[i][d] = lo[d] + uniform01(rng) * (hi[d] - lo[d]);
        pbest[i] = pos[i];
        pbest_fit[i] = safe_eval(fitness, round_k(pos[i][0], space), pos[i][1]);
    }
    int gbest = 0;
    for (int i = 1; i < p; ++i)
        if (pbest_fit[i] < pbest_fit[gbest]) gbest = i;

    OptimizeResult out;
    out.history.reserve(config.max_iterations);
    for (int it = 0; it < config.max_iterations; ++it) {
        double w = config.inertia_start;
        if (config.inertia == InertiaKind::linear && config.max_iterations > 1) {
            w = config.inertia_start +
                (config.inertia_end - config.inertia_start) *
                    (static_cast<double>(it) /
                     static_cast<double>(config.max_iterations - 1));
        }
        for (int i = 0; i < p; ++i) {
            for (int d = 0; d < 2; ++d) {
                const double r1 = uniform01(rng);
                const double r2 = uniform01(rng);
                vel[i][d] = w * vel[i][d] +
                            config.cognitive_coeff * r1 * (pbest[i][d] - pos[i][d]) +
                            config.social_coeff * r2 * (pbest[gbest][d] - pos[i][d]);
                pos[i][d] += vel[i][d];
                if (pos[i][d] < lo[d]) {
                    pos[i][d] = lo[d];
                    vel[i][d] = 0.0;
                } else if (pos[i][d] > hi[d]) {
                    pos[i][d] = hi[d];
                    vel[i][d] = 0.0;
                }
            }
            const double f = safe_eval(fitness, round_k(pos[i][0], space), pos[i][1]);
            if (f < pbest_fit[i]) {
                pbest_fit[i] = f;
                pbest[i] = pos[i];
            }
        }
        // Synchronous global-best reduction; index order breaks ties.
        gbest = 0;
        for (int i = 1; i < p; ++i)
            if (pbest_fit[i] < pbest_fit[gbest]) gbest = i;
        out.history.push_back(pbest_fit[gbest]);
    }

    out.best_k = round_k(pbest[gbest][0], space);
    out.best_alpha = pbest[gbest][1];
    out.best_fitness = pbest_fit[gbest];
    return out;
}

OptimizeResult ga_optimize(const SearchSpace& space, const GAConfig& config,
                           const FitnessFn& fitness) {
    space.validate();
    config.validate();
    std::mt19937_64 rng(config.seed);

    const int p = config.population;
    const double lo[2] = {static_cast<double>(space.k_min), space.alpha_min};
    const double hi[2] = {static_cast<double>(space.k_max), space.alpha_max};

    std::vector<std::array<double, 2>> genomes(p);
    std::vector<double> fit(p);
    for (int i = 0; i < p; ++i) {
        for (int d = 0; d < 2; ++d)
            genomes[i][d] = lo[d] + uniform01(rng) * (hi[d] - lo[d]);
        fit[i] = safe_eval(fitness, round_k(genomes[i][0], space), genomes[i][1]);
    }

    auto best_index = [&](const std::vector<double>& f) {
        int b = 0;
        for (int i = 1; i < static_cast<int>(f.size()); ++i)
            if (f[i] < f[b]) b = i;
        return b;
    };
    auto tournament = [&]() -> int {
        const int a = static_cast<int>(rng() % static_cast<std::uint64_t>(p));
        const int b = static_cast<int>(rng() % static_cast<std::uint64_t>(p));
        if (fit[a] == fit[b]) return std::min(a, b);
        return fit[a] < fit[b] ? a : b;
    };

    OptimizeResult out;
    out.history.reserve(config.generations);
    double best_so_far = fit[best_index(fit)];
    std::array<double, 2> best_genome = genomes[best_index(fit)];

    for (int gen = 0; gen < config.generations; ++gen) {
        std::vector<std::array<double, 2>> next;
        next.reserve(p);
        for (int e = 0; e < config.elitism; ++e)
            next.push_back(genomes[best_index(fit)]);
        while (static_cast<int>(next.size()) < p) {
            const int pa = tournament();
            const int pb = tournament();
            std::array<double, 2> child = genomes[pa];
            if (uniform01(rng) < config.crossover_rate) {
                for (int d = 0; d < 2; ++d)
                    if (uniform01(rng) < 0.5) child[d] = genomes[pb][d];
            }
            for (int d = 0; d < 2; ++d) {
                if (uniform01(rng) < config.mutation_rate) {
                    child[d] += gaussian(rng) * config.mutation_sigma_frac *
                                (hi[d] - lo[d]);
                    child[d] = std::clamp(child[d], lo[d], hi[d]);
                }
            }
            next.push_back(child);
        }
        genomes = std::move(next);
        for (int i = 0; i < p; ++i)
            fit[i] = safe_eval(fitness, round_k(genomes[i][0], space), genomes[i][1]);
        const int b = best_index(fit);
        if (fit[b] < best_so_far) {
            best_so_far = fit[b];
            best_genome = genomes[b];
        }
        out.history.push_back(best_so_far);
    }

    out.best_k = round_k(best_genome[0], space);
    out.best_alpha = best_genome[1];
    out.best_fitness = best_so_far;
    return out;
}

VMDParams VmdEntropyFitness::default_params() {
    VMDParams p;
    p.tau = 0.0;
    p.tolerance = 1e-7;
    p.max_iterations = 500;
    p.dc_mode = false;
    return p;
}

VmdEntropyFitness::VmdEntropyFitness(Signal signal, EnvelopeEntropyConfig entropy,
                                     VMDParams base)
    : signal_(std::move(signal)), entropy_(entropy), base_(base) {}

double VmdEntropyFitness::operator()(int k, double alpha) const {
    const long long qa = static_cast<long long>(std::llround(alpha * 1e6));
    const std::pair<int, long long> key{k, qa};
    for (const auto& [ck, cv] : cache_)
        if (ck == key) return cv;
    VMDParams p = base_;
    p.k = k;
    p.alpha = alpha;
    const double h = envelope_entropy(vmd_decompose(signal_, p), entropy_);
    cache_.emplace_back(key, h);
    return h;
}

void write_history_csv(const std::string& path, const std::vector<double>& history) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    std::fprintf(f, "iteration,best_fitness\n");
    for (std::size_t i = 0; i < history.size(); ++i)
        std::fprintf(f, "%zu,%.17g\n", i + 1, history[i]);
    std::fclose(f);
}

}  // namespace osl
