#include "osl/config.hpp"

#include <cstdlib>
#include <fstream>
#include <stdexcept>

namespace osl {

RunConfig::RunConfig() {
    vmd = VmdEntropyFitness::default_params();
}

namespace {

int to_int(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        const int x = std::stoi(v, &used);
        if (used != v.size()) throw std::invalid_argument("trailing");
        return x;
    } catch (const std::exception&) {
        throw std::invalid_argument("config: bad integer for " + key + ": '" + v + "'");
    }
}

double to_double(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        const double x = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument("trailing");
        return x;
    } catch (const std::exception&) {
        throw std::invalid_argument("config: bad number for " + key + ": '" + v + "'");
    }
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "on") return true;
    if (v == "false" || v == "0" || v == "off") return false;
    throw std::invalid_argument("config: bad boolean for " + key + ": '" + v + "'");
}

}  // namespace

void RunConfig::apply(const std::string& key, const std::string& value) {
    if (key == "tin") t_in = to_int(key, value);
    else if (key == "rated_capacity") rated_capacity = to_double(key, value);
    else if (key == "causal") causal = to_bool(key, value);
    else if (key == "vmd.tau") vmd.tau = to_double(key, value);
    else if (key == "vmd.tolerance") vmd.tolerance = to_double(key, value);
    else if (key == "vmd.max_iterations") vmd.max_iterations = to_int(key, value);
    else if (key == "vmd.dc_mode") vmd.dc_mode = to_bool(key, value);
    else if (key == "emd.max_imfs") emd.max_imfs = to_int(key, value);
    else if (key == "emd.sift_sd_threshold") emd.sift_sd_threshold = to_double(key, value);
    else if (key == "emd.max_sifts") emd.max_sifts_per_imf = to_int(key, value);
    else if (key == "search.k_min") search.k_min = to_int(key, value);
    else if (key == "search.k_max") search.k_max = to_int(key, value);
    else if (key == "search.alpha_min") search.alpha_min = to_double(key, value);
    else if (key == "search.alpha_max") search.alpha_max = to_double(key, value);
    else if (key == "pso.particles") pso.particles = to_int(key, value);
    else if (key == "pso.iterations") pso.max_iterations = to_int(key, value);
    else if (key == "pso.inertia") {
        if (value == "linear") pso.inertia = InertiaKind::linear;
        else if (value == "constant") pso.inertia = InertiaKind::constant;
        else throw std::invalid_argument("config: pso.inertia must be linear or constant");
    } else if (key == "pso.inertia_start") pso.inertia_start = to_double(key, value);
    else if (key == "pso.inertia_end") pso.inertia_end = to_double(key, value);
    else if (key == "pso.cognitive") pso.cognitive_coeff = to_double(key, value);
    else if (key == "pso.social") pso.social_coeff = to_double(key, value);
    else if (key == "ga.population") ga.population = to_int(key, value);
    else if (key == "ga.generations") ga.generations = to_int(key, value);
    else if (key == "ga.crossover_rate") ga.crossover_rate = to_double(key, value);
    else if (key == "ga.mutation_rate") ga.mutation_rate = to_double(key, value);
    else if (key == "train.learning_rate") train.learning_rate = to_double(key, value);
    else if (key == "train.epochs") train.epochs = to_int(key, value);
    else if (key == "train.batch_size") train.batch_size = to_int(key, value);
    else if (key == "entropy.kind") {
        if (value == "spline") entropy.envelope_kind = EnvelopeKind::spline_mean_abs;
        else if (value == "analytic") entropy.envelope_kind = EnvelopeKind::analytic_magnitude;
        else throw std::invalid_argument("config: entropy.kind must be spline or analytic");
    } else if (key == "entropy.min_over_modes") entropy.min_over_modes = to_bool(key, value);
    else throw std::invalid_argument("config: unknown key '" + key + "'");
}

void RunConfig::apply_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config " + path);
    std::string line;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        // trim
        const auto b = line.find_first_not_of(" \t");
        if (b == std::string::npos) continue;
        const auto e = line.find_last_not_of(" \t");
        line = line.substr(b, e - b + 1);
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(path + ": line " + std::to_string(row) +
                                     ": expected key=value");
        auto trim = [](std::string s) {
            const auto b2 = s.find_first_not_of(" \t");
            if (b2 == std::string::npos) return std::string();
            const auto e2 = s.find_last_not_of(" \t");
            return s.substr(b2, e2 - b2 + 1);
        };
        apply(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
}

RunConfig load_run_config(const std::string& explicit_path) {
    RunConfig cfg;
    std::string path = explicit_path;
    if (path.empty()) {
        if (const char* env = std::getenv("OSL_CONFIG")) path = env;
    }
    if (!path.empty()) cfg.apply_file(path);
    return cfg;
}

}  // namespace osl
