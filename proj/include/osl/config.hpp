#pragma once

#include <string>

#include "osl/emd.hpp"
#include "osl/entropy.hpp"
#include "osl/nn.hpp"
#include "osl/optimize.hpp"
#include "osl/vmd.hpp"

namespace osl {

/// Flat key=value run configuration. Precedence is command-line flag >
/// config file > built-in default; unknown keys are rejected.
struct RunConfig {
    int t_in = 16;
    double rated_capacity = 2.0;
    bool causal = false;
    VMDParams vmd;
    EMDParams emd;
    SearchSpace search;
    PSOConfig pso;
    GAConfig ga;
    nn::TrainConfig train;
    EnvelopeEntropyConfig entropy;

    RunConfig();

    /// Applies `key=value` lines from a file; '#' starts a comment.
    void apply_file(const std::string& path);
    void apply(const std::string& key, const std::string& value);
};

/// Loads the config named by --config, falling back to the OSL_CONFIG
/// environment variable; returns defaults when neither is set.
RunConfig load_run_config(const std::string& explicit_path);

}  // namespace osl
