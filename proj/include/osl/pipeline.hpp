#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "osl/emd.hpp"
#include "osl/nn.hpp"
#include "osl/optimize.hpp"
#include "osl/vmd.hpp"

namespace osl {

struct BatteryRecord {
    std::string battery_id;
    std::vector<double> capacities_ah;  // per cycle, file order
    double rated_capacity_ah = 2.0;
};

/// SoH in percent per cycle: 100 * capacity / rated. End of life is 70%.
struct SoHSeries {
    std::vector<double> values_pct;
};

/// Parses the `cycle,capacity_ah` schema. Cycles must be strictly
/// increasing positive integers, capacities positive; violations are
/// reported with their row number.
BatteryRecord load_battery_csv(const std::string& path);

SoHSeries compute_soh(const BatteryRecord& record);

enum class Method { osl, vmd_lstm, emd_lstm };

Method method_from_string(const std::string& name);
std::string method_to_string(Method m);

struct WindowedDataset {
    std::vector<nn::Mat> inputs;    // T_in x channels, capacity scale (fraction of rated)
    std::vector<double> targets;    // SoH fraction in [0,1]
    std::vector<std::string> battery_ids;
    std::vector<int> target_cycles;  // index t of each target
    int channels = 0;
};

struct DecompositionChoice {
    bool use_vmd = true;
    VMDParams vmd;   // per-battery (K, alpha) when use_vmd
    EMDParams emd;   // EMD baseline: residual is prepended as a channel
    /// Strictly-causal mode: re-decompose the prefix [0, t) for each window
    /// instead of decomposing the full series once. Slow; off by default.
    bool causal = false;
};

/// Decomposes the normalized capacity series and slices aligned windows
/// across all channels; the target is the SoH fraction at t.
WindowedDataset build_windows(const BatteryRecord& record,
                              const DecompositionChoice& choice, int t_in);

struct Metrics {
    double rmse = 0.0;  // SoH percentage points
    double mae = 0.0;   // SoH percentage points
    double mape = 0.0;  // percent
};

Metrics metrics(const SoHSeries& y, const SoHSeries& y_hat);

/// Per-battery decomposition parameters, typically from PSO.
struct BatteryVmdParams {
    int k = 3;
    double alpha = 30.0;
};

struct ExperimentConfig {
    Method method = Method::osl;
    int t_in = 16;
    std::uint64_t master_seed = 0;
    nn::TrainConfig training;
    SearchSpace search;      // PSO box for (K, alpha)
    PSOConfig pso;
    EMDParams emd;
    /// When set, skips the per-battery PSO and uses these instead.
    std::optional<std::map<std::string, BatteryVmdParams>> vmd_params;
};

struct ExperimentResult {
    std::string held_out;
    Method method = Method::osl;
    Metrics test_metrics;
    std::vector<double> predictions_pct;  // held-out battery, per window
    std::vector<double> targets_pct;
    std::vector<double> loss_history;
    std::map<std::string, BatteryVmdParams> per_battery_params;
    std::shared_ptr<nn::Network> network;  // the trained estimator
};

/// Leave-one-battery-out: optimizes (K, alpha) per battery (VMD methods),
/// trains on the other batteries' windows, evaluates on the held-out one.
/// Deterministic for a fixed master seed.
ExperimentResult run_experiment(const std::vector<BatteryRecord>& batteries,
                                const std::string& held_out,
                                const ExperimentConfig& config);

/// `battery,method,rmse_pct,mae_pct,mape_pct` rows.
void write_metrics_csv(const std::string& path,
                       const std::vector<ExperimentResult>& results);
std::string metrics_table(const std::vector<ExperimentResult>& results);

/// `cycle,imf1,...,imfK[,residual]` in the input's units.
void write_imf_csv(const std::string& path, const IMFSet& imfs,
                   bool include_residual);

// --- model persistence (versioned flat text, "oslmodel v1") ---

struct SavedModel {
    nn::Network network;
    Method method = Method::osl;
    int t_in = 16;
    std::uint64_t seed = 0;
    EMDParams emd;
    std::map<std::string, BatteryVmdParams> per_battery_params;
};

void save_model(const std::string& path, const SavedModel& model);
SavedModel load_model(const std::string& path);

}  // namespace osl
