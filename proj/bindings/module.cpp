#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <algorithm>
#include <filesystem>

#include "osl/config.hpp"
#include "osl/pipeline.hpp"

namespace py = pybind11;
using namespace osl;

namespace {

py::dict imfset_to_dict(const IMFSet& imfs) {
    py::list modes;
    for (const auto& m : imfs.modes) modes.append(m.samples);
    py::dict d;
    d["modes"] = modes;
    d["center_frequencies"] = imfs.center_frequencies;
    d["residual"] = imfs.residual.samples;
    d["iterations_used"] = imfs.iterations_used;
    d["final_update_norm"] = imfs.final_update_norm;
    return d;
}

IMFSet imfset_from_lists(const std::vector<std::vector<double>>& modes,
                         const std::vector<double>& residual) {
    IMFSet imfs;
    for (const auto& m : modes) imfs.modes.emplace_back(m);
    imfs.center_frequencies.assign(imfs.modes.size(), 0.0);
    if (!residual.empty()) imfs.residual = Signal(residual);
    return imfs;
}

}  // namespace

PYBIND11_MODULE(_osl, m) {
    m.doc() = "Signal decomposition and battery SoH estimation toolkit";

    m.def(
        "vmd_decompose",
        [](const std::vector<double>& signal, int k, double alpha, double tau,
           double tolerance, int max_iterations, bool dc_mode) {
            VMDParams p;
            p.k = k;
            p.alpha = alpha;
            p.tau = tau;
            p.tolerance = tolerance;
            p.max_iterations = max_iterations;
            p.dc_mode = dc_mode;
            return imfset_to_dict(vmd_decompose(Signal(signal), p));
        },
        py::arg("signal"), py::arg("k") = 3, py::arg("alpha") = 2000.0,
        py::arg("tau") = 0.0, py::arg("tolerance") = 1e-7,
        py::arg("max_iterations") = 500, py::arg("dc_mode") = false,
        "Variational mode decomposition; modes come back lowest-frequency first.");

    m.def(
        "emd_decompose",
        [](const std::vector<double>& signal, int max_imfs, double sd_threshold,
           int max_sifts) {
            EMDParams p;
            p.max_imfs = max_imfs;
            p.sift_sd_threshold = sd_threshold;
            p.max_sifts_per_imf = max_sifts;
            return imfset_to_dict(emd_decompose(Signal(signal), p));
        },
        py::arg("signal"), py::arg("max_imfs") = 3,
        py::arg("sd_threshold") = 0.2, py::arg("max_sifts") = 100,
        "Empirical mode decomposition by sifting; residual carries the trend.");

    m.def(
        "envelope_entropy",
        [](const std::vector<std::vector<double>>& modes, double epsilon_floor,
           const std::string& kind) {
            EnvelopeEntropyConfig cfg;
            cfg.epsilon_floor = epsilon_floor;
            if (kind == "spline") cfg.envelope_kind = EnvelopeKind::spline_mean_abs;
            else if (kind == "analytic") cfg.envelope_kind = EnvelopeKind::analytic_magnitude;
            else throw std::invalid_argument("kind must be 'spline' or 'analytic'");
            return envelope_entropy(imfset_from_lists(modes, {}), cfg);
        },
        py::arg("modes"), py::arg("epsilon_floor") = 1e-12,
        py::arg("kind") = "spline",
        "Envelope entropy (nats) summed over modes.");

    m.def(
        "pso_optimize_vmd",
        [](const std::vector<double>& signal, int k_min, int k_max,
           double alpha_min, double alpha_max, int particles, int iterations,
           std::uint64_t seed) {
            SearchSpace space{k_min, k_max, alpha_min, alpha_max};
            PSOConfig cfg;
            cfg.particles = particles;
            cfg.max_iterations = iterations;
            cfg.seed = seed;
            VmdEntropyFitness fitness{Signal(signal)};
            const OptimizeResult r = pso_optimize(
                space, cfg, [&](int k, double a) { return fitness(k, a); });
            py::dict d;
            d["k"] = r.best_k;
            d["alpha"] = r.best_alpha;
            d["fitness"] = r.best_fitness;
            d["history"] = r.history;
            return d;
        },
        py::arg("signal"), py::arg("k_min") = 3, py::arg("k_max") = 10,
        py::arg("alpha_min") = 10.0, py::arg("alpha_max") = 2000.0,
        py::arg("particles") = 20, py::arg("iterations") = 100,
        py::arg("seed") = 0,
        "PSO search over (K, alpha) minimizing envelope entropy.");

    m.def(
        "metrics",
        [](const std::vector<double>& y_pct, const std::vector<double>& yhat_pct) {
            const Metrics mm = metrics(SoHSeries{y_pct}, SoHSeries{yhat_pct});
            py::dict d;
            d["rmse"] = mm.rmse;
            d["mae"] = mm.mae;
            d["mape"] = mm.mape;
            return d;
        },
        py::arg("y_pct"), py::arg("yhat_pct"),
        "RMSE/MAE (SoH percentage points) and MAPE (percent).");

    m.def(
        "load_battery_csv",
        [](const std::string& path) {
            const BatteryRecord rec = load_battery_csv(path);
            py::dict d;
            d["battery_id"] = rec.battery_id;
            d["capacities_ah"] = rec.capacities_ah;
            d["rated_capacity_ah"] = rec.rated_capacity_ah;
            return d;
        },
        py::arg("path"), "Reads the cycle,capacity_ah schema.");

    m.def(
        "compute_soh",
        [](const std::vector<double>& capacities, double rated) {
            BatteryRecord rec;
            rec.capacities_ah = capacities;
            rec.rated_capacity_ah = rated;
            return compute_soh(rec).values_pct;
        },
        py::arg("capacities_ah"), py::arg("rated_capacity_ah") = 2.0,
        "SoH percent per cycle.");

    m.def(
        "run_experiment",
        [](const std::string& data_dir, const std::string& held_out,
           const std::string& method, std::uint64_t seed, int t_in, int epochs) {
            RunConfig cfg;
            cfg.t_in = t_in;
            cfg.train.epochs = epochs;
            std::vector<BatteryRecord> batteries;
            // keep binding self-contained: accept a directory of CSVs
            namespace fs = std::filesystem;
            std::vector<std::string> paths;
            for (const auto& e : fs::directory_iterator(data_dir))
                if (e.path().extension() == ".csv") paths.push_back(e.path().string());
            std::sort(paths.begin(), paths.end());
            for (const auto& p : paths) batteries.push_back(load_battery_csv(p));
            ExperimentConfig ec;
            ec.method = method_from_string(method);
            ec.t_in = cfg.t_in;
            ec.master_seed = seed;
            ec.training = cfg.train;
            ec.search = cfg.search;
            ec.pso = cfg.pso;
            ec.emd = cfg.emd;
            const ExperimentResult r = run_experiment(batteries, held_out, ec);
            py::dict d;
            d["rmse"] = r.test_metrics.rmse;
            d["mae"] = r.test_metrics.mae;
            d["mape"] = r.test_metrics.mape;
            d["predictions_pct"] = r.predictions_pct;
            d["targets_pct"] = r.targets_pct;
            return d;
        },
        py::arg("data_dir"), py::arg("held_out"), py::arg("method") = "osl",
        py::arg("seed") = 0, py::arg("t_in") = 16, py::arg("epochs") = 200,
        "Leave-one-battery-out experiment over a directory of battery CSVs.");
}
