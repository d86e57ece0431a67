#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "osl/config.hpp"
#include "osl/pipeline.hpp"
#include "osl/svg.hpp"

namespace fs = std::filesystem;
using namespace osl;

namespace {

std::vector<BatteryRecord> load_dataset(const std::string& dir, double rated) {
    std::vector<std::string> paths;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.path().extension() == ".csv") paths.push_back(entry.path().string());
    }
    std::sort(paths.begin(), paths.end());
    if (paths.empty()) throw std::runtime_error("no .csv files in " + dir);
    std::vector<BatteryRecord> out;
    for (const auto& p : paths) {
        BatteryRecord rec = load_battery_csv(p);
        rec.rated_capacity_ah = rated;
        out.push_back(std::move(rec));
    }
    return out;
}

// Minimal numeric-CSV reader for the plot subcommand.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> data;  // per column
};

Table read_numeric_csv(const std::string& path, std::size_t skip_cols = 0) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    Table t;
    std::stringstream hs(line);
    std::string cell;
    while (std::getline(hs, cell, ',')) t.columns.push_back(cell);
    t.data.resize(t.columns.size());
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::stringstream ls(line);
        std::size_t col = 0;
        while (std::getline(ls, cell, ',')) {
            if (col >= t.columns.size())
                throw std::runtime_error(path + ": too many columns in row");
            if (col >= skip_cols) t.data[col].push_back(std::stod(cell));
            ++col;
        }
    }
    return t;
}

int cmd_decompose(const std::string& input, const std::string& method, int k,
                  double alpha, double tau, const std::string& out,
                  const RunConfig& cfg) {
    BatteryRecord rec = load_battery_csv(input);
    Signal sig(rec.capacities_ah);
    IMFSet imfs;
    bool residual = false;
    if (method == "vmd") {
        VMDParams p = cfg.vmd;
        p.k = k;
        p.alpha = alpha;
        p.tau = tau;
        imfs = vmd_decompose(sig, p);
    } else if (method == "emd") {
        EMDParams p = cfg.emd;
        imfs = emd_decompose(sig, p);
        residual = true;
    } else {
        throw std::invalid_argument("method must be vmd or emd");
    }
    write_imf_csv(out, imfs, residual);
    std::printf("modes: %zu\n", imfs.modes.size());
    std::printf("reconstruction_error: %.6g\n", reconstruction_error(sig, imfs));
    if (method == "vmd") {
        std::printf("center_frequencies:");
        for (double w : imfs.center_frequencies) std::printf(" %.6g", w);
        std::printf("\n");
    }
    return 0;
}

int cmd_optimize(const std::string& input, const std::string& optimizer,
                 std::uint64_t seed, const std::string& out, const RunConfig& cfg) {
    BatteryRecord rec = load_battery_csv(input);
    VmdEntropyFitness fitness{Signal(rec.capacities_ah), cfg.entropy, cfg.vmd};
    OptimizeResult r;
    if (optimizer == "pso") {
        PSOConfig pso = cfg.pso;
        pso.seed = seed;
        r = pso_optimize(cfg.search, pso,
                         [&](int k, double a) { return fitness(k, a); });
    } else if (optimizer == "ga") {
        GAConfig ga = cfg.ga;
        ga.seed = seed;
        r = ga_optimize(cfg.search, ga,
                        [&](int k, double a) { return fitness(k, a); });
    } else {
        throw std::invalid_argument("optimizer must be pso or ga");
    }
    if (!out.empty()) write_history_csv(out, r.history);
    std::printf("K=%d\n", r.best_k);
    std::printf("alpha=%.6g\n", r.best_alpha);
    std::printf("fitness=%.10g\n", r.best_fitness);
    return 0;
}

ExperimentConfig experiment_config(const RunConfig& cfg, Method method,
                                   std::uint64_t seed) {
    ExperimentConfig ec;
    ec.method = method;
    ec.t_in = cfg.t_in;
    ec.master_seed = seed;
    ec.training = cfg.train;
    ec.search = cfg.search;
    ec.pso = cfg.pso;
    ec.emd = cfg.emd;
    return ec;
}

int cmd_train(const std::string& data_dir, const std::string& test_id,
              const std::string& method_name, std::uint64_t seed,
              const std::string& model_out, const RunConfig& cfg) {
    const Method method = method_from_string(method_name);
    const auto batteries = load_dataset(data_dir, cfg.rated_capacity);
    const ExperimentResult r =
        run_experiment(batteries, test_id, experiment_config(cfg, method, seed));
    SavedModel model{*r.network, method, cfg.t_in, seed, cfg.emd,
                     r.per_battery_params};
    save_model(model_out, model);
    std::printf("trained %s, held out %s\n", method_name.c_str(), test_id.c_str());
    std::printf("epochs: %zu\n", r.loss_history.size());
    if (!r.loss_history.empty()) {
        std::printf("first_epoch_loss: %.6g\n", r.loss_history.front());
        std::printf("final_epoch_loss: %.6g\n", r.loss_history.back());
    }
    std::printf("model: %s\n", model_out.c_str());
    return 0;
}

int cmd_evaluate(const std::string& model_path, const std::string& data_dir,
                 const std::string& test_id, const std::string& report_out,
                 const RunConfig& cfg) {
    const SavedModel model = load_model(model_path);
    const auto batteries = load_dataset(data_dir, cfg.rated_capacity);
    const auto it = std::find_if(
        batteries.begin(), batteries.end(),
        [&](const BatteryRecord& b) { return b.battery_id == test_id; });
    if (it == batteries.end())
        throw std::runtime_error("battery '" + test_id + "' not found in " + data_dir);

    DecompositionChoice choice;
    if (model.method == Method::emd_lstm) {
        choice.use_vmd = false;
        choice.emd = model.emd;
    } else {
        choice.use_vmd = true;
        choice.vmd = cfg.vmd;
        const auto pit = model.per_battery_params.find(test_id);
        if (pit == model.per_battery_params.end())
            throw std::runtime_error("model has no VMD params for " + test_id);
        choice.vmd.k = pit->second.k;
        choice.vmd.alpha = pit->second.alpha;
    }
    WindowedDataset test = build_windows(*it, choice, model.t_in);
    // EMD can yield fewer modes than the model was trained with; missing
    // high-frequency modes are identically zero, so pad on the right.
    const int want = model.network.input_channels();
    if (test.channels < want) {
        for (auto& x : test.inputs) {
            nn::Mat padded(x.rows, want);
            for (int r = 0; r < x.rows; ++r)
                for (int c = 0; c < x.cols; ++c) padded.at(r, c) = x.at(r, c);
            x = std::move(padded);
        }
        test.channels = want;
    }
    const std::vector<double> preds = model.network.forward(test.inputs);

    ExperimentResult r;
    r.held_out = test_id;
    r.method = model.method;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        r.predictions_pct.push_back(100.0 * preds[i]);
        r.targets_pct.push_back(100.0 * test.targets[i]);
    }
    r.test_metrics = metrics(SoHSeries{r.targets_pct}, SoHSeries{r.predictions_pct});
    write_metrics_csv(report_out, {r});
    std::fputs(metrics_table({r}).c_str(), stdout);
    return 0;
}

int cmd_plot(const std::string& imfs, const std::string& history,
             const std::string& report, const std::string& out) {
    const int given = (!imfs.empty()) + (!history.empty()) + (!report.empty());
    if (given != 1)
        throw std::invalid_argument("plot: give exactly one of --imfs/--history/--report");
    std::vector<PlotSeries> series;
    std::string title, xl, yl;
    if (!imfs.empty()) {
        const Table t = read_numeric_csv(imfs);
        title = "Signal decomposition";
        xl = "cycle";
        yl = "Ah";
        for (std::size_t c = 1; c < t.columns.size(); ++c)
            series.push_back({t.columns[c], t.data[0], t.data[c]});
    } else if (!history.empty()) {
        const Table t = read_numeric_csv(history);
        title = "Optimizer convergence";
        xl = "iteration";
        yl = "envelope entropy";
        series.push_back({"best fitness", t.data[0], t.data[1]});
    } else {
        std::ifstream in(report);
        if (!in) throw std::runtime_error("cannot open " + report);
        std::string line;
        std::getline(in, line);  // header
        std::vector<double> idx, rmse, mae, mape;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            std::stringstream ls(line);
            std::string battery, method, cell;
            std::getline(ls, battery, ',');
            std::getline(ls, method, ',');
            std::getline(ls, cell, ',');
            rmse.push_back(std::stod(cell));
            std::getline(ls, cell, ',');
            mae.push_back(std::stod(cell));
            std::getline(ls, cell, ',');
            mape.push_back(std::stod(cell));
            idx.push_back(static_cast<double>(idx.size() + 1));
        }
        title = "Estimation error";
        xl = "experiment";
        yl = "percent";
        series.push_back({"RMSE", idx, rmse});
        series.push_back({"MAE", idx, mae});
        series.push_back({"MAPE", idx, mape});
    }
    write_svg_chart(out, title, xl, yl, series);
    std::printf("wrote %s\n", out.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Signal decomposition and battery SoH estimation toolkit"};
    app.require_subcommand(1);

    std::string config_path;
    app.add_option("--config", config_path,
                   "key=value config file (or set OSL_CONFIG)");

    // decompose
    auto* dec = app.add_subcommand("decompose", "Decompose a capacity curve");
    std::string dec_input, dec_method = "vmd", dec_out, dec_params;
    int dec_k = 3;
    double dec_alpha = 2000.0, dec_tau = 0.0;
    dec->add_option("--input", dec_input, "battery CSV")->required();
    dec->add_option("--method", dec_method, "vmd|emd");
    dec->add_option("--k", dec_k, "mode count (vmd)");
    dec->add_option("--alpha", dec_alpha, "bandwidth penalty (vmd)");
    dec->add_option("--tau", dec_tau, "dual-ascent step (vmd)");
    dec->add_option("--out", dec_out, "IMF CSV output")->required();
    dec->add_option("--params", dec_params, "config file override");

    // optimize
    auto* opt = app.add_subcommand("optimize", "Search VMD parameters");
    std::string opt_input, opt_optimizer = "pso", opt_out;
    std::uint64_t opt_seed = 0;
    opt->add_option("--input", opt_input, "battery CSV")->required();
    opt->add_option("--optimizer", opt_optimizer, "pso|ga");
    opt->add_option("--seed", opt_seed, "RNG seed");
    opt->add_option("--out", opt_out, "convergence history CSV");

    // train
    auto* trn = app.add_subcommand("train", "Train a SoH estimator");
    std::string trn_data, trn_test, trn_method = "osl", trn_model;
    std::uint64_t trn_seed = 0;
    trn->add_option("--data", trn_data, "directory of battery CSVs")->required();
    trn->add_option("--test", trn_test, "held-out battery id")->required();
    trn->add_option("--method", trn_method, "osl|vmd-lstm|emd-lstm");
    trn->add_option("--seed", trn_seed, "master seed");
    trn->add_option("--model", trn_model, "model output path")->required();

    // evaluate
    auto* evl = app.add_subcommand("evaluate", "Evaluate a trained model");
    std::string evl_model, evl_data, evl_test, evl_report;
    evl->add_option("--model", evl_model, "model file")->required();
    evl->add_option("--data", evl_data, "directory of battery CSVs")->required();
    evl->add_option("--test", evl_test, "held-out battery id")->required();
    evl->add_option("--report", evl_report, "metrics CSV output")->required();

    // plot
    auto* plt = app.add_subcommand("plot", "Render a CSV as an SVG chart");
    std::string plt_imfs, plt_history, plt_report, plt_out;
    plt->add_option("--imfs", plt_imfs, "IMF CSV");
    plt->add_option("--history", plt_history, "convergence CSV");
    plt->add_option("--report", plt_report, "metrics CSV");
    plt->add_option("--out", plt_out, "SVG output")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        RunConfig cfg = load_run_config(config_path);
        if (dec->parsed()) {
            if (!dec_params.empty()) cfg.apply_file(dec_params);
            return cmd_decompose(dec_input, dec_method, dec_k, dec_alpha, dec_tau,
                                 dec_out, cfg);
        }
        if (opt->parsed())
            return cmd_optimize(opt_input, opt_optimizer, opt_seed, opt_out, cfg);
        if (trn->parsed())
            return cmd_train(trn_data, trn_test, trn_method, trn_seed, trn_model, cfg);
        if (evl->parsed())
            return cmd_evaluate(evl_model, evl_data, evl_test, evl_report, cfg);
        if (plt->parsed())
            return cmd_plot(plt_imfs, plt_history, plt_report, plt_out);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 1;
}
