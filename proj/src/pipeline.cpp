#include "osl/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace osl {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string path_stem_upper(const std::string& path) {
    std::size_t slash = path.find_last_of("/\\");
    std::string name = slash == std::string::npos ? path : path.substr(slash + 1);
    std::size_t dot = name.find_last_of('.');
    if (dot != std::string::npos) name = name.substr(0, dot);
    for (auto& c : name) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return name;
}

}  // namespace

BatteryRecord load_battery_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
    // Tolerate a trailing carriage return from CRLF files.
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "cycle,capacity_ah")
        throw std::runtime_error(path + ": expected header 'cycle,capacity_ah', got '" +
                                 line + "'");
    BatteryRecord rec;
    rec.battery_id = path_stem_upper(path);
    long prev_cycle = 0;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw std::runtime_error(path + ": row " + std::to_string(row) +
                                     ": malformed (no comma)");
        long cycle = 0;
        double cap = 0.0;
        try {
            std::size_t used = 0;
            cycle = std::stol(line.substr(0, comma), &used);
            if (used != comma) throw std::invalid_argument("trailing");
            const std::string capstr = line.substr(comma + 1);
            cap = std::stod(capstr, &used);
            if (used != capstr.size()) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
            throw std::runtime_error(path + ": row " + std::to_string(row) +
                                     ": malformed value '" + line + "'");
        }
        if (cycle <= 0)
            throw std::runtime_error(path + ": row " + std::to_string(row) +
                                     ": cycle must be positive");
        if (cycle == prev_cycle)
            throw std::runtime_error(path + ": row " + std::to_string(row) +
                                     ": duplicate cycle " + std::to_string(cycle));
        if (prev_cycle != 0 && cycle != prev_cycle + 1)
            throw std::runtime_error(path + ": row " + std::to_string(row) +
                                     ": missing cycle between " +
                                     std::to_string(prev_cycle) + " and " +
                                     std::to_string(cycle));
        if (!(cap > 0.0) || !std::isfinite(cap))
            throw std::runtime_error(path + ": row " + std::to_string(row) +
                                     ": capacity must be positive and finite");
        prev_cycle = cycle;
        rec.capacities_ah.push_back(cap);
    }
    return rec;
}

SoHSeries compute_soh(const BatteryRecord& record) {
    SoHSeries out;
    out.values_pct.reserve(record.capacities_ah.size());
    for (double c : record.capacities_ah)
        out.values_pct.push_back(100.0 * c / record.rated_capacity_ah);
    return out;
}

Method method_from_string(const std::string& name) {
    if (name == "osl") return Method::osl;
    if (name == "vmd-lstm") return Method::vmd_lstm;
    if (name == "emd-lstm") return Method::emd_lstm;
    throw std::invalid_argument("unknown method '" + name +
                                "' (expected osl, vmd-lstm, or emd-lstm)");
}

std::string method_to_string(Method m) {
    switch (m) {
        case Method::osl: return "osl";
        case Method::vmd_lstm: return "vmd-lstm";
        case Method::emd_lstm: return "emd-lstm";
    }
    return "?";
}

namespace {

// Channel series for one battery: VMD modes, or EMD residual + modes so the
// baseline also sees the trend.
std::vector<std::vector<double>> decompose_channels(
    const std::vector<double>& normalized, const DecompositionChoice& choice) {
    Signal sig(normalized);
    std::vector<std::vector<double>> channels;
    if (choice.use_vmd) {
        IMFSet imfs = vmd_decompose(sig, choice.vmd);
        for (auto& m : imfs.modes) channels.push_back(std::move(m.samples));
    } else {
        IMFSet imfs = emd_decompose(sig, choice.emd);
        channels.push_back(imfs.residual.samples);
        for (auto& m : imfs.modes) channels.push_back(std::move(m.samples));
    }
    return channels;
}

}  // namespace

WindowedDataset build_windows(const BatteryRecord& record,
                              const DecompositionChoice& choice, int t_in) {
    const std::size_t n = record.capacities_ah.size();
    if (t_in < 1) throw std::invalid_argument("build_windows: t_in must be > 0");
    if (n <= static_cast<std::size_t>(t_in))
        throw std::invalid_argument("build_windows: series length must exceed t_in");

    std::vector<double> norm(n);
    for (std::size_t i = 0; i < n; ++i)
        norm[i] = record.capacities_ah[i] / record.rated_capacity_ah;

    WindowedDataset out;
    std::vector<std::vector<double>> channels;
    if (!choice.causal) channels = decompose_channels(norm, choice);

    for (std::size_t t = static_cast<std::size_t>(t_in); t < n; ++t) {
        const std::vector<std::vector<double>>* src = &channels;
        std::vector<std::vector<double>> prefix_channels;
        std::size_t offset = 0;
        if (choice.causal) {
            // Re-decompose only the past; nothing after t leaks into the window.
            std::vector<double> prefix(norm.begin(), norm.begin() + t);
            prefix_channels = decompose_channels(prefix, choice);
            src = &prefix_channels;
            offset = 0;
        }
        const std::size_t ch = src->size();
        nn::Mat x(t_in, static_cast<int>(ch));
        for (std::size_t c = 0; c < ch; ++c) {
            for (int i = 0; i < t_in; ++i)
                x.at(i, static_cast<int>(c)) =
                    (*src)[c][t - static_cast<std::size_t>(t_in) + i + offset];
        }
        out.inputs.push_back(std::move(x));
        out.targets.push_back(norm[t]);
        out.battery_ids.push_back(record.battery_id);
        out.target_cycles.push_back(static_cast<int>(t));
    }
    out.channels = out.inputs.empty() ? 0 : out.inputs.front().cols;
    return out;
}

Metrics metrics(const SoHSeries& y, const SoHSeries& y_hat) {
    const std::size_t n = y.values_pct.size();
    if (n == 0 || y_hat.values_pct.size() != n)
        throw std::invalid_argument("metrics: need equal-length nonempty series");
    double se = 0.0, ae = 0.0, ape = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double yi = y.values_pct[i];
        const double d = yi - y_hat.values_pct[i];
        if (yi == 0.0)
            throw std::invalid_argument("metrics: zero reference value at index " +
                                        std::to_string(i));
        se += d * d;
        ae += std::abs(d);
        ape += std::abs(d) / std::abs(yi);
    }
    Metrics m;
    m.rmse = std::sqrt(se / static_cast<double>(n));
    m.mae = ae / static_cast<double>(n);
    m.mape = 100.0 * ape / static_cast<double>(n);
    return m;
}

ExperimentResult run_experiment(const std::vector<BatteryRecord>& batteries,
                                const std::string& held_out,
                                const ExperimentConfig& config) {
    const auto it = std::find_if(
        batteries.begin(), batteries.end(),
        [&](const BatteryRecord& b) { return b.battery_id == held_out; });
    if (it == batteries.end())
        throw std::invalid_argument("run_experiment: held-out battery '" + held_out +
                                    "' not in dataset");

    ExperimentResult result;
    result.held_out = held_out;
    result.method = config.method;

    const bool uses_vmd = config.method != Method::emd_lstm;
    if (uses_vmd) {
        if (config.vmd_params) {
            result.per_battery_params = *config.vmd_params;
            for (const auto& b : batteries) {
                if (!result.per_battery_params.count(b.battery_id))
                    throw std::invalid_argument(
                        "run_experiment: no VMD params for " + b.battery_id);
            }
        } else {
            for (const auto& b : batteries) {
                std::vector<double> norm(b.capacities_ah.size());
                for (std::size_t i = 0; i < norm.size(); ++i)
                    norm[i] = b.capacities_ah[i] / b.rated_capacity_ah;
                VmdEntropyFitness fitness{Signal(norm)};
                PSOConfig pso = config.pso;
                pso.seed = splitmix64(config.master_seed ^ fnv1a(b.battery_id));
                const OptimizeResult r = pso_optimize(
                    config.search, pso,
                    [&](int k, double a) { return fitness(k, a); });
                result.per_battery_params[b.battery_id] = {r.best_k, r.best_alpha};
            }
        }
        // All batteries must share one channel count; K agrees in practice,
        // otherwise fall back to the most frequent value.
        std::map<int, int> counts;
        for (const auto& [id, p] : result.per_battery_params) counts[p.k]++;
        int k_common = counts.begin()->first, best = 0;
        for (const auto& [k, c] : counts)
            if (c > best) { best = c; k_common = k; }
        for (auto& [id, p] : result.per_battery_params) p.k = k_common;
    }

    auto choice_for = [&](const BatteryRecord& b) {
        DecompositionChoice choice;
        if (uses_vmd) {
            choice.use_vmd = true;
            choice.vmd = VmdEntropyFitness::default_params();
            const auto& p = result.per_battery_params.at(b.battery_id);
            choice.vmd.k = p.k;
            choice.vmd.alpha = p.alpha;
        } else {
            choice.use_vmd = false;
            choice.emd = config.emd;
        }
        return choice;
    };

    std::vector<WindowedDataset> windows;
    int channels = 0;
    for (const auto& b : batteries) {
        windows.push_back(build_windows(b, choice_for(b), config.t_in));
        channels = std::max(channels, windows.back().channels);
    }
    // EMD can yield fewer modes on short series; a missing high-frequency
    // mode is identically zero, so pad with zero channels on the right.
    for (auto& w : windows) {
        if (w.channels == channels) continue;
        for (auto& x : w.inputs) {
            nn::Mat padded(x.rows, channels);
            for (int r = 0; r < x.rows; ++r)
                for (int c = 0; c < x.cols; ++c) padded.at(r, c) = x.at(r, c);
            x = std::move(padded);
        }
        w.channels = channels;
    }

    std::vector<nn::Mat> train_x;
    std::vector<double> train_y;
    WindowedDataset test;
    for (std::size_t i = 0; i < batteries.size(); ++i) {
        WindowedDataset& w = windows[i];
        if (batteries[i].battery_id == held_out) {
            test = std::move(w);
        } else {
            for (auto& x : w.inputs) train_x.push_back(std::move(x));
            for (double y : w.targets) train_y.push_back(y);
        }
    }
    if (train_x.empty())
        throw std::runtime_error("run_experiment: no training windows");

    const std::uint64_t net_seed = splitmix64(config.master_seed ^ fnv1a("init"));
    nn::Network net = config.method == Method::osl
                          ? nn::Network::osl_staged(channels, net_seed)
                          : nn::Network::lstm_only(channels, net_seed);
    nn::TrainConfig train_cfg = config.training;
    train_cfg.seed = splitmix64(config.master_seed ^ fnv1a("train"));
    result.loss_history = nn::train(net, train_x, train_y, train_cfg);

    const std::vector<double> preds = net.forward(test.inputs);
    result.predictions_pct.reserve(preds.size());
    result.targets_pct.reserve(preds.size());
    for (std::size_t i = 0; i < preds.size(); ++i) {
        result.predictions_pct.push_back(100.0 * preds[i]);
        result.targets_pct.push_back(100.0 * test.targets[i]);
    }
    result.test_metrics = metrics(SoHSeries{result.targets_pct},
                                  SoHSeries{result.predictions_pct});
    result.network = std::make_shared<nn::Network>(std::move(net));
    return result;
}

void write_metrics_csv(const std::string& path,
                       const std::vector<ExperimentResult>& results) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    std::fprintf(f, "battery,method,rmse_pct,mae_pct,mape_pct\n");
    for (const auto& r : results)
        std::fprintf(f, "%s,%s,%.6f,%.6f,%.6f\n", r.held_out.c_str(),
                     method_to_string(r.method).c_str(), r.test_metrics.rmse,
                     r.test_metrics.mae, r.test_metrics.mape);
    std::fclose(f);
}

std::string metrics_table(const std::vector<ExperimentResult>& results) {
    std::ostringstream os;
    char buf[128];
    os << "battery   method     RMSE(%)   MAE(%)    MAPE(%)\n";
    for (const auto& r : results) {
        std::snprintf(buf, sizeof(buf), "%-9s %-10s %-9.3f %-9.3f %-9.3f\n",
                      r.held_out.c_str(), method_to_string(r.method).c_str(),
                      r.test_metrics.rmse, r.test_metrics.mae, r.test_metrics.mape);
        os << buf;
    }
    return os.str();
}

void write_imf_csv(const std::string& path, const IMFSet& imfs,
                   bool include_residual) {
    if (imfs.modes.empty()) throw std::invalid_argument("write_imf_csv: no modes");
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    std::fprintf(f, "cycle");
    for (std::size_t k = 0; k < imfs.modes.size(); ++k)
        std::fprintf(f, ",imf%zu", k + 1);
    if (include_residual) std::fprintf(f, ",residual");
    std::fprintf(f, "\n");
    const std::size_t n = imfs.modes.front().size();
    for (std::size_t i = 0; i < n; ++i) {
        std::fprintf(f, "%zu", i + 1);
        for (const auto& m : imfs.modes) std::fprintf(f, ",%.17g", m.samples[i]);
        if (include_residual) std::fprintf(f, ",%.17g", imfs.residual.samples[i]);
        std::fprintf(f, "\n");
    }
    std::fclose(f);
}

void save_model(const std::string& path, const SavedModel& model) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    os << "oslmodel v1\n";
    os << "method " << method_to_string(model.method) << "\n";
    os << "tin " << model.t_in << "\n";
    os << "seed " << model.seed << "\n";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", model.emd.sift_sd_threshold);
    os << "emd " << model.emd.max_imfs << " " << buf << " "
       << model.emd.max_sifts_per_imf << "\n";
    os << "batteries " << model.per_battery_params.size() << "\n";
    for (const auto& [id, p] : model.per_battery_params) {
        std::snprintf(buf, sizeof(buf), "%.17g", p.alpha);
        os << "battery " << id << " " << p.k << " " << buf << "\n";
    }
    model.network.save(os);
}

SavedModel load_model(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open " + path);
    std::string word, version;
    if (!(is >> word >> version) || word != "oslmodel" || version != "v1")
        throw std::runtime_error(path + ": not an oslmodel v1 file");
    std::string method_name;
    SavedModel model{nn::Network({nn::DenseSpec{1}}, 1, 0)};
    std::size_t n_batteries = 0;
    if (!(is >> word >> method_name) || word != "method")
        throw std::runtime_error(path + ": expected method line");
    model.method = method_from_string(method_name);
    if (!(is >> word >> model.t_in) || word != "tin")
        throw std::runtime_error(path + ": expected tin line");
    if (!(is >> word >> model.seed) || word != "seed")
        throw std::runtime_error(path + ": expected seed line");
    if (!(is >> word >> model.emd.max_imfs >> model.emd.sift_sd_threshold >>
          model.emd.max_sifts_per_imf) ||
        word != "emd")
        throw std::runtime_error(path + ": expected emd line");
    if (!(is >> word >> n_batteries) || word != "batteries")
        throw std::runtime_error(path + ": expected batteries line");
    for (std::size_t i = 0; i < n_batteries; ++i) {
        std::string id;
        BatteryVmdParams p;
        if (!(is >> word >> id >> p.k >> p.alpha) || word != "battery")
            throw std::runtime_error(path + ": expected battery line");
        model.per_battery_params[id] = p;
    }
    model.network = nn::Network::load(is);
    return model;
}

}  // namespace osl
