#include "osl/nn.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace osl {
namespace nn {

namespace {

double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

std::size_t numel(const std::vector<int>& shape) {
    std::size_t n = 1;
    for (int d : shape) n *= static_cast<std::size_t>(d);
    return n;
}

}  // namespace

struct ConvCache {
    Mat in, pre;
};
struct PoolCache {
    int in_rows = 0, cols = 0;
    std::vector<int> argmax;  // out_rows x cols, source row index
};
struct LstmCache {
    Mat in, gi, gf, gg, go, c, tc, h;  // per-step gate values, T x H
};
struct DenseCache {
    std::vector<double> in_last;
    int in_rows = 0, in_cols = 0;
};
struct NoCache {};

using LayerCache = std::variant<ConvCache, PoolCache, LstmCache, DenseCache, NoCache>;

struct Network::Cache {
    std::vector<LayerCache> layers;
    double out = 0.0;
};

Network::Network(std::vector<LayerSpec> layers, int input_channels,
                 std::uint64_t seed)
    : layers_(std::move(layers)), input_channels_(input_channels) {
    if (input_channels_ < 1)
        throw std::invalid_argument("Network: input_channels must be > 0");
    std::mt19937_64 rng(seed);

    auto add_param = [&](std::string name, std::vector<int> shape, bool init) {
        ParamArray p;
        p.name = std::move(name);
        p.shape = std::move(shape);
        p.value.assign(numel(p.shape), 0.0);
        if (init) {
            const double fan_out = static_cast<double>(p.shape[0]);
            const double fan_in =
                static_cast<double>(p.value.size()) / std::max(fan_out, 1.0);
            const double bound = std::sqrt(6.0 / (fan_in + fan_out));
            for (auto& v : p.value) v = (2.0 * uniform01(rng) - 1.0) * bound;
        }
        params_.push_back(std::move(p));
    };

    int ch = input_channels_;
    for (std::size_t li = 0; li < layers_.size(); ++li) {
        const std::string tag = "layer" + std::to_string(li);
        param_base_.push_back(static_cast<int>(params_.size()));
        if (const auto* c = std::get_if<Conv1DSpec>(&layers_[li])) {
            if (c->kernel < 1 || c->kernel % 2 == 0)
                throw std::invalid_argument("Conv1D: kernel must be odd");
            add_param(tag + ".conv.w", {c->filters, ch, c->kernel}, true);
            add_param(tag + ".conv.b", {c->filters}, false);
            ch = c->filters;
        } else if (const auto* l = std::get_if<LSTMSpec>(&layers_[li])) {
            add_param(tag + ".lstm.w", {4 * l->cells, ch}, true);
            add_param(tag + ".lstm.u", {4 * l->cells, l->cells}, true);
            add_param(tag + ".lstm.b", {4 * l->cells}, false);
            ch = l->cells;
        } else if (const auto* d = std::get_if<DenseSpec>(&layers_[li])) {
            add_param(tag + ".dense.w", {d->units, ch}, true);
            add_param(tag + ".dense.b", {d->units}, false);
            ch = d->units;
        }
        // pool / flatten carry no parameters
    }
}

Network Network::osl_staged(int input_channels, std::uint64_t seed) {
    return Network({Conv1DSpec{128, 3, Activation::relu}, MaxPool1DSpec{2},
                    Conv1DSpec{128, 3, Activation::relu}, MaxPool1DSpec{2},
                    FlattenPerStepSpec{}, LSTMSpec{64, true}, DenseSpec{1}},
                   input_channels, seed);
}

Network Network::lstm_only(int input_channels, std::uint64_t seed) {
    return Network({LSTMSpec{64, true}, DenseSpec{1}}, input_channels, seed);
}

int Network::pooled_length(int time_steps) const {
    int t = time_steps;
    for (const auto& l : layers_) {
        if (const auto* p = std::get_if<MaxPool1DSpec>(&l)) t /= p->pool;
    }
    return t;
}

double Network::forward_cached(const Mat& x, Cache* cache) const {
    if (x.cols != input_channels_) {
        throw std::invalid_argument(
            "Network::forward: expected " + std::to_string(input_channels_) +
            " input channels, got " + std::to_string(x.cols));
    }
    if (x.rows < 1) throw std::invalid_argument("Network::forward: empty input");

    Mat cur = x;
    double out = 0.0;
    bool have_out = false;
    for (std::size_t li = 0; li < layers_.size(); ++li) {
        const int base = param_base_[li];
        if (const auto* spec = std::get_if<Conv1DSpec>(&layers_[li])) {
            const auto& w = params_[base].value;
            const auto& b = params_[base + 1].value;
            const int f_count = spec->filters, kern = spec->kernel, off = kern / 2;
            const int in_ch = cur.cols, t_len = cur.rows;
            Mat pre(t_len, f_count);
            for (int t = 0; t < t_len; ++t) {
                for (int f = 0; f < f_count; ++f) {
                    double acc = b[f];
                    const double* wf =
                        &w[static_cast<std::size_t>(f) * in_ch * kern];
                    for (int c = 0; c < in_ch; ++c) {
                        for (int j = 0; j < kern; ++j) {
                            const int src = t + j - off;
                            if (src >= 0 && src < t_len)
                                acc += wf[c * kern + j] * cur.at(src, c);
                        }
                    }
                    pre.at(t, f) = acc;
                }
            }
            Mat outm = pre;
            if (spec->act == Activation::relu)
                for (auto& v : outm.v) v = std::max(v, 0.0);
            if (cache) cache->layers.emplace_back(ConvCache{cur, pre});
            cur = std::move(outm);
        } else if (const auto* spec = std::get_if<MaxPool1DSpec>(&layers_[li])) {
            const int p = spec->pool;
            const int out_rows = cur.rows / p;
            if (out_rows < 1)
                throw std::invalid_argument(
                    "MaxPool1D: time length " + std::to_string(cur.rows) +
                    " too short for pool " + std::to_string(p));
            Mat outm(out_rows, cur.cols);
            PoolCache pc;
            pc.in_rows = cur.rows;
            pc.cols = cur.cols;
            pc.argmax.resize(static_cast<std::size_t>(out_rows) * cur.cols);
            for (int t = 0; t < out_rows; ++t) {
                for (int c = 0; c < cur.cols; ++c) {
                    int best = t * p;
                    for (int j = 1; j < p; ++j)
                        if (cur.at(t * p + j, c) > cur.at(best, c)) best = t * p + j;
                    outm.at(t, c) = cur.at(best, c);
                    pc.argmax[static_cast<std::size_t>(t) * cur.cols + c] = best;
                }
            }
            if (cache) cache->layers.emplace_back(std::move(pc));
            cur = std::move(outm);
        } else if (std::get_if<FlattenPerStepSpec>(&layers_[li])) {
            // Channels are already a flat vector per time step.
            if (cache) cache->layers.emplace_back(NoCache{});
        } else if (const auto* spec = std::get_if<LSTMSpec>(&layers_[li])) {
            const auto& w = params_[base].value;
            const auto& u = params_[base + 1].value;
            const auto& b = params_[base + 2].value;
            const int hsz = spec->cells, in_ch = cur.cols, t_len = cur.rows;
            LstmCache lc;
            lc.in = cur;
            lc.gi = Mat(t_len, hsz);
            lc.gf = Mat(t_len, hsz);
            lc.gg = Mat(t_len, hsz);
            lc.go = Mat(t_len, hsz);
            lc.c = Mat(t_len, hsz);
            lc.tc = Mat(t_len, hsz);
            lc.h = Mat(t_len, hsz);
            Mat outm(t_len, hsz);
            std::vector<double> hprev(hsz, 0.0), cprev(hsz, 0.0), z(4 * hsz);
            for (int t = 0; t < t_len; ++t) {
                for (int r = 0; r < 4 * hsz; ++r) {
                    double acc = b[r];
                    const double* wr = &w[static_cast<std::size_t>(r) * in_ch];
                    for (int c = 0; c < in_ch; ++c) acc += wr[c] * cur.at(t, c);
                    const double* ur = &u[static_cast<std::size_t>(r) * hsz];
                    for (int c = 0; c < hsz; ++c) acc += ur[c] * hprev[c];
                    z[r] = acc;
                }
                for (int c = 0; c < hsz; ++c) {
                    const double gi = sigmoid(z[c]);
                    const double gf = sigmoid(z[hsz + c]);
                    const double gg = std::tanh(z[2 * hsz + c]);
                    const double go = sigmoid(z[3 * hsz + c]);
                    const double cc = gf * cprev[c] + gi * gg;
                    const double tc = std::tanh(cc);
                    const double h = go * tc;
                    lc.gi.at(t, c) = gi;
                    lc.gf.at(t, c) = gf;
                    lc.gg.at(t, c) = gg;
                    lc.go.at(t, c) = go;
                    lc.c.at(t, c) = cc;
                    lc.tc.at(t, c) = tc;
                    lc.h.at(t, c) = h;
                    hprev[c] = h;
                    cprev[c] = cc;
                    outm.at(t, c) = spec->relu_output ? std::max(h, 0.0) : h;
                }
            }
            if (cache) cache->layers.emplace_back(std::move(lc));
            cur = std::move(outm);
        } else if (const auto* spec = std::get_if<DenseSpec>(&layers_[li])) {
            const auto& w = params_[base].value;
            const auto& b = params_[base + 1].value;
            const int in_ch = cur.cols;
            DenseCache dc;
            dc.in_rows = cur.rows;
            dc.in_cols = in_ch;
            dc.in_last.resize(in_ch);
            for (int c = 0; c < in_ch; ++c) dc.in_last[c] = cur.at(cur.rows - 1, c);
            Mat outm(1, spec->units);
            for (int uidx = 0; uidx < spec->units; ++uidx) {
                double acc = b[uidx];
                for (int c = 0; c < in_ch; ++c)
                    acc += w[static_cast<std::size_t>(uidx) * in_ch + c] *
                           dc.in_last[c];
                outm.at(0, uidx) = acc;
            }
            if (cache) cache->layers.emplace_back(std::move(dc));
            cur = std::move(outm);
            if (spec->units == 1) {
                out = cur.at(0, 0);
                have_out = true;
            }
        }
    }
    if (!have_out) {
        if (cur.rows != 1 || cur.cols != 1)
            throw std::invalid_argument("Network: output is not scalar");
        out = cur.at(0, 0);
    }
    if (cache) cache->out = out;
    return out;
}

double Network::forward_one(const Mat& x) const { return forward_cached(x, nullptr); }

std::vector<double> Network::forward(const std::vector<Mat>& xs) const {
    std::vector<double> out;
    out.reserve(xs.size());
    for (const auto& x : xs) out.push_back(forward_one(x));
    return out;
}

void Network::backward_one(const Cache& cache, double dloss,
                           std::vector<std::vector<double>>& grads) const {
    // Gradient flowing backward through the inter-layer matrix.
    Mat dcur(1, 1);
    dcur.at(0, 0) = dloss;

    for (std::size_t li = layers_.size(); li-- > 0;) {
        const int base = param_base_[li];
        const LayerCache& lc = cache.layers[li];
        if (const auto* spec = std::get_if<Conv1DSpec>(&layers_[li])) {
            const auto& cc = std::get<ConvCache>(lc);
            const auto& w = params_[base].value;
            auto& dw = grads[base];
            auto& db = grads[base + 1];
            const int f_count = spec->filters, kern = spec->kernel, off = kern / 2;
            const int in_ch = cc.in.cols, t_len = cc.in.rows;
            Mat din(t_len, in_ch);
            for (int t = 0; t < t_len; ++t) {
                for (int f = 0; f < f_count; ++f) {
                    double d = dcur.at(t, f);
                    if (spec->act == Activation::relu && cc.pre.at(t, f) <= 0.0)
                        d = 0.0;
                    if (d == 0.0) continue;
                    db[f] += d;
                    const std::size_t wbase =
                        static_cast<std::size_t>(f) * in_ch * kern;
                    for (int c = 0; c < in_ch; ++c) {
                        for (int j = 0; j < kern; ++j) {
                            const int src = t + j - off;
                            if (src < 0 || src >= t_len) continue;
                            dw[wbase + c * kern + j] += d * cc.in.at(src, c);
                            din.at(src, c) += d * w[wbase + c * kern + j];
                        }
                    }
                }
            }
            dcur = std::move(din);
        } else if (const auto* spec = std::get_if<MaxPool1DSpec>(&layers_[li])) {
            (void)spec;
            const auto& pc = std::get<PoolCache>(lc);
            Mat din(pc.in_rows, pc.cols);
            const int out_rows = dcur.rows;
            for (int t = 0; t < out_rows; ++t)
                for (int c = 0; c < pc.cols; ++c)
                    din.at(pc.argmax[static_cast<std::size_t>(t) * pc.cols + c], c) +=
                        dcur.at(t, c);
            dcur = std::move(din);
        } else if (std::get_if<FlattenPerStepSpec>(&layers_[li])) {
            // identity
        } else if (const auto* spec = std::get_if<LSTMSpec>(&layers_[li])) {
            const auto& sc = std::get<LstmCache>(lc);
            const auto& w = params_[base].value;
            const auto& u = params_[base + 1].value;
            auto& dw = grads[base];
            auto& du = grads[base + 1];
            auto& db = grads[base + 2];
            const int hsz = spec->cells, in_ch = sc.in.cols, t_len = sc.in.rows;
            Mat din(t_len, in_ch);
            std::vector<double> dh_next(hsz, 0.0), dc_next(hsz, 0.0), dz(4 * hsz);
            for (int t = t_len - 1; t >= 0; --t) {
                for (int c = 0; c < hsz; ++c) {
                    double dy = dcur.at(t, c);
                    if (spec->relu_output && sc.h.at(t, c) <= 0.0) dy = 0.0;
                    const double dh = dy + dh_next[c];
                    const double go = sc.go.at(t, c);
                    const double tc = sc.tc.at(t, c);
                    const double dc = dh * go * (1.0 - tc * tc) + dc_next[c];
                    const double gi = sc.gi.at(t, c);
                    const double gf = sc.gf.at(t, c);
                    const double gg = sc.gg.at(t, c);
                    const double cprev = t > 0 ? sc.c.at(t - 1, c) : 0.0;
                    dz[c] = dc * gg * gi * (1.0 - gi);
                    dz[hsz + c] = dc * cprev * gf * (1.0 - gf);
                    dz[2 * hsz + c] = dc * gi * (1.0 - gg * gg);
                    dz[3 * hsz + c] = dh * tc * go * (1.0 - go);
                    dc_next[c] = dc * gf;
                }
                std::fill(dh_next.begin(), dh_next.end(), 0.0);
                for (int r = 0; r < 4 * hsz; ++r) {
                    const double d = dz[r];
                    if (d == 0.0) continue;
                    db[r] += d;
                    const std::size_t wb = static_cast<std::size_t>(r) * in_ch;
                    for (int c = 0; c < in_ch; ++c) {
                        dw[wb + c] += d * sc.in.at(t, c);
                        din.at(t, c) += d * w[wb + c];
                    }
                    const std::size_t ub = static_cast<std::size_t>(r) * hsz;
                    if (t > 0) {
                        for (int c = 0; c < hsz; ++c) {
                            du[ub + c] += d * sc.h.at(t - 1, c);
                            dh_next[c] += d * u[ub + c];
                        }
                    }
                }
            }
            dcur = std::move(din);
        } else if (const auto* spec = std::get_if<DenseSpec>(&layers_[li])) {
            const auto& dc = std::get<DenseCache>(lc);
            const auto& w = params_[base].value;
            auto& dw = grads[base];
            auto& db = grads[base + 1];
            Mat din(dc.in_rows, dc.in_cols);
            for (int uidx = 0; uidx < spec->units; ++uidx) {
                const double d = dcur.at(0, uidx);
                if (d == 0.0) continue;
                db[uidx] += d;
                for (int c = 0; c < dc.in_cols; ++c) {
                    dw[static_cast<std::size_t>(uidx) * dc.in_cols + c] +=
                        d * dc.in_last[c];
                    din.at(dc.in_rows - 1, c) +=
                        d * w[static_cast<std::size_t>(uidx) * dc.in_cols + c];
                }
            }
            dcur = std::move(din);
        }
    }
}

double Network::backward(const std::vector<Mat>& xs, const std::vector<double>& ys,
                         std::vector<std::vector<double>>& grads) const {
    if (xs.size() != ys.size() || xs.empty())
        throw std::invalid_argument("Network::backward: batch size mismatch");
    grads.assign(params_.size(), {});
    for (std::size_t i = 0; i < params_.size(); ++i)
        grads[i].assign(params_[i].value.size(), 0.0);

    const double inv_b = 1.0 / static_cast<double>(xs.size());
    double loss = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        Cache cache;
        const double pred = forward_cached(xs[i], &cache);
        const double err = pred - ys[i];
        loss += err * err * inv_b;
        backward_one(cache, 2.0 * err * inv_b, grads);
    }
    if (!std::isfinite(loss))
        throw std::runtime_error("Network::backward: non-finite loss");
    return loss;
}

std::vector<double> train(Network& net, const std::vector<Mat>& inputs,
                          const std::vector<double>& targets,
                          const TrainConfig& config) {
    if (inputs.size() != targets.size() || inputs.empty())
        throw std::invalid_argument("train: need >= 1 example");
    if (config.batch_size < 1) throw std::invalid_argument("train: batch_size must be > 0");
    if (config.epochs < 0) throw std::invalid_argument("train: epochs must be >= 0");

    std::mt19937_64 rng(config.seed);
    auto& params = net.params();
    std::vector<std::vector<double>> m(params.size()), v(params.size());
    for (std::size_t i = 0; i < params.size(); ++i) {
        m[i].assign(params[i].value.size(), 0.0);
        v[i].assign(params[i].value.size(), 0.0);
    }

    std::vector<std::size_t> order(inputs.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    std::vector<double> history;
    history.reserve(config.epochs);
    long long step = 0;
    std::vector<std::vector<double>> grads;
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        // Fisher-Yates with our own draws keeps shuffles platform-stable.
        for (std::size_t i = order.size(); i-- > 1;) {
            const std::size_t j = rng() % (i + 1);
            std::swap(order[i], order[j]);
        }
        double epoch_loss = 0.0;
        std::size_t seen = 0;
        for (std::size_t start = 0; start < order.size();
             start += static_cast<std::size_t>(config.batch_size)) {
            const std::size_t stop =
                std::min(order.size(), start + static_cast<std::size_t>(config.batch_size));
            std::vector<Mat> bx;
            std::vector<double> by;
            for (std::size_t i = start; i < stop; ++i) {
                bx.push_back(inputs[order[i]]);
                by.push_back(targets[order[i]]);
            }
            const double loss = net.backward(bx, by, grads);
            if (!std::isfinite(loss) || loss > 1e6)
                throw std::runtime_error("train: divergence at epoch " +
                                         std::to_string(epoch));
            epoch_loss += loss * static_cast<double>(bx.size());
            seen += bx.size();
            ++step;
            const double bc1 = 1.0 - std::pow(config.beta1, static_cast<double>(step));
            const double bc2 = 1.0 - std::pow(config.beta2, static_cast<double>(step));
            for (std::size_t i = 0; i < params.size(); ++i) {
                auto& pv = params[i].value;
                for (std::size_t j = 0; j < pv.size(); ++j) {
                    const double g = grads[i][j];
                    m[i][j] = config.beta1 * m[i][j] + (1.0 - config.beta1) * g;
                    v[i][j] = config.beta2 * v[i][j] + (1.0 - config.beta2) * g * g;
                    pv[j] -= config.learning_rate * (m[i][j] / bc1) /
                             (std::sqrt(v[i][j] / bc2) + config.epsilon);
                }
            }
        }
        history.push_back(epoch_loss / static_cast<double>(seen));
    }
    return history;
}

void Network::save(std::ostream& os) const {
    os << "channels " << input_channels_ << "\n";
    os << "layers " << layers_.size() << "\n";
    for (const auto& l : layers_) {
        if (const auto* c = std::get_if<Conv1DSpec>(&l)) {
            os << "conv " << c->filters << " " << c->kernel << " "
               << (c->act == Activation::relu ? "relu" : "linear") << "\n";
        } else if (const auto* p = std::get_if<MaxPool1DSpec>(&l)) {
            os << "pool " << p->pool << "\n";
        } else if (std::get_if<FlattenPerStepSpec>(&l)) {
            os << "flatten\n";
        } else if (const auto* s = std::get_if<LSTMSpec>(&l)) {
            os << "lstm " << s->cells << " " << (s->relu_output ? "relu" : "linear")
               << "\n";
        } else if (const auto* d = std::get_if<DenseSpec>(&l)) {
            os << "dense " << d->units << "\n";
        }
    }
    char buf[64];
    for (const auto& p : params_) {
        os << "param " << p.name << " " << p.shape.size();
        for (int d : p.shape) os << " " << d;
        os << "\n";
        for (std::size_t i = 0; i < p.value.size(); ++i) {
            std::snprintf(buf, sizeof(buf), "%.17g", p.value[i]);
            os << buf << (i + 1 == p.value.size() ? "\n" : " ");
        }
    }
}

Network Network::load(std::istream& is) {
    std::string word;
    int channels = 0;
    std::size_t n_layers = 0;
    if (!(is >> word) || word != "channels" || !(is >> channels))
        throw std::runtime_error("model load: expected channels line");
    if (!(is >> word) || word != "layers" || !(is >> n_layers))
        throw std::runtime_error("model load: expected layers line");
    std::vector<LayerSpec> layers;
    for (std::size_t i = 0; i < n_layers; ++i) {
        if (!(is >> word)) throw std::runtime_error("model load: truncated layer list");
        if (word == "conv") {
            int f, k;
            std::string act;
            is >> f >> k >> act;
            layers.push_back(Conv1DSpec{
                f, k, act == "relu" ? Activation::relu : Activation::linear});
        } else if (word == "pool") {
            int p;
            is >> p;
            layers.push_back(MaxPool1DSpec{p});
        } else if (word == "flatten") {
            layers.push_back(FlattenPerStepSpec{});
        } else if (word == "lstm") {
            int c;
            std::string act;
            is >> c >> act;
            layers.push_back(LSTMSpec{c, act == "relu"});
        } else if (word == "dense") {
            int u;
            is >> u;
            layers.push_back(DenseSpec{u});
        } else {
            throw std::runtime_error("model load: unknown layer '" + word + "'");
        }
    }
    Network net(std::move(layers), channels, 0);
    for (auto& p : net.params_) {
        std::size_t ndim = 0;
        if (!(is >> word) || word != "param")
            throw std::runtime_error("model load: expected param record for " + p.name);
        std::string name;
        is >> name >> ndim;
        std::vector<int> shape(ndim);
        for (auto& d : shape) is >> d;
        if (name != p.name || shape != p.shape)
            throw std::runtime_error("model load: shape mismatch for " + p.name);
        for (auto& v : p.value) {
            if (!(is >> v))
                throw std::runtime_error("model load: truncated values for " + p.name);
        }
    }
    return net;
}

}  // namespace nn
}  // namespace osl
