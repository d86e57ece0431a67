#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

namespace osl {
namespace nn {

/// One training/inference example: time steps x channels, row-major.
struct Mat {
    int rows = 0;  // time
    int cols = 0;  // channels
    std::vector<double> v;

    Mat() = default;
    Mat(int r, int c) : rows(r), cols(c), v(static_cast<std::size_t>(r) * c, 0.0) {}
    double& at(int r, int c) { return v[static_cast<std::size_t>(r) * cols + c]; }
    double at(int r, int c) const { return v[static_cast<std::size_t>(r) * cols + c]; }
};

enum class Activation { linear, relu };

struct Conv1DSpec {
    int filters = 128;
    int kernel = 3;  // odd; "same" zero padding, stride 1
    Activation act = Activation::relu;
};
struct MaxPool1DSpec {
    int pool = 2;  // non-overlapping; odd remainder dropped
};
struct FlattenPerStepSpec {};  // merges channels per time step; time retained
struct LSTMSpec {
    int cells = 64;
    bool relu_output = true;  // ReLU on the emitted hidden sequence
};
struct DenseSpec {
    int units = 1;  // applied to the final time step
};

using LayerSpec = std::variant<Conv1DSpec, MaxPool1DSpec, FlattenPerStepSpec,
                               LSTMSpec, DenseSpec>;

struct ParamArray {
    std::string name;
    std::vector<int> shape;
    std::vector<double> value;
};

/// Stacked sequence network with scalar output. Layers run in order on a
/// (time x channels) example; the trailing Dense reads the final time step.
class Network {
public:
    Network(std::vector<LayerSpec> layers, int input_channels, std::uint64_t seed);

    /// The two architectures used by the toolkit.
    static Network osl_staged(int input_channels, std::uint64_t seed);
    static Network lstm_only(int input_channels, std::uint64_t seed);

    double forward_one(const Mat& x) const;
    std::vector<double> forward(const std::vector<Mat>& xs) const;

    /// Mean-squared-error loss over the batch plus gradients for every
    /// parameter array (batch-mean reduction). `grads` mirrors params().
    double backward(const std::vector<Mat>& xs, const std::vector<double>& ys,
                    std::vector<std::vector<double>>& grads) const;

    const std::vector<LayerSpec>& layers() const { return layers_; }
    int input_channels() const { return input_channels_; }
    std::vector<ParamArray>& params() { return params_; }
    const std::vector<ParamArray>& params() const { return params_; }

    /// Time steps the LSTM sees for a given input length (after pooling).
    int pooled_length(int time_steps) const;

    void save(std::ostream& os) const;
    static Network load(std::istream& is);

private:
    struct Cache;
    double forward_cached(const Mat& x, Cache* cache) const;
    void backward_one(const Cache& cache, double dloss,
                      std::vector<std::vector<double>>& grads) const;

    std::vector<LayerSpec> layers_;
    int input_channels_ = 0;
    std::vector<ParamArray> params_;
    // params_ index of the first array of each parameterized layer
    std::vector<int> param_base_;
};

struct TrainConfig {
    double learning_rate = 1e-3;
    int epochs = 200;
    int batch_size = 16;
    std::uint64_t seed = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

/// Adam training loop; deterministic for a fixed seed. Returns the
/// per-epoch mean training loss. Throws on divergence.
std::vector<double> train(Network& net, const std::vector<Mat>& inputs,
                          const std::vector<double>& targets,
                          const TrainConfig& config);

}  // namespace nn
}  // namespace osl
