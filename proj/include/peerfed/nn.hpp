#pragma once

#include <cstdint>
#include <vector>

#include "peerfed/matrix.hpp"
#include "peerfed/rng.hpp"

namespace peerfed::nn {

/// Probabilities produced by the network are clamped into
/// [kProbEpsilon, 1 - kProbEpsilon]; the same clamp is applied inside
/// bce_loss.
inline constexpr double kProbEpsilon = 1e-7;

/// Shape of the dense classifier: six layer dims (input first, output
/// last), ReLU + dropout on the four hidden layers, sigmoid output.
struct Topology {
    static constexpr int kLayerDims = 6;

    std::vector<int> layer_dims;
    double dropout_rate = 0.2;

    Topology() = default;
    Topology(std::vector<int> dims, double dropout) : layer_dims(std::move(dims)), dropout_rate(dropout) {}

    /// Convenience builder: input_dim + four hidden widths + one output unit.
    static Topology dense(int input_dim, const std::vector<int>& hidden_dims, double dropout_rate);

    int input_dim() const { return layer_dims.front(); }
    int weight_layer_count() const { return static_cast<int>(layer_dims.size()) - 1; }

    /// Throws Error unless the dims are six positive integers ending in 1
    /// and dropout_rate is in [0, 1).
    void validate() const;
};

/// One dense layer: weights [out_dim x in_dim], biases [out_dim].
struct LayerParams {
    Matrix weights;
    std::vector<double> biases;
};

/// Ordered per-layer parameters of one model.
struct ParamSet {
    std::vector<LayerParams> layers;

    bool same_shape(const ParamSet& other) const;
    std::size_t scalar_count() const;
    bool all_finite() const;
};

/// Gradients mirror the parameter layout exactly.
using GradSet = ParamSet;

bool bit_equal(const ParamSet& a, const ParamSet& b);

/// Locates the first differing scalar between two shape-identical sets.
/// Returns false when the sets are bit-identical.
struct ParamDiff {
    int layer = -1;
    bool in_bias = false;
    int row = -1;
    int col = -1;
    double lhs = 0.0;
    double rhs = 0.0;
};
bool first_difference(const ParamSet& a, const ParamSet& b, ParamDiff* diff);

/// Glorot-style uniform init: weights ~ U(-limit, limit) with
/// limit = sqrt(6 / (in_dim + out_dim)), biases zero. Draw order is layer
/// by layer, weight rows in order, so results are reproducible.
ParamSet init_params(const Topology& topology, RngStream& rng);

enum class RunMode { kTrain, kEval };

/// Full forward pass bookkeeping, kept for backprop and for tests that
/// need hidden activations.
struct ForwardTrace {
    /// activations[0] is the input batch; activations[l] the output of
    /// weight layer l after ReLU + dropout (hidden) or raw logits (output).
    std::vector<Matrix> activations;
    /// Scaled dropout masks per hidden layer (empty when inactive).
    std::vector<Matrix> masks;
    /// Sigmoid outputs clamped into [kProbEpsilon, 1 - kProbEpsilon].
    std::vector<double> probs;
};

/// In train mode, dropout masks are drawn from `rng` (inverted dropout, so
/// eval needs no rescaling); rng may be null in eval mode or when
/// dropout_rate == 0.
ForwardTrace forward_trace(const ParamSet& params, const Matrix& features, RunMode mode,
                           double dropout_rate, RngStream* rng);

std::vector<double> forward(const ParamSet& params, const Matrix& features, RunMode mode,
                            double dropout_rate, RngStream* rng);

/// Eval-mode convenience.
std::vector<double> predict_probs(const ParamSet& params, const Matrix& features);

/// Mean binary cross-entropy over the batch.
double bce_loss(const std::vector<double>& probs, const std::vector<int>& labels);

struct BackwardResult {
    double loss = 0.0;
    GradSet grads;
};

/// Train-mode forward + analytic backprop of the mean BCE. The dropout
/// masks drawn from `rng` are the ones the returned gradients assume.
BackwardResult backward(const ParamSet& params, const Matrix& features,
                        const std::vector<int>& labels, double dropout_rate, RngStream& rng);

struct TrainHyper {
    int epochs = 50;
    int batch_size = 16;
    double learning_rate = 0.01;
};

/// Mini-batch SGD. Shuffles each epoch from `rng`, leaves the input
/// ParamSet untouched, and returns the trained copy. Throws Error with the
/// offending epoch if the loss turns non-finite.
ParamSet train_local(const ParamSet& params, const Matrix& features, const std::vector<int>& labels,
                     const TrainHyper& hyper, double dropout_rate, RngStream& rng);

} // namespace peerfed::nn
