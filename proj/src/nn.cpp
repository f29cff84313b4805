#include "peerfed/nn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "peerfed/error.hpp"

namespace peerfed::nn {

namespace {

double clamp_prob(double p) {
    return std::clamp(p, kProbEpsilon, 1.0 - kProbEpsilon);
}

double stable_sigmoid(double z) {
    if (z >= 0.0) {
        return 1.0 / (1.0 + std::exp(-z));
    }
    const double e = std::exp(z);
    return e / (1.0 + e);
}

// z = a_prev * W^T + b
Matrix affine(const Matrix& a_prev, const LayerParams& layer) {
    const int batch = a_prev.rows;
    const int in_dim = a_prev.cols;
    const int out_dim = layer.weights.rows;
    Matrix z(batch, out_dim);
    for (int b = 0; b < batch; ++b) {
        const double* x = a_prev.row_ptr(b);
        double* zr = z.row_ptr(b);
        for (int o = 0; o < out_dim; ++o) {
            const double* w = layer.weights.row_ptr(o);
            double acc = layer.biases[static_cast<std::size_t>(o)];
            for (int k = 0; k < in_dim; ++k) acc += w[k] * x[k];
            zr[o] = acc;
        }
    }
    return z;
}

} // namespace

Topology Topology::dense(int input_dim, const std::vector<int>& hidden_dims, double dropout_rate) {
    Topology topo;
    topo.layer_dims.reserve(hidden_dims.size() + 2);
    topo.layer_dims.push_back(input_dim);
    topo.layer_dims.insert(topo.layer_dims.end(), hidden_dims.begin(), hidden_dims.end());
    topo.layer_dims.push_back(1);
    topo.dropout_rate = dropout_rate;
    return topo;
}

void Topology::validate() const {
    if (static_cast<int>(layer_dims.size()) != kLayerDims) {
        std::ostringstream msg;
        msg << "topology must have exactly " << kLayerDims << " layer dims, got " << layer_dims.size();
        throw Error(msg.str());
    }
    for (std::size_t i = 0; i < layer_dims.size(); ++i) {
        if (layer_dims[i] <= 0) {
            std::ostringstream msg;
            msg << "layer dim " << i << " must be positive, got " << layer_dims[i];
            throw Error(msg.str());
        }
    }
    if (layer_dims.back() != 1) {
        throw Error("output layer must have exactly one unit");
    }
    if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) {
        throw Error("dropout_rate must be in [0, 1)");
    }
}

bool ParamSet::same_shape(const ParamSet& other) const {
    if (layers.size() != other.layers.size()) return false;
    for (std::size_t l = 0; l < layers.size(); ++l) {
        if (!layers[l].weights.same_shape(other.layers[l].weights)) return false;
        if (layers[l].biases.size() != other.layers[l].biases.size()) return false;
    }
    return true;
}

std::size_t ParamSet::scalar_count() const {
    std::size_t n = 0;
    for (const auto& layer : layers) {
        n += layer.weights.data.size() + layer.biases.size();
    }
    return n;
}

bool ParamSet::all_finite() const {
    for (const auto& layer : layers) {
        if (!layer.weights.all_finite()) return false;
        for (double b : layer.biases) {
            if (!std::isfinite(b)) return false;
        }
    }
    return true;
}

bool bit_equal(const ParamSet& a, const ParamSet& b) {
    return !first_difference(a, b, nullptr) && a.same_shape(b);
}

bool first_difference(const ParamSet& a, const ParamSet& b, ParamDiff* diff) {
    if (!a.same_shape(b)) {
        if (diff) *diff = ParamDiff{};
        return true;
    }
    for (std::size_t l = 0; l < a.layers.size(); ++l) {
        const auto& wa = a.layers[l].weights;
        const auto& wb = b.layers[l].weights;
        for (std::size_t i = 0; i < wa.data.size(); ++i) {
            if (wa.data[i] != wb.data[i]) {
                if (diff) {
                    *diff = ParamDiff{static_cast<int>(l), false,
                                      static_cast<int>(i) / wa.cols, static_cast<int>(i) % wa.cols,
                                      wa.data[i], wb.data[i]};
                }
                return true;
            }
        }
        const auto& ba = a.layers[l].biases;
        const auto& bb = b.layers[l].biases;
        for (std::size_t i = 0; i < ba.size(); ++i) {
            if (ba[i] != bb[i]) {
                if (diff) {
                    *diff = ParamDiff{static_cast<int>(l), true, static_cast<int>(i), 0, ba[i], bb[i]};
                }
                return true;
            }
        }
    }
    return false;
}

ParamSet init_params(const Topology& topology, RngStream& rng) {
    topology.validate();
    ParamSet params;
    params.layers.reserve(topology.layer_dims.size() - 1);
    for (std::size_t l = 0; l + 1 < topology.layer_dims.size(); ++l) {
        const int in_dim = topology.layer_dims[l];
        const int out_dim = topology.layer_dims[l + 1];
        LayerParams layer;
        layer.weights = Matrix(out_dim, in_dim);
        layer.biases.assign(static_cast<std::size_t>(out_dim), 0.0);
        const double limit = std::sqrt(6.0 / (in_dim + out_dim));
        for (double& w : layer.weights.data) {
            w = rng.uniform(-limit, limit);
        }
        params.layers.push_back(std::move(layer));
    }
    return params;
}

ForwardTrace forward_trace(const ParamSet& params, const Matrix& features, RunMode mode,
                           double dropout_rate, RngStream* rng) {
    if (params.layers.empty()) throw Error("empty ParamSet");
    if (features.cols != params.layers.front().weights.cols) {
        std::ostringstream msg;
        msg << "feature count " << features.cols << " does not match input dim "
            << params.layers.front().weights.cols;
        throw Error(msg.str());
    }
    const bool use_dropout = mode == RunMode::kTrain && dropout_rate > 0.0;
    if (use_dropout && rng == nullptr) {
        throw Error("train-mode forward with dropout needs an RngStream");
    }

    const int weight_layers = static_cast<int>(params.layers.size());
    ForwardTrace trace;
    trace.activations.reserve(weight_layers + 1);
    trace.activations.push_back(features);
    if (use_dropout) trace.masks.resize(static_cast<std::size_t>(weight_layers) - 1);

    for (int l = 0; l < weight_layers; ++l) {
        Matrix z = affine(trace.activations.back(), params.layers[static_cast<std::size_t>(l)]);
        const bool hidden = l + 1 < weight_layers;
        if (hidden) {
            for (double& v : z.data) v = v > 0.0 ? v : 0.0;
            if (use_dropout) {
                const double keep = 1.0 - dropout_rate;
                Matrix mask(z.rows, z.cols);
                for (std::size_t i = 0; i < mask.data.size(); ++i) {
                    mask.data[i] = rng->uniform() < keep ? 1.0 / keep : 0.0;
                    z.data[i] *= mask.data[i];
                }
                trace.masks[static_cast<std::size_t>(l)] = std::move(mask);
            }
        }
        trace.activations.push_back(std::move(z));
    }

    const Matrix& logits = trace.activations.back();
    trace.probs.resize(static_cast<std::size_t>(logits.rows));
    for (int b = 0; b < logits.rows; ++b) {
        trace.probs[static_cast<std::size_t>(b)] = clamp_prob(stable_sigmoid(logits(b, 0)));
    }
    return trace;
}

std::vector<double> forward(const ParamSet& params, const Matrix& features, RunMode mode,
                            double dropout_rate, RngStream* rng) {
    return forward_trace(params, features, mode, dropout_rate, rng).probs;
}

std::vector<double> predict_probs(const ParamSet& params, const Matrix& features) {
    return forward(params, features, RunMode::kEval, 0.0, nullptr);
}

double bce_loss(const std::vector<double>& probs, const std::vector<int>& labels) {
    if (probs.empty()) throw Error("bce_loss on empty input");
    if (probs.size() != labels.size()) {
        throw Error("bce_loss length mismatch");
    }
    double total = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        const double p = clamp_prob(probs[i]);
        const double y = static_cast<double>(labels[i]);
        total += -(y * std::log(p) + (1.0 - y) * std::log(1.0 - p));
    }
    return total / static_cast<double>(probs.size());
}

BackwardResult backward(const ParamSet& params, const Matrix& features,
                        const std::vector<int>& labels, double dropout_rate, RngStream& rng) {
    if (static_cast<std::size_t>(features.rows) != labels.size()) {
        throw Error("backward: feature rows do not match label count");
    }
    ForwardTrace trace = forward_trace(params, features, RunMode::kTrain, dropout_rate, &rng);

    const int batch = features.rows;
    const int weight_layers = static_cast<int>(params.layers.size());

    BackwardResult result;
    result.loss = bce_loss(trace.probs, labels);
    if (!std::isfinite(result.loss)) throw Error("backward: non-finite loss");

    result.grads.layers.resize(params.layers.size());
    for (std::size_t l = 0; l < params.layers.size(); ++l) {
        result.grads.layers[l].weights =
            Matrix(params.layers[l].weights.rows, params.layers[l].weights.cols);
        result.grads.layers[l].biases.assign(params.layers[l].biases.size(), 0.0);
    }

    // Output delta of the mean BCE through the sigmoid: (p - y) / batch.
    Matrix delta(batch, 1);
    for (int b = 0; b < batch; ++b) {
        delta(b, 0) = (trace.probs[static_cast<std::size_t>(b)] -
                       static_cast<double>(labels[static_cast<std::size_t>(b)])) /
                      static_cast<double>(batch);
    }

    for (int l = weight_layers - 1; l >= 0; --l) {
        const Matrix& a_prev = trace.activations[static_cast<std::size_t>(l)];
        auto& grad_layer = result.grads.layers[static_cast<std::size_t>(l)];
        const int out_dim = grad_layer.weights.rows;
        const int in_dim = grad_layer.weights.cols;

        for (int o = 0; o < out_dim; ++o) {
            double* gw = grad_layer.weights.row_ptr(o);
            double gb = 0.0;
            for (int b = 0; b < batch; ++b) {
                const double d = delta(b, o);
                gb += d;
                const double* x = a_prev.row_ptr(b);
                for (int k = 0; k < in_dim; ++k) gw[k] += d * x[k];
            }
            grad_layer.biases[static_cast<std::size_t>(o)] = gb;
        }

        if (l == 0) break;

        // Propagate through the previous hidden layer's dropout and ReLU.
        const Matrix& weights = params.layers[static_cast<std::size_t>(l)].weights;
        Matrix delta_prev(batch, in_dim);
        for (int b = 0; b < batch; ++b) {
            const double* d = delta.row_ptr(b);
            double* dp = delta_prev.row_ptr(b);
            for (int o = 0; o < out_dim; ++o) {
                const double dv = d[o];
                if (dv == 0.0) continue;
                const double* w = weights.row_ptr(o);
                for (int k = 0; k < in_dim; ++k) dp[k] += dv * w[k];
            }
        }
        const Matrix& a_hidden = trace.activations[static_cast<std::size_t>(l)];
        if (!trace.masks.empty() && !trace.masks[static_cast<std::size_t>(l) - 1].data.empty()) {
            const Matrix& mask = trace.masks[static_cast<std::size_t>(l) - 1];
            for (std::size_t i = 0; i < delta_prev.data.size(); ++i) {
                // a_hidden already includes the mask; a > 0 iff the unit
                // survived dropout and its pre-activation was positive.
                delta_prev.data[i] = a_hidden.data[i] > 0.0 ? delta_prev.data[i] * mask.data[i] : 0.0;
            }
        } else {
            for (std::size_t i = 0; i < delta_prev.data.size(); ++i) {
                if (a_hidden.data[i] <= 0.0) delta_prev.data[i] = 0.0;
            }
        }
        delta = std::move(delta_prev);
    }

    if (!result.grads.all_finite()) throw Error("backward: non-finite gradient");
    return result;
}

ParamSet train_local(const ParamSet& params, const Matrix& features, const std::vector<int>& labels,
                     const TrainHyper& hyper, double dropout_rate, RngStream& rng) {
    if (features.rows == 0) throw Error("train_local: empty dataset");
    if (static_cast<std::size_t>(features.rows) != labels.size()) {
        throw Error("train_local: feature rows do not match label count");
    }
    if (hyper.epochs < 0 || hyper.batch_size < 1) {
        throw Error("train_local: invalid hyperparameters");
    }
    if (params.layers.empty() || features.cols != params.layers.front().weights.cols) {
        throw Error("train_local: feature count does not match input dim");
    }

    ParamSet current = params;
    std::vector<int> order(static_cast<std::size_t>(features.rows));
    std::iota(order.begin(), order.end(), 0);

    for (int epoch = 0; epoch < hyper.epochs; ++epoch) {
        rng.shuffle(order);
        for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(hyper.batch_size)) {
            const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(hyper.batch_size));
            const int rows = static_cast<int>(end - start);
            Matrix batch(rows, features.cols);
            std::vector<int> batch_labels(static_cast<std::size_t>(rows));
            for (int r = 0; r < rows; ++r) {
                const int src = order[start + static_cast<std::size_t>(r)];
                std::copy(features.row_ptr(src), features.row_ptr(src) + features.cols, batch.row_ptr(r));
                batch_labels[static_cast<std::size_t>(r)] = labels[static_cast<std::size_t>(src)];
            }

            BackwardResult step;
            try {
                step = backward(current, batch, batch_labels, dropout_rate, rng);
            } catch (const Error& e) {
                std::ostringstream msg;
                msg << "train_local diverged at epoch " << epoch + 1 << ": " << e.what();
                throw Error(msg.str());
            }

            for (std::size_t l = 0; l < current.layers.size(); ++l) {
                auto& layer = current.layers[l];
                const auto& grad = step.grads.layers[l];
                for (std::size_t i = 0; i < layer.weights.data.size(); ++i) {
                    layer.weights.data[i] -= hyper.learning_rate * grad.weights.data[i];
                }
                for (std::size_t i = 0; i < layer.biases.size(); ++i) {
                    layer.biases[i] -= hyper.learning_rate * grad.biases[i];
                }
            }
        }
    }
    return current;
}

} // namespace peerfed::nn
