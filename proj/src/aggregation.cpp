#include "peerfed/aggregation.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "peerfed/error.hpp"

namespace peerfed::agg {

namespace {

double guarded(double value) {
    return value == 0.0 ? kZeroGuardEps : value;
}

void validate_stats(const std::vector<ParticipantStats>& stats) {
    if (stats.size() < 2) {
        throw Error("a peer-to-peer federation needs a minimum of two participants");
    }
    for (std::size_t i = 0; i < stats.size(); ++i) {
        const auto& s = stats[i];
        const bool ok = s.dataset_size >= 1 && std::isfinite(s.test_accuracy) &&
                        s.test_accuracy >= 0.0 && s.test_accuracy <= 1.0 &&
                        std::isfinite(s.local_loss) && s.local_loss >= 0.0 &&
                        std::isfinite(s.global_loss) && s.global_loss >= 0.0 &&
                        std::isfinite(s.contribution) && s.contribution >= 0.0;
        if (!ok) {
            std::ostringstream msg;
            msg << "invalid stats for participant " << i + 1;
            throw Error(msg.str());
        }
    }
}

// Sums in ascending value order so the result does not depend on the order
// participants are listed in; weights stay bit-identical under permutation.
double canonical_sum(std::vector<double> terms) {
    std::sort(terms.begin(), terms.end());
    return std::accumulate(terms.begin(), terms.end(), 0.0);
}

std::vector<double> normalized(std::vector<double> terms) {
    const double total = canonical_sum(terms);
    for (double& t : terms) t /= total;
    return terms;
}

} // namespace

std::string strategy_name(StrategyId id) {
    switch (id) {
        case StrategyId::kFedAvg: return "fed_avg";
        case StrategyId::kSize: return "size";
        case StrategyId::kInvAccuracy: return "inv_accuracy";
        case StrategyId::kSizeAccuracy: return "size_accuracy";
        case StrategyId::kContribution: return "contribution";
        case StrategyId::kInvContribution: return "inv_contribution";
    }
    throw Error("unknown strategy id");
}

std::optional<StrategyId> strategy_from_name(std::string_view name) {
    for (StrategyId id : kAllStrategies) {
        if (strategy_name(id) == name) return id;
    }
    return std::nullopt;
}

std::string strategy_column_label(StrategyId id) {
    switch (id) {
        case StrategyId::kFedAvg: return "Acc FedAvg";
        case StrategyId::kSize: return "Acc Size";
        case StrategyId::kInvAccuracy: return "Acc Accuracy";
        case StrategyId::kSizeAccuracy: return "Acc Size&Acc";
        case StrategyId::kContribution: return "Acc Cont";
        case StrategyId::kInvContribution: return "Acc InvCont";
    }
    throw Error("unknown strategy id");
}

double compute_contribution(double local_loss, double global_loss) {
    if (!std::isfinite(local_loss) || !std::isfinite(global_loss)) {
        throw Error("compute_contribution: non-finite loss");
    }
    return std::fabs(global_loss - local_loss);
}

double WeightVector::sum() const {
    return std::accumulate(weights.begin(), weights.end(), 0.0);
}

WeightResult compute_weights(StrategyId strategy, const std::vector<ParticipantStats>& stats,
                             bool normalize_size_accuracy) {
    validate_stats(stats);
    const std::size_t n = stats.size();

    WeightResult result;
    std::vector<double>& w = result.weights.weights;
    w.resize(n);

    switch (strategy) {
        case StrategyId::kFedAvg: {
            for (double& v : w) v = 1.0 / static_cast<double>(n);
            break;
        }
        case StrategyId::kSize: {
            std::vector<double> terms(n);
            for (std::size_t i = 0; i < n; ++i) terms[i] = static_cast<double>(stats[i].dataset_size);
            w = normalized(std::move(terms));
            break;
        }
        case StrategyId::kInvAccuracy: {
            std::vector<double> terms(n);
            for (std::size_t i = 0; i < n; ++i) terms[i] = 1.0 / guarded(stats[i].test_accuracy);
            w = normalized(std::move(terms));
            break;
        }
        case StrategyId::kSizeAccuracy: {
            std::vector<double> sizes(n);
            for (std::size_t i = 0; i < n; ++i) sizes[i] = static_cast<double>(stats[i].dataset_size);
            const double size_total = canonical_sum(std::move(sizes));
            for (std::size_t i = 0; i < n; ++i) {
                w[i] = stats[i].test_accuracy * static_cast<double>(stats[i].dataset_size) / size_total;
            }
            if (normalize_size_accuracy) {
                w = normalized(std::move(w));
            }
            break;
        }
        case StrategyId::kContribution: {
            std::vector<double> contribs(n);
            for (std::size_t i = 0; i < n; ++i) contribs[i] = stats[i].contribution;
            const double contrib_total = canonical_sum(std::move(contribs));
            if (contrib_total == 0.0) {
                // No federated model has produced a contribution signal yet.
                for (double& v : w) v = 1.0 / static_cast<double>(n);
                result.fed_avg_fallback = true;
                break;
            }
            for (std::size_t i = 0; i < n; ++i) w[i] = stats[i].contribution / contrib_total;
            break;
        }
        case StrategyId::kInvContribution: {
            std::vector<double> terms(n);
            for (std::size_t i = 0; i < n; ++i) terms[i] = 1.0 / guarded(stats[i].contribution);
            w = normalized(std::move(terms));
            break;
        }
    }

    for (double v : w) {
        if (!std::isfinite(v) || v < 0.0) throw Error("compute_weights produced an invalid weight");
    }
    return result;
}

nn::ParamSet aggregate(const std::vector<nn::ParamSet>& param_sets, const WeightVector& weights) {
    if (param_sets.empty()) throw Error("aggregate: no ParamSets");
    if (param_sets.size() != weights.weights.size()) {
        throw Error("aggregate: weight count does not match participant count");
    }
    for (const auto& p : param_sets) {
        if (!p.same_shape(param_sets.front())) throw Error("aggregate: ParamSet shape mismatch");
    }

    nn::ParamSet out;
    out.layers.resize(param_sets.front().layers.size());
    for (std::size_t l = 0; l < out.layers.size(); ++l) {
        const auto& ref = param_sets.front().layers[l];
        out.layers[l].weights = Matrix(ref.weights.rows, ref.weights.cols);
        out.layers[l].biases.assign(ref.biases.size(), 0.0);
    }

    // Fixed ascending participant order keeps the result bit-reproducible.
    for (std::size_t i = 0; i < param_sets.size(); ++i) {
        const double wi = weights.weights[i];
        for (std::size_t l = 0; l < out.layers.size(); ++l) {
            auto& acc = out.layers[l];
            const auto& src = param_sets[i].layers[l];
            for (std::size_t k = 0; k < acc.weights.data.size(); ++k) {
                acc.weights.data[k] += wi * src.weights.data[k];
            }
            for (std::size_t k = 0; k < acc.biases.size(); ++k) {
                acc.biases[k] += wi * src.biases[k];
            }
        }
    }

    if (!out.all_finite()) throw Error("aggregate: non-finite result");
    return out;
}

} // namespace peerfed::agg
