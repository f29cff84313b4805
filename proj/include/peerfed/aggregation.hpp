#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "peerfed/nn.hpp"

namespace peerfed::agg {

/// The six federation strategies. Weight formulas, in participant order i
/// with n participants, dataset sizes |D_i|, local test accuracies acc_i
/// and contributions C_i:
///
///   fed_avg           w_i = 1/n
///   size              w_i = |D_i| / sum_k |D_k|
///   inv_accuracy      w_i = (1/acc_i) / sum_k (1/acc_k)
///   size_accuracy     w_i = acc_i * |D_i| / sum_k |D_k|   (sum != 1)
///   contribution      w_i = C_i / sum_k C_k
///   inv_contribution  w_i = (1/C_i) / sum_k (1/C_k)
enum class StrategyId {
    kFedAvg,
    kSize,
    kInvAccuracy,
    kSizeAccuracy,
    kContribution,
    kInvContribution,
};

inline constexpr StrategyId kAllStrategies[] = {
    StrategyId::kFedAvg,        StrategyId::kSize,         StrategyId::kInvAccuracy,
    StrategyId::kSizeAccuracy,  StrategyId::kContribution, StrategyId::kInvContribution,
};

std::string strategy_name(StrategyId id);
std::optional<StrategyId> strategy_from_name(std::string_view name);

/// Column header used in result tables.
std::string strategy_column_label(StrategyId id);

/// Per-participant statistics consumed by compute_weights. local_loss is
/// the participant's current local model's loss on its own data;
/// global_loss is the previous round's federated model's loss on the same
/// data (equal to local_loss before any federated model exists, which
/// makes every contribution zero).
struct ParticipantStats {
    long dataset_size = 0;
    double test_accuracy = 0.0;
    double local_loss = 0.0;
    double global_loss = 0.0;
    double contribution = 0.0;
};

/// |global_loss - local_loss|; both inputs must be finite and nonnegative.
double compute_contribution(double local_loss, double global_loss);

/// Per-participant aggregation coefficients, in participant-id order.
struct WeightVector {
    std::vector<double> weights;

    double sum() const;
};

struct WeightResult {
    WeightVector weights;
    /// True when the contribution strategy saw all-zero contributions and
    /// fell back to fed_avg weights.
    bool fed_avg_fallback = false;
};

/// Additive guard applied to an accuracy or contribution of exactly zero
/// wherever the formula would otherwise divide by it.
inline constexpr double kZeroGuardEps = 1e-9;

/// Computes the strategy's weights from the stats. Requires n >= 2.
/// When normalize_size_accuracy is set, the size_accuracy weights are
/// rescaled to sum to 1 instead of keeping the formula's natural sum.
WeightResult compute_weights(StrategyId strategy, const std::vector<ParticipantStats>& stats,
                             bool normalize_size_accuracy = false);

/// Elementwise weighted sum of shape-identical ParamSets, accumulated in
/// ascending participant-id order so every peer computes bit-identical
/// results.
nn::ParamSet aggregate(const std::vector<nn::ParamSet>& param_sets, const WeightVector& weights);

} // namespace peerfed::agg
