#pragma once

#include <vector>

namespace peerfed::metrics {

struct ConfusionMatrix {
    long tp = 0;
    long fp = 0;
    long fn = 0;
    long tn = 0;

    long total() const { return tp + fp + fn + tn; }
};

/// Tallies predictions against labels; both vectors must be nonempty 0/1
/// vectors of equal length.
ConfusionMatrix confusion(const std::vector<int>& preds, const std::vector<int>& labels);

/// (tp + tn) / total.
double accuracy(const ConfusionMatrix& cm);

/// Probability >= threshold maps to class 1.
std::vector<int> threshold_predictions(const std::vector<double>& probs, double threshold = 0.5);

/// Per-participant bookkeeping for one federation round. test_accuracy and
/// local_loss describe the participant's locally trained model on its own
/// test data; global_loss and federated_accuracy describe the round's
/// federated model on the same data; contribution is
/// |global_loss - local_loss|.
struct PeerRoundMetrics {
    int participant_id = 0;
    long dataset_size = 0;
    double test_accuracy = 0.0;
    double local_loss = 0.0;
    double global_loss = 0.0;
    double contribution = 0.0;
    double federated_accuracy = 0.0;
};

/// Round-level metrics; global_loss_avg is the mean of the per-participant
/// global losses.
struct RoundMetrics {
    std::vector<PeerRoundMetrics> peers;
    double global_loss_avg = 0.0;
    double mean_federated_accuracy = 0.0;
};

} // namespace peerfed::metrics
