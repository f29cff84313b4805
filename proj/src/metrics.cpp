#include "peerfed/metrics.hpp"

#include "peerfed/error.hpp"

namespace peerfed::metrics {

ConfusionMatrix confusion(const std::vector<int>& preds, const std::vector<int>& labels) {
    if (preds.empty()) throw Error("confusion: empty input");
    if (preds.size() != labels.size()) throw Error("confusion: length mismatch");
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        if (labels[i] == 1) {
            preds[i] == 1 ? ++cm.tp : ++cm.fn;
        } else {
            preds[i] == 1 ? ++cm.fp : ++cm.tn;
        }
    }
    return cm;
}

double accuracy(const ConfusionMatrix& cm) {
    const long total = cm.total();
    if (total == 0) throw Error("accuracy: empty confusion matrix");
    return static_cast<double>(cm.tp + cm.tn) / static_cast<double>(total);
}

std::vector<int> threshold_predictions(const std::vector<double>& probs, double threshold) {
    std::vector<int> preds(probs.size());
    for (std::size_t i = 0; i < probs.size(); ++i) {
        preds[i] = probs[i] >= threshold ? 1 : 0;
    }
    return preds;
}

} // namespace peerfed::metrics
