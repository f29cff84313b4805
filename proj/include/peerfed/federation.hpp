#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "peerfed/aggregation.hpp"
#include "peerfed/dataset.hpp"
#include "peerfed/metrics.hpp"
#include "peerfed/nn.hpp"

namespace peerfed::fed {

struct TerminationCriteria {
    int max_rounds = 10;
    std::optional<double> target_mean_accuracy;
    /// Rounds without mean-accuracy improvement before stopping; 0 disables.
    int patience = 5;
};

/// One participant in the fully connected mesh.
struct Peer {
    int id = 0;
    data::Partition partition;
    /// Consensus parameters entering the next round.
    nn::ParamSet current_params;
    /// Private training stream; advances round by round.
    RngStream train_stream;
    /// Stats this peer broadcast in the latest round.
    agg::ParticipantStats stats;
    /// Models received in the latest round (exactly n-1 at aggregation time).
    std::map<int, nn::ParamSet> inbox;
    /// Loss of the previous round's federated model on this peer's test
    /// data; feeds the next round's contribution.
    double prior_global_loss = 0.0;
    bool has_prior_global = false;
};

struct RoundRecord {
    int round_index = 0;
    agg::StrategyId strategy = agg::StrategyId::kFedAvg;
    agg::WeightVector weights;
    metrics::RoundMetrics metrics;
    bool consensus_ok = false;
    bool fallback_used = false;
};

/// One line of the documented history export (see README for field names).
std::string round_record_to_json_line(const RoundRecord& record);
std::string history_to_jsonl(const std::vector<RoundRecord>& history);

struct RoundOptions {
    nn::TrainHyper hyper;
    double dropout_rate = 0.2;
    /// Train and aggregate the peers on worker threads; observationally
    /// identical to the sequential path.
    bool parallel = false;
    bool normalize_size_accuracy = false;
};

/// Peer 1 draws the initial model from (seed, stream 0) and sends it to
/// everyone, so all peers start bit-identical; per-peer training streams
/// derive from (seed, peer id). Throws unless there are at least two
/// participants.
std::vector<Peer> initiate(const nn::Topology& topology,
                           const std::vector<data::Partition>& partitions, std::uint64_t seed);

/// One protocol round: local training, evaluation, simulated lossless
/// broadcast, independent per-peer aggregation, and the consensus check
/// (a bit mismatch aborts with diagnostics).
RoundRecord run_round(std::vector<Peer>& peers, agg::StrategyId strategy,
                      const RoundOptions& options, int round_index);

struct TerminationDecision {
    bool stop = false;
    std::string reason;
};

TerminationDecision check_termination(const std::vector<RoundRecord>& history,
                                      const TerminationCriteria& criteria);

struct FederationConfig {
    nn::Topology topology;
    nn::TrainHyper hyper;
    TerminationCriteria termination;
    agg::StrategyId strategy = agg::StrategyId::kFedAvg;
    std::uint64_t seed = 1;
    double dropout_rate = 0.2;
    bool parallel_peers = false;
    bool normalize_size_accuracy = false;
};

struct FederationResult {
    /// Consensus parameters after the final round.
    nn::ParamSet final_params;
    std::vector<RoundRecord> history;
    /// Final federated model's accuracy on each peer's test set.
    std::vector<double> final_peer_accuracy;
    /// Each peer's round-1 locally trained model's accuracy, before any
    /// aggregation.
    std::vector<double> baseline_local_accuracy;
    std::string termination_reason;
};

FederationResult run_federation(const FederationConfig& config,
                                const std::vector<data::Partition>& partitions);

} // namespace peerfed::fed
