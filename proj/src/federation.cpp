#include "peerfed/federation.hpp"

#include <future>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "peerfed/error.hpp"

namespace peerfed::fed {

namespace {

using json = nlohmann::json;

struct LocalUpdate {
    nn::ParamSet params;
    agg::ParticipantStats stats;
};

LocalUpdate train_and_evaluate(Peer& peer, const RoundOptions& options) {
    LocalUpdate update;
    update.params = nn::train_local(peer.current_params, peer.partition.train.features,
                                    peer.partition.train.labels, options.hyper,
                                    options.dropout_rate, peer.train_stream);

    const auto probs = nn::predict_probs(update.params, peer.partition.test.features);
    const auto preds = metrics::threshold_predictions(probs);
    const auto cm = metrics::confusion(preds, peer.partition.test.labels);

    update.stats.dataset_size = peer.partition.row_count();
    update.stats.test_accuracy = metrics::accuracy(cm);
    update.stats.local_loss = nn::bce_loss(probs, peer.partition.test.labels);
    // Before a federated model exists the global loss defaults to the local
    // loss, which makes every contribution exactly zero.
    update.stats.global_loss =
        peer.has_prior_global ? peer.prior_global_loss : update.stats.local_loss;
    update.stats.contribution =
        agg::compute_contribution(update.stats.local_loss, update.stats.global_loss);
    return update;
}

template <typename Fn>
void for_each_peer(std::vector<Peer>& peers, bool parallel, Fn&& fn) {
    if (!parallel) {
        for (std::size_t i = 0; i < peers.size(); ++i) fn(i);
        return;
    }
    std::vector<std::future<void>> tasks;
    tasks.reserve(peers.size());
    for (std::size_t i = 0; i < peers.size(); ++i) {
        tasks.push_back(std::async(std::launch::async, [&fn, i] { fn(i); }));
    }
    for (auto& task : tasks) task.get();
}

} // namespace

std::vector<Peer> initiate(const nn::Topology& topology,
                           const std::vector<data::Partition>& partitions, std::uint64_t seed) {
    if (partitions.size() < 2) {
        throw Error("a peer-to-peer federation needs a minimum of two participants");
    }
    topology.validate();
    for (const auto& part : partitions) {
        if (part.train.features.cols != topology.input_dim()) {
            std::ostringstream msg;
            msg << "partition " << part.participant_id << " has " << part.train.features.cols
                << " features but the topology expects " << topology.input_dim();
            throw Error(msg.str());
        }
    }

    RngStream init_rng(seed, 0);
    const nn::ParamSet initial = nn::init_params(topology, init_rng);

    std::vector<Peer> peers;
    peers.reserve(partitions.size());
    for (std::size_t i = 0; i < partitions.size(); ++i) {
        Peer peer;
        peer.id = static_cast<int>(i) + 1;
        peer.partition = partitions[i];
        peer.current_params = initial;
        peer.train_stream = RngStream(seed, static_cast<std::uint64_t>(peer.id));
        peers.push_back(std::move(peer));
    }
    return peers;
}

RoundRecord run_round(std::vector<Peer>& peers, agg::StrategyId strategy,
                      const RoundOptions& options, int round_index) {
    const std::size_t n = peers.size();
    if (n < 2) throw Error("a peer-to-peer federation needs a minimum of two participants");

    // (a)+(b): local training and self-evaluation.
    std::vector<LocalUpdate> updates(n);
    for_each_peer(peers, options.parallel,
                  [&](std::size_t i) { updates[i] = train_and_evaluate(peers[i], options); });

    // (c): simulated lossless broadcast; every peer ends up with the other
    // n-1 models in its inbox plus its own.
    std::vector<agg::ParticipantStats> all_stats(n);
    std::vector<nn::ParamSet> all_params(n);
    for (std::size_t i = 0; i < n; ++i) {
        all_stats[i] = updates[i].stats;
        all_params[i] = updates[i].params;
        peers[i].stats = updates[i].stats;
        peers[i].inbox.clear();
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i != j) peers[i].inbox.emplace(peers[j].id, all_params[j]);
        }
    }

    // (d): every peer independently computes the weights and aggregates all
    // n models in participant-id order.
    std::vector<agg::WeightResult> weight_results(n);
    std::vector<nn::ParamSet> aggregated(n);
    for_each_peer(peers, options.parallel, [&](std::size_t i) {
        weight_results[i] = agg::compute_weights(strategy, all_stats, options.normalize_size_accuracy);
        std::vector<nn::ParamSet> inputs;
        inputs.reserve(n);
        for (std::size_t j = 0; j < n; ++j) {
            inputs.push_back(j == i ? all_params[j] : peers[i].inbox.at(peers[j].id));
        }
        aggregated[i] = agg::aggregate(inputs, weight_results[i].weights);
    });

    // Consensus: all peers must hold bit-identical federated parameters.
    for (std::size_t i = 1; i < n; ++i) {
        nn::ParamDiff diff;
        if (nn::first_difference(aggregated[0], aggregated[i], &diff)) {
            std::ostringstream msg;
            msg << "consensus violation at round " << round_index << ": peers 1 and " << i + 1
                << " differ at layer " << diff.layer + 1 << (diff.in_bias ? " bias[" : " weight[")
                << diff.row << (diff.in_bias ? "" : "][" + std::to_string(diff.col)) << "] ("
                << diff.lhs << " vs " << diff.rhs << ")";
            throw Error(msg.str());
        }
    }

    // (e): adopt the federated model and evaluate it on each peer's own
    // data; that loss becomes the next round's contribution signal.
    RoundRecord record;
    record.round_index = round_index;
    record.strategy = strategy;
    record.weights = weight_results[0].weights;
    record.consensus_ok = true;
    record.fallback_used = weight_results[0].fed_avg_fallback;
    record.metrics.peers.resize(n);

    for_each_peer(peers, options.parallel, [&](std::size_t i) {
        peers[i].current_params = aggregated[i];
        const auto fed_probs = nn::predict_probs(peers[i].current_params, peers[i].partition.test.features);
        const auto fed_preds = metrics::threshold_predictions(fed_probs);
        const double fed_acc = metrics::accuracy(metrics::confusion(fed_preds, peers[i].partition.test.labels));
        const double fed_loss = nn::bce_loss(fed_probs, peers[i].partition.test.labels);

        peers[i].prior_global_loss = fed_loss;
        peers[i].has_prior_global = true;

        auto& m = record.metrics.peers[i];
        m.participant_id = peers[i].id;
        m.dataset_size = all_stats[i].dataset_size;
        m.test_accuracy = all_stats[i].test_accuracy;
        m.local_loss = all_stats[i].local_loss;
        m.global_loss = fed_loss;
        m.contribution = agg::compute_contribution(m.local_loss, m.global_loss);
        m.federated_accuracy = fed_acc;
    });

    double loss_sum = 0.0;
    double acc_sum = 0.0;
    for (const auto& m : record.metrics.peers) {
        loss_sum += m.global_loss;
        acc_sum += m.federated_accuracy;
    }
    record.metrics.global_loss_avg = loss_sum / static_cast<double>(n);
    record.metrics.mean_federated_accuracy = acc_sum / static_cast<double>(n);
    return record;
}

TerminationDecision check_termination(const std::vector<RoundRecord>& history,
                                      const TerminationCriteria& criteria) {
    if (history.empty()) return {false, ""};
    if (static_cast<int>(history.size()) >= criteria.max_rounds) {
        return {true, "max_rounds"};
    }
    if (criteria.target_mean_accuracy &&
        history.back().metrics.mean_federated_accuracy >= *criteria.target_mean_accuracy) {
        return {true, "target_accuracy"};
    }
    if (criteria.patience > 0 && static_cast<int>(history.size()) > criteria.patience) {
        std::size_t best_index = 0;
        double best = -1.0;
        for (std::size_t i = 0; i < history.size(); ++i) {
            const double acc = history[i].metrics.mean_federated_accuracy;
            if (acc > best) {
                best = acc;
                best_index = i;
            }
        }
        if (history.size() - 1 - best_index >= static_cast<std::size_t>(criteria.patience)) {
            return {true, "patience"};
        }
    }
    return {false, ""};
}

FederationResult run_federation(const FederationConfig& config,
                                const std::vector<data::Partition>& partitions) {
    std::vector<Peer> peers = initiate(config.topology, partitions, config.seed);

    RoundOptions options;
    options.hyper = config.hyper;
    options.dropout_rate = config.dropout_rate;
    options.parallel = config.parallel_peers;
    options.normalize_size_accuracy = config.normalize_size_accuracy;

    FederationResult result;
    for (;;) {
        RoundRecord record = run_round(peers, config.strategy, options,
                                       static_cast<int>(result.history.size()) + 1);
        if (result.history.empty()) {
            result.baseline_local_accuracy.reserve(peers.size());
            for (const auto& m : record.metrics.peers) {
                result.baseline_local_accuracy.push_back(m.test_accuracy);
            }
        }
        result.history.push_back(std::move(record));
        const auto decision = check_termination(result.history, config.termination);
        if (decision.stop) {
            result.termination_reason = decision.reason;
            break;
        }
    }

    result.final_params = peers.front().current_params;
    result.final_peer_accuracy.reserve(peers.size());
    for (const auto& m : result.history.back().metrics.peers) {
        result.final_peer_accuracy.push_back(m.federated_accuracy);
    }
    return result;
}

std::string round_record_to_json_line(const RoundRecord& record) {
    json peers = json::array();
    for (const auto& m : record.metrics.peers) {
        peers.push_back({
            {"id", m.participant_id},
            {"dataset_size", m.dataset_size},
            {"test_accuracy", m.test_accuracy},
            {"local_loss", m.local_loss},
            {"global_loss", m.global_loss},
            {"contribution", m.contribution},
            {"federated_accuracy", m.federated_accuracy},
        });
    }
    const json line = {
        {"round", record.round_index},
        {"strategy", agg::strategy_name(record.strategy)},
        {"weights", record.weights.weights},
        {"consensus_ok", record.consensus_ok},
        {"fallback_used", record.fallback_used},
        {"global_loss_avg", record.metrics.global_loss_avg},
        {"mean_federated_accuracy", record.metrics.mean_federated_accuracy},
        {"peers", peers},
    };
    return line.dump();
}

std::string history_to_jsonl(const std::vector<RoundRecord>& history) {
    std::string out;
    for (const auto& record : history) {
        out += round_record_to_json_line(record);
        out += '\n';
    }
    return out;
}

} // namespace peerfed::fed
