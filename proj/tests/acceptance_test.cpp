// Acceptance suite: runs every top-level requirement end to end and prints
// one PASS/FAIL line per criterion. Exit code is the number of failures.
//
// Usage: acceptance_test [repo_root]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "peerfed/aggregation.hpp"
#include "peerfed/bench.hpp"
#include "peerfed/dataset.hpp"
#include "peerfed/federation.hpp"
#include "peerfed/nn.hpp"
#include "peerfed/rng.hpp"

using namespace peerfed;
namespace fs = std::filesystem;

namespace {

std::string g_root = ".";
int g_failures = 0;

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void report(int criterion, const std::string& name, bool pass, const std::string& detail) {
    std::printf("[%s] criterion %d (%s): %s\n", pass ? "PASS" : "FAIL", criterion, name.c_str(),
                detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

// --------------------------------------------------------------------------
// 1. Gradient oracle
// --------------------------------------------------------------------------

nn::GradSet fd_grads(const nn::ParamSet& params, const Matrix& x, const std::vector<int>& y,
                     double dropout, const RngStream& state) {
    const double h = 1e-5;
    const auto loss_at = [&](const nn::ParamSet& p) {
        RngStream rng = state;
        return nn::bce_loss(nn::forward(p, x, nn::RunMode::kTrain, dropout, &rng), y);
    };
    nn::GradSet fd;
    fd.layers.resize(params.layers.size());
    for (std::size_t l = 0; l < params.layers.size(); ++l) {
        fd.layers[l].weights = Matrix(params.layers[l].weights.rows, params.layers[l].weights.cols);
        fd.layers[l].biases.assign(params.layers[l].biases.size(), 0.0);
        for (std::size_t i = 0; i < params.layers[l].weights.data.size(); ++i) {
            auto plus = params, minus = params;
            plus.layers[l].weights.data[i] += h;
            minus.layers[l].weights.data[i] -= h;
            fd.layers[l].weights.data[i] = (loss_at(plus) - loss_at(minus)) / (2 * h);
        }
        for (std::size_t i = 0; i < params.layers[l].biases.size(); ++i) {
            auto plus = params, minus = params;
            plus.layers[l].biases[i] += h;
            minus.layers[l].biases[i] -= h;
            fd.layers[l].biases[i] = (loss_at(plus) - loss_at(minus)) / (2 * h);
        }
    }
    return fd;
}

void criterion_1_gradient_oracle() {
    const auto start = std::chrono::steady_clock::now();
    double worst = 0.0;
    int networks = 0;
    for (std::uint64_t trial = 0; trial < 24; ++trial) {
        RngStream meta(5000 + trial, 0);
        std::vector<int> dims{1 + static_cast<int>(meta.below(3))};
        for (int l = 0; l < 4; ++l) dims.push_back(1 + static_cast<int>(meta.below(3)));
        dims.push_back(1);
        const nn::Topology topo(dims, 0.0);

        RngStream init_rng(6000 + trial, 0);
        auto params = nn::init_params(topo, init_rng);
        // Generic biases keep pre-activations off the ReLU kink, where
        // central differences and the one-sided derivative disagree.
        for (auto& layer : params.layers) {
            for (double& b : layer.biases) b = init_rng.uniform(-0.5, 0.5);
        }

        const int batch = 2 + static_cast<int>(meta.below(5));
        Matrix x(batch, dims[0]);
        std::vector<int> y(static_cast<std::size_t>(batch));
        for (double& v : x.data) v = meta.uniform(-2.0, 2.0);
        for (int& label : y) label = static_cast<int>(meta.below(2));

        const double dropout = trial % 6 == 5 ? 0.25 : 0.0;
        const RngStream mask_state(7000 + trial, 1);

        RngStream analytic_rng = mask_state;
        const auto analytic = nn::backward(params, x, y, dropout, analytic_rng);
        const auto fd = fd_grads(params, x, y, dropout, mask_state);

        for (std::size_t l = 0; l < analytic.grads.layers.size(); ++l) {
            for (std::size_t i = 0; i < analytic.grads.layers[l].weights.data.size(); ++i) {
                const double a = analytic.grads.layers[l].weights.data[i];
                const double f = fd.layers[l].weights.data[i];
                const double denom = std::max(std::fabs(a), std::fabs(f));
                if (denom >= 1e-8) worst = std::max(worst, std::fabs(a - f) / denom);
            }
            for (std::size_t i = 0; i < analytic.grads.layers[l].biases.size(); ++i) {
                const double a = analytic.grads.layers[l].biases[i];
                const double f = fd.layers[l].biases[i];
                const double denom = std::max(std::fabs(a), std::fabs(f));
                if (denom >= 1e-8) worst = std::max(worst, std::fabs(a - f) / denom);
            }
        }
        ++networks;
    }
    const double elapsed = seconds_since(start);
    std::ostringstream detail;
    detail << networks << " networks, max relative error " << worst << ", " << elapsed << " s";
    report(1, "gradient oracle", networks >= 20 && worst < 1e-4 && elapsed < 10.0, detail.str());
}

// --------------------------------------------------------------------------
// 2. Aggregation oracle (direct transcription of the six weight formulas)
// --------------------------------------------------------------------------

std::vector<double> oracle_weights(agg::StrategyId id, const std::vector<agg::ParticipantStats>& s,
                                   bool* fallback = nullptr) {
    const std::size_t n = s.size();
    const double eps = 1e-9;
    std::vector<double> w(n);
    if (fallback) *fallback = false;
    switch (id) {
        case agg::StrategyId::kFedAvg:
            for (auto& v : w) v = 1.0 / static_cast<double>(n);
            break;
        case agg::StrategyId::kSize: {
            double total = 0.0;
            for (const auto& x : s) total += static_cast<double>(x.dataset_size);
            for (std::size_t i = 0; i < n; ++i) w[i] = static_cast<double>(s[i].dataset_size) / total;
            break;
        }
        case agg::StrategyId::kInvAccuracy: {
            double total = 0.0;
            for (const auto& x : s) total += 1.0 / (x.test_accuracy == 0.0 ? eps : x.test_accuracy);
            for (std::size_t i = 0; i < n; ++i) {
                w[i] = (1.0 / (s[i].test_accuracy == 0.0 ? eps : s[i].test_accuracy)) / total;
            }
            break;
        }
        case agg::StrategyId::kSizeAccuracy: {
            double total = 0.0;
            for (const auto& x : s) total += static_cast<double>(x.dataset_size);
            for (std::size_t i = 0; i < n; ++i) {
                w[i] = s[i].test_accuracy * static_cast<double>(s[i].dataset_size) / total;
            }
            break;
        }
        case agg::StrategyId::kContribution: {
            double total = 0.0;
            for (const auto& x : s) total += x.contribution;
            if (total == 0.0) {
                for (auto& v : w) v = 1.0 / static_cast<double>(n);
                if (fallback) *fallback = true;
                break;
            }
            for (std::size_t i = 0; i < n; ++i) w[i] = s[i].contribution / total;
            break;
        }
        case agg::StrategyId::kInvContribution: {
            double total = 0.0;
            for (const auto& x : s) total += 1.0 / (x.contribution == 0.0 ? eps : x.contribution);
            for (std::size_t i = 0; i < n; ++i) {
                w[i] = (1.0 / (s[i].contribution == 0.0 ? eps : s[i].contribution)) / total;
            }
            break;
        }
    }
    return w;
}

nn::ParamSet scalar_model(double value) {
    nn::ParamSet p;
    nn::LayerParams layer;
    layer.weights = Matrix(1, 1, value);
    layer.biases = {0.0};
    p.layers.push_back(std::move(layer));
    return p;
}

void criterion_2_aggregation_oracle() {
    RngStream rng(8100, 0);
    double worst = 0.0;
    bool fallback_seen = false;
    bool guard_seen = false;
    int checks = 0;

    for (int trial = 0; trial < 400; ++trial) {
        const std::size_t n = 2 + trial % 3; // 2, 3, 4
        std::vector<agg::ParticipantStats> stats(n);
        std::vector<double> scalars(n);
        for (std::size_t i = 0; i < n; ++i) {
            stats[i].dataset_size = 1 + static_cast<long>(rng.below(300));
            stats[i].test_accuracy = trial % 7 == 3 && i == 0 ? 0.0 : rng.uniform(0.0, 1.0);
            stats[i].local_loss = rng.uniform(0.0, 2.0);
            stats[i].global_loss = trial % 5 == 4 ? stats[i].local_loss : rng.uniform(0.0, 2.0);
            stats[i].contribution = std::fabs(stats[i].global_loss - stats[i].local_loss);
            scalars[i] = rng.uniform(-3.0, 3.0);
        }

        for (agg::StrategyId id : agg::kAllStrategies) {
            bool expect_fallback = false;
            const auto expected_w = oracle_weights(id, stats, &expect_fallback);
            const auto got = agg::compute_weights(id, stats);
            if (got.fed_avg_fallback != expect_fallback) {
                report(2, "aggregation oracle", false, "fallback flag mismatch");
                return;
            }
            fallback_seen = fallback_seen || expect_fallback;
            for (std::size_t i = 0; i < n; ++i) {
                worst = std::max(worst, std::fabs(got.weights.weights[i] - expected_w[i]));
            }

            std::vector<nn::ParamSet> models;
            for (double v : scalars) models.push_back(scalar_model(v));
            const auto merged = agg::aggregate(models, got.weights);
            double expected_scalar = 0.0;
            for (std::size_t i = 0; i < n; ++i) expected_scalar += expected_w[i] * scalars[i];
            worst = std::max(worst, std::fabs(merged.layers[0].weights.data[0] - expected_scalar));

            if (id == agg::StrategyId::kInvAccuracy && stats[0].test_accuracy == 0.0) {
                guard_seen = true;
            }
            ++checks;
        }
    }

    std::ostringstream detail;
    detail << checks << " strategy evaluations, max abs deviation " << worst
           << (fallback_seen ? ", fallback path hit" : "")
           << (guard_seen ? ", zero-guard path hit" : "");
    report(2, "aggregation oracle", worst <= 1e-12 && fallback_seen && guard_seen, detail.str());
}

// --------------------------------------------------------------------------
// 3. Weight normalization property
// --------------------------------------------------------------------------

void criterion_3_normalization() {
    RngStream rng(8200, 0);
    double worst_norm = 0.0;
    double worst_sizeacc = 0.0;
    for (int trial = 0; trial < 10000; ++trial) {
        const std::size_t n = 2 + rng.below(6);
        std::vector<agg::ParticipantStats> stats(n);
        for (auto& s : stats) {
            s.dataset_size = 1 + static_cast<long>(rng.below(1000));
            s.test_accuracy = rng.uniform(1e-6, 1.0);
            s.local_loss = rng.uniform(0.0, 3.0);
            s.global_loss = rng.uniform(0.0, 3.0);
            s.contribution = std::fabs(s.global_loss - s.local_loss);
        }
        for (agg::StrategyId id :
             {agg::StrategyId::kFedAvg, agg::StrategyId::kSize, agg::StrategyId::kInvAccuracy,
              agg::StrategyId::kContribution, agg::StrategyId::kInvContribution}) {
            const auto got = agg::compute_weights(id, stats);
            worst_norm = std::max(worst_norm, std::fabs(got.weights.sum() - 1.0));
        }
        double acc_size = 0.0;
        double size_total = 0.0;
        for (const auto& s : stats) {
            acc_size += s.test_accuracy * static_cast<double>(s.dataset_size);
            size_total += static_cast<double>(s.dataset_size);
        }
        const auto sa = agg::compute_weights(agg::StrategyId::kSizeAccuracy, stats);
        worst_sizeacc = std::max(worst_sizeacc, std::fabs(sa.weights.sum() - acc_size / size_total));
    }
    std::ostringstream detail;
    detail << "10000 stat vectors, max |sum-1| " << worst_norm << ", max size_accuracy deviation "
           << worst_sizeacc;
    report(3, "weight normalization", worst_norm <= 1e-9 && worst_sizeacc <= 1e-9, detail.str());
}

// --------------------------------------------------------------------------
// 4. Consensus property
// --------------------------------------------------------------------------

std::vector<data::Partition> load_partitions(const std::string& file, const std::string& label,
                                             const std::string& positive,
                                             const std::vector<std::string>& drop,
                                             data::SplitKind kind, std::uint64_t seed) {
    data::CsvSchema schema;
    schema.label_column = label;
    schema.positive_label = positive;
    const auto raw = data::load_csv((fs::path(g_root) / file).string(), schema);
    data::PreprocessPolicy policy;
    policy.drop_columns = drop;
    const auto prep = data::preprocess(raw, policy);
    data::SplitScheme scheme{kind, 5, 2, seed};
    return data::partition(prep.dataset, scheme, 0.8);
}

void criterion_4_consensus() {
    const auto start = std::chrono::steady_clock::now();
    const auto parts = load_partitions("data/parkinsons.csv", "status", "1", {"name"},
                                       data::SplitKind::kRandomUneven, 77);
    const nn::Topology topo = nn::Topology::dense(parts[0].train.features.cols, {16, 12, 8, 4}, 0.1);

    bool all_ok = true;
    std::string failure;
    for (agg::StrategyId strategy : agg::kAllStrategies) {
        fed::FederationConfig config;
        config.topology = topo;
        config.hyper = {5, 16, 0.05};
        config.dropout_rate = 0.1;
        config.termination.max_rounds = 5;
        config.termination.patience = 0;
        config.strategy = strategy;
        config.seed = 404;

        config.parallel_peers = false;
        const auto serial = fed::run_federation(config, parts);
        config.parallel_peers = true;
        const auto parallel = fed::run_federation(config, parts);

        for (const auto& record : serial.history) {
            if (!record.consensus_ok) {
                all_ok = false;
                failure = "consensus flag false for " + agg::strategy_name(strategy);
            }
        }
        if (serial.history.size() != 5) {
            all_ok = false;
            failure = "expected 5 rounds";
        }
        if (fed::history_to_jsonl(serial.history) != fed::history_to_jsonl(parallel.history) ||
            !nn::bit_equal(serial.final_params, parallel.final_params)) {
            all_ok = false;
            failure = "parallel/serial mismatch for " + agg::strategy_name(strategy);
        }
    }
    std::ostringstream detail;
    detail << "6 strategies x 5 rounds x 5 peers, parallel == serial, " << seconds_since(start)
           << " s";
    report(4, "consensus", all_ok, all_ok ? detail.str() : failure);
}

// --------------------------------------------------------------------------
// 5. Directional reproduction of the benchmark headline
// --------------------------------------------------------------------------

bench::ExperimentConfig benchmark_config(const std::string& out_dir) {
    nlohmann::json body = {
        {"datasets",
         {
             {{"path", "data/breast_cancer.csv"}, {"label_column", "diagnosis"},
              {"positive_label", "M"}, {"drop_columns", {"id"}}},
             {{"path", "data/ckd.csv"}, {"label_column", "class"}, {"positive_label", "ckd"},
              {"drop_columns", {"id"}}},
             {{"path", "data/parkinsons.csv"}, {"label_column", "status"}, {"positive_label", "1"},
              {"drop_columns", {"name"}}},
             {{"path", "data/heart.csv"}, {"label_column", "target"}, {"positive_label", "1"}},
         }},
        {"splits", {"even", "random_uneven", "skewed_uneven", "skewed_uneven"}},
        {"strategies",
         {"fed_avg", "size", "inv_accuracy", "size_accuracy", "contribution", "inv_contribution"}},
        {"seeds", {1, 2, 3, 4, 5, 6, 7, 8, 9, 10}},
        {"topology", {{"hidden_dims", {32, 16, 8, 4}}, {"dropout_rate", 0.1}}},
        {"training", {{"epochs", 12}, {"batch_size", 16}, {"learning_rate", 0.05}}},
        {"termination", {{"max_rounds", 6}, {"patience", 0}}},
        {"output_dir", out_dir},
        {"format", "csv"},
    };
    return bench::config_from_json(body, g_root);
}

void criterion_5_benchmark_direction() {
    const auto start = std::chrono::steady_clock::now();
    const auto out_dir = fs::temp_directory_path() / "peerfed_acceptance_grid";
    fs::remove_all(out_dir);
    auto config = benchmark_config(out_dir.string());

    const auto outcome = bench::run_grid(config);
    const double elapsed = seconds_since(start);

    if (outcome.any_failure) {
        report(5, "benchmark direction", false,
               "grid cells failed: " + std::to_string(outcome.summary.failures.size()));
        return;
    }

    int fed_avg_index = -1;
    int inv_acc_index = -1;
    for (std::size_t k = 0; k < outcome.summary.strategy_names.size(); ++k) {
        if (outcome.summary.strategy_names[k] == "fed_avg") fed_avg_index = static_cast<int>(k);
        if (outcome.summary.strategy_names[k] == "inv_accuracy") inv_acc_index = static_cast<int>(k);
    }

    const int fed_cells = outcome.summary.cell_wins[static_cast<std::size_t>(fed_avg_index)];
    const int acc_cells = outcome.summary.cell_wins[static_cast<std::size_t>(inv_acc_index)];
    const int fed_cases = outcome.summary.case_wins[static_cast<std::size_t>(fed_avg_index)];
    const int acc_cases = outcome.summary.case_wins[static_cast<std::size_t>(inv_acc_index)];

    std::ostringstream detail;
    detail << "cells " << outcome.summary.cell_count << ": inv_accuracy " << acc_cells
           << " vs fed_avg " << fed_cells << "; cases " << outcome.summary.case_count
           << ": inv_accuracy " << acc_cases << " vs fed_avg " << fed_cases << "; " << elapsed
           << " s";
    const bool pass = outcome.summary.cell_count == 16 && outcome.summary.case_count == 160 &&
                      acc_cells >= fed_cells && elapsed < 600.0;
    report(5, "benchmark direction", pass, detail.str());
}

// --------------------------------------------------------------------------
// 6. Dataset integrity
// --------------------------------------------------------------------------

void criterion_6_dataset_integrity() {
    struct Spec {
        const char* file;
        const char* label;
        const char* positive;
        std::vector<std::string> drop;
        std::size_t rows;
        int positives; // -1 = unchecked
    };
    const std::vector<Spec> specs = {
        {"data/breast_cancer.csv", "diagnosis", "M", {"id"}, 569, 212},
        {"data/ckd.csv", "class", "ckd", {"id"}, 400, -1},
        {"data/parkinsons.csv", "status", "1", {"name"}, 195, -1},
        {"data/heart.csv", "target", "1", {}, 303, -1},
    };

    bool ok = true;
    std::string failure;
    for (const auto& spec : specs) {
        try {
            data::CsvSchema schema;
            schema.label_column = spec.label;
            schema.positive_label = spec.positive;
            const auto raw = data::load_csv((fs::path(g_root) / spec.file).string(), schema);
            if (raw.rows.size() != spec.rows) {
                ok = false;
                failure = std::string(spec.file) + ": unexpected row count";
                continue;
            }
            data::PreprocessPolicy policy;
            policy.drop_columns = spec.drop;
            const auto prep = data::preprocess(raw, policy);
            if (spec.positives >= 0 && prep.dataset.positives() != spec.positives) {
                ok = false;
                failure = std::string(spec.file) + ": unexpected positive count";
            }
            if (!prep.dataset.features.all_finite()) {
                ok = false;
                failure = std::string(spec.file) + ": non-finite features";
            }
            for (int c = 0; c < prep.dataset.features.cols && ok; ++c) {
                double mean = 0.0;
                for (int r = 0; r < prep.dataset.features.rows; ++r) {
                    mean += prep.dataset.features(r, c);
                }
                mean /= prep.dataset.features.rows;
                double var = 0.0;
                for (int r = 0; r < prep.dataset.features.rows; ++r) {
                    const double d = prep.dataset.features(r, c) - mean;
                    var += d * d;
                }
                const double stddev = std::sqrt(var / prep.dataset.features.rows);
                if (std::fabs(mean) >= 1e-9 || std::fabs(stddev - 1.0) >= 1e-6) {
                    ok = false;
                    failure = std::string(spec.file) + ": column not standardized";
                }
            }
        } catch (const std::exception& e) {
            ok = false;
            failure = std::string(spec.file) + ": " + e.what();
        }
    }
    report(6, "dataset integrity", ok,
           ok ? "569/212 breast cancer, 400 ckd, 195 parkinsons, 303 heart; all standardized"
              : failure);
}

// --------------------------------------------------------------------------
// 7. Determinism of result files
// --------------------------------------------------------------------------

std::string read_bytes(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

void criterion_7_determinism() {
    nlohmann::json body = {
        {"datasets",
         {{{"path", "data/heart.csv"}, {"label_column", "target"}, {"positive_label", "1"}}}},
        {"splits", {"even", "skewed_uneven"}},
        {"strategies", {"fed_avg", "contribution"}},
        {"seeds", {3, 9}},
        {"topology", {{"hidden_dims", {8, 8, 8, 8}}, {"dropout_rate", 0.2}}},
        {"training", {{"epochs", 3}, {"batch_size", 16}, {"learning_rate", 0.05}}},
        {"termination", {{"max_rounds", 2}, {"patience", 0}}},
        {"write_history", true},
        {"format", "markdown"},
    };
    auto config = bench::config_from_json(body, g_root);

    const auto dir_a = fs::temp_directory_path() / "peerfed_acceptance_det_a";
    const auto dir_b = fs::temp_directory_path() / "peerfed_acceptance_det_b";
    fs::remove_all(dir_a);
    fs::remove_all(dir_b);

    config.output_dir = dir_a.string();
    bench::run_grid(config);
    config.output_dir = dir_b.string();
    config.jobs = 2;
    bench::run_grid(config);

    bool ok = true;
    int files = 0;
    std::string failure;
    for (const auto& entry : fs::directory_iterator(dir_a)) {
        const auto twin = dir_b / entry.path().filename();
        if (!fs::exists(twin) || read_bytes(entry.path()) != read_bytes(twin)) {
            ok = false;
            failure = "mismatch: " + entry.path().filename().string();
            break;
        }
        ++files;
    }
    std::ostringstream detail;
    detail << files << " result files byte-identical across replays (jobs 1 vs 2)";
    report(7, "determinism", ok && files > 0, ok ? detail.str() : failure);
}

// --------------------------------------------------------------------------
// 8. Trivial aggregation identities
// --------------------------------------------------------------------------

void criterion_8_trivial_identities() {
    RngStream rng(8800, 0);
    const nn::Topology topo({4, 5, 5, 5, 5, 1}, 0.0);
    RngStream init_rng(8801, 0);
    auto base = nn::init_params(topo, init_rng);
    for (auto& layer : base.layers) {
        for (double& b : layer.biases) b = rng.uniform(-1.0, 1.0);
    }

    bool ok = true;
    std::string failure;
    double worst = 0.0;
    for (std::size_t n : {2ull, 3ull, 5ull}) {
        std::vector<agg::ParticipantStats> stats(n);
        for (auto& s : stats) {
            s.dataset_size = 1 + static_cast<long>(rng.below(200));
            s.test_accuracy = rng.uniform(0.05, 1.0);
            s.local_loss = rng.uniform(0.1, 1.0);
            s.global_loss = rng.uniform(0.1, 1.0);
            s.contribution = std::fabs(s.global_loss - s.local_loss);
        }
        const std::vector<nn::ParamSet> copies(n, base);
        for (agg::StrategyId id :
             {agg::StrategyId::kFedAvg, agg::StrategyId::kSize, agg::StrategyId::kInvAccuracy,
              agg::StrategyId::kContribution, agg::StrategyId::kInvContribution}) {
            const auto weights = agg::compute_weights(id, stats);
            const auto merged = agg::aggregate(copies, weights.weights);
            for (std::size_t l = 0; l < merged.layers.size(); ++l) {
                for (std::size_t i = 0; i < merged.layers[l].weights.data.size(); ++i) {
                    worst = std::max(worst, std::fabs(merged.layers[l].weights.data[i] -
                                                      base.layers[l].weights.data[i]));
                }
                for (std::size_t i = 0; i < merged.layers[l].biases.size(); ++i) {
                    worst = std::max(worst,
                                     std::fabs(merged.layers[l].biases[i] - base.layers[l].biases[i]));
                }
            }
        }

        // Degenerate weights: peer 1 exactly.
        std::vector<nn::ParamSet> models;
        RngStream model_rng(8900 + n, 0);
        for (std::size_t i = 0; i < n; ++i) models.push_back(nn::init_params(topo, model_rng));
        agg::WeightVector degenerate;
        degenerate.weights.assign(n, 0.0);
        degenerate.weights[0] = 1.0;
        const auto picked = agg::aggregate(models, degenerate);
        if (!nn::bit_equal(picked, models[0])) {
            ok = false;
            failure = "degenerate weights did not return peer 1's model exactly";
        }
    }
    if (worst > 1e-12) {
        ok = false;
        failure = "identity aggregation drifted";
    }
    std::ostringstream detail;
    detail << "max identity deviation " << worst << ", degenerate weights exact";
    report(8, "trivial aggregation identities", ok, ok ? detail.str() : failure);
}

} // namespace

int main(int argc, char** argv) {
    if (argc > 1) g_root = argv[1];
    std::printf("acceptance suite (repo root: %s)\n", g_root.c_str());

    criterion_1_gradient_oracle();
    criterion_2_aggregation_oracle();
    criterion_3_normalization();
    criterion_4_consensus();
    criterion_5_benchmark_direction();
    criterion_6_dataset_integrity();
    criterion_7_determinism();
    criterion_8_trivial_identities();

    if (g_failures == 0) {
        std::printf("all criteria passed\n");
    } else {
        std::printf("%d criterion(s) failed\n", g_failures);
    }
    return g_failures;
}
