#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "peerfed/aggregation.hpp"
#include "peerfed/bench.hpp"
#include "peerfed/dataset.hpp"
#include "peerfed/error.hpp"
#include "peerfed/federation.hpp"
#include "peerfed/metrics.hpp"
#include "peerfed/nn.hpp"

namespace py = pybind11;

using namespace peerfed;

namespace {

Matrix matrix_from_rows(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) return Matrix(0, 0);
    Matrix m(static_cast<int>(rows.size()), static_cast<int>(rows.front().size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != rows.front().size()) {
            throw Error("ragged feature rows");
        }
        for (std::size_t c = 0; c < rows[r].size(); ++c) {
            m(static_cast<int>(r), static_cast<int>(c)) = rows[r][c];
        }
    }
    return m;
}

std::vector<std::vector<double>> matrix_to_rows(const Matrix& m) {
    std::vector<std::vector<double>> rows(static_cast<std::size_t>(m.rows));
    for (int r = 0; r < m.rows; ++r) {
        rows[static_cast<std::size_t>(r)].assign(m.row_ptr(r), m.row_ptr(r) + m.cols);
    }
    return rows;
}

nn::RunMode run_mode(const std::string& mode) {
    if (mode == "train") return nn::RunMode::kTrain;
    if (mode == "eval") return nn::RunMode::kEval;
    throw Error("mode must be 'train' or 'eval'");
}

data::SplitKind split_kind(const std::string& kind) {
    if (kind == "even") return data::SplitKind::kEven;
    if (kind == "random_uneven") return data::SplitKind::kRandomUneven;
    if (kind == "skewed_uneven") return data::SplitKind::kSkewedUneven;
    throw Error("unknown split kind: " + kind);
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Peer-to-peer federated learning simulator and aggregation strategies";

    py::register_exception<Error>(m, "PeerfedError");

    py::class_<RngStream>(m, "RngStream")
        .def(py::init<std::uint64_t, std::uint64_t>(), py::arg("seed"), py::arg("stream_id") = 0)
        .def("uniform", [](RngStream& rng) { return rng.uniform(); })
        .def("below", &RngStream::below, py::arg("bound"));

    py::class_<nn::Topology>(m, "Topology")
        .def(py::init([](const std::vector<int>& dims, double dropout) {
                 nn::Topology topo(dims, dropout);
                 topo.validate();
                 return topo;
             }),
             py::arg("layer_dims"), py::arg("dropout_rate") = 0.2)
        .def_static("dense", &nn::Topology::dense, py::arg("input_dim"), py::arg("hidden_dims"),
                    py::arg("dropout_rate") = 0.2)
        .def_readonly("layer_dims", &nn::Topology::layer_dims)
        .def_readonly("dropout_rate", &nn::Topology::dropout_rate);

    py::class_<nn::ParamSet>(m, "ParamSet")
        .def("layer_count", [](const nn::ParamSet& p) { return p.layers.size(); })
        .def("scalar_count", &nn::ParamSet::scalar_count)
        .def("weights",
             [](const nn::ParamSet& p, std::size_t layer) {
                 return matrix_to_rows(p.layers.at(layer).weights);
             },
             py::arg("layer"))
        .def("biases",
             [](const nn::ParamSet& p, std::size_t layer) { return p.layers.at(layer).biases; },
             py::arg("layer"))
        .def("__eq__",
             [](const nn::ParamSet& a, const nn::ParamSet& b) { return nn::bit_equal(a, b); });

    m.def("init_params", &nn::init_params, py::arg("topology"), py::arg("rng"));

    m.def(
        "forward",
        [](const nn::ParamSet& params, const std::vector<std::vector<double>>& features,
           const std::string& mode, double dropout_rate, RngStream* rng) {
            return nn::forward(params, matrix_from_rows(features), run_mode(mode), dropout_rate, rng);
        },
        py::arg("params"), py::arg("features"), py::arg("mode") = "eval",
        py::arg("dropout_rate") = 0.0, py::arg("rng") = nullptr);

    m.def("bce_loss", &nn::bce_loss, py::arg("probs"), py::arg("labels"));

    m.def(
        "train_local",
        [](const nn::ParamSet& params, const std::vector<std::vector<double>>& features,
           const std::vector<int>& labels, int epochs, int batch_size, double learning_rate,
           double dropout_rate, RngStream& rng) {
            nn::TrainHyper hyper{epochs, batch_size, learning_rate};
            return nn::train_local(params, matrix_from_rows(features), labels, hyper, dropout_rate, rng);
        },
        py::arg("params"), py::arg("features"), py::arg("labels"), py::arg("epochs") = 50,
        py::arg("batch_size") = 16, py::arg("learning_rate") = 0.01, py::arg("dropout_rate") = 0.0,
        py::arg("rng"));

    py::enum_<agg::StrategyId>(m, "Strategy")
        .value("FED_AVG", agg::StrategyId::kFedAvg)
        .value("SIZE", agg::StrategyId::kSize)
        .value("INV_ACCURACY", agg::StrategyId::kInvAccuracy)
        .value("SIZE_ACCURACY", agg::StrategyId::kSizeAccuracy)
        .value("CONTRIBUTION", agg::StrategyId::kContribution)
        .value("INV_CONTRIBUTION", agg::StrategyId::kInvContribution);

    py::class_<agg::ParticipantStats>(m, "ParticipantStats")
        .def(py::init([](long dataset_size, double test_accuracy, double local_loss,
                         double global_loss) {
                 agg::ParticipantStats stats;
                 stats.dataset_size = dataset_size;
                 stats.test_accuracy = test_accuracy;
                 stats.local_loss = local_loss;
                 stats.global_loss = global_loss;
                 stats.contribution = agg::compute_contribution(local_loss, global_loss);
                 return stats;
             }),
             py::arg("dataset_size"), py::arg("test_accuracy"), py::arg("local_loss") = 0.0,
             py::arg("global_loss") = 0.0)
        .def_readonly("dataset_size", &agg::ParticipantStats::dataset_size)
        .def_readonly("test_accuracy", &agg::ParticipantStats::test_accuracy)
        .def_readonly("local_loss", &agg::ParticipantStats::local_loss)
        .def_readonly("global_loss", &agg::ParticipantStats::global_loss)
        .def_readonly("contribution", &agg::ParticipantStats::contribution);

    m.def("compute_contribution", &agg::compute_contribution, py::arg("local_loss"),
          py::arg("global_loss"));

    m.def(
        "compute_weights",
        [](agg::StrategyId strategy, const std::vector<agg::ParticipantStats>& stats,
           bool normalize_size_accuracy) {
            const auto result = agg::compute_weights(strategy, stats, normalize_size_accuracy);
            return py::make_tuple(result.weights.weights, result.fed_avg_fallback);
        },
        py::arg("strategy"), py::arg("stats"), py::arg("normalize_size_accuracy") = false);

    m.def(
        "aggregate",
        [](const std::vector<nn::ParamSet>& params, const std::vector<double>& weights) {
            agg::WeightVector wv;
            wv.weights = weights;
            return agg::aggregate(params, wv);
        },
        py::arg("param_sets"), py::arg("weights"));

    py::class_<data::Dataset>(m, "Dataset")
        .def(py::init([](const std::vector<std::vector<double>>& features,
                         const std::vector<int>& labels, std::vector<std::string> names) {
                 data::Dataset ds;
                 ds.features = matrix_from_rows(features);
                 ds.labels = labels;
                 ds.feature_names = std::move(names);
                 return ds;
             }),
             py::arg("features"), py::arg("labels"),
             py::arg("feature_names") = std::vector<std::string>{})
        .def("row_count", &data::Dataset::row_count)
        .def("positives", &data::Dataset::positives)
        .def("features", [](const data::Dataset& ds) { return matrix_to_rows(ds.features); })
        .def_readonly("labels", &data::Dataset::labels)
        .def_readonly("feature_names", &data::Dataset::feature_names);

    m.def(
        "load_dataset",
        [](const std::string& path, const std::string& label_column,
           const std::string& positive_label, const std::vector<std::string>& missing_tokens,
           const std::vector<std::string>& drop_columns) {
            data::CsvSchema schema{label_column, positive_label, missing_tokens};
            const auto raw = data::load_csv(path, schema);
            data::PreprocessPolicy policy{drop_columns};
            auto prep = data::preprocess(raw, policy);
            return py::make_tuple(std::move(prep.dataset), prep.report);
        },
        py::arg("path"), py::arg("label_column"), py::arg("positive_label"),
        py::arg("missing_tokens") = std::vector<std::string>{"", "?", "NA"},
        py::arg("drop_columns") = std::vector<std::string>{});

    py::class_<data::Partition>(m, "Partition")
        .def_readonly("participant_id", &data::Partition::participant_id)
        .def_readonly("train", &data::Partition::train)
        .def_readonly("test", &data::Partition::test)
        .def_readonly("size_fraction", &data::Partition::size_fraction)
        .def_readonly("positive_rate", &data::Partition::positive_rate);

    m.def(
        "partition",
        [](const data::Dataset& dataset, const std::string& kind, int participants, int min_small,
           std::uint64_t seed, double train_ratio) {
            data::SplitScheme scheme{split_kind(kind), participants, min_small, seed};
            return data::partition(dataset, scheme, train_ratio);
        },
        py::arg("dataset"), py::arg("kind") = "even", py::arg("participants") = 5,
        py::arg("min_small") = 2, py::arg("seed") = 0, py::arg("train_ratio") = 0.8);

    m.def(
        "run_federation",
        [](const std::vector<data::Partition>& partitions, agg::StrategyId strategy,
           const std::vector<int>& hidden_dims, double dropout_rate, int epochs, int batch_size,
           double learning_rate, int max_rounds, int patience, std::uint64_t seed,
           bool parallel_peers) {
            if (partitions.empty()) throw Error("run_federation needs partitions");
            fed::FederationConfig config;
            config.topology = nn::Topology::dense(partitions.front().train.features.cols,
                                                  hidden_dims, dropout_rate);
            config.hyper = nn::TrainHyper{epochs, batch_size, learning_rate};
            config.termination.max_rounds = max_rounds;
            config.termination.patience = patience;
            config.strategy = strategy;
            config.seed = seed;
            config.dropout_rate = dropout_rate;
            config.parallel_peers = parallel_peers;
            const auto result = fed::run_federation(config, partitions);
            py::dict out;
            out["final_params"] = result.final_params;
            out["history_jsonl"] = fed::history_to_jsonl(result.history);
            out["final_peer_accuracy"] = result.final_peer_accuracy;
            out["baseline_local_accuracy"] = result.baseline_local_accuracy;
            out["termination_reason"] = result.termination_reason;
            out["rounds"] = result.history.size();
            return out;
        },
        py::arg("partitions"), py::arg("strategy"), py::arg("hidden_dims") = std::vector<int>{64, 32, 16, 8},
        py::arg("dropout_rate") = 0.2, py::arg("epochs") = 50, py::arg("batch_size") = 16,
        py::arg("learning_rate") = 0.01, py::arg("max_rounds") = 10, py::arg("patience") = 5,
        py::arg("seed") = 1, py::arg("parallel_peers") = false);

    m.def(
        "confusion",
        [](const std::vector<int>& preds, const std::vector<int>& labels) {
            const auto cm = metrics::confusion(preds, labels);
            py::dict out;
            out["tp"] = cm.tp;
            out["fp"] = cm.fp;
            out["fn"] = cm.fn;
            out["tn"] = cm.tn;
            out["accuracy"] = metrics::accuracy(cm);
            return out;
        },
        py::arg("preds"), py::arg("labels"));

    m.attr("__version__") = "0.1.0";
}
