#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "peerfed/aggregation.hpp"
#include "peerfed/dataset.hpp"
#include "peerfed/federation.hpp"

namespace peerfed::bench {

struct DatasetSpec {
    std::string name;
    std::string path;
    std::string label_column;
    std::string positive_label;
    std::vector<std::string> drop_columns;
    std::vector<std::string> missing_tokens{"", "?", "NA"};
};

/// Fully resolved benchmark description. validate_config fills every
/// default and rejects unknown keys.
struct ExperimentConfig {
    std::vector<DatasetSpec> datasets;
    std::vector<data::SplitKind> splits{data::SplitKind::kEven, data::SplitKind::kRandomUneven,
                                        data::SplitKind::kSkewedUneven, data::SplitKind::kSkewedUneven};
    int participants = 5;
    int min_small = 2;
    double train_ratio = 0.8;
    std::vector<int> hidden_dims{64, 32, 16, 8};
    double dropout_rate = 0.2;
    nn::TrainHyper hyper;
    fed::TerminationCriteria termination;
    std::vector<agg::StrategyId> strategies;
    std::vector<std::uint64_t> seeds{1};
    bool normalize_size_accuracy = false;
    bool scale_per_partition = false;
    bool write_history = false;
    std::string output_dir = "results";
    std::string format = "csv";
    int jobs = 1;
};

/// Parses and validates a config file. Unknown keys are rejected with the
/// offending key named; every default that fills in is appended to
/// `default_log` when given. Relative dataset paths resolve against the
/// config file's directory.
ExperimentConfig validate_config(const std::string& path,
                                 std::vector<std::string>* default_log = nullptr);

/// Same, from already-parsed JSON; `base_dir` anchors relative paths.
ExperimentConfig config_from_json(const nlohmann::json& root, const std::string& base_dir,
                                  std::vector<std::string>* default_log = nullptr);

/// One row of a results table; `strategy_accuracy` follows the table's
/// strategy order.
struct ResultsRow {
    std::string part_label;
    double size_fraction = 0.0;
    double positive_rate = 0.0;
    double local_accuracy = 0.0;
    std::vector<double> strategy_accuracy;
};

/// Per-(dataset, split, seed) results: one row per participant plus a
/// computed Avg row.
struct ResultsTable {
    std::string dataset;
    int split_index = 0;
    std::string split_label;
    std::uint64_t seed = 0;
    std::vector<agg::StrategyId> strategies;
    std::vector<ResultsRow> rows;

    ResultsRow average_row() const;
    std::string cell_id() const;
    std::string file_name(const std::string& format) const;
};

/// Renders a table in "plain", "csv", or "markdown" form. Output is
/// byte-deterministic; accuracies carry 4 decimals.
std::string emit_table(const ResultsTable& table, const std::string& format);

/// Parses a table previously produced by emit_table (any of the three
/// formats, chosen by file extension).
ResultsTable parse_table_file(const std::string& path);

/// Writes via a temp file and rename so partial cells never appear.
void write_file_atomic(const std::string& path, const std::string& content);

/// Win counts: a strategy wins a case when its Avg accuracy strictly
/// exceeds the Avg local accuracy of the same table, on the emitted
/// 4-decimal values. The per-cell block aggregates each (dataset, split)
/// over seeds by mean before comparing.
struct GridSummary {
    std::vector<std::string> strategy_names;
    int case_count = 0;
    std::vector<int> case_wins;
    int cell_count = 0;
    std::vector<int> cell_wins;
    std::vector<std::string> failures;

    std::string to_text() const;
};

GridSummary summarize_tables(const std::vector<ResultsTable>& tables,
                             std::vector<std::string> failures = {});

/// Recomputes the summary from the table files in a results directory.
GridSummary summarize_directory(const std::string& dir);

struct GridOutcome {
    std::vector<ResultsTable> tables;
    GridSummary summary;
    bool any_failure = false;
};

/// Runs the full grid (datasets x splits x seeds, all strategies per cell),
/// writes one table file per cell plus summary.txt into
/// config.output_dir, and returns everything in memory. Cells run on up to
/// config.jobs worker threads; a failed cell is recorded and the grid
/// continues. `log` (when given) receives progress lines.
GridOutcome run_grid(const ExperimentConfig& config, std::ostream* log = nullptr);

} // namespace peerfed::bench
