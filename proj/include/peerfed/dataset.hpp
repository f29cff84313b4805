#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "peerfed/matrix.hpp"
#include "peerfed/rng.hpp"

namespace peerfed::data {

/// How to read one CSV file: which column holds the label, which label
/// value counts as positive, and which cell values mean "missing".
struct CsvSchema {
    std::string label_column;
    std::string positive_label;
    std::vector<std::string> missing_tokens{"", "?", "NA"};
};

/// Parsed CSV before any preprocessing. Cells are raw strings.
struct RawTable {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
    int label_index = -1;
    CsvSchema schema;

    std::size_t feature_column_count() const { return columns.empty() ? 0 : columns.size() - 1; }
};

/// Loads a comma-separated file with a header row. Throws Error on a
/// missing file, a missing label column, or a row whose field count does
/// not match the header (reported with its line number).
RawTable load_csv(const std::string& path, const CsvSchema& schema);

struct PreprocessPolicy {
    /// Identifier-style columns to drop before encoding (e.g. "id", "name").
    std::vector<std::string> drop_columns;
};

/// Fully numeric dataset: imputed, encoded, and z-score standardized.
struct Dataset {
    Matrix features;
    std::vector<int> labels;
    std::vector<std::string> feature_names;

    int row_count() const { return features.rows; }
    int positives() const;
};

struct PreprocessResult {
    Dataset dataset;
    /// Line-oriented preprocessing report (imputations, encodings, drops).
    std::vector<std::string> report;
};

/// Imputes missing numerics with the column median and missing categoricals
/// with the column mode, one-hot or binary encodes categorical columns,
/// drops constant columns, and standardizes every remaining feature column
/// over the full dataset.
PreprocessResult preprocess(const RawTable& raw, const PreprocessPolicy& policy);

enum class SplitKind { kEven, kRandomUneven, kSkewedUneven };

std::string split_kind_name(SplitKind kind);

/// How to carve the dataset into simulated hospitals.
struct SplitScheme {
    SplitKind kind = SplitKind::kEven;
    int participants = 5;
    /// For kSkewedUneven: exactly this many participants receive a share
    /// strictly between 2% and 10% of the rows.
    int min_small = 2;
    std::uint64_t seed = 0;
};

/// One simulated hospital.
struct Partition {
    int participant_id = 0;
    Dataset train;
    Dataset test;
    double size_fraction = 0.0;
    double positive_rate = 0.0;

    int row_count() const { return train.row_count() + test.row_count(); }
};

/// Row counts per participant for the scheme; counts sum to total_rows and
/// every participant receives at least max(10, participants) rows.
std::vector<int> assign_partition_counts(int total_rows, const SplitScheme& scheme, RngStream& rng);

/// Seeded shuffle of `rows`, then the first round(ratio * n) indices go to
/// train and the rest to test. Throws if either side would be empty or the
/// test side would hold fewer than 2 rows.
std::pair<std::vector<int>, std::vector<int>>
train_test_split(const std::vector<int>& rows, double ratio, RngStream& rng);

/// Splits the dataset into participant partitions (disjoint cover) with
/// per-partition train/test splits at `train_ratio`.
std::vector<Partition> partition(const Dataset& dataset, const SplitScheme& scheme,
                                 double train_ratio = 0.8);

/// Re-standardizes one partition using statistics fit on its own train
/// rows (optional stricter-privacy mode; the default pipeline standardizes
/// once over the full dataset before partitioning).
void standardize_partition_features(Partition& part);

/// Copies the selected rows into a new Dataset.
Dataset subset(const Dataset& dataset, const std::vector<int>& row_indices);

} // namespace peerfed::data
