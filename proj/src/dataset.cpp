#include "peerfed/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "peerfed/error.hpp"

namespace peerfed::data {

namespace {

std::vector<std::string> parse_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cell.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cell.push_back(c);
            }
        } else if (c == '"' && cell.empty()) {
            quoted = true;
        } else if (c == ',') {
            cells.push_back(std::move(cell));
            cell.clear();
        } else if (c != '\r') {
            cell.push_back(c);
        }
    }
    cells.push_back(std::move(cell));
    return cells;
}

bool parse_double(const std::string& text, double* out) {
    const char* begin = text.c_str();
    char* end = nullptr;
    const double value = std::strtod(begin, &end);
    if (end == begin) return false;
    while (*end == ' ' || *end == '\t') ++end;
    if (*end != '\0') return false;
    if (!std::isfinite(value)) return false;
    if (out) *out = value;
    return true;
}

double median_of(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

struct EncodedColumn {
    std::vector<std::string> names;
    std::vector<std::vector<double>> values; // one vector per emitted column
};

} // namespace

RawTable load_csv(const std::string& path, const CsvSchema& schema) {
    std::ifstream file(path);
    if (!file) throw Error("cannot open CSV file: " + path);

    RawTable table;
    table.schema = schema;

    std::string line;
    if (!std::getline(file, line)) throw Error("empty CSV file: " + path);
    table.columns = parse_csv_line(line);

    const auto label_it = std::find(table.columns.begin(), table.columns.end(), schema.label_column);
    if (label_it == table.columns.end()) {
        throw Error("label column '" + schema.label_column + "' not found in " + path);
    }
    table.label_index = static_cast<int>(label_it - table.columns.begin());

    int line_number = 1;
    while (std::getline(file, line)) {
        ++line_number;
        if (line.empty() || line == "\r") continue;
        auto cells = parse_csv_line(line);
        if (cells.size() != table.columns.size()) {
            std::ostringstream msg;
            msg << path << ":" << line_number << ": expected " << table.columns.size()
                << " fields, got " << cells.size();
            throw Error(msg.str());
        }
        table.rows.push_back(std::move(cells));
    }
    if (table.rows.empty()) throw Error("CSV file has no data rows: " + path);
    return table;
}

int Dataset::positives() const {
    int count = 0;
    for (int y : labels) count += y;
    return count;
}

PreprocessResult preprocess(const RawTable& raw, const PreprocessPolicy& policy) {
    PreprocessResult result;
    auto& report = result.report;
    const std::size_t n_rows = raw.rows.size();

    const auto is_missing = [&](const std::string& cell) {
        return std::find(raw.schema.missing_tokens.begin(), raw.schema.missing_tokens.end(), cell) !=
               raw.schema.missing_tokens.end();
    };

    // Labels first: every row must carry one.
    std::vector<int> labels(n_rows);
    for (std::size_t r = 0; r < n_rows; ++r) {
        const std::string& cell = raw.rows[r][static_cast<std::size_t>(raw.label_index)];
        if (is_missing(cell)) {
            std::ostringstream msg;
            msg << "missing label in data row " << r + 1;
            throw Error(msg.str());
        }
        labels[r] = cell == raw.schema.positive_label ? 1 : 0;
    }

    std::vector<EncodedColumn> encoded;
    for (std::size_t c = 0; c < raw.columns.size(); ++c) {
        if (static_cast<int>(c) == raw.label_index) continue;
        const std::string& name = raw.columns[c];
        if (std::find(policy.drop_columns.begin(), policy.drop_columns.end(), name) !=
            policy.drop_columns.end()) {
            report.push_back("dropped column: " + name);
            continue;
        }

        std::vector<std::string> cells(n_rows);
        std::size_t missing_count = 0;
        bool numeric = true;
        for (std::size_t r = 0; r < n_rows; ++r) {
            cells[r] = raw.rows[r][c];
            if (is_missing(cells[r])) {
                ++missing_count;
            } else if (numeric && !parse_double(cells[r], nullptr)) {
                numeric = false;
            }
        }
        if (missing_count == n_rows) {
            throw Error("column entirely missing: " + name);
        }

        EncodedColumn col;
        if (numeric) {
            std::vector<double> values(n_rows, 0.0);
            std::vector<double> present;
            present.reserve(n_rows - missing_count);
            for (std::size_t r = 0; r < n_rows; ++r) {
                if (!is_missing(cells[r])) {
                    parse_double(cells[r], &values[r]);
                    present.push_back(values[r]);
                }
            }
            if (missing_count > 0) {
                const double med = median_of(present);
                for (std::size_t r = 0; r < n_rows; ++r) {
                    if (is_missing(cells[r])) values[r] = med;
                }
                std::ostringstream msg;
                msg << "imputed " << missing_count << " missing values in " << name
                    << " with median " << med;
                report.push_back(msg.str());
            }
            col.names.push_back(name);
            col.values.push_back(std::move(values));
        } else {
            // Mode imputation, then binary or one-hot encoding over the
            // sorted category vocabulary.
            std::map<std::string, std::size_t> counts;
            for (std::size_t r = 0; r < n_rows; ++r) {
                if (!is_missing(cells[r])) ++counts[cells[r]];
            }
            std::string mode = counts.begin()->first;
            for (const auto& [value, count] : counts) {
                if (count > counts[mode]) mode = value;
            }
            if (missing_count > 0) {
                for (std::size_t r = 0; r < n_rows; ++r) {
                    if (is_missing(cells[r])) cells[r] = mode;
                }
                std::ostringstream msg;
                msg << "imputed " << missing_count << " missing values in " << name
                    << " with mode '" << mode << "'";
                report.push_back(msg.str());
            }

            std::vector<std::string> vocab;
            vocab.reserve(counts.size());
            for (const auto& [value, count] : counts) vocab.push_back(value);

            if (vocab.size() <= 1) {
                report.push_back("dropped constant column: " + name);
                continue;
            }
            if (vocab.size() == 2) {
                std::vector<double> values(n_rows);
                for (std::size_t r = 0; r < n_rows; ++r) {
                    values[r] = cells[r] == vocab[1] ? 1.0 : 0.0;
                }
                col.names.push_back(name + "=" + vocab[1]);
                col.values.push_back(std::move(values));
                report.push_back("encoded " + name + " as binary (" + vocab[0] + "/" + vocab[1] + ")");
            } else {
                for (const auto& category : vocab) {
                    std::vector<double> values(n_rows);
                    for (std::size_t r = 0; r < n_rows; ++r) {
                        values[r] = cells[r] == category ? 1.0 : 0.0;
                    }
                    col.names.push_back(name + "=" + category);
                    col.values.push_back(std::move(values));
                }
                std::ostringstream msg;
                msg << "encoded " << name << " as one-hot (" << vocab.size() << " categories)";
                report.push_back(msg.str());
            }
        }
        encoded.push_back(std::move(col));
    }

    // Drop constants, then standardize what remains.
    std::vector<std::string> names;
    std::vector<std::vector<double>> features;
    for (auto& col : encoded) {
        for (std::size_t k = 0; k < col.values.size(); ++k) {
            auto& values = col.values[k];
            const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
            if (*lo == *hi) {
                report.push_back("dropped constant column: " + col.names[k]);
                continue;
            }
            const double mean = std::accumulate(values.begin(), values.end(), 0.0) /
                                static_cast<double>(n_rows);
            double var = 0.0;
            for (double v : values) var += (v - mean) * (v - mean);
            const double stddev = std::sqrt(var / static_cast<double>(n_rows));
            for (double& v : values) v = (v - mean) / stddev;
            names.push_back(col.names[k]);
            features.push_back(std::move(values));
        }
    }
    if (features.empty()) throw Error("no feature columns remain after preprocessing");

    Dataset& ds = result.dataset;
    ds.feature_names = std::move(names);
    ds.labels = std::move(labels);
    ds.features = Matrix(static_cast<int>(n_rows), static_cast<int>(features.size()));
    for (int r = 0; r < ds.features.rows; ++r) {
        for (int c = 0; c < ds.features.cols; ++c) {
            ds.features(r, c) = features[static_cast<std::size_t>(c)][static_cast<std::size_t>(r)];
        }
    }
    return result;
}

std::string split_kind_name(SplitKind kind) {
    switch (kind) {
        case SplitKind::kEven: return "even";
        case SplitKind::kRandomUneven: return "random_uneven";
        case SplitKind::kSkewedUneven: return "skewed_uneven";
    }
    throw Error("unknown split kind");
}

namespace {

// Gamma(2,1) variate: sum of two unit exponentials. Dirichlet(alpha=2)
// fractions are normalized Gamma(2,1) draws.
double gamma2(RngStream& rng) {
    const double u1 = 1.0 - rng.uniform();
    const double u2 = 1.0 - rng.uniform();
    return -std::log(u1) - std::log(u2);
}

std::vector<int> counts_by_largest_remainder(const std::vector<double>& fractions, int total) {
    const std::size_t n = fractions.size();
    std::vector<int> counts(n);
    std::vector<std::pair<double, std::size_t>> remainders(n);
    int assigned = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double exact = fractions[i] * total;
        counts[i] = static_cast<int>(std::floor(exact));
        remainders[i] = {exact - std::floor(exact), i};
        assigned += counts[i];
    }
    std::sort(remainders.begin(), remainders.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    for (int k = 0; k < total - assigned; ++k) {
        ++counts[remainders[static_cast<std::size_t>(k)].second];
    }
    return counts;
}

} // namespace

std::vector<int> assign_partition_counts(int total_rows, const SplitScheme& scheme, RngStream& rng) {
    const int n = scheme.participants;
    if (n < 2) throw Error("a peer-to-peer federation needs a minimum of two participants");
    const int min_rows = std::max(10, n);
    if (total_rows < n * min_rows) {
        std::ostringstream msg;
        msg << "dataset with " << total_rows << " rows cannot give " << n
            << " participants at least " << min_rows << " rows each";
        throw Error(msg.str());
    }

    switch (scheme.kind) {
        case SplitKind::kEven: {
            std::vector<int> counts(static_cast<std::size_t>(n), total_rows / n);
            for (int i = 0; i < total_rows % n; ++i) ++counts[static_cast<std::size_t>(i)];
            return counts;
        }
        case SplitKind::kRandomUneven: {
            for (int attempt = 0; attempt < 10000; ++attempt) {
                std::vector<double> fractions(static_cast<std::size_t>(n));
                double total = 0.0;
                for (double& f : fractions) total += (f = gamma2(rng));
                bool ok = true;
                for (double& f : fractions) {
                    f /= total;
                    if (f < 0.02) ok = false;
                }
                if (!ok) continue;
                auto counts = counts_by_largest_remainder(fractions, total_rows);
                if (std::all_of(counts.begin(), counts.end(),
                                [&](int c) { return c >= min_rows; })) {
                    return counts;
                }
            }
            throw Error("random_uneven split is infeasible for this dataset size");
        }
        case SplitKind::kSkewedUneven: {
            if (scheme.min_small < 1 || scheme.min_small >= n) {
                throw Error("skewed split needs 1 <= min_small < participants");
            }
            // Small shares sit strictly inside (2%, 10%) of the rows; the
            // rest stay at or above 10%. Integer bounds: rows/N > 1/50 and
            // rows/N < 1/10.
            const int small_lo = std::max(min_rows, total_rows / 50 + 1);
            const int small_hi = (total_rows - 1) / 10;
            const int big_lo = (total_rows + 9) / 10;
            if (small_lo > small_hi) {
                throw Error("skewed split is infeasible: no row count lies strictly between 2% and 10%");
            }

            std::vector<std::size_t> slots(static_cast<std::size_t>(n));
            std::iota(slots.begin(), slots.end(), 0);
            rng.shuffle(slots);

            for (int attempt = 0; attempt < 10000; ++attempt) {
                std::vector<int> counts(static_cast<std::size_t>(n), 0);
                int remaining = total_rows;
                for (int s = 0; s < scheme.min_small; ++s) {
                    const int rows = small_lo + static_cast<int>(rng.below(
                                         static_cast<std::uint64_t>(small_hi - small_lo + 1)));
                    counts[slots[static_cast<std::size_t>(s)]] = rows;
                    remaining -= rows;
                }
                const int big_n = n - scheme.min_small;
                std::vector<double> fractions(static_cast<std::size_t>(big_n));
                double total = 0.0;
                for (double& f : fractions) total += (f = gamma2(rng));
                for (double& f : fractions) f /= total;
                auto big_counts = counts_by_largest_remainder(fractions, remaining);
                bool ok = true;
                for (int c : big_counts) {
                    if (c < std::max(min_rows, big_lo)) ok = false;
                }
                if (!ok) continue;
                for (int b = 0; b < big_n; ++b) {
                    counts[slots[static_cast<std::size_t>(scheme.min_small + b)]] =
                        big_counts[static_cast<std::size_t>(b)];
                }
                return counts;
            }
            throw Error("skewed_uneven split is infeasible for this dataset size");
        }
    }
    throw Error("unknown split kind");
}

std::pair<std::vector<int>, std::vector<int>>
train_test_split(const std::vector<int>& rows, double ratio, RngStream& rng) {
    if (!(ratio > 0.0 && ratio < 1.0)) throw Error("train ratio must be in (0, 1)");
    std::vector<int> shuffled = rows;
    rng.shuffle(shuffled);
    const long train_count = std::llround(ratio * static_cast<double>(shuffled.size()));
    const long test_count = static_cast<long>(shuffled.size()) - train_count;
    if (train_count < 1 || test_count < 2) {
        std::ostringstream msg;
        msg << "partition with " << shuffled.size() << " rows is too small to split at ratio "
            << ratio << " and keep at least 2 test rows";
        throw Error(msg.str());
    }
    std::vector<int> train(shuffled.begin(), shuffled.begin() + train_count);
    std::vector<int> test(shuffled.begin() + train_count, shuffled.end());
    return {std::move(train), std::move(test)};
}

Dataset subset(const Dataset& dataset, const std::vector<int>& row_indices) {
    Dataset out;
    out.feature_names = dataset.feature_names;
    out.features = Matrix(static_cast<int>(row_indices.size()), dataset.features.cols);
    out.labels.resize(row_indices.size());
    for (std::size_t r = 0; r < row_indices.size(); ++r) {
        const int src = row_indices[r];
        std::copy(dataset.features.row_ptr(src), dataset.features.row_ptr(src) + dataset.features.cols,
                  out.features.row_ptr(static_cast<int>(r)));
        out.labels[r] = dataset.labels[static_cast<std::size_t>(src)];
    }
    return out;
}

std::vector<Partition> partition(const Dataset& dataset, const SplitScheme& scheme,
                                 double train_ratio) {
    RngStream split_rng(scheme.seed, 101);
    const auto counts = assign_partition_counts(dataset.row_count(), scheme, split_rng);

    std::vector<int> order(static_cast<std::size_t>(dataset.row_count()));
    std::iota(order.begin(), order.end(), 0);
    split_rng.shuffle(order);

    std::vector<Partition> partitions;
    partitions.reserve(counts.size());
    std::size_t cursor = 0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        const int participant_id = static_cast<int>(i) + 1;
        std::vector<int> rows(order.begin() + static_cast<long>(cursor),
                              order.begin() + static_cast<long>(cursor) + counts[i]);
        cursor += static_cast<std::size_t>(counts[i]);

        RngStream tts_rng(scheme.seed, 200 + static_cast<std::uint64_t>(participant_id));
        auto [train_rows, test_rows] = train_test_split(rows, train_ratio, tts_rng);

        Partition part;
        part.participant_id = participant_id;
        part.train = subset(dataset, train_rows);
        part.test = subset(dataset, test_rows);
        part.size_fraction = static_cast<double>(rows.size()) / dataset.row_count();
        int positives = 0;
        for (int r : rows) positives += dataset.labels[static_cast<std::size_t>(r)];
        part.positive_rate = static_cast<double>(positives) / static_cast<double>(rows.size());
        partitions.push_back(std::move(part));
    }
    return partitions;
}

void standardize_partition_features(Partition& part) {
    const int cols = part.train.features.cols;
    for (int c = 0; c < cols; ++c) {
        double mean = 0.0;
        for (int r = 0; r < part.train.features.rows; ++r) mean += part.train.features(r, c);
        mean /= part.train.features.rows;
        double var = 0.0;
        for (int r = 0; r < part.train.features.rows; ++r) {
            const double d = part.train.features(r, c) - mean;
            var += d * d;
        }
        const double stddev = std::sqrt(var / part.train.features.rows);
        const double scale = stddev > 0.0 ? 1.0 / stddev : 1.0;
        for (int r = 0; r < part.train.features.rows; ++r) {
            part.train.features(r, c) = (part.train.features(r, c) - mean) * scale;
        }
        for (int r = 0; r < part.test.features.rows; ++r) {
            part.test.features(r, c) = (part.test.features(r, c) - mean) * scale;
        }
    }
}

} // namespace peerfed::data
