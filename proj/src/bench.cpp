#include "peerfed/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include "peerfed/error.hpp"

namespace peerfed::bench {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

constexpr const char* kFixedColumns[] = {"Part", "Size", "Pos(%)", "Acc(local)"};

double round4(double v) {
    return std::round(v * 10000.0) / 10000.0;
}

std::string fmt_acc(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

std::string fmt_pct(double fraction) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f%%", fraction * 100.0);
    return buf;
}

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

double mean_of(const std::vector<double>& values) {
    return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

// ---------------------------------------------------------------------------
// Config parsing
// ---------------------------------------------------------------------------

void check_keys(const json& obj, const std::string& path,
                std::initializer_list<const char*> allowed) {
    for (const auto& [key, value] : obj.items()) {
        if (std::find_if(allowed.begin(), allowed.end(),
                         [&](const char* k) { return key == k; }) == allowed.end()) {
            throw ConfigError("unknown config key: " + (path.empty() ? key : path + "." + key));
        }
    }
}

template <typename T>
T get_typed(const json& obj, const std::string& key, const std::string& path) {
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError("invalid value for config key: " + (path.empty() ? key : path + "." + key));
    }
}

template <typename T>
T get_or_default(const json& obj, const std::string& key, const std::string& path, T fallback,
                 std::vector<std::string>* log) {
    if (!obj.contains(key)) {
        if (log) {
            log->push_back("default: " + (path.empty() ? key : path + "." + key) + " = " +
                           json(fallback).dump());
        }
        return fallback;
    }
    return get_typed<T>(obj, key, path);
}

data::SplitKind split_kind_from_name(const std::string& name) {
    if (name == "even") return data::SplitKind::kEven;
    if (name == "random_uneven") return data::SplitKind::kRandomUneven;
    if (name == "skewed_uneven") return data::SplitKind::kSkewedUneven;
    throw ConfigError("unknown split kind: " + name);
}

DatasetSpec dataset_from_json(const json& obj, const std::string& path, const std::string& base_dir,
                              std::vector<std::string>* log) {
    if (!obj.is_object()) throw ConfigError(path + " must be an object");
    check_keys(obj, path,
               {"name", "path", "label_column", "positive_label", "drop_columns", "missing_tokens"});
    DatasetSpec spec;
    spec.path = get_typed<std::string>(obj, "path", path);
    if (spec.path.empty()) throw ConfigError(path + ".path must not be empty");
    if (fs::path(spec.path).is_relative() && !base_dir.empty()) {
        spec.path = (fs::path(base_dir) / spec.path).string();
    }
    spec.label_column = get_typed<std::string>(obj, "label_column", path);
    spec.positive_label = get_typed<std::string>(obj, "positive_label", path);
    spec.name = get_or_default<std::string>(obj, "name", path, fs::path(spec.path).stem().string(), log);
    spec.drop_columns =
        get_or_default<std::vector<std::string>>(obj, "drop_columns", path, {}, log);
    spec.missing_tokens = get_or_default<std::vector<std::string>>(obj, "missing_tokens", path,
                                                                   {"", "?", "NA"}, log);
    return spec;
}

std::uint64_t cell_seed(std::uint64_t seed, std::size_t dataset_index, std::size_t split_index) {
    return splitmix64(splitmix64(seed) ^
                      splitmix64(0x5EEDull + dataset_index * 97 + split_index));
}

std::string table_extension(const std::string& format) {
    if (format == "csv") return ".csv";
    if (format == "markdown") return ".md";
    return ".txt";
}

std::vector<std::string> split_on(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cell;
    for (char c : line) {
        if (c == sep) {
            out.push_back(cell);
            cell.clear();
        } else {
            cell.push_back(c);
        }
    }
    out.push_back(cell);
    return out;
}

std::vector<std::string> split_on_double_space(const std::string& line) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && line[i] == ' ') ++i;
        if (i >= line.size()) break;
        std::size_t j = i;
        while (j < line.size() && !(line[j] == ' ' && j + 1 < line.size() && line[j + 1] == ' ')) {
            ++j;
        }
        std::string cell = trim(line.substr(i, j - i));
        if (!cell.empty()) out.push_back(std::move(cell));
        i = j;
    }
    return out;
}

double parse_pct_cell(const std::string& cell) {
    std::string s = trim(cell);
    if (!s.empty() && s.back() == '%') s.pop_back();
    return std::stod(s) / 100.0;
}

} // namespace

ExperimentConfig config_from_json(const json& root, const std::string& base_dir,
                                  std::vector<std::string>* log) {
    if (!root.is_object()) throw ConfigError("config root must be a JSON object");
    check_keys(root, "",
               {"datasets", "splits", "participants", "min_small", "train_ratio", "topology",
                "training", "termination", "strategies", "seeds", "normalize_size_accuracy",
                "scale_per_partition", "write_history", "parallel_peers", "output_dir", "format",
                "jobs"});

    ExperimentConfig config;

    if (!root.contains("datasets") || !root.at("datasets").is_array() || root.at("datasets").empty()) {
        throw ConfigError("config needs a non-empty 'datasets' array");
    }
    config.datasets.clear();
    std::set<std::string> names;
    for (std::size_t i = 0; i < root.at("datasets").size(); ++i) {
        auto spec = dataset_from_json(root.at("datasets")[i], "datasets[" + std::to_string(i) + "]",
                                      base_dir, log);
        if (!names.insert(spec.name).second) {
            throw ConfigError("duplicate dataset name: " + spec.name);
        }
        config.datasets.push_back(std::move(spec));
    }

    if (!root.contains("strategies") || !root.at("strategies").is_array() ||
        root.at("strategies").empty()) {
        throw ConfigError("config needs a non-empty 'strategies' array");
    }
    config.strategies.clear();
    for (const auto& item : root.at("strategies")) {
        const auto name = item.get<std::string>();
        const auto id = agg::strategy_from_name(name);
        if (!id) throw ConfigError("unknown strategy: " + name);
        config.strategies.push_back(*id);
    }

    const auto split_names = get_or_default<std::vector<std::string>>(
        root, "splits", "", {"even", "random_uneven", "skewed_uneven", "skewed_uneven"}, log);
    if (split_names.empty()) throw ConfigError("'splits' must not be empty");
    config.splits.clear();
    for (const auto& name : split_names) config.splits.push_back(split_kind_from_name(name));

    config.participants = get_or_default<int>(root, "participants", "", 5, log);
    if (config.participants < 2) {
        throw ConfigError("participants must be at least 2: "
                          "a peer-to-peer federation needs a minimum of two participants");
    }
    config.min_small = get_or_default<int>(root, "min_small", "", 2, log);
    const bool has_skewed = std::find(config.splits.begin(), config.splits.end(),
                                      data::SplitKind::kSkewedUneven) != config.splits.end();
    if (has_skewed && (config.min_small < 1 || config.min_small >= config.participants)) {
        throw ConfigError("min_small must satisfy 1 <= min_small < participants");
    }
    config.train_ratio = get_or_default<double>(root, "train_ratio", "", 0.8, log);
    if (!(config.train_ratio > 0.0 && config.train_ratio < 1.0)) {
        throw ConfigError("train_ratio must be in (0, 1)");
    }

    if (root.contains("topology")) {
        const json& topo = root.at("topology");
        if (!topo.is_object()) throw ConfigError("'topology' must be an object");
        check_keys(topo, "topology", {"hidden_dims", "dropout_rate"});
        config.hidden_dims = get_or_default<std::vector<int>>(topo, "hidden_dims", "topology",
                                                              {64, 32, 16, 8}, log);
        config.dropout_rate = get_or_default<double>(topo, "dropout_rate", "topology", 0.2, log);
    } else if (log) {
        log->push_back("default: topology.hidden_dims = [64,32,16,8]");
        log->push_back("default: topology.dropout_rate = 0.2");
    }
    if (config.hidden_dims.size() != 4) {
        throw ConfigError("topology.hidden_dims needs exactly 4 entries (six layers total)");
    }
    for (int dim : config.hidden_dims) {
        if (dim < 1) throw ConfigError("topology.hidden_dims entries must be positive");
    }
    if (!(config.dropout_rate >= 0.0 && config.dropout_rate < 1.0)) {
        throw ConfigError("topology.dropout_rate must be in [0, 1)");
    }

    if (root.contains("training")) {
        const json& train = root.at("training");
        if (!train.is_object()) throw ConfigError("'training' must be an object");
        check_keys(train, "training", {"epochs", "batch_size", "learning_rate"});
        config.hyper.epochs = get_or_default<int>(train, "epochs", "training", 50, log);
        config.hyper.batch_size = get_or_default<int>(train, "batch_size", "training", 16, log);
        config.hyper.learning_rate =
            get_or_default<double>(train, "learning_rate", "training", 0.01, log);
    } else if (log) {
        log->push_back("default: training = {epochs: 50, batch_size: 16, learning_rate: 0.01}");
    }
    if (config.hyper.epochs < 1) throw ConfigError("training.epochs must be at least 1");
    if (config.hyper.batch_size < 1) throw ConfigError("training.batch_size must be at least 1");
    if (!(config.hyper.learning_rate > 0.0) || !std::isfinite(config.hyper.learning_rate)) {
        throw ConfigError("training.learning_rate must be positive and finite");
    }

    if (root.contains("termination")) {
        const json& term = root.at("termination");
        if (!term.is_object()) throw ConfigError("'termination' must be an object");
        check_keys(term, "termination", {"max_rounds", "target_mean_accuracy", "patience"});
        config.termination.max_rounds = get_or_default<int>(term, "max_rounds", "termination", 10, log);
        if (term.contains("target_mean_accuracy") && !term.at("target_mean_accuracy").is_null()) {
            config.termination.target_mean_accuracy =
                get_typed<double>(term, "target_mean_accuracy", "termination");
        } else if (log && !term.contains("target_mean_accuracy")) {
            log->push_back("default: termination.target_mean_accuracy = null");
        }
        config.termination.patience = get_or_default<int>(term, "patience", "termination", 5, log);
    } else if (log) {
        log->push_back("default: termination = {max_rounds: 10, target_mean_accuracy: null, patience: 5}");
    }
    if (config.termination.max_rounds < 1) throw ConfigError("termination.max_rounds must be >= 1");
    if (config.termination.patience < 0) throw ConfigError("termination.patience must be >= 0");
    if (config.termination.target_mean_accuracy &&
        !(*config.termination.target_mean_accuracy > 0.0 &&
          *config.termination.target_mean_accuracy <= 1.0)) {
        throw ConfigError("termination.target_mean_accuracy must be in (0, 1]");
    }

    config.seeds = get_or_default<std::vector<std::uint64_t>>(root, "seeds", "", {1}, log);
    if (config.seeds.empty()) throw ConfigError("'seeds' must not be empty");

    config.normalize_size_accuracy =
        get_or_default<bool>(root, "normalize_size_accuracy", "", false, log);
    config.scale_per_partition = get_or_default<bool>(root, "scale_per_partition", "", false, log);
    config.write_history = get_or_default<bool>(root, "write_history", "", false, log);
    config.output_dir = get_or_default<std::string>(root, "output_dir", "", "results", log);
    config.format = get_or_default<std::string>(root, "format", "", "csv", log);
    if (config.format != "plain" && config.format != "csv" && config.format != "markdown") {
        throw ConfigError("format must be one of: plain, csv, markdown");
    }
    config.jobs = get_or_default<int>(root, "jobs", "", 1, log);
    if (config.jobs < 1) throw ConfigError("jobs must be >= 1");

    return config;
}

ExperimentConfig validate_config(const std::string& path, std::vector<std::string>* default_log) {
    std::ifstream file(path);
    if (!file) throw ConfigError("cannot open config file: " + path);
    json root;
    try {
        root = json::parse(file);
    } catch (const json::exception& e) {
        throw ConfigError("config is not valid JSON: " + std::string(e.what()));
    }
    auto config = config_from_json(root, fs::path(path).parent_path().string(), default_log);
    for (const auto& ds : config.datasets) {
        if (!fs::exists(ds.path)) {
            throw ConfigError("dataset file does not exist: " + ds.path);
        }
    }
    return config;
}

// ---------------------------------------------------------------------------
// Tables
// ---------------------------------------------------------------------------

ResultsRow ResultsTable::average_row() const {
    ResultsRow avg;
    avg.part_label = "Avg";
    avg.size_fraction = std::numeric_limits<double>::quiet_NaN();
    avg.positive_rate = std::numeric_limits<double>::quiet_NaN();
    double local = 0.0;
    std::vector<double> strat(strategies.size(), 0.0);
    for (const auto& row : rows) {
        local += row.local_accuracy;
        for (std::size_t k = 0; k < strat.size(); ++k) strat[k] += row.strategy_accuracy[k];
    }
    avg.local_accuracy = local / static_cast<double>(rows.size());
    avg.strategy_accuracy.resize(strat.size());
    for (std::size_t k = 0; k < strat.size(); ++k) {
        avg.strategy_accuracy[k] = strat[k] / static_cast<double>(rows.size());
    }
    return avg;
}

std::string ResultsTable::cell_id() const {
    std::ostringstream id;
    id << dataset << "_split" << split_index + 1 << "_" << split_label << "_seed" << seed;
    return id.str();
}

std::string ResultsTable::file_name(const std::string& format) const {
    return cell_id() + table_extension(format);
}

std::string emit_table(const ResultsTable& table, const std::string& format) {
    std::vector<std::string> header;
    for (const char* c : kFixedColumns) header.emplace_back(c);
    for (auto id : table.strategies) header.push_back(agg::strategy_column_label(id));

    std::vector<std::vector<std::string>> body;
    const auto row_cells = [&](const ResultsRow& row, bool is_avg) {
        std::vector<std::string> cells;
        cells.push_back(row.part_label);
        cells.push_back(is_avg ? "-" : fmt_pct(row.size_fraction));
        cells.push_back(is_avg ? "-" : fmt_pct(row.positive_rate));
        cells.push_back(fmt_acc(row.local_accuracy));
        for (double acc : row.strategy_accuracy) cells.push_back(fmt_acc(acc));
        return cells;
    };
    for (const auto& row : table.rows) body.push_back(row_cells(row, false));
    body.push_back(row_cells(table.average_row(), true));

    std::ostringstream out;
    if (format == "csv") {
        for (std::size_t c = 0; c < header.size(); ++c) out << (c ? "," : "") << header[c];
        out << "\n";
        for (const auto& cells : body) {
            for (std::size_t c = 0; c < cells.size(); ++c) out << (c ? "," : "") << cells[c];
            out << "\n";
        }
    } else if (format == "markdown") {
        out << "|";
        for (const auto& h : header) out << " " << h << " |";
        out << "\n|";
        for (std::size_t c = 0; c < header.size(); ++c) out << " --- |";
        out << "\n";
        for (const auto& cells : body) {
            out << "|";
            for (const auto& cell : cells) out << " " << cell << " |";
            out << "\n";
        }
    } else if (format == "plain") {
        std::vector<std::size_t> width(header.size());
        for (std::size_t c = 0; c < header.size(); ++c) width[c] = header[c].size();
        for (const auto& cells : body) {
            for (std::size_t c = 0; c < cells.size(); ++c) width[c] = std::max(width[c], cells[c].size());
        }
        const auto emit_row = [&](const std::vector<std::string>& cells) {
            for (std::size_t c = 0; c < cells.size(); ++c) {
                out << cells[c];
                if (c + 1 < cells.size()) {
                    out << std::string(width[c] - cells[c].size() + 2, ' ');
                }
            }
            out << "\n";
        };
        emit_row(header);
        for (const auto& cells : body) emit_row(cells);
    } else {
        throw Error("unknown table format: " + format);
    }
    return out.str();
}

ResultsTable parse_table_file(const std::string& path) {
    std::ifstream file(path);
    if (!file) throw Error("cannot open table file: " + path);

    const std::string ext = fs::path(path).extension().string();
    std::vector<std::vector<std::string>> grid;
    std::string line;
    while (std::getline(file, line)) {
        if (trim(line).empty()) continue;
        std::vector<std::string> cells;
        if (ext == ".csv") {
            cells = split_on(line, ',');
        } else if (ext == ".md") {
            std::string inner = trim(line);
            if (!inner.empty() && inner.front() == '|') inner.erase(inner.begin());
            if (!inner.empty() && inner.back() == '|') inner.pop_back();
            cells = split_on(inner, '|');
            for (auto& cell : cells) cell = trim(cell);
            if (!cells.empty() && cells[0].find("---") != std::string::npos) continue;
        } else {
            cells = split_on_double_space(line);
        }
        for (auto& cell : cells) cell = trim(cell);
        grid.push_back(std::move(cells));
    }
    if (grid.size() < 2 || grid[0].empty() || grid[0][0] != "Part") {
        throw Error("not a results table: " + path);
    }

    ResultsTable table;
    const auto& header = grid[0];
    if (header.size() < 5) throw Error("results table has no strategy columns: " + path);
    for (std::size_t c = 0; c < 4; ++c) {
        if (header[c] != kFixedColumns[c]) throw Error("unexpected table header in " + path);
    }
    for (std::size_t c = 4; c < header.size(); ++c) {
        bool found = false;
        for (auto id : agg::kAllStrategies) {
            if (agg::strategy_column_label(id) == header[c]) {
                table.strategies.push_back(id);
                found = true;
                break;
            }
        }
        if (!found) throw Error("unknown strategy column '" + header[c] + "' in " + path);
    }

    for (std::size_t r = 1; r < grid.size(); ++r) {
        const auto& cells = grid[r];
        if (cells.size() != header.size()) throw Error("ragged results table: " + path);
        if (cells[0] == "Avg") continue; // recomputed from the participant rows
        ResultsRow row;
        row.part_label = cells[0];
        row.size_fraction = parse_pct_cell(cells[1]);
        row.positive_rate = parse_pct_cell(cells[2]);
        row.local_accuracy = std::stod(cells[3]);
        for (std::size_t c = 4; c < cells.size(); ++c) {
            row.strategy_accuracy.push_back(std::stod(cells[c]));
        }
        table.rows.push_back(std::move(row));
    }
    if (table.rows.empty()) throw Error("results table has no participant rows: " + path);

    // Recover (dataset, split, seed) from the file name.
    const std::string stem = fs::path(path).stem().string();
    const auto seed_pos = stem.rfind("_seed");
    const auto split_pos = stem.rfind("_split");
    if (seed_pos == std::string::npos || split_pos == std::string::npos || split_pos >= seed_pos) {
        throw Error("table file name does not follow <dataset>_split<i>_<kind>_seed<seed>: " + path);
    }
    table.seed = std::stoull(stem.substr(seed_pos + 5));
    const std::string split_part = stem.substr(split_pos + 6, seed_pos - split_pos - 6);
    const auto kind_pos = split_part.find('_');
    if (kind_pos == std::string::npos) throw Error("bad split label in table file name: " + path);
    table.split_index = std::stoi(split_part.substr(0, kind_pos)) - 1;
    table.split_label = split_part.substr(kind_pos + 1);
    table.dataset = stem.substr(0, split_pos);
    return table;
}

void write_file_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write file: " + tmp);
        out << content;
        if (!out) throw Error("write failed: " + tmp);
    }
    fs::rename(tmp, path);
}

// ---------------------------------------------------------------------------
// Summary
// ---------------------------------------------------------------------------

GridSummary summarize_tables(const std::vector<ResultsTable>& tables,
                             std::vector<std::string> failures) {
    GridSummary summary;
    summary.failures = std::move(failures);
    if (tables.empty()) return summary;

    for (auto id : tables.front().strategies) summary.strategy_names.push_back(agg::strategy_name(id));
    for (const auto& table : tables) {
        if (table.strategies != tables.front().strategies) {
            throw Error("tables disagree on their strategy columns");
        }
    }

    std::vector<const ResultsTable*> ordered;
    ordered.reserve(tables.size());
    for (const auto& table : tables) ordered.push_back(&table);
    std::sort(ordered.begin(), ordered.end(), [](const ResultsTable* a, const ResultsTable* b) {
        if (a->dataset != b->dataset) return a->dataset < b->dataset;
        if (a->split_index != b->split_index) return a->split_index < b->split_index;
        return a->seed < b->seed;
    });

    const std::size_t n_strat = summary.strategy_names.size();
    summary.case_wins.assign(n_strat, 0);
    summary.cell_wins.assign(n_strat, 0);
    summary.case_count = static_cast<int>(ordered.size());

    // Per-case wins plus per-(dataset, split) means over seeds.
    std::size_t i = 0;
    while (i < ordered.size()) {
        std::size_t j = i;
        std::vector<double> local_avgs;
        std::vector<std::vector<double>> strat_avgs(n_strat);
        while (j < ordered.size() && ordered[j]->dataset == ordered[i]->dataset &&
               ordered[j]->split_index == ordered[i]->split_index) {
            const auto avg = ordered[j]->average_row();
            local_avgs.push_back(avg.local_accuracy);
            for (std::size_t k = 0; k < n_strat; ++k) {
                strat_avgs[k].push_back(avg.strategy_accuracy[k]);
                if (avg.strategy_accuracy[k] > avg.local_accuracy) ++summary.case_wins[k];
            }
            ++j;
        }
        ++summary.cell_count;
        const double local_mean = mean_of(local_avgs);
        for (std::size_t k = 0; k < n_strat; ++k) {
            if (mean_of(strat_avgs[k]) > local_mean) ++summary.cell_wins[k];
        }
        i = j;
    }
    return summary;
}

std::string GridSummary::to_text() const {
    std::ostringstream out;
    out << "cases_total: " << case_count << "\n";
    for (std::size_t k = 0; k < strategy_names.size(); ++k) {
        out << "case_wins " << strategy_names[k] << ": " << case_wins[k] << "\n";
    }
    out << "cells_total: " << cell_count << "\n";
    for (std::size_t k = 0; k < strategy_names.size(); ++k) {
        out << "cell_wins " << strategy_names[k] << ": " << cell_wins[k] << "\n";
    }
    out << "failed_cells: " << failures.size() << "\n";
    for (const auto& failure : failures) out << "failed: " << failure << "\n";
    return out.str();
}

GridSummary summarize_directory(const std::string& dir) {
    if (!fs::is_directory(dir)) throw Error("not a directory: " + dir);
    std::vector<std::string> paths;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        const auto ext = entry.path().extension().string();
        if (ext != ".csv" && ext != ".md" && ext != ".txt") continue;
        const auto stem = entry.path().stem().string();
        if (stem.rfind("_seed") == std::string::npos || stem.rfind("_split") == std::string::npos) {
            continue; // summary.txt, preprocessing reports, ...
        }
        paths.push_back(entry.path().string());
    }
    std::sort(paths.begin(), paths.end());
    if (paths.empty()) throw Error("no result tables found in " + dir);

    std::vector<ResultsTable> tables;
    tables.reserve(paths.size());
    for (const auto& path : paths) tables.push_back(parse_table_file(path));
    return summarize_tables(tables);
}

// ---------------------------------------------------------------------------
// Grid runner
// ---------------------------------------------------------------------------

namespace {

struct LoadedDataset {
    DatasetSpec spec;
    data::Dataset dataset;
};

struct Cell {
    std::size_t dataset_index;
    std::size_t split_index;
    std::size_t seed_index;
};

ResultsTable run_cell(const ExperimentConfig& config, const LoadedDataset& loaded,
                      std::size_t dataset_index, std::size_t split_index, std::uint64_t seed,
                      std::vector<std::pair<std::string, std::string>>* history_files) {
    data::SplitScheme scheme;
    scheme.kind = config.splits[split_index];
    scheme.participants = config.participants;
    scheme.min_small = config.min_small;
    scheme.seed = cell_seed(seed, dataset_index, split_index);

    auto partitions = data::partition(loaded.dataset, scheme, config.train_ratio);
    if (config.scale_per_partition) {
        for (auto& part : partitions) data::standardize_partition_features(part);
    }

    fed::FederationConfig fc;
    fc.topology = nn::Topology::dense(loaded.dataset.features.cols, config.hidden_dims,
                                      config.dropout_rate);
    fc.hyper = config.hyper;
    fc.termination = config.termination;
    fc.seed = scheme.seed;
    fc.dropout_rate = config.dropout_rate;
    fc.normalize_size_accuracy = config.normalize_size_accuracy;

    ResultsTable table;
    table.dataset = loaded.spec.name;
    table.split_index = static_cast<int>(split_index);
    table.split_label = data::split_kind_name(scheme.kind);
    table.seed = seed;
    table.strategies = config.strategies;
    table.rows.resize(partitions.size());
    for (std::size_t p = 0; p < partitions.size(); ++p) {
        table.rows[p].part_label = std::to_string(partitions[p].participant_id);
        table.rows[p].size_fraction = partitions[p].size_fraction;
        table.rows[p].positive_rate = partitions[p].positive_rate;
        table.rows[p].strategy_accuracy.resize(config.strategies.size());
    }

    std::vector<double> baseline;
    for (std::size_t k = 0; k < config.strategies.size(); ++k) {
        fc.strategy = config.strategies[k];
        const auto result = fed::run_federation(fc, partitions);
        if (baseline.empty()) {
            baseline = result.baseline_local_accuracy;
            for (std::size_t p = 0; p < partitions.size(); ++p) {
                table.rows[p].local_accuracy = round4(baseline[p]);
            }
        } else if (result.baseline_local_accuracy != baseline) {
            throw Error("internal error: baselines diverged between strategies");
        }
        for (std::size_t p = 0; p < partitions.size(); ++p) {
            table.rows[p].strategy_accuracy[k] = round4(result.final_peer_accuracy[p]);
        }
        if (history_files) {
            history_files->emplace_back(
                table.cell_id() + "__" + agg::strategy_name(fc.strategy) + ".history.jsonl",
                fed::history_to_jsonl(result.history));
        }
    }
    return table;
}

} // namespace

GridOutcome run_grid(const ExperimentConfig& config, std::ostream* log) {
    fs::create_directories(config.output_dir);

    std::vector<LoadedDataset> loaded;
    loaded.reserve(config.datasets.size());
    for (const auto& spec : config.datasets) {
        data::CsvSchema schema;
        schema.label_column = spec.label_column;
        schema.positive_label = spec.positive_label;
        schema.missing_tokens = spec.missing_tokens;
        auto raw = data::load_csv(spec.path, schema);
        data::PreprocessPolicy policy;
        policy.drop_columns = spec.drop_columns;
        auto prep = data::preprocess(raw, policy);

        std::string report;
        for (const auto& line : prep.report) report += line + "\n";
        write_file_atomic((fs::path(config.output_dir) / (spec.name + "_preprocessing.txt")).string(),
                          report);
        loaded.push_back({spec, std::move(prep.dataset)});
    }

    std::vector<Cell> cells;
    for (std::size_t d = 0; d < config.datasets.size(); ++d) {
        for (std::size_t si = 0; si < config.splits.size(); ++si) {
            for (std::size_t s = 0; s < config.seeds.size(); ++s) {
                cells.push_back({d, si, s});
            }
        }
    }

    std::vector<ResultsTable> tables(cells.size());
    std::vector<std::string> failures(cells.size());
    std::vector<char> cell_ok(cells.size(), 0);

    std::mutex log_mutex;
    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
        for (;;) {
            const std::size_t index = next.fetch_add(1);
            if (index >= cells.size()) return;
            const Cell& cell = cells[index];
            const auto& ds = loaded[cell.dataset_index];
            const std::uint64_t seed = config.seeds[cell.seed_index];
            std::ostringstream cell_name;
            cell_name << ds.spec.name << "_split" << cell.split_index + 1 << "_"
                      << data::split_kind_name(config.splits[cell.split_index]) << "_seed" << seed;
            try {
                std::vector<std::pair<std::string, std::string>> history_files;
                ResultsTable table =
                    run_cell(config, ds, cell.dataset_index, cell.split_index, seed,
                             config.write_history ? &history_files : nullptr);
                write_file_atomic((fs::path(config.output_dir) / table.file_name(config.format)).string(),
                                  emit_table(table, config.format));
                for (const auto& [name, content] : history_files) {
                    write_file_atomic((fs::path(config.output_dir) / name).string(), content);
                }
                tables[index] = std::move(table);
                cell_ok[index] = 1;
                if (log) {
                    std::lock_guard<std::mutex> guard(log_mutex);
                    *log << "cell " << cell_name.str() << ": ok\n";
                }
            } catch (const std::exception& e) {
                failures[index] = cell_name.str() + " : " + e.what();
                if (log) {
                    std::lock_guard<std::mutex> guard(log_mutex);
                    *log << "cell " << cell_name.str() << ": FAILED (" << e.what() << ")\n";
                }
            }
        }
    };

    const int jobs = std::min<int>(config.jobs, static_cast<int>(cells.size()));
    if (jobs <= 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        threads.reserve(static_cast<std::size_t>(jobs));
        for (int t = 0; t < jobs; ++t) threads.emplace_back(worker);
        for (auto& thread : threads) thread.join();
    }

    GridOutcome outcome;
    std::vector<std::string> failure_list;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (cell_ok[i]) {
            outcome.tables.push_back(std::move(tables[i]));
        } else {
            failure_list.push_back(failures[i]);
        }
    }
    outcome.any_failure = !failure_list.empty();
    outcome.summary = summarize_tables(outcome.tables, std::move(failure_list));
    write_file_atomic((fs::path(config.output_dir) / "summary.txt").string(),
                      outcome.summary.to_text());
    return outcome;
}

} // namespace peerfed::bench
