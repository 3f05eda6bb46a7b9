#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace depad {

class IngestError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Label : std::uint8_t { Normal = 0, Anomaly = 1 };

// One original categorical column expanded by 1-of-l encoding.
struct EncodedColumn {
    std::string source_name;             // original column name
    std::vector<std::string> levels;     // level order = first appearance
    int first_index = 0;                 // first produced feature column
};

struct EncodingMap {
    std::vector<EncodedColumn> columns;

    // Recovers the original level string of encoded row values, given the
    // entry describing that categorical column. Exactly one of the l cells
    // must be 1.
    static std::string decode_level(const EncodedColumn& col, std::span<const double> row_values);
};

struct ColumnStats {
    double mean = 0.0;
    double variance = 0.0;  // sample variance (n-1 denominator; 0 when n < 2)
    double median = 0.0;
    double aad = 0.0;       // mean absolute deviation from the median
};

// Immutable numeric matrix in column-major layout. Construction validates
// all invariants; afterwards the object is safe to share across threads.
class Dataset {
public:
    Dataset(std::vector<std::vector<double>> columns,
            std::vector<std::string> var_names,
            std::optional<std::vector<Label>> labels = std::nullopt,
            std::vector<std::string> row_ids = {},
            std::string source = "",
            EncodingMap encoding = {});

    std::size_t n_rows() const { return n_; }
    std::size_t n_vars() const { return columns_.size(); }

    const std::vector<double>& column(std::size_t j) const { return columns_.at(j); }
    double value(std::size_t i, std::size_t j) const { return columns_[j][i]; }
    std::vector<double> row(std::size_t i) const;

    const std::vector<std::string>& var_names() const { return var_names_; }
    const std::string& var_name(std::size_t j) const { return var_names_.at(j); }
    // -1 when the name is unknown
    int var_index(const std::string& name) const;

    bool has_labels() const { return labels_.has_value(); }
    const std::vector<Label>& labels() const;
    std::size_t count_labeled(Label which) const;

    const std::vector<std::string>& row_ids() const { return row_ids_; }
    const std::string& source() const { return source_; }
    const EncodingMap& encoding() const { return encoding_; }

    // Zero-variance columns are kept but flagged; feature selection skips them.
    bool is_constant(std::size_t j) const { return constant_[j]; }

    // Id of the original categorical column that produced feature j, or -1
    // for plain numeric columns. Encoded siblings share an id.
    int encoding_group(std::size_t j) const { return encoding_group_[j]; }

    ColumnStats stats(std::size_t j) const;

private:
    std::size_t n_ = 0;
    std::vector<std::vector<double>> columns_;
    std::vector<std::string> var_names_;
    std::optional<std::vector<Label>> labels_;
    std::vector<std::string> row_ids_;
    std::string source_;
    EncodingMap encoding_;
    std::vector<bool> constant_;
    std::vector<int> encoding_group_;
};

struct IngestOptions {
    std::optional<std::string> label_column;
    // Label values considered normal. Empty set + label column present:
    // the most frequent label value is taken as the normal class.
    std::vector<std::string> normal_labels;
    std::optional<std::string> id_column;
    char delimiter = ',';
    // Columns that must parse as numbers; a non-numeric cell in one of these
    // is an ingestion error instead of triggering 1-of-l encoding.
    std::vector<std::string> numeric_columns;
};

struct IngestReport {
    std::vector<std::string> warnings;  // e.g. constant-column notices
};

Dataset ingest_csv(const std::string& path, const IngestOptions& opts = {},
                   IngestReport* report = nullptr);
Dataset ingest_csv_text(std::string_view text, const IngestOptions& opts = {},
                        const std::string& source_name = "<memory>",
                        IngestReport* report = nullptr);

// Serializes features (+ __label__ column when labels are present) back to CSV.
std::string dataset_to_csv(const Dataset& d);

struct BenchmarkSpec {
    double anomaly_fraction = 0.01;
    int repeats = 20;
    std::uint64_t rng_seed = 0;
};

// Contamination protocol: when the anomalous class exceeds anomaly_fraction
// of the data, draws `repeats` datasets of all normals plus
// k = max(1, round(anomaly_fraction * n)) anomalies sampled without
// replacement (independent draws per repeat). Otherwise returns the single
// dataset unchanged. k is computed against the original object count.
std::vector<Dataset> sample_benchmark(const Dataset& d, const BenchmarkSpec& spec);

ColumnStats compute_stats(std::span<const double> values);

} // namespace depad
