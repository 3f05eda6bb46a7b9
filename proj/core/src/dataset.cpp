#include "depad/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "depad/io.hpp"
#include "depad/rng.hpp"

namespace depad {

namespace {

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
    return std::string(s.substr(b, e - b));
}

bool parse_double(const std::string& s, double& out) {
    const char* begin = s.data();
    const char* end = begin + s.size();
    auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc{} && ptr == end;
}

// RFC-style field splitting: double quotes wrap fields, "" escapes a quote.
std::vector<std::string> split_line(std::string_view line, char delim) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur.push_back(c);
            }
        } else if (c == '"' && cur.empty()) {
            quoted = true;
        } else if (c == delim) {
            fields.push_back(trim(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    fields.push_back(trim(cur));
    return fields;
}

} // namespace

std::string EncodingMap::decode_level(const EncodedColumn& col, std::span<const double> row_values) {
    if (row_values.size() != col.levels.size())
        throw std::invalid_argument("decode_level: value count does not match level count");
    int hit = -1;
    for (std::size_t k = 0; k < row_values.size(); ++k) {
        if (row_values[k] == 1.0) {
            if (hit >= 0) throw std::invalid_argument("decode_level: more than one active level");
            hit = static_cast<int>(k);
        } else if (row_values[k] != 0.0) {
            throw std::invalid_argument("decode_level: cell is not 0 or 1");
        }
    }
    if (hit < 0) throw std::invalid_argument("decode_level: no active level");
    return col.levels[static_cast<std::size_t>(hit)];
}

Dataset::Dataset(std::vector<std::vector<double>> columns,
                 std::vector<std::string> var_names,
                 std::optional<std::vector<Label>> labels,
                 std::vector<std::string> row_ids,
                 std::string source,
                 EncodingMap encoding)
    : columns_(std::move(columns)),
      var_names_(std::move(var_names)),
      labels_(std::move(labels)),
      row_ids_(std::move(row_ids)),
      source_(std::move(source)),
      encoding_(std::move(encoding)) {
    if (columns_.size() < 2) throw IngestError("dataset needs at least 2 variables");
    if (columns_.size() != var_names_.size())
        throw IngestError("variable name count does not match column count");
    n_ = columns_.front().size();
    if (n_ < 1) throw IngestError("dataset needs at least 1 object");

    std::set<std::string> seen;
    for (const auto& name : var_names_) {
        if (!seen.insert(name).second) throw IngestError("duplicate variable name: " + name);
    }
    for (const auto& col : columns_) {
        if (col.size() != n_) throw IngestError("ragged column lengths");
        for (double v : col) {
            if (!std::isfinite(v)) throw IngestError("non-finite value in dataset");
        }
    }
    if (labels_ && labels_->size() != n_) throw IngestError("label count does not match row count");
    if (row_ids_.empty()) {
        row_ids_.reserve(n_);
        for (std::size_t i = 0; i < n_; ++i) row_ids_.push_back(std::to_string(i));
    } else if (row_ids_.size() != n_) {
        throw IngestError("row id count does not match row count");
    }

    constant_.resize(columns_.size());
    for (std::size_t j = 0; j < columns_.size(); ++j) {
        const auto& col = columns_[j];
        constant_[j] = std::all_of(col.begin(), col.end(),
                                   [&](double v) { return v == col.front(); });
    }

    encoding_group_.assign(columns_.size(), -1);
    for (std::size_t g = 0; g < encoding_.columns.size(); ++g) {
        const auto& ec = encoding_.columns[g];
        for (std::size_t k = 0; k < ec.levels.size(); ++k) {
            const std::size_t j = static_cast<std::size_t>(ec.first_index) + k;
            if (j >= columns_.size()) throw IngestError("encoding map out of range");
            encoding_group_[j] = static_cast<int>(g);
        }
    }
}

std::vector<double> Dataset::row(std::size_t i) const {
    std::vector<double> r(columns_.size());
    for (std::size_t j = 0; j < columns_.size(); ++j) r[j] = columns_[j][i];
    return r;
}

int Dataset::var_index(const std::string& name) const {
    for (std::size_t j = 0; j < var_names_.size(); ++j)
        if (var_names_[j] == name) return static_cast<int>(j);
    return -1;
}

const std::vector<Label>& Dataset::labels() const {
    if (!labels_) throw std::logic_error("dataset has no labels");
    return *labels_;
}

std::size_t Dataset::count_labeled(Label which) const {
    const auto& l = labels();
    return static_cast<std::size_t>(std::count(l.begin(), l.end(), which));
}

ColumnStats Dataset::stats(std::size_t j) const { return compute_stats(column(j)); }

ColumnStats compute_stats(std::span<const double> values) {
    const std::size_t n = values.size();
    if (n == 0) throw std::invalid_argument("compute_stats: empty column");
    ColumnStats s;
    double sum = 0.0;
    for (double v : values) sum += v;
    s.mean = sum / static_cast<double>(n);
    if (n > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - s.mean) * (v - s.mean);
        s.variance = ss / static_cast<double>(n - 1);
    }
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    s.median = (n % 2 == 1) ? sorted[n / 2]
                            : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
    double ad = 0.0;
    for (double v : values) ad += std::fabs(v - s.median);
    s.aad = ad / static_cast<double>(n);
    return s;
}

Dataset ingest_csv(const std::string& path, const IngestOptions& opts, IngestReport* report) {
    std::string text;
    try {
        text = read_file(path);
    } catch (const std::exception& e) {
        throw IngestError(e.what());
    }
    return ingest_csv_text(text, opts, path, report);
}

Dataset ingest_csv_text(std::string_view text, const IngestOptions& opts,
                        const std::string& source_name, IngestReport* report) {
    std::vector<std::vector<std::string>> rows;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string_view::npos) eol = text.size();
        std::string_view line = text.substr(pos, eol - pos);
        pos = eol + 1;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty()) continue;
        if (line.front() == '#') continue;  // comment / schema marker lines
        rows.push_back(split_line(line, opts.delimiter));
    }
    if (rows.size() < 2) throw IngestError(source_name + ": need a header row and at least one data row");

    const std::vector<std::string> header = rows.front();
    const std::size_t n_cols = header.size();
    const std::size_t n = rows.size() - 1;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        if (rows[r].size() != n_cols)
            throw IngestError(source_name + ": row " + std::to_string(r) + " has " +
                              std::to_string(rows[r].size()) + " fields, expected " +
                              std::to_string(n_cols));
    }

    int label_idx = -1, id_idx = -1;
    if (opts.label_column) {
        for (std::size_t c = 0; c < n_cols; ++c)
            if (header[c] == *opts.label_column) label_idx = static_cast<int>(c);
        if (label_idx < 0) throw IngestError(source_name + ": label column '" + *opts.label_column + "' not found");
    }
    if (opts.id_column) {
        for (std::size_t c = 0; c < n_cols; ++c)
            if (header[c] == *opts.id_column) id_idx = static_cast<int>(c);
        if (id_idx < 0) throw IngestError(source_name + ": id column '" + *opts.id_column + "' not found");
    }

    std::vector<std::string> row_ids;
    if (id_idx >= 0) {
        row_ids.reserve(n);
        for (std::size_t r = 1; r < rows.size(); ++r)
            row_ids.push_back(rows[r][static_cast<std::size_t>(id_idx)]);
    }

    std::optional<std::vector<Label>> labels;
    if (label_idx >= 0) {
        std::vector<std::string> raw(n);
        for (std::size_t r = 1; r < rows.size(); ++r) {
            raw[r - 1] = rows[r][static_cast<std::size_t>(label_idx)];
            if (raw[r - 1].empty())
                throw IngestError(source_name + ": empty label value at row " + std::to_string(r));
        }
        std::set<std::string> normal(opts.normal_labels.begin(), opts.normal_labels.end());
        if (normal.empty()) {
            // majority class is the normal class
            std::map<std::string, std::size_t> counts;
            for (const auto& v : raw) ++counts[v];
            std::string best;
            std::size_t best_count = 0;
            for (const auto& [value, count] : counts) {
                if (count > best_count) { best = value; best_count = count; }
            }
            normal.insert(best);
        }
        std::vector<Label> l(n);
        for (std::size_t i = 0; i < n; ++i)
            l[i] = normal.count(raw[i]) ? Label::Normal : Label::Anomaly;
        labels = std::move(l);
    }

    std::set<std::string> declared_numeric(opts.numeric_columns.begin(), opts.numeric_columns.end());

    std::vector<std::vector<double>> out_columns;
    std::vector<std::string> out_names;
    EncodingMap encoding;
    std::vector<std::string> warnings;

    for (std::size_t c = 0; c < n_cols; ++c) {
        if (static_cast<int>(c) == label_idx || static_cast<int>(c) == id_idx) continue;
        const std::string& name = header[c];

        bool numeric = true;
        std::vector<double> values(n);
        for (std::size_t i = 0; i < n && numeric; ++i) {
            const std::string& cell = rows[i + 1][c];
            if (cell.empty())
                throw IngestError(source_name + ": missing value in column '" + name +
                                  "' at row " + std::to_string(i + 1));
            double v;
            if (parse_double(cell, v)) {
                if (!std::isfinite(v))
                    throw IngestError(source_name + ": non-finite value in column '" + name + "'");
                values[i] = v;
            } else {
                numeric = false;
            }
        }

        if (!numeric && declared_numeric.count(name))
            throw IngestError(source_name + ": non-numeric value in declared numeric column '" + name + "'");

        if (numeric) {
            if (std::all_of(values.begin(), values.end(),
                            [&](double v) { return v == values.front(); }))
                warnings.push_back("column '" + name + "' is constant; kept but flagged");
            out_columns.push_back(std::move(values));
            out_names.push_back(name);
        } else {
            // 1-of-l encoding, level order = first appearance
            std::vector<std::string> levels;
            std::vector<int> level_of(n);
            for (std::size_t i = 0; i < n; ++i) {
                const std::string& cell = rows[i + 1][c];
                auto it = std::find(levels.begin(), levels.end(), cell);
                if (it == levels.end()) {
                    levels.push_back(cell);
                    level_of[i] = static_cast<int>(levels.size()) - 1;
                } else {
                    level_of[i] = static_cast<int>(it - levels.begin());
                }
            }
            EncodedColumn ec;
            ec.source_name = name;
            ec.levels = levels;
            ec.first_index = static_cast<int>(out_columns.size());
            for (std::size_t k = 0; k < levels.size(); ++k) {
                std::vector<double> bin(n, 0.0);
                for (std::size_t i = 0; i < n; ++i)
                    if (level_of[i] == static_cast<int>(k)) bin[i] = 1.0;
                if (std::all_of(bin.begin(), bin.end(), [&](double v) { return v == bin.front(); }))
                    warnings.push_back("column '" + name + "=" + levels[k] + "' is constant; kept but flagged");
                out_columns.push_back(std::move(bin));
                out_names.push_back(name + "=" + levels[k]);
            }
            encoding.columns.push_back(std::move(ec));
        }
    }

    if (report) report->warnings = std::move(warnings);
    return Dataset(std::move(out_columns), std::move(out_names), std::move(labels),
                   std::move(row_ids), source_name, std::move(encoding));
}

std::string dataset_to_csv(const Dataset& d) {
    std::string out = "# depad dataset schema_version=1\n";
    out += "__id__";
    for (const auto& name : d.var_names()) {
        out += ',';
        out += name;
    }
    if (d.has_labels()) out += ",__label__";
    out += '\n';
    for (std::size_t i = 0; i < d.n_rows(); ++i) {
        out += d.row_ids()[i];
        for (std::size_t j = 0; j < d.n_vars(); ++j) {
            out += ',';
            out += format_double(d.value(i, j));
        }
        if (d.has_labels())
            out += (d.labels()[i] == Label::Normal) ? ",normal" : ",anomaly";
        out += '\n';
    }
    return out;
}

std::vector<Dataset> sample_benchmark(const Dataset& d, const BenchmarkSpec& spec) {
    if (!d.has_labels()) throw std::invalid_argument("sample_benchmark: dataset has no labels");
    if (!(spec.anomaly_fraction > 0.0 && spec.anomaly_fraction < 0.5))
        throw std::invalid_argument("sample_benchmark: anomaly_fraction outside (0, 0.5)");
    if (spec.repeats < 1) throw std::invalid_argument("sample_benchmark: repeats must be >= 1");

    const auto& labels = d.labels();
    std::vector<std::size_t> normal_rows, anomaly_rows;
    for (std::size_t i = 0; i < labels.size(); ++i)
        (labels[i] == Label::Normal ? normal_rows : anomaly_rows).push_back(i);
    if (normal_rows.empty() || anomaly_rows.empty())
        throw std::invalid_argument("sample_benchmark: both classes must be nonempty");

    const double n = static_cast<double>(d.n_rows());
    const double ratio = static_cast<double>(anomaly_rows.size()) / n;
    if (ratio <= spec.anomaly_fraction) return {d};  // conducted once, unmodified

    const std::size_t k = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::llround(spec.anomaly_fraction * n)));
    if (k > anomaly_rows.size())
        throw std::logic_error("sample_benchmark: k exceeds anomaly class size");

    auto subset = [&](const std::vector<std::size_t>& keep_anomalies) {
        std::vector<bool> keep(d.n_rows(), false);
        for (std::size_t i : normal_rows) keep[i] = true;
        for (std::size_t i : keep_anomalies) keep[i] = true;
        std::vector<std::vector<double>> cols(d.n_vars());
        std::vector<Label> lab;
        std::vector<std::string> ids;
        for (std::size_t i = 0; i < d.n_rows(); ++i) {
            if (!keep[i]) continue;
            for (std::size_t j = 0; j < d.n_vars(); ++j) cols[j].push_back(d.value(i, j));
            lab.push_back(labels[i]);
            ids.push_back(d.row_ids()[i]);
        }
        return Dataset(std::move(cols), d.var_names(), std::move(lab), std::move(ids),
                       d.source(), d.encoding());
    };

    std::vector<Dataset> out;
    out.reserve(static_cast<std::size_t>(spec.repeats));
    for (int r = 0; r < spec.repeats; ++r) {
        Rng rng(substream(spec.rng_seed, static_cast<std::uint64_t>(r)));
        std::vector<std::size_t> pool = anomaly_rows;
        // partial Fisher-Yates: first k entries form the draw
        for (std::size_t t = 0; t < k; ++t) {
            const std::size_t pick = t + rng.bounded(pool.size() - t);
            std::swap(pool[t], pool[pick]);
        }
        std::vector<std::size_t> chosen(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(k));
        std::sort(chosen.begin(), chosen.end());
        out.push_back(subset(chosen));
    }
    return out;
}

} // namespace depad
