#include "depad/engine.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "depad/io.hpp"
#include "depad/parallel.hpp"
#include "depad/rng.hpp"

namespace depad {

const char* model_kind_name(ModelKind m) {
    switch (m) {
        case ModelKind::CART: return "CART";
        case ModelKind::MCART: return "mCART";
        case ModelKind::OLS: return "OLS";
        case ModelKind::Ridge: return "Ridge";
        case ModelKind::Lasso: return "Lasso";
    }
    return "?";
}

const char* combiner_name(Combiner c) {
    switch (c) {
        case Combiner::RZPS: return "RZPS";
        case Combiner::PS: return "PS";
        case Combiner::Sum: return "Sum";
        case Combiner::Max: return "Max";
        case Combiner::GS: return "GS";
    }
    return "?";
}

namespace {
std::string lowered(const std::string& s) {
    std::string out;
    for (char c : s) out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    return out;
}
} // namespace

std::optional<ModelKind> model_kind_from_name(const std::string& name) {
    const std::string s = lowered(name);
    if (s == "cart") return ModelKind::CART;
    if (s == "mcart") return ModelKind::MCART;
    if (s == "ols" || s == "linear") return ModelKind::OLS;
    if (s == "ridge") return ModelKind::Ridge;
    if (s == "lasso") return ModelKind::Lasso;
    return std::nullopt;
}

std::optional<Combiner> combiner_from_name(const std::string& name) {
    const std::string s = lowered(name);
    if (s == "rzps") return Combiner::RZPS;
    if (s == "ps") return Combiner::PS;
    if (s == "sum") return Combiner::Sum;
    if (s == "max") return Combiner::Max;
    if (s == "gs") return Combiner::GS;
    return std::nullopt;
}

std::string PipelineConfig::instantiation_name() const {
    std::string name = selector_name(selector.method);
    name += '-';
    name += model_kind_name(model_kind);
    name += '-';
    name += combiner_name(combiner);
    return name;
}

std::vector<std::size_t> ScoreVector::order_by_score() const {
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        return a < b;
    });
    return order;
}

std::vector<std::size_t> ScoreVector::ranks() const {
    const auto order = order_by_score();
    std::vector<std::size_t> rank(scores.size());
    for (std::size_t r = 0; r < order.size(); ++r) rank[order[r]] = r + 1;
    return rank;
}

namespace {

double median_of_sorted_copy(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return (n % 2 == 1) ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

Predictor fit_one(const Dataset& d, const PipelineConfig& cfg, const RelevantSet& rel) {
    Predictor p;
    p.target = rel.target;
    p.predictors = rel;

    const auto& y = d.column(static_cast<std::size_t>(rel.target));
    if (rel.members.empty()) {
        p.model = ConstantModel{median_of_sorted_copy(y)};
        return p;
    }

    std::vector<ColumnView> X;
    X.reserve(rel.members.size());
    for (int v : rel.members) X.emplace_back(d.column(static_cast<std::size_t>(v)));

    switch (cfg.model_kind) {
        case ModelKind::CART:
        case ModelKind::MCART: {
            BaggedOptions opts;
            opts.n_trees = cfg.n_trees;
            opts.aggregate = (cfg.model_kind == ModelKind::MCART) ? Aggregate::Median
                                                                  : Aggregate::Mean;
            opts.seed = substream(cfg.seed, 0xdeadULL, static_cast<std::uint64_t>(rel.target));
            opts.tree = cfg.tree;
            p.model = fit_bagged(X, y, opts);
            break;
        }
        case ModelKind::OLS:
        case ModelKind::Ridge:
        case ModelKind::Lasso: {
            LinearOptions opts;
            opts.kind = (cfg.model_kind == ModelKind::OLS)     ? LinearKind::OLS
                        : (cfg.model_kind == ModelKind::Ridge) ? LinearKind::Ridge
                                                               : LinearKind::Lasso;
            opts.cv_folds = cfg.cv_folds;
            opts.seed = substream(cfg.seed, 0x11eaULL, static_cast<std::uint64_t>(rel.target));
            p.model = fit_linear(X, y, opts);
            break;
        }
    }
    return p;
}

} // namespace

DependencyModelSet train_with_relevant(const Dataset& d, const PipelineConfig& cfg,
                                       const std::vector<RelevantSet>& relevant,
                                       unsigned threads) {
    if (relevant.size() != d.n_vars())
        throw std::invalid_argument("train: relevant-set count does not match variable count");
    DependencyModelSet models(d.n_vars());
    parallel_for(d.n_vars(), threads, [&](std::size_t j) {
        models[j] = fit_one(d, cfg, relevant[j]);
    });
    return models;
}

DependencyModelSet train(const Dataset& d, const PipelineConfig& cfg, unsigned threads) {
    return train_with_relevant(d, cfg, select_all(d, cfg.selector, threads), threads);
}

DeviationMatrix normalize_raw_deviations(std::size_t n, std::size_t m,
                                         std::vector<double> raw, unsigned threads) {
    if (raw.size() != n * m)
        throw std::invalid_argument("normalize_raw_deviations: size mismatch");
    DeviationMatrix dev;
    dev.n = n;
    dev.m = m;
    dev.raw = std::move(raw);
    dev.normalized.assign(n * m, 0.0);
    dev.per_variable_stats.resize(m);
    dev.degenerate.assign(m, false);

    parallel_for(m, threads, [&](std::size_t j) {
        std::vector<double> col(n);
        for (std::size_t i = 0; i < n; ++i) col[i] = dev.raw[i * m + j];
        const ColumnStats st = compute_stats(col);
        dev.per_variable_stats[j] = {st.median, st.aad};
        if (st.aad <= 0.0) {
            dev.degenerate[j] = true;  // normalized column stays all zeros
            return;
        }
        for (std::size_t i = 0; i < n; ++i)
            dev.normalized[i * m + j] = (col[i] - st.median) / st.aad;
    });
    return dev;
}

DeviationMatrix deviations(const Dataset& d, const DependencyModelSet& models,
                           unsigned threads) {
    if (models.size() != d.n_vars())
        throw std::invalid_argument("deviations: model count does not match variable count");
    for (const auto& p : models) {
        for (int v : p.predictors.members)
            if (v < 0 || static_cast<std::size_t>(v) >= d.n_vars())
                throw std::invalid_argument("deviations: model schema does not match dataset");
    }

    const std::size_t n = d.n_rows();
    const std::size_t m = d.n_vars();
    std::vector<double> raw(n * m, 0.0);
    parallel_for(m, threads, [&](std::size_t j) {
        for (std::size_t i = 0; i < n; ++i) {
            const double expected = models[j].predict_row(d, i);
            raw[i * m + j] = std::fabs(d.value(i, j) - expected);
        }
    });
    return normalize_raw_deviations(n, m, std::move(raw), threads);
}

ScoreVector combine(const DeviationMatrix& dev, Combiner combiner, double eta) {
    ScoreVector out;
    out.combiner = combiner;
    out.eta = eta;
    out.scores.assign(dev.n, 0.0);

    for (std::size_t i = 0; i < dev.n; ++i) {
        double score = 0.0;
        switch (combiner) {
            case Combiner::RZPS:
            case Combiner::PS: {
                for (std::size_t j = 0; j < dev.m; ++j) {
                    const double v = dev.norm_at(i, j);
                    if (v > eta) score += v;
                }
                break;
            }
            case Combiner::Sum:
            case Combiner::GS: {
                for (std::size_t j = 0; j < dev.m; ++j) score += dev.norm_at(i, j);
                break;
            }
            case Combiner::Max: {
                score = dev.norm_at(i, 0);
                for (std::size_t j = 1; j < dev.m; ++j)
                    score = std::max(score, dev.norm_at(i, j));
                break;
            }
        }
        out.scores[i] = score;
    }

    if (combiner == Combiner::GS) {
        const double n = static_cast<double>(out.scores.size());
        const double mean = std::accumulate(out.scores.begin(), out.scores.end(), 0.0) / n;
        double ss = 0.0;
        for (double s : out.scores) ss += (s - mean) * (s - mean);
        const double sd = (n > 1.0) ? std::sqrt(ss / (n - 1.0)) : 0.0;
        for (double& s : out.scores) {
            s = (sd > 0.0) ? std::max(0.0, std::erf((s - mean) / (sd * 1.4142135623730951)))
                           : 0.0;
        }
    }
    return out;
}

ScoreVector run(const Dataset& d, const PipelineConfig& cfg, unsigned threads) {
    const DependencyModelSet models = train(d, cfg, threads);
    const DeviationMatrix dev = deviations(d, models, threads);
    return combine(dev, cfg.combiner, cfg.eta);
}

ExplainReport explain(const Dataset& d, const DependencyModelSet& models,
                      const DeviationMatrix& dev, std::size_t object_index, int top_k) {
    if (object_index >= d.n_rows()) throw std::invalid_argument("explain: object index out of range");
    if (models.size() != dev.m || dev.m != d.n_vars())
        throw std::invalid_argument("explain: models and deviations do not match the dataset");

    std::vector<std::size_t> vars(dev.m);
    std::iota(vars.begin(), vars.end(), 0);
    std::sort(vars.begin(), vars.end(), [&](std::size_t a, std::size_t b) {
        const double da = dev.norm_at(object_index, a);
        const double db = dev.norm_at(object_index, b);
        if (da != db) return da > db;
        return a < b;
    });
    const std::size_t k = std::min<std::size_t>(vars.size(), static_cast<std::size_t>(std::max(0, top_k)));

    ExplainReport report;
    report.object_index = object_index;
    report.object_id = d.row_ids()[object_index];
    for (std::size_t t = 0; t < k; ++t) {
        const std::size_t j = vars[t];
        ExplainEntry e;
        e.variable = static_cast<int>(j);
        e.variable_name = d.var_name(j);
        e.normalized_deviation = dev.norm_at(object_index, j);
        e.observed = d.value(object_index, j);
        e.expected = models[j].predict_row(d, object_index);

        // order the relevant variables by strength of marginal association
        const auto& members = models[j].predictors.members;
        std::vector<std::pair<double, int>> ranked;
        ranked.reserve(members.size());
        for (std::size_t p = 0; p < members.size(); ++p) {
            double strength;
            if (!models[j].predictors.scores.empty()) {
                strength = models[j].predictors.scores[p];
            } else {
                std::vector<int> no_cond;
                strength = std::fabs(partial_correlation(d, static_cast<int>(j), members[p], no_cond));
            }
            ranked.emplace_back(-strength, members[p]);
        }
        std::sort(ranked.begin(), ranked.end());
        for (const auto& [neg, v] : ranked) {
            e.relevant_observed.emplace_back(d.var_name(static_cast<std::size_t>(v)),
                                             d.value(object_index, static_cast<std::size_t>(v)));
        }
        report.entries.push_back(std::move(e));
    }
    return report;
}

std::string scores_to_csv(const ScoreVector& scores, const std::vector<std::string>& row_ids) {
    if (row_ids.size() != scores.scores.size())
        throw std::invalid_argument("scores_to_csv: id count mismatch");
    const auto ranks = scores.ranks();
    std::string out = "# depad scores schema_version=1\n";
    out += "object_id,score,rank\n";
    for (std::size_t i = 0; i < scores.scores.size(); ++i) {
        out += row_ids[i];
        out += ',';
        out += format_double(scores.scores[i]);
        out += ',';
        out += std::to_string(ranks[i]);
        out += '\n';
    }
    return out;
}

} // namespace depad
