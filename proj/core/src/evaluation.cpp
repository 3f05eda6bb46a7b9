#include "depad/evaluation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "depad/rng.hpp"
#include "depad/stats.hpp"

namespace depad {

namespace {

void require_both_classes(std::span<const Label> labels) {
    const bool any_a = std::find(labels.begin(), labels.end(), Label::Anomaly) != labels.end();
    const bool any_n = std::find(labels.begin(), labels.end(), Label::Normal) != labels.end();
    if (!any_a || !any_n) throw SingleClassError("metric needs both classes present");
}

} // namespace

double roc_auc(std::span<const double> scores, std::span<const Label> labels) {
    if (scores.size() != labels.size()) throw std::invalid_argument("roc_auc: length mismatch");
    require_both_classes(labels);
    const std::size_t n = scores.size();

    // average ranks of pooled scores (ascending)
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
    std::vector<double> rank(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
        const double avg = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j + 1));
        for (std::size_t t = i; t <= j; ++t) rank[order[t]] = avg;
        i = j + 1;
    }

    double rank_sum_anomaly = 0.0;
    std::size_t na = 0;
    for (std::size_t t = 0; t < n; ++t) {
        if (labels[t] == Label::Anomaly) {
            rank_sum_anomaly += rank[t];
            ++na;
        }
    }
    const double da = static_cast<double>(na);
    const double dn = static_cast<double>(n - na);
    return (rank_sum_anomaly - da * (da + 1.0) / 2.0) / (da * dn);
}

double average_precision(std::span<const double> scores, std::span<const Label> labels,
                         bool paper_formula) {
    if (scores.size() != labels.size()) throw std::invalid_argument("average_precision: length mismatch");
    require_both_classes(labels);
    const std::size_t n = scores.size();

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        return a < b;
    });

    std::size_t total_anomalies = 0;
    for (Label l : labels)
        if (l == Label::Anomaly) ++total_anomalies;

    if (paper_formula) {
        // P@rank(s) = hits / |s^a|, so AP reduces to an integer pair count
        // over anomalies divided by |s^a|^2; the integer sum keeps the
        // result independent of accumulation order.
        std::size_t hit_sum = 0, hits = 0;
        for (std::size_t r = 0; r < n; ++r) {
            if (labels[order[r]] != Label::Anomaly) continue;
            ++hits;
            hit_sum += hits;
        }
        return static_cast<double>(hit_sum) /
               (static_cast<double>(total_anomalies) * static_cast<double>(total_anomalies));
    }

    double ap = 0.0;
    std::size_t hits = 0;
    for (std::size_t r = 0; r < n; ++r) {
        if (labels[order[r]] != Label::Anomaly) continue;
        ++hits;  // anomalies ranked at or above rank r+1
        ap += static_cast<double>(hits) / static_cast<double>(r + 1);
    }
    return ap / static_cast<double>(total_anomalies);
}

namespace {

std::vector<double> pairwise_distances_from(const Dataset& d, std::size_t i) {
    const std::size_t n = d.n_rows();
    const std::size_t m = d.n_vars();
    std::vector<double> dist(n, 0.0);
    for (std::size_t j = 0; j < m; ++j) {
        const auto& col = d.column(j);
        const double vi = col[i];
        for (std::size_t t = 0; t < n; ++t) {
            const double dlt = vi - col[t];
            dist[t] += dlt * dlt;
        }
    }
    for (double& v : dist) v = std::sqrt(v);
    return dist;
}

struct NeighborSet {
    std::vector<std::size_t> ids;  // everything within the k-distance
    std::vector<double> dists;
    double k_distance = 0.0;
};

NeighborSet k_neighbors(const std::vector<double>& dist, std::size_t self, int k) {
    std::vector<std::size_t> order;
    order.reserve(dist.size() - 1);
    for (std::size_t t = 0; t < dist.size(); ++t)
        if (t != self) order.push_back(t);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (dist[a] != dist[b]) return dist[a] < dist[b];
        return a < b;
    });
    NeighborSet ns;
    ns.k_distance = dist[order[static_cast<std::size_t>(k) - 1]];
    for (std::size_t t = 0; t < order.size(); ++t) {
        if (dist[order[t]] > ns.k_distance) break;
        ns.ids.push_back(order[t]);
        ns.dists.push_back(dist[order[t]]);
    }
    return ns;
}

ScoreVector wknn_scores(const Dataset& d, int k) {
    const std::size_t n = d.n_rows();
    ScoreVector out;
    out.scores.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto dist = pairwise_distances_from(d, i);
        std::vector<double> others;
        others.reserve(n - 1);
        for (std::size_t t = 0; t < n; ++t)
            if (t != i) others.push_back(dist[t]);
        std::nth_element(others.begin(), others.begin() + (k - 1), others.end());
        std::partial_sort(others.begin(), others.begin() + k, others.end());
        double sum = 0.0;
        for (int t = 0; t < k; ++t) sum += others[static_cast<std::size_t>(t)];
        out.scores[i] = sum / static_cast<double>(k);
    }
    return out;
}

ScoreVector lof_scores(const Dataset& d, int k) {
    const std::size_t n = d.n_rows();

    std::vector<NeighborSet> neighbors(n);
    double smallest_positive = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto dist = pairwise_distances_from(d, i);
        neighbors[i] = k_neighbors(dist, i, k);
        for (std::size_t t = 0; t < n; ++t) {
            if (t == i || dist[t] <= 0.0) continue;
            if (smallest_positive == 0.0 || dist[t] < smallest_positive)
                smallest_positive = dist[t];
        }
    }
    if (smallest_positive == 0.0) {
        // every object identical: uniformly unremarkable
        ScoreVector out;
        out.scores.assign(n, 1.0);
        return out;
    }

    std::vector<double> lrd(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& ns = neighbors[i];
        double reach_sum = 0.0;
        for (std::size_t t = 0; t < ns.ids.size(); ++t) {
            double reach = std::max(neighbors[ns.ids[t]].k_distance, ns.dists[t]);
            if (reach <= 0.0) reach = smallest_positive;
            reach_sum += reach;
        }
        lrd[i] = static_cast<double>(ns.ids.size()) / reach_sum;
    }

    ScoreVector out;
    out.scores.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& ns = neighbors[i];
        double ratio_sum = 0.0;
        for (std::size_t id : ns.ids) ratio_sum += lrd[id] / lrd[i];
        out.scores[i] = ratio_sum / static_cast<double>(ns.ids.size());
    }
    return out;
}

} // namespace

ScoreVector baseline_score(const Dataset& d, const BaselineConfig& cfg) {
    if (cfg.k < 1 || static_cast<std::size_t>(cfg.k) >= d.n_rows())
        throw std::invalid_argument("baseline_score: need 1 <= k < n");
    return (cfg.method == BaselineMethod::WKNN) ? wknn_scores(d, cfg.k)
                                                : lof_scores(d, cfg.k);
}

namespace {

double mean_of(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sd_of(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double m = mean_of(v);
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

} // namespace

double EvaluationReport::mean_auc() const { return mean_of(auc_list()); }
double EvaluationReport::sd_auc() const { return sd_of(auc_list()); }
double EvaluationReport::mean_ap() const { return mean_of(ap_list()); }
double EvaluationReport::sd_ap() const { return sd_of(ap_list()); }

std::vector<double> EvaluationReport::auc_list() const {
    std::vector<double> v;
    v.reserve(trials.size());
    for (const auto& t : trials) v.push_back(t.roc_auc);
    return v;
}

std::vector<double> EvaluationReport::ap_list() const {
    std::vector<double> v;
    v.reserve(trials.size());
    for (const auto& t : trials) v.push_back(t.ap);
    return v;
}

std::optional<NamedMethod> parse_method(const std::string& token,
                                        const PipelineConfig& defaults) {
    std::string s;
    for (char c : token) s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    if (s == "wknn") return NamedMethod{"wkNN", BaselineConfig{BaselineMethod::WKNN, 10}};
    if (s == "lof") return NamedMethod{"LOF", BaselineConfig{BaselineMethod::LOF, 10}};

    // fs-model-combiner
    std::vector<std::string> parts;
    std::size_t pos = 0;
    while (pos <= s.size()) {
        const std::size_t dash = s.find('-', pos);
        if (dash == std::string::npos) {
            parts.push_back(s.substr(pos));
            break;
        }
        parts.push_back(s.substr(pos, dash - pos));
        pos = dash + 1;
    }
    if (parts.size() != 3) return std::nullopt;
    const auto fs = selector_from_name(parts[0]);
    const auto mk = model_kind_from_name(parts[1]);
    const auto cb = combiner_from_name(parts[2]);
    if (!fs || !mk || !cb) return std::nullopt;

    PipelineConfig cfg = defaults;
    cfg.selector.method = *fs;
    cfg.model_kind = *mk;
    cfg.combiner = *cb;
    return NamedMethod{cfg.instantiation_name(), cfg};
}

std::vector<EvaluationReport> run_benchmark(const Dataset& d,
                                            const std::vector<NamedMethod>& methods,
                                            const BenchmarkSpec& spec,
                                            unsigned threads,
                                            bool paper_ap) {
    if (!d.has_labels()) throw SingleClassError("run_benchmark: dataset has no labels");
    require_both_classes(d.labels());

    const std::vector<Dataset> trials = sample_benchmark(d, spec);
    std::vector<EvaluationReport> reports(methods.size());

    for (std::size_t m = 0; m < methods.size(); ++m) {
        EvaluationReport& report = reports[m];
        report.method = methods[m].name;
        report.dataset_id = d.source();
        try {
            for (std::size_t t = 0; t < trials.size(); ++t) {
                const auto start = std::chrono::steady_clock::now();
                ScoreVector scores;
                if (const auto* pipeline = std::get_if<PipelineConfig>(&methods[m].spec)) {
                    PipelineConfig cfg = *pipeline;
                    cfg.seed = substream(pipeline->seed, t);
                    scores = run(trials[t], cfg, threads);
                } else {
                    scores = baseline_score(trials[t], std::get<BaselineConfig>(methods[m].spec));
                }
                TrialResult result;
                result.roc_auc = roc_auc(scores.scores, trials[t].labels());
                result.ap = average_precision(scores.scores, trials[t].labels(), paper_ap);
                result.seconds = std::chrono::duration<double>(
                                     std::chrono::steady_clock::now() - start)
                                     .count();
                report.trials.push_back(result);
            }
        } catch (const std::exception& e) {
            report.error = e.what();
            report.trials.clear();
        }
    }
    return reports;
}

std::vector<std::vector<double>> pairwise_rank_sum(
    const std::vector<EvaluationReport>& reports, bool use_auc) {
    const std::size_t k = reports.size();
    std::vector<std::vector<double>> p(k, std::vector<double>(k, 1.0));
    for (std::size_t r = 0; r < k; ++r) {
        for (std::size_t c = 0; c < k; ++c) {
            if (r == c) continue;
            if (!reports[r].error.empty() || !reports[c].error.empty()) {
                p[r][c] = std::nan("");
                continue;
            }
            const auto a = use_auc ? reports[r].auc_list() : reports[r].ap_list();
            const auto b = use_auc ? reports[c].auc_list() : reports[c].ap_list();
            p[r][c] = rank_sum_test(a, b, Alternative::Greater).p_value;
        }
    }
    return p;
}

} // namespace depad
