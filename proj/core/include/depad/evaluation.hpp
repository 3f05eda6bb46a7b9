#pragma once

#include <string>
#include <variant>
#include <vector>

#include "depad/engine.hpp"

namespace depad {

class SingleClassError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Probability that a random anomaly outscores a random normal object, ties
// counting one half; identical to the trapezoidal area under the ROC curve.
double roc_auc(std::span<const double> scores, std::span<const Label> labels);

// Average precision with ranks descending by score, ties broken by ascending
// object index. paper_formula=true uses P@l = |anomalies ranked <= l| / |s^a|
// (denominator is the anomaly count); false uses the conventional
// precision P@l = hits / l.
double average_precision(std::span<const double> scores, std::span<const Label> labels,
                         bool paper_formula = true);

enum class BaselineMethod { WKNN, LOF };

struct BaselineConfig {
    BaselineMethod method = BaselineMethod::WKNN;
    int k = 10;
};

// Proximity baselines on raw feature columns with Euclidean distance.
// wkNN: mean distance to the k nearest neighbors. LOF: standard local
// reachability ratio; zero reachability sums fall back to the smallest
// positive pairwise distance.
ScoreVector baseline_score(const Dataset& d, const BaselineConfig& cfg);

struct TrialResult {
    double roc_auc = 0.0;
    double ap = 0.0;
    double seconds = 0.0;
};

struct EvaluationReport {
    std::string method;
    std::string dataset_id;
    std::vector<TrialResult> trials;
    std::string error;  // nonempty when the method failed

    double mean_auc() const;
    double sd_auc() const;
    double mean_ap() const;
    double sd_ap() const;
    std::vector<double> auc_list() const;
    std::vector<double> ap_list() const;
};

using MethodSpec = std::variant<PipelineConfig, BaselineConfig>;

struct NamedMethod {
    std::string name;
    MethodSpec spec;
};

// Parses "fbed-cart-ps" style instantiation names plus "wknn" / "lof".
// Unknown tokens return nullopt.
std::optional<NamedMethod> parse_method(const std::string& token,
                                        const PipelineConfig& defaults);

// The repeated-contamination protocol: builds trial datasets with
// sample_benchmark, scores every method on every trial and aggregates.
// A method failure is recorded in its report without aborting the others.
std::vector<EvaluationReport> run_benchmark(const Dataset& d,
                                            const std::vector<NamedMethod>& methods,
                                            const BenchmarkSpec& spec,
                                            unsigned threads = 1,
                                            bool paper_ap = true);

// Pairwise one-sided rank-sum p-values over per-trial metric lists;
// entry (r, c) tests "row method is better than column method".
std::vector<std::vector<double>> pairwise_rank_sum(
    const std::vector<EvaluationReport>& reports, bool use_auc);

} // namespace depad
