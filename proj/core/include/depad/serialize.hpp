#pragma once

#include <string>
#include <vector>

#include "depad/engine.hpp"
#include "depad/evaluation.hpp"

namespace depad {

// Versioned JSON documents (schema_version field) for the file surfaces:
// trained model sets, run manifests, relevant-variable sets, explain
// reports, encoding maps and benchmark reports.

std::string models_to_json(const DependencyModelSet& models, const Dataset& d,
                           const PipelineConfig& cfg);
DependencyModelSet models_from_json(const std::string& text, const Dataset& d);

std::string relevant_sets_to_json(const std::vector<RelevantSet>& sets, const Dataset& d);

std::string encoding_map_to_json(const EncodingMap& map);

std::string explain_report_to_json(const ExplainReport& report);
std::string explain_report_to_text(const ExplainReport& report);

struct RunTimings {
    double select_seconds = 0.0;
    double train_seconds = 0.0;
    double score_seconds = 0.0;
};

struct RunManifest {
    PipelineConfig config;
    std::string dataset_path;
    std::size_t n = 0, m = 0;
    std::uint64_t seed = 0;
    unsigned threads = 1;
    RunTimings timings;
    double lambda_bar = 0.0;  // realized mean relevant-set size
    std::string tool_version;
};

std::string manifest_to_json(const RunManifest& manifest);

std::string evaluation_reports_to_json(const std::vector<EvaluationReport>& reports,
                                       const BenchmarkSpec& spec);
std::string evaluation_reports_to_csv(const std::vector<EvaluationReport>& reports);
std::string rank_sum_matrix_to_csv(const std::vector<EvaluationReport>& reports,
                                   const std::vector<std::vector<double>>& p);

std::string metrics_to_json(double auc, double ap_paper, double ap_standard,
                            std::size_t n_anomalies, std::size_t n_normal);

} // namespace depad
