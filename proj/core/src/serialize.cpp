#include "depad/serialize.hpp"

#include <cmath>
#include <cstdio>

#include <json.hpp>

#include "depad/io.hpp"
#include "depad/version.hpp"

namespace depad {

using nlohmann::json;

namespace {

json tree_to_json(const RegressionTree& tree) {
    json nodes = json::array();
    for (const auto& n : tree.nodes()) {
        nodes.push_back({{"split_var", n.split_var},
                         {"split_value", n.split_value},
                         {"left", n.left},
                         {"right", n.right},
                         {"prediction", n.prediction},
                         {"count", n.count}});
    }
    const auto& hp = tree.hyperparams();
    return {{"nodes", nodes},
            {"min_split", hp.min_split},
            {"min_bucket", hp.min_bucket},
            {"cp", hp.cp}};
}

RegressionTree tree_from_json(const json& j) {
    std::vector<TreeNode> nodes;
    for (const auto& n : j.at("nodes")) {
        TreeNode t;
        t.split_var = n.at("split_var").get<int>();
        t.split_value = n.at("split_value").get<double>();
        t.left = n.at("left").get<int>();
        t.right = n.at("right").get<int>();
        t.prediction = n.at("prediction").get<double>();
        t.count = n.at("count").get<int>();
        nodes.push_back(t);
    }
    TreeHyperparams hp;
    hp.min_split = j.at("min_split").get<int>();
    hp.min_bucket = j.at("min_bucket").get<int>();
    hp.cp = j.at("cp").get<double>();
    return RegressionTree(std::move(nodes), hp);
}

json predictor_to_json(const Predictor& p, const Dataset& d) {
    json members = json::array();
    for (int v : p.predictors.members) members.push_back(d.var_name(static_cast<std::size_t>(v)));
    json out{{"target", d.var_name(static_cast<std::size_t>(p.target))},
             {"members", members},
             {"method", selector_name(p.predictors.method)}};
    if (const auto* c = std::get_if<ConstantModel>(&p.model)) {
        out["model"] = {{"kind", "constant"}, {"value", c->value}};
    } else if (const auto* b = std::get_if<BaggedModel>(&p.model)) {
        json trees = json::array();
        for (const auto& t : b->trees) trees.push_back(tree_to_json(t));
        out["model"] = {{"kind", "bagged"},
                        {"aggregate", b->aggregate == Aggregate::Median ? "median" : "mean"},
                        {"seed", b->seed},
                        {"trees", trees}};
    } else {
        const auto& m = std::get<LinearModel>(p.model);
        out["model"] = {{"kind", m.kind == LinearKind::OLS     ? "ols"
                                 : m.kind == LinearKind::Ridge ? "ridge"
                                                               : "lasso"},
                        {"coefficients", m.coefficients},
                        {"intercept", m.intercept},
                        {"lambda", m.lambda},
                        {"predictor_mean", m.predictor_mean},
                        {"predictor_scale", m.predictor_scale}};
    }
    return out;
}

Predictor predictor_from_json(const json& j, const Dataset& d) {
    Predictor p;
    const int target = d.var_index(j.at("target").get<std::string>());
    if (target < 0) throw std::runtime_error("models file references unknown variable");
    p.target = target;
    p.predictors.target = target;
    const auto method = selector_from_name(j.at("method").get<std::string>());
    p.predictors.method = method.value_or(SelectorMethod::FBED);
    for (const auto& name : j.at("members")) {
        const int v = d.var_index(name.get<std::string>());
        if (v < 0) throw std::runtime_error("models file references unknown variable");
        p.predictors.members.push_back(v);
    }
    const json& m = j.at("model");
    const std::string kind = m.at("kind").get<std::string>();
    if (kind == "constant") {
        p.model = ConstantModel{m.at("value").get<double>()};
    } else if (kind == "bagged") {
        BaggedModel b;
        b.aggregate = m.at("aggregate").get<std::string>() == "median" ? Aggregate::Median
                                                                       : Aggregate::Mean;
        b.seed = m.at("seed").get<std::uint64_t>();
        for (const auto& t : m.at("trees")) b.trees.push_back(tree_from_json(t));
        p.model = std::move(b);
    } else {
        LinearModel lm;
        lm.kind = kind == "ols" ? LinearKind::OLS : kind == "ridge" ? LinearKind::Ridge : LinearKind::Lasso;
        lm.coefficients = m.at("coefficients").get<std::vector<double>>();
        lm.intercept = m.at("intercept").get<double>();
        lm.lambda = m.at("lambda").get<double>();
        lm.predictor_mean = m.at("predictor_mean").get<std::vector<double>>();
        lm.predictor_scale = m.at("predictor_scale").get<std::vector<double>>();
        p.model = std::move(lm);
    }
    return p;
}

json config_to_json(const PipelineConfig& cfg) {
    return {{"instantiation", cfg.instantiation_name()},
            {"selector", selector_name(cfg.selector.method)},
            {"alpha", cfg.selector.alpha},
            {"slope_threshold", cfg.selector.slope_threshold},
            {"mi_bins", cfg.selector.mi_bins},
            {"model", model_kind_name(cfg.model_kind)},
            {"combiner", combiner_name(cfg.combiner)},
            {"eta", cfg.eta},
            {"seed", cfg.seed},
            {"n_trees", cfg.n_trees},
            {"min_split", cfg.tree.min_split},
            {"min_bucket", cfg.tree.min_bucket},
            {"cp", cfg.tree.cp},
            {"cv_folds", cfg.cv_folds}};
}

} // namespace

std::string models_to_json(const DependencyModelSet& models, const Dataset& d,
                           const PipelineConfig& cfg) {
    json predictors = json::array();
    for (const auto& p : models) predictors.push_back(predictor_to_json(p, d));
    const json doc{{"schema_version", kSchemaVersion},
                   {"tool_version", kVersion},
                   {"config", config_to_json(cfg)},
                   {"predictors", predictors}};
    return doc.dump(2) + "\n";
}

DependencyModelSet models_from_json(const std::string& text, const Dataset& d) {
    const json doc = json::parse(text);
    if (doc.at("schema_version").get<int>() != kSchemaVersion)
        throw std::runtime_error("unsupported models schema version");
    DependencyModelSet models;
    for (const auto& p : doc.at("predictors")) models.push_back(predictor_from_json(p, d));
    if (models.size() != d.n_vars())
        throw std::runtime_error("models file does not cover every variable");
    return models;
}

std::string relevant_sets_to_json(const std::vector<RelevantSet>& sets, const Dataset& d) {
    json arr = json::array();
    for (const auto& s : sets) {
        json members = json::array();
        for (int v : s.members) members.push_back(d.var_name(static_cast<std::size_t>(v)));
        json entry{{"target", d.var_name(static_cast<std::size_t>(s.target))},
                   {"members", members},
                   {"method", selector_name(s.method)}};
        if (!s.scores.empty()) entry["scores"] = s.scores;
        arr.push_back(entry);
    }
    const json doc{{"schema_version", kSchemaVersion}, {"relevant_sets", arr}};
    return doc.dump(2) + "\n";
}

std::string encoding_map_to_json(const EncodingMap& map) {
    json arr = json::array();
    for (const auto& c : map.columns) {
        arr.push_back({{"source", c.source_name},
                       {"levels", c.levels},
                       {"first_index", c.first_index}});
    }
    const json doc{{"schema_version", kSchemaVersion}, {"encoded_columns", arr}};
    return doc.dump(2) + "\n";
}

std::string explain_report_to_json(const ExplainReport& report) {
    json vars = json::array();
    for (const auto& e : report.entries) {
        json relevant = json::array();
        for (const auto& [name, value] : e.relevant_observed)
            relevant.push_back({{"name", name}, {"observed", value}});
        vars.push_back({{"variable", e.variable_name},
                        {"normalized_deviation", e.normalized_deviation},
                        {"observed", e.observed},
                        {"expected", e.expected},
                        {"relevant", relevant}});
    }
    const json doc{{"schema_version", kSchemaVersion},
                   {"object_id", report.object_id},
                   {"object_index", report.object_index},
                   {"variables", vars}};
    return doc.dump(2) + "\n";
}

std::string explain_report_to_text(const ExplainReport& report) {
    std::string out;
    out += "object " + report.object_id + " (row " + std::to_string(report.object_index) + ")\n";
    out += "variable            deviation   observed   expected   relevant variables\n";
    for (const auto& e : report.entries) {
        char line[256];
        std::snprintf(line, sizeof line, "%-18s %10.3f %10.4g %10.4g   ",
                      e.variable_name.c_str(), e.normalized_deviation, e.observed, e.expected);
        out += line;
        for (std::size_t i = 0; i < e.relevant_observed.size(); ++i) {
            if (i) out += ", ";
            out += e.relevant_observed[i].first + "=" + format_double(e.relevant_observed[i].second);
        }
        out += '\n';
    }
    return out;
}

std::string manifest_to_json(const RunManifest& manifest) {
    const double n = static_cast<double>(manifest.n);
    const double m = static_cast<double>(manifest.m);
    const double lambda = manifest.lambda_bar;
    const json doc{
        {"schema_version", kSchemaVersion},
        {"tool_version", manifest.tool_version},
        {"config", config_to_json(manifest.config)},
        {"dataset", {{"path", manifest.dataset_path}, {"n", manifest.n}, {"m", manifest.m}}},
        {"seed", manifest.seed},
        {"threads", manifest.threads},
        {"timings",
         {{"select_seconds", manifest.timings.select_seconds},
          {"train_seconds", manifest.timings.train_seconds},
          {"score_seconds", manifest.timings.score_seconds}}},
        {"lambda_bar", lambda},
        {"complexity_estimate",
         {{"selection_ops", m * m * lambda},
          {"training_ops", m * lambda * n * (n > 1.0 ? std::log2(n) : 1.0)}}}};
    return doc.dump(2) + "\n";
}

std::string evaluation_reports_to_json(const std::vector<EvaluationReport>& reports,
                                       const BenchmarkSpec& spec) {
    json arr = json::array();
    for (const auto& r : reports) {
        json trials = json::array();
        for (const auto& t : r.trials)
            trials.push_back({{"roc_auc", t.roc_auc}, {"ap", t.ap}, {"seconds", t.seconds}});
        json entry{{"method", r.method}, {"dataset", r.dataset_id}, {"trials", trials}};
        if (!r.error.empty()) {
            entry["error"] = r.error;
        } else {
            entry["mean_auc"] = r.mean_auc();
            entry["sd_auc"] = r.sd_auc();
            entry["mean_ap"] = r.mean_ap();
            entry["sd_ap"] = r.sd_ap();
        }
        arr.push_back(entry);
    }
    const json doc{{"schema_version", kSchemaVersion},
                   {"anomaly_fraction", spec.anomaly_fraction},
                   {"repeats", spec.repeats},
                   {"seed", spec.rng_seed},
                   {"reports", arr}};
    return doc.dump(2) + "\n";
}

std::string evaluation_reports_to_csv(const std::vector<EvaluationReport>& reports) {
    std::string out = "# depad benchmark schema_version=1\n";
    out += "method,dataset,trials,mean_auc,sd_auc,mean_ap,sd_ap,error\n";
    for (const auto& r : reports) {
        out += r.method + "," + r.dataset_id + "," + std::to_string(r.trials.size()) + ",";
        if (r.error.empty() && !r.trials.empty()) {
            out += format_double(r.mean_auc()) + "," + format_double(r.sd_auc()) + "," +
                   format_double(r.mean_ap()) + "," + format_double(r.sd_ap()) + ",";
        } else {
            out += ",,,,";
        }
        out += r.error + "\n";
    }
    return out;
}

std::string rank_sum_matrix_to_csv(const std::vector<EvaluationReport>& reports,
                                   const std::vector<std::vector<double>>& p) {
    std::string out = "# depad ranksum schema_version=1\n";
    out += "method";
    for (const auto& r : reports) out += "," + r.method;
    out += '\n';
    for (std::size_t i = 0; i < reports.size(); ++i) {
        out += reports[i].method;
        for (std::size_t j = 0; j < reports.size(); ++j) {
            out += ',';
            if (i == j) out += "-";
            else if (std::isnan(p[i][j])) out += "NA";
            else out += format_double(p[i][j]);
        }
        out += '\n';
    }
    return out;
}

std::string metrics_to_json(double auc, double ap_paper, double ap_standard,
                            std::size_t n_anomalies, std::size_t n_normal) {
    const json doc{{"schema_version", kSchemaVersion},
                   {"roc_auc", auc},
                   {"ap", ap_paper},
                   {"ap_standard", ap_standard},
                   {"n_anomalies", n_anomalies},
                   {"n_normal", n_normal}};
    return doc.dump(2) + "\n";
}

} // namespace depad
