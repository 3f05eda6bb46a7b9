#include <doctest.h>

#include <json.hpp>

#include "depad/serialize.hpp"
#include "helpers.hpp"

using namespace depad;
using nlohmann::json;

namespace {

Dataset small_correlated(std::uint64_t seed) {
    depad::Rng rng(seed);
    const std::size_t n = 120;
    std::vector<std::vector<double>> cols(3, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i) {
        cols[0][i] = rng.normal();
        cols[1][i] = 1.5 * cols[0][i] + 0.4 * rng.normal();
        cols[2][i] = rng.normal();
    }
    return test_helpers::make_dataset(std::move(cols));
}

} // namespace

TEST_CASE("models: JSON round trip preserves predictions") {
    const Dataset d = small_correlated(50);
    for (ModelKind kind : {ModelKind::CART, ModelKind::MCART, ModelKind::OLS,
                           ModelKind::Ridge, ModelKind::Lasso}) {
        PipelineConfig cfg;
        cfg.model_kind = kind;
        cfg.seed = 17;
        cfg.n_trees = 5;
        const DependencyModelSet models = train(d, cfg);
        const std::string text = models_to_json(models, d, cfg);
        const DependencyModelSet loaded = models_from_json(text, d);
        REQUIRE(loaded.size() == models.size());
        for (std::size_t j = 0; j < models.size(); ++j) {
            CHECK(loaded[j].predictors.members == models[j].predictors.members);
            for (std::size_t i = 0; i < d.n_rows(); i += 13)
                CHECK(loaded[j].predict_row(d, i) == models[j].predict_row(d, i));
        }
    }
}

TEST_CASE("models: schema version is enforced") {
    const Dataset d = small_correlated(51);
    PipelineConfig cfg;
    const std::string text = models_to_json(train(d, cfg), d, cfg);
    json doc = json::parse(text);
    CHECK(doc["schema_version"] == 1);
    doc["schema_version"] = 999;
    CHECK_THROWS(models_from_json(doc.dump(), d));
}

TEST_CASE("manifest JSON carries the instantiation and complexity fields") {
    RunManifest m;
    m.config.selector.method = SelectorMethod::FBED;
    m.config.model_kind = ModelKind::CART;
    m.config.combiner = Combiner::PS;
    m.dataset_path = "data.csv";
    m.n = 100;
    m.m = 8;
    m.lambda_bar = 2.5;
    m.tool_version = "1.0.0";
    const json doc = json::parse(manifest_to_json(m));
    CHECK(doc["config"]["instantiation"] == "FBED-CART-PS");
    CHECK(doc["lambda_bar"] == 2.5);
    CHECK(doc["dataset"]["n"] == 100);
    CHECK(doc["complexity_estimate"]["selection_ops"].get<double>() ==
          doctest::Approx(8.0 * 8.0 * 2.5));
    CHECK(doc["schema_version"] == 1);
}

TEST_CASE("relevant sets and encoding map serialize with names") {
    const char* csv = "color,v,w\nr,1,2\ng,2,4\nb,3,6\ng,4,8\n";
    const Dataset d = ingest_csv_text(csv);
    SelectorConfig cfg;
    cfg.method = SelectorMethod::MI;
    const auto sets = select_all(d, cfg);
    const json doc = json::parse(relevant_sets_to_json(sets, d));
    CHECK(doc["relevant_sets"].size() == d.n_vars());
    CHECK(doc["relevant_sets"][0]["method"] == "MI");

    const json enc = json::parse(encoding_map_to_json(d.encoding()));
    REQUIRE(enc["encoded_columns"].size() == 1);
    CHECK(enc["encoded_columns"][0]["source"] == "color");
    CHECK(enc["encoded_columns"][0]["levels"].size() == 3);
}

TEST_CASE("explain report renders as JSON and text") {
    ExplainReport r;
    r.object_index = 4;
    r.object_id = "scorpion";
    ExplainEntry e;
    e.variable = 8;
    e.variable_name = "backbone";
    e.normalized_deviation = 9.2;
    e.observed = 0.0;
    e.expected = 1.0;
    e.relevant_observed = {{"tail", 1.0}};
    r.entries.push_back(e);

    const json doc = json::parse(explain_report_to_json(r));
    CHECK(doc["object_id"] == "scorpion");
    CHECK(doc["variables"][0]["variable"] == "backbone");
    CHECK(doc["variables"][0]["relevant"][0]["name"] == "tail");

    const std::string text = explain_report_to_text(r);
    CHECK(text.find("scorpion") != std::string::npos);
    CHECK(text.find("backbone") != std::string::npos);
    CHECK(text.find("tail=1") != std::string::npos);
}

TEST_CASE("evaluation reports: json and csv surfaces") {
    EvaluationReport r;
    r.method = "FBED-CART-PS";
    r.dataset_id = "synthetic";
    r.trials = {{0.9, 0.8, 0.1}, {0.92, 0.82, 0.1}};
    EvaluationReport failed;
    failed.method = "broken";
    failed.error = "boom";

    BenchmarkSpec spec;
    const json doc = json::parse(evaluation_reports_to_json({r, failed}, spec));
    CHECK(doc["reports"].size() == 2);
    CHECK(doc["reports"][0]["mean_auc"].get<double>() == doctest::Approx(0.91));
    CHECK(doc["reports"][1]["error"] == "boom");

    const std::string csv = evaluation_reports_to_csv({r, failed});
    CHECK(csv.find("FBED-CART-PS,synthetic,2,") != std::string::npos);
    CHECK(csv.find("broken") != std::string::npos);

    const auto p = pairwise_rank_sum({r, r}, true);
    const std::string matrix = rank_sum_matrix_to_csv({r, r}, p);
    CHECK(matrix.find("method,FBED-CART-PS,FBED-CART-PS") != std::string::npos);
}
