#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "depad/engine.hpp"
#include "helpers.hpp"

using namespace depad;

namespace {

DeviationMatrix matrix_from_normalized(std::vector<std::vector<double>> rows) {
    DeviationMatrix dev;
    dev.n = rows.size();
    dev.m = rows.front().size();
    dev.raw.assign(dev.n * dev.m, 0.0);
    dev.normalized.resize(dev.n * dev.m);
    dev.per_variable_stats.assign(dev.m, {0.0, 1.0});
    dev.degenerate.assign(dev.m, false);
    for (std::size_t i = 0; i < dev.n; ++i)
        for (std::size_t j = 0; j < dev.m; ++j) dev.normalized[i * dev.m + j] = rows[i][j];
    return dev;
}

Dataset planted_dependency_dataset(std::uint64_t seed, std::vector<std::size_t>& planted) {
    depad::Rng rng(seed);
    const std::size_t n_normal = 500;
    std::vector<std::vector<double>> cols(2);
    for (std::size_t i = 0; i < n_normal; ++i) {
        const double x = rng.normal();
        cols[0].push_back(x);
        cols[1].push_back(3.0 * x + 0.3 * rng.normal());
    }
    // five objects that respect both marginals but break the dependency
    for (int p = 0; p < 5; ++p) {
        planted.push_back(cols[0].size());
        const double x = rng.normal();
        cols[0].push_back(x);
        cols[1].push_back(-3.0 * x + 0.3 * rng.normal());
    }
    return test_helpers::make_dataset(std::move(cols));
}

} // namespace

TEST_CASE("instantiation names follow the acronym convention") {
    PipelineConfig cfg;
    cfg.selector.method = SelectorMethod::FBED;
    cfg.model_kind = ModelKind::CART;
    cfg.combiner = Combiner::PS;
    CHECK(cfg.instantiation_name() == "FBED-CART-PS");
    cfg.selector.method = SelectorMethod::DC;
    cfg.model_kind = ModelKind::MCART;
    cfg.combiner = Combiner::RZPS;
    CHECK(cfg.instantiation_name() == "DC-mCART-RZPS");
}

TEST_CASE("normalization: hand-computed robust Z-scores") {
    // one column, raw [1,2,3,4,5]: median 3, AAD 1.2
    DeviationMatrix dev = normalize_raw_deviations(5, 1, {1, 2, 3, 4, 5});
    CHECK(dev.per_variable_stats[0].first == 3.0);
    CHECK(dev.per_variable_stats[0].second == doctest::Approx(1.2));
    const double want[5] = {-5.0 / 3.0, -5.0 / 6.0, 0.0, 5.0 / 6.0, 5.0 / 3.0};
    for (std::size_t i = 0; i < 5; ++i)
        CHECK(dev.norm_at(i, 0) == doctest::Approx(want[i]).epsilon(1e-12));

    // a single outlier does not blow up the scale
    dev = normalize_raw_deviations(5, 1, {0, 0, 0, 0, 100});
    CHECK(dev.per_variable_stats[0] == std::pair<double, double>{0.0, 20.0});
    CHECK(dev.norm_at(4, 0) == 5.0);
    for (std::size_t i = 0; i < 4; ++i) CHECK(dev.norm_at(i, 0) == 0.0);
}

TEST_CASE("normalization: non-degenerate columns hit median 0 and AAD 1") {
    depad::Rng rng(21);
    std::vector<double> raw(200 * 3);
    for (double& v : raw) v = std::fabs(rng.normal());
    const DeviationMatrix dev = normalize_raw_deviations(200, 3, std::move(raw));
    for (std::size_t j = 0; j < 3; ++j) {
        std::vector<double> col(200);
        for (std::size_t i = 0; i < 200; ++i) col[i] = dev.norm_at(i, j);
        const ColumnStats st = compute_stats(col);
        CHECK(std::fabs(st.median) <= 1e-9);
        CHECK(std::fabs(st.aad - 1.0) <= 1e-9);
    }
}

TEST_CASE("deviations: a perfect predictor makes its column degenerate") {
    depad::Rng rng(22);
    std::vector<double> x(50);
    for (double& v : x) v = rng.normal();
    const Dataset d = test_helpers::make_dataset({x, x});

    // x0 predicted exactly from x1
    Predictor exact;
    exact.target = 0;
    exact.predictors.target = 0;
    exact.predictors.members = {1};
    LinearModel lm;
    lm.coefficients = {1.0};
    lm.intercept = 0.0;
    exact.model = lm;

    Predictor fallback;
    fallback.target = 1;
    fallback.predictors.target = 1;
    fallback.model = ConstantModel{0.0};

    const DeviationMatrix dev = deviations(d, {exact, fallback});
    CHECK(dev.degenerate[0]);
    for (std::size_t i = 0; i < d.n_rows(); ++i) {
        CHECK(dev.raw_at(i, 0) == 0.0);
        CHECK(dev.norm_at(i, 0) == 0.0);
    }
    CHECK(!dev.degenerate[1]);
}

TEST_CASE("combine: hand-evaluated rows") {
    const DeviationMatrix dev = matrix_from_normalized({{-1.0, 0.5, 2.0}, {-2.0, -0.1, 0.0}});
    const ScoreVector ps = combine(dev, Combiner::PS, 0.0);
    CHECK(ps.scores[0] == 2.5);
    CHECK(ps.scores[1] == 0.0);  // nothing above eta
    const ScoreVector sum = combine(dev, Combiner::Sum, 0.0);
    CHECK(sum.scores[0] == doctest::Approx(1.5));
    const ScoreVector mx = combine(dev, Combiner::Max, 0.0);
    CHECK(mx.scores[0] == 2.0);
    CHECK(mx.scores[1] == 0.0);
    const ScoreVector rzps = combine(dev, Combiner::RZPS, 1.0);
    CHECK(rzps.scores[0] == 2.0);  // only the 2.0 exceeds eta = 1
}

TEST_CASE("combine: monotonicity in a single deviation") {
    depad::Rng rng(23);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<std::vector<double>> rows(1, std::vector<double>(6));
        for (double& v : rows[0]) v = rng.normal();
        const std::size_t bump = rng.bounded(6);
        std::vector<std::vector<double>> bumped = rows;
        bumped[0][bump] = std::max(bumped[0][bump], 0.1) + 1.0;  // push above eta=0

        for (Combiner c : {Combiner::PS, Combiner::Sum, Combiner::Max}) {
            const double before = combine(matrix_from_normalized(rows), c, 0.0).scores[0];
            const double after = combine(matrix_from_normalized(bumped), c, 0.0).scores[0];
            CHECK(after >= before);
        }
    }
}

TEST_CASE("combine: GS ranks match Sum ranks on positively-centered objects") {
    depad::Rng rng(24);
    std::vector<std::vector<double>> rows(40, std::vector<double>(4));
    for (auto& r : rows)
        for (double& v : r) v = rng.normal() * 2.0;
    const DeviationMatrix dev = matrix_from_normalized(rows);
    const ScoreVector sum = combine(dev, Combiner::Sum, 0.0);
    const ScoreVector gs = combine(dev, Combiner::GS, 0.0);

    const double mean = std::accumulate(sum.scores.begin(), sum.scores.end(), 0.0) / 40.0;
    for (std::size_t a = 0; a < 40; ++a) {
        for (std::size_t b = 0; b < 40; ++b) {
            if (sum.scores[a] <= mean || sum.scores[b] <= mean) continue;
            if (sum.scores[a] < sum.scores[b]) CHECK(gs.scores[a] <= gs.scores[b]);
        }
    }
}

TEST_CASE("train: correlated pair uses each other; independent data falls back") {
    std::vector<std::size_t> planted;
    const Dataset pair = planted_dependency_dataset(31, planted);
    PipelineConfig cfg;
    cfg.seed = 5;
    const DependencyModelSet models = train(pair, cfg);
    REQUIRE(models.size() == 2);
    CHECK(models[0].predictors.members == std::vector<int>{1});
    CHECK(models[1].predictors.members == std::vector<int>{0});
    CHECK(!models[0].is_fallback());

    const Dataset noise = test_helpers::independent_dataset(32, 1500, 3);
    const DependencyModelSet fallbacks = train(noise, cfg);
    for (const auto& m : fallbacks) {
        CHECK(m.is_fallback());
        const auto st = noise.stats(static_cast<std::size_t>(m.target));
        CHECK(std::get<ConstantModel>(m.model).value == doctest::Approx(st.median));
    }
}

TEST_CASE("run: planted dependency breakers rank on top") {
    std::vector<std::size_t> planted;
    const Dataset d = planted_dependency_dataset(33, planted);
    PipelineConfig cfg;
    cfg.selector.method = SelectorMethod::FBED;
    cfg.model_kind = ModelKind::CART;
    cfg.combiner = Combiner::PS;
    cfg.seed = 9;
    const ScoreVector scores = run(d, cfg);
    const auto ranks = scores.ranks();
    for (std::size_t p : planted) CHECK(ranks[p] <= 10);
}

TEST_CASE("run: all-constant dataset scores everything zero") {
    const Dataset d = test_helpers::make_dataset({{2, 2, 2, 2}, {7, 7, 7, 7}});
    PipelineConfig cfg;
    const ScoreVector scores = run(d, cfg);
    for (double s : scores.scores) CHECK(s == 0.0);
}

TEST_CASE("run: appending a constant variable leaves scores unchanged") {
    std::vector<std::size_t> planted;
    const Dataset base = planted_dependency_dataset(34, planted);
    std::vector<std::vector<double>> cols = {base.column(0), base.column(1),
                                             std::vector<double>(base.n_rows(), 1.5)};
    const Dataset extended = test_helpers::make_dataset(std::move(cols));
    PipelineConfig cfg;
    cfg.seed = 4;
    const ScoreVector a = run(base, cfg);
    const ScoreVector b = run(extended, cfg);
    REQUIRE(a.scores.size() == b.scores.size());
    for (std::size_t i = 0; i < a.scores.size(); ++i)
        CHECK(a.scores[i] == doctest::Approx(b.scores[i]).epsilon(1e-12));
}

TEST_CASE("run: object order permutation permutes scores") {
    // deterministic linear models keep this check tight
    std::vector<std::size_t> planted;
    const Dataset d = planted_dependency_dataset(35, planted);
    PipelineConfig cfg;
    cfg.model_kind = ModelKind::OLS;
    cfg.seed = 2;
    const ScoreVector original = run(d, cfg);

    // reverse row order
    std::vector<std::vector<double>> cols(2);
    for (std::size_t j = 0; j < 2; ++j) {
        cols[j] = d.column(j);
        std::reverse(cols[j].begin(), cols[j].end());
    }
    const Dataset reversed = test_helpers::make_dataset(std::move(cols));
    const ScoreVector permuted = run(reversed, cfg);
    const std::size_t n = d.n_rows();
    for (std::size_t i = 0; i < n; ++i)
        CHECK(original.scores[i] ==
              doctest::Approx(permuted.scores[n - 1 - i]).epsilon(1e-9));
}

TEST_CASE("run: same seed, different thread counts, identical scores") {
    std::vector<std::size_t> planted;
    const Dataset d = planted_dependency_dataset(36, planted);
    PipelineConfig cfg;
    cfg.seed = 1234;
    const ScoreVector one = run(d, cfg, 1);
    const ScoreVector many = run(d, cfg, 8);
    REQUIRE(one.scores.size() == many.scores.size());
    for (std::size_t i = 0; i < one.scores.size(); ++i)
        CHECK(one.scores[i] == many.scores[i]);
}

TEST_CASE("explain: ordering, tie-breaking and exhaustive requests") {
    depad::Rng rng(37);
    std::vector<double> x(60), y(60);
    for (std::size_t i = 0; i < 60; ++i) {
        x[i] = rng.normal();
        y[i] = 2.0 * x[i] + 0.2 * rng.normal();
    }
    const Dataset d = test_helpers::make_dataset({x, y});
    PipelineConfig cfg;
    cfg.model_kind = ModelKind::OLS;
    const DependencyModelSet models = train(d, cfg);
    const DeviationMatrix dev = deviations(d, models);

    const ExplainReport full = explain(d, models, dev, 0, 2);
    REQUIRE(full.entries.size() == 2);
    CHECK(full.entries[0].normalized_deviation >= full.entries[1].normalized_deviation);
    for (const auto& e : full.entries) {
        CHECK(e.observed == d.value(0, static_cast<std::size_t>(e.variable)));
        if (!models[static_cast<std::size_t>(e.variable)].predictors.members.empty())
            CHECK(e.relevant_observed.size() == 1);
    }
    CHECK_THROWS(explain(d, models, dev, 999, 2));

    // all-zero deviations order by variable index
    const Dataset constant = test_helpers::make_dataset({{3, 3, 3}, {5, 5, 5}});
    PipelineConfig ccfg;
    const DependencyModelSet cmodels = train(constant, ccfg);
    const DeviationMatrix cdev = deviations(constant, cmodels);
    const ExplainReport tie = explain(constant, cmodels, cdev, 1, 2);
    REQUIRE(tie.entries.size() == 2);
    CHECK(tie.entries[0].variable == 0);
    CHECK(tie.entries[1].variable == 1);
}

TEST_CASE("scores csv: stable shape and rank column") {
    ScoreVector s;
    s.scores = {0.5, 2.0, 1.0};
    const std::string csv = scores_to_csv(s, {"a", "b", "c"});
    CHECK(csv.find("object_id,score,rank") != std::string::npos);
    CHECK(csv.find("a,0.5,3") != std::string::npos);
    CHECK(csv.find("b,2,1") != std::string::npos);
    CHECK(csv.find("c,1,2") != std::string::npos);
}
