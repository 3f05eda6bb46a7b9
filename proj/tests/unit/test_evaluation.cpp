#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "depad/evaluation.hpp"
#include "helpers.hpp"

using namespace depad;

namespace {

double pairwise_auc(const std::vector<double>& s, const std::vector<Label>& l) {
    double wins = 0, pairs = 0;
    for (std::size_t a = 0; a < s.size(); ++a) {
        if (l[a] != Label::Anomaly) continue;
        for (std::size_t b = 0; b < s.size(); ++b) {
            if (l[b] != Label::Normal) continue;
            pairs += 1;
            if (s[a] > s[b]) wins += 1;
            else if (s[a] == s[b]) wins += 0.5;
        }
    }
    return wins / pairs;
}

} // namespace

TEST_CASE("roc auc: separation, ties, random-ish") {
    const std::vector<double> s = {0.9, 0.8, 0.3, 0.2};
    const std::vector<Label> l = {Label::Anomaly, Label::Anomaly, Label::Normal, Label::Normal};
    CHECK(roc_auc(s, l) == 1.0);

    // 6 objects with a tie across classes matches the pairwise oracle exactly
    const std::vector<double> st = {0.5, 0.5, 0.7, 0.1, 0.5, 0.2};
    const std::vector<Label> lt = {Label::Anomaly, Label::Normal, Label::Anomaly,
                                   Label::Normal, Label::Normal, Label::Anomaly};
    CHECK(roc_auc(st, lt) == pairwise_auc(st, lt));
}

TEST_CASE("roc auc: equals the brute-force oracle on random instances") {
    for (std::uint64_t trial = 0; trial < 50; ++trial) {
        depad::Rng rng(substream(0xA0C, trial));
        const std::size_t n = 5 + rng.bounded(196);
        std::vector<double> s(n);
        std::vector<Label> l(n);
        for (std::size_t i = 0; i < n; ++i) {
            s[i] = std::round(rng.uniform() * 20.0) / 20.0;  // plenty of ties
            l[i] = rng.bounded(3) == 0 ? Label::Anomaly : Label::Normal;
        }
        l[0] = Label::Anomaly;
        l[n - 1] = Label::Normal;
        CHECK(roc_auc(s, l) == pairwise_auc(s, l));
    }
}

TEST_CASE("roc auc: negation symmetry and monotone-transform invariance") {
    depad::Rng rng(40);
    const std::size_t n = 120;
    std::vector<double> s(n), neg(n), warped(n);
    std::vector<Label> l(n);
    for (std::size_t i = 0; i < n; ++i) {
        s[i] = rng.uniform();
        neg[i] = -s[i];
        warped[i] = std::exp(3.0 * s[i]);  // strictly increasing
        l[i] = rng.bounded(4) == 0 ? Label::Anomaly : Label::Normal;
    }
    l[0] = Label::Anomaly;
    l[1] = Label::Normal;
    CHECK(roc_auc(s, l) + roc_auc(neg, l) == 1.0);
    CHECK(roc_auc(s, l) == roc_auc(warped, l));
}

TEST_CASE("roc auc: single-class labels are rejected") {
    const std::vector<double> s = {1, 2, 3};
    const std::vector<Label> l(3, Label::Normal);
    CHECK_THROWS_AS(roc_auc(s, l), SingleClassError);
}

TEST_CASE("average precision: paper formula hand cases") {
    // anomalies at ranks 1 and 3 of 4
    const std::vector<double> s = {0.9, 0.8, 0.7, 0.1};
    const std::vector<Label> l = {Label::Anomaly, Label::Normal, Label::Anomaly, Label::Normal};
    CHECK(average_precision(s, l, true) == doctest::Approx(0.75));

    // all anomalies ranked first: mean of (1/A, 2/A, ..., 1)
    const std::vector<double> s2 = {0.9, 0.8, 0.7, 0.2, 0.1};
    const std::vector<Label> l2 = {Label::Anomaly, Label::Anomaly, Label::Anomaly,
                                   Label::Normal, Label::Normal};
    CHECK(average_precision(s2, l2, true) == doctest::Approx((1.0 / 3 + 2.0 / 3 + 1.0) / 3.0));

    // the paper's denominator makes a last-ranked lone anomaly score 1.0;
    // the standard variant does not
    const std::vector<double> s3 = {0.9, 0.8, 0.7, 0.1};
    const std::vector<Label> l3 = {Label::Normal, Label::Normal, Label::Normal, Label::Anomaly};
    CHECK(average_precision(s3, l3, true) == 1.0);
    CHECK(average_precision(s3, l3, false) == doctest::Approx(0.25));
}

TEST_CASE("average precision: both variants are monotone-transform invariant") {
    depad::Rng rng(41);
    const std::size_t n = 80;
    std::vector<double> s(n), warped(n);
    std::vector<Label> l(n);
    for (std::size_t i = 0; i < n; ++i) {
        s[i] = rng.uniform();
        warped[i] = std::atan(5.0 * s[i]);
        l[i] = rng.bounded(5) == 0 ? Label::Anomaly : Label::Normal;
    }
    l[0] = Label::Anomaly;
    l[1] = Label::Normal;
    for (bool paper : {true, false})
        CHECK(average_precision(s, l, paper) == average_precision(warped, l, paper));
}

TEST_CASE("baselines: an isolated point tops both wkNN and LOF") {
    depad::Rng rng(42);
    std::vector<std::vector<double>> cols(2);
    for (int i = 0; i < 60; ++i) {
        cols[0].push_back(rng.uniform());
        cols[1].push_back(rng.uniform());
    }
    cols[0].push_back(30.0);
    cols[1].push_back(30.0);
    const Dataset d = test_helpers::make_dataset(std::move(cols));
    for (BaselineMethod m : {BaselineMethod::WKNN, BaselineMethod::LOF}) {
        const ScoreVector s = baseline_score(d, {m, 10});
        CHECK(s.ranks()[60] == 1);
    }
}

TEST_CASE("baselines: uniform grid interiors have LOF near one") {
    std::vector<std::vector<double>> cols(2);
    for (int gx = 0; gx < 12; ++gx) {
        for (int gy = 0; gy < 12; ++gy) {
            cols[0].push_back(static_cast<double>(gx));
            cols[1].push_back(static_cast<double>(gy));
        }
    }
    const Dataset d = test_helpers::make_dataset(std::move(cols));
    const ScoreVector s = baseline_score(d, {BaselineMethod::LOF, 10});
    for (int gx = 4; gx < 8; ++gx) {
        for (int gy = 4; gy < 8; ++gy) {
            const std::size_t idx = static_cast<std::size_t>(gx * 12 + gy);
            CHECK(s.scores[idx] == doctest::Approx(1.0).epsilon(0.2));
        }
    }
}

TEST_CASE("baselines: duplicate-heavy data stays finite") {
    std::vector<std::vector<double>> cols(2);
    for (int i = 0; i < 30; ++i) {
        cols[0].push_back(i < 20 ? 1.0 : 2.0);  // many exact duplicates
        cols[1].push_back(i < 20 ? 1.0 : 2.0);
    }
    const Dataset d = test_helpers::make_dataset(std::move(cols));
    const ScoreVector s = baseline_score(d, {BaselineMethod::LOF, 5});
    for (double v : s.scores) CHECK(std::isfinite(v));
}

TEST_CASE("baselines: k bounds enforced") {
    const Dataset d = test_helpers::independent_dataset(43, 8, 2);
    CHECK_THROWS(baseline_score(d, {BaselineMethod::WKNN, 8}));
    CHECK_THROWS(baseline_score(d, {BaselineMethod::WKNN, 0}));
}

TEST_CASE("parse_method: tokens round trip") {
    PipelineConfig defaults;
    const auto m1 = parse_method("fbed-cart-ps", defaults);
    REQUIRE(m1);
    CHECK(m1->name == "FBED-CART-PS");
    const auto* cfg = std::get_if<PipelineConfig>(&m1->spec);
    REQUIRE(cfg);
    CHECK(cfg->model_kind == ModelKind::CART);

    const auto m2 = parse_method("iamb-mcart-rzps", defaults);
    REQUIRE(m2);
    CHECK(m2->name == "IAMB-mCART-RZPS");

    CHECK(parse_method("wknn", defaults));
    CHECK(parse_method("lof", defaults));
    CHECK(!parse_method("nonsense", defaults));
    CHECK(!parse_method("fbed-cart", defaults));
}

namespace {

Dataset labeled_benchmark_dataset(std::uint64_t seed) {
    depad::Rng rng(seed);
    std::vector<std::vector<double>> cols(2);
    std::vector<Label> labels;
    for (int i = 0; i < 300; ++i) {
        const double x = rng.normal();
        cols[0].push_back(x);
        cols[1].push_back(2.0 * x + 0.2 * rng.normal());
        labels.push_back(Label::Normal);
    }
    for (int i = 0; i < 60; ++i) {
        cols[0].push_back(rng.normal());
        cols[1].push_back(2.5 * rng.normal());
        labels.push_back(Label::Anomaly);
    }
    return test_helpers::make_dataset(std::move(cols), labels);
}

} // namespace

TEST_CASE("run_benchmark: trial counts per protocol branch") {
    const Dataset d = labeled_benchmark_dataset(44);
    PipelineConfig defaults;
    defaults.seed = 3;
    const auto method = parse_method("fbed-ols-sum", defaults);

    BenchmarkSpec spec;
    spec.repeats = 7;
    spec.rng_seed = 8;
    auto reports = run_benchmark(d, {*method}, spec);
    REQUIRE(reports.size() == 1);
    CHECK(reports[0].error.empty());
    CHECK(reports[0].trials.size() == 7);
    CHECK(reports[0].mean_auc() > 0.8);

    // ratio below the fraction: single unmodified trial
    spec.anomaly_fraction = 0.4;
    reports = run_benchmark(d, {*method}, spec);
    CHECK(reports[0].trials.size() == 1);
}

TEST_CASE("run_benchmark: identical configs are statistically indistinguishable") {
    const Dataset d = labeled_benchmark_dataset(45);
    PipelineConfig defaults;
    defaults.seed = 3;
    const auto a = parse_method("fbed-ols-sum", defaults);
    const auto b = parse_method("fbed-ols-sum", defaults);
    BenchmarkSpec spec;
    spec.repeats = 20;
    spec.rng_seed = 10;
    const auto reports = run_benchmark(d, {*a, *b}, spec);
    REQUIRE(reports.size() == 2);
    const auto p = rank_sum_test(reports[0].auc_list(), reports[1].auc_list(),
                                 Alternative::TwoSided);
    CHECK(p.p_value >= 0.9);
}

TEST_CASE("run_benchmark: one failing method does not abort the others") {
    const Dataset d = labeled_benchmark_dataset(46);
    PipelineConfig defaults;
    const auto good = parse_method("fbed-ols-sum", defaults);
    NamedMethod bad{"wkNN-big-k", BaselineConfig{BaselineMethod::WKNN, 100000}};
    BenchmarkSpec spec;
    spec.repeats = 2;
    const auto reports = run_benchmark(d, {bad, *good}, spec);
    REQUIRE(reports.size() == 2);
    CHECK(!reports[0].error.empty());
    CHECK(reports[0].trials.empty());
    CHECK(reports[1].error.empty());
    CHECK(reports[1].trials.size() == 2);

    const auto p = pairwise_rank_sum(reports, true);
    CHECK(std::isnan(p[0][1]));
    CHECK(p[1][1] == 1.0);
}

TEST_CASE("run_benchmark: unlabeled input is rejected") {
    const Dataset d = test_helpers::independent_dataset(47, 50, 2);
    PipelineConfig defaults;
    const auto method = parse_method("fbed-ols-sum", defaults);
    CHECK_THROWS_AS(run_benchmark(d, {*method}, {}), SingleClassError);
}
