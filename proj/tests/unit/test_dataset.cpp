#include <doctest.h>

#include <set>

#include "depad/dataset.hpp"
#include "helpers.hpp"

using namespace depad;

TEST_CASE("ingest: numeric columns with a label column") {
    const char* csv = "a,b,c\n1,2.5,n\n2,3.5,n\n3,4.5,y\n";
    IngestOptions opts;
    opts.label_column = "c";
    opts.normal_labels = {"n"};
    const Dataset d = ingest_csv_text(csv, opts);
    CHECK(d.n_rows() == 3);
    CHECK(d.n_vars() == 2);
    CHECK(d.labels()[0] == Label::Normal);
    CHECK(d.labels()[1] == Label::Normal);
    CHECK(d.labels()[2] == Label::Anomaly);
    CHECK(d.value(1, 0) == 2.0);
    CHECK(d.value(2, 1) == 4.5);
}

TEST_CASE("ingest: categorical column becomes a one-hot block") {
    const char* csv = "color,v\nr,1\ng,2\nb,3\n";
    const Dataset d = ingest_csv_text(csv);
    CHECK(d.n_vars() == 4);  // 3 encoded + v
    REQUIRE(d.encoding().columns.size() == 1);
    const auto& ec = d.encoding().columns[0];
    CHECK(ec.levels == std::vector<std::string>{"r", "g", "b"});
    for (std::size_t i = 0; i < 3; ++i) {
        double ones = 0;
        for (std::size_t k = 0; k < 3; ++k)
            ones += d.value(i, static_cast<std::size_t>(ec.first_index) + k);
        CHECK(ones == 1.0);
    }
    CHECK(d.encoding_group(0) == 0);
    CHECK(d.encoding_group(3) == -1);
}

TEST_CASE("ingest: encoding round trip recovers the original level") {
    const char* csv = "shape,v\nsquare,1\ncircle,2\nsquare,3\ntriangle,4\ncircle,5\n";
    const Dataset d = ingest_csv_text(csv);
    const auto& ec = d.encoding().columns[0];
    const std::vector<std::string> want = {"square", "circle", "square", "triangle", "circle"};
    for (std::size_t i = 0; i < d.n_rows(); ++i) {
        std::vector<double> block;
        for (std::size_t k = 0; k < ec.levels.size(); ++k)
            block.push_back(d.value(i, static_cast<std::size_t>(ec.first_index) + k));
        CHECK(EncodingMap::decode_level(ec, block) == want[i]);
    }
}

TEST_CASE("ingest: constant column is kept but flagged, with a warning") {
    const char* csv = "a,b\n1,7\n2,7\n3,7\n";
    IngestReport report;
    const Dataset d = ingest_csv_text(csv, {}, "<memory>", &report);
    CHECK(d.n_vars() == 2);
    CHECK(!d.is_constant(0));
    CHECK(d.is_constant(1));
    REQUIRE(report.warnings.size() == 1);
    CHECK(report.warnings[0].find("'b'") != std::string::npos);
}

TEST_CASE("ingest: error paths") {
    CHECK_THROWS_AS(ingest_csv_text("a,b\n1,\n2,3\n"), IngestError);      // missing value
    CHECK_THROWS_AS(ingest_csv_text("a,b\n"), IngestError);               // no data rows
    CHECK_NOTHROW(ingest_csv_text("a,b\n1,2\n"));                         // single row is legal
    CHECK_NOTHROW(ingest_csv_text("a,b\n1,2\n3,4\n"));
    CHECK_THROWS_AS(ingest_csv_text("a\n1\n2\n"), IngestError);           // m < 2
    CHECK_THROWS_AS(ingest_csv_text("a,b\n1,inf\n2,3\n"), IngestError);   // non-finite
    CHECK_THROWS_AS(ingest_csv_text("a,a\n1,2\n3,4\n"), IngestError);     // duplicate names

    IngestOptions label_missing;
    label_missing.label_column = "zzz";
    CHECK_THROWS_AS(ingest_csv_text("a,b\n1,2\n3,4\n", label_missing), IngestError);

    IngestOptions declared;
    declared.numeric_columns = {"b"};
    CHECK_THROWS_AS(ingest_csv_text("a,b\n1,x\n2,y\n", declared), IngestError);

    CHECK_THROWS_AS(ingest_csv("/nonexistent/path.csv"), std::runtime_error);
}

TEST_CASE("ingest: majority class is normal when normal labels unspecified") {
    const char* csv = "a,b,cls\n1,2,big\n2,3,big\n3,4,big\n4,5,small\n";
    IngestOptions opts;
    opts.label_column = "cls";
    const Dataset d = ingest_csv_text(csv, opts);
    CHECK(d.count_labeled(Label::Normal) == 3);
    CHECK(d.count_labeled(Label::Anomaly) == 1);
}

TEST_CASE("ingest: id column, comments, quoted fields, custom delimiter") {
    const char* csv = "# comment line\nid;a;b\n\"first;one\";1;2\nsecond;3;4\n";
    IngestOptions opts;
    opts.id_column = "id";
    opts.delimiter = ';';
    const Dataset d = ingest_csv_text(csv, opts);
    CHECK(d.n_vars() == 2);
    CHECK(d.row_ids()[0] == "first;one");
    CHECK(d.row_ids()[1] == "second");
}

TEST_CASE("column_stats hand values") {
    const Dataset d = test_helpers::make_dataset({{1, 2, 3, 4, 5}, {7, 7, 7, 7, 7}});
    const ColumnStats s0 = d.stats(0);
    CHECK(s0.mean == doctest::Approx(3.0));
    CHECK(s0.median == doctest::Approx(3.0));
    CHECK(s0.aad == doctest::Approx(1.2));
    const ColumnStats s1 = d.stats(1);
    CHECK(s1.variance == 0.0);
    CHECK(s1.aad == 0.0);

    const ColumnStats s2 = compute_stats(std::vector<double>{0, 0, 0, 0, 100});
    CHECK(s2.median == 0.0);
    CHECK(s2.aad == doctest::Approx(20.0));
}

namespace {

Dataset wbc_shaped(std::size_t n_normal, std::size_t n_anomaly) {
    depad::Rng rng(42);
    const std::size_t n = n_normal + n_anomaly;
    std::vector<std::vector<double>> cols(2, std::vector<double>(n));
    std::vector<Label> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
        cols[0][i] = rng.normal();
        cols[1][i] = rng.normal();
        labels[i] = i < n_normal ? Label::Normal : Label::Anomaly;
    }
    return test_helpers::make_dataset(std::move(cols), labels);
}

} // namespace

TEST_CASE("sample_benchmark: contamination branch (WBC shape)") {
    // 444 normal + 10 anomalies; 10/454 > 1%, k = round(0.01 * 454) = 5
    const Dataset d = wbc_shaped(444, 10);
    BenchmarkSpec spec;
    spec.repeats = 20;
    spec.rng_seed = 9;
    const auto out = sample_benchmark(d, spec);
    REQUIRE(out.size() == 20);
    for (const auto& trial : out) {
        CHECK(trial.count_labeled(Label::Normal) == 444);
        CHECK(trial.count_labeled(Label::Anomaly) == 5);
        CHECK(trial.n_rows() == 449);
    }
}

TEST_CASE("sample_benchmark: low-ratio branch returns the dataset unchanged") {
    // 4873 normal + 25 anomalies: ratio ~ 0.51% < 1%
    const Dataset d = wbc_shaped(4873, 25);
    BenchmarkSpec spec;
    spec.repeats = 20;
    const auto out = sample_benchmark(d, spec);
    REQUIRE(out.size() == 1);
    CHECK(out[0].n_rows() == d.n_rows());
    CHECK(out[0].count_labeled(Label::Anomaly) == 25);
}

TEST_CASE("sample_benchmark: k equals the whole anomaly class") {
    // 96 normal + 4 anomalies: k = round(0.01 * 100) = 1 with fraction 0.04 -> k = 4
    const Dataset d = wbc_shaped(96, 4);
    BenchmarkSpec spec;
    spec.repeats = 1;
    spec.anomaly_fraction = 0.039;  // ratio 4% > 3.9%, k = round(0.039 * 100) = 4
    const auto out = sample_benchmark(d, spec);
    REQUIRE(out.size() == 1);
    CHECK(out[0].n_rows() == 100);
}

TEST_CASE("sample_benchmark: deterministic for identical inputs") {
    const Dataset d = wbc_shaped(200, 30);
    BenchmarkSpec spec;
    spec.repeats = 5;
    spec.rng_seed = 31337;
    const auto a = sample_benchmark(d, spec);
    const auto b = sample_benchmark(d, spec);
    REQUIRE(a.size() == b.size());
    for (std::size_t t = 0; t < a.size(); ++t) {
        REQUIRE(a[t].n_rows() == b[t].n_rows());
        CHECK(a[t].row_ids() == b[t].row_ids());
        for (std::size_t j = 0; j < a[t].n_vars(); ++j) CHECK(a[t].column(j) == b[t].column(j));
    }
}

TEST_CASE("sample_benchmark: errors") {
    const Dataset unlabeled = test_helpers::make_dataset({{1, 2, 3}, {4, 5, 6}});
    CHECK_THROWS(sample_benchmark(unlabeled, {}));
    const Dataset single = test_helpers::make_dataset(
        {{1, 2, 3}, {4, 5, 6}},
        std::vector<Label>{Label::Normal, Label::Normal, Label::Normal});
    CHECK_THROWS(sample_benchmark(single, {}));
}

TEST_CASE("dataset_to_csv round trips through ingest") {
    const Dataset d = wbc_shaped(5, 2);
    const std::string csv = dataset_to_csv(d);
    IngestOptions opts;
    opts.label_column = "__label__";
    opts.normal_labels = {"normal"};
    opts.id_column = "__id__";
    const Dataset back = ingest_csv_text(csv, opts);
    REQUIRE(back.n_rows() == d.n_rows());
    REQUIRE(back.n_vars() == d.n_vars());
    for (std::size_t j = 0; j < d.n_vars(); ++j)
        for (std::size_t i = 0; i < d.n_rows(); ++i)
            CHECK(back.value(i, j) == d.value(i, j));
    CHECK(back.labels() == d.labels());
}
