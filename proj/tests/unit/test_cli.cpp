#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "depad/io.hpp"
#include "depad/rng.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::string cli = DEPAD_CLI_PATH;

struct TempDir {
    fs::path path;
    TempDir() {
        static int counter = 0;
        path = fs::temp_directory_path() /
               ("depad_cli_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

int run_cli(const std::string& args) {
    const std::string cmd = cli + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string write_linear_csv(const fs::path& dir, bool with_labels) {
    depad::Rng rng(7);
    std::string csv = with_labels ? "a,b,cls\n" : "a,b\n";
    for (int i = 0; i < 120; ++i) {
        const double x = rng.normal();
        const double y = 2.0 * x + 0.3 * rng.normal();
        csv += depad::format_double(x) + "," + depad::format_double(y);
        if (with_labels) csv += (i < 100) ? ",ok" : ",bad";
        csv += "\n";
    }
    const fs::path p = dir / (with_labels ? "labeled.csv" : "plain.csv");
    depad::atomic_write_file(p, csv);
    return p.string();
}

} // namespace

TEST_CASE("cli: detect writes scores, manifest and models") {
    TempDir tmp;
    const std::string data = write_linear_csv(tmp.path, false);
    const fs::path out = tmp.path / "out";
    const int code = run_cli("detect --data " + data +
                             " --fs fbed --model cart --score ps --seed 3 --out " + out.string());
    CHECK(code == 0);
    CHECK(fs::exists(out / "scores.csv"));
    CHECK(fs::exists(out / "models.json"));
    CHECK(fs::exists(out / "relevant_sets.json"));
    const json manifest = json::parse(depad::read_file(out / "manifest.json"));
    CHECK(manifest["config"]["instantiation"] == "FBED-CART-PS");
    CHECK(manifest["seed"] == 3);
    const std::string scores = depad::read_file(out / "scores.csv");
    CHECK(scores.find("object_id,score,rank") != std::string::npos);
}

TEST_CASE("cli: identical invocations produce byte-identical scores") {
    TempDir tmp;
    const std::string data = write_linear_csv(tmp.path, false);
    const fs::path out1 = tmp.path / "r1";
    const fs::path out2 = tmp.path / "r2";
    const std::string flags = "detect --data " + data + " --model mcart --seed 11 --out ";
    REQUIRE(run_cli(flags + out1.string()) == 0);
    REQUIRE(run_cli(flags + out2.string()) == 0);
    CHECK(depad::read_file(out1 / "scores.csv") == depad::read_file(out2 / "scores.csv"));
}

TEST_CASE("cli: flag and input errors use the documented exit codes") {
    TempDir tmp;
    CHECK(run_cli("detect") == 2);                       // missing --data
    CHECK(run_cli("detect --data /no/such/file.csv") == 3);
    CHECK(run_cli("nonsense") == 2);

    // bad flag value
    const std::string data = write_linear_csv(tmp.path, false);
    CHECK(run_cli("detect --data " + data + " --fs bogus") == 2);

    // unreadable content
    const fs::path broken = tmp.path / "broken.csv";
    depad::atomic_write_file(broken, "a,b\n1,\n");
    CHECK(run_cli("detect --data " + broken.string()) == 3);
}

TEST_CASE("cli: single-class labels exit 4 when metrics are requested") {
    TempDir tmp;
    depad::Rng rng(8);
    std::string csv = "a,b,cls\n";
    for (int i = 0; i < 30; ++i)
        csv += depad::format_double(rng.normal()) + "," + depad::format_double(rng.normal()) +
               ",same\n";
    const fs::path p = tmp.path / "single.csv";
    depad::atomic_write_file(p, csv);
    CHECK(run_cli("detect --data " + p.string() + " --label-col cls --out " +
                  (tmp.path / "out").string()) == 4);
}

TEST_CASE("cli: explain resolves ids and ranks, rejects unknowns") {
    TempDir tmp;
    const std::string data = write_linear_csv(tmp.path, false);
    const fs::path out = tmp.path / "out";
    REQUIRE(run_cli("detect --data " + data + " --seed 3 --out " + out.string()) == 0);

    CHECK(run_cli("explain --data " + data + " --run " + out.string() + " --object 1") == 0);
    CHECK(run_cli("explain --data " + data + " --run " + out.string() + " --object 5 --vars 2") == 0);
    CHECK(run_cli("explain --data " + data + " --run " + out.string() +
                  " --object not_an_object") == 2);
}

TEST_CASE("cli: bench validates inputs and writes reports") {
    TempDir tmp;
    const std::string labeled = write_linear_csv(tmp.path, true);
    const std::string plain = write_linear_csv(tmp.path, false);
    const fs::path out = tmp.path / "bench";

    CHECK(run_cli("bench --data " + plain + " --methods fbed-ols-sum --repeats 3") == 4);
    CHECK(run_cli("bench --data " + labeled + " --label-col cls --normal-labels ok "
                  "--methods fbed-ols-sum --repeats 0") == 2);
    CHECK(run_cli("bench --data " + labeled + " --label-col cls --normal-labels ok "
                  "--methods bogus --repeats 2") == 2);

    CHECK(run_cli("bench --data " + labeled + " --label-col cls --normal-labels ok "
                  "--methods fbed-ols-sum,wknn --repeats 3 --seed 5 --out " + out.string()) == 0);
    CHECK(fs::exists(out / "report.csv"));
    CHECK(fs::exists(out / "report.json"));
    CHECK(fs::exists(out / "ranksum_auc.csv"));
    const json report = json::parse(depad::read_file(out / "report.json"));
    CHECK(report["reports"].size() == 2);
    CHECK(report["reports"][0]["trials"].size() == 3);
}

TEST_CASE("cli: selftest --list enumerates the criteria without running them") {
    const std::string cmd = cli + " selftest --list";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string output;
    char buf[256];
    while (fgets(buf, sizeof buf, pipe)) output += buf;
    CHECK(pclose(pipe) == 0);
    CHECK(output.find("normalization_contract") != std::string::npos);
    CHECK(output.find("zoo_case_study") != std::string::npos);
    CHECK(output.find("determinism_threads") != std::string::npos);
    int lines = 0;
    for (char c : output)
        if (c == '\n') ++lines;
    CHECK(lines == 9);
}

TEST_CASE("cli: injected failure flips the selftest exit code") {
    // the filtered criterion runs in well under a second
    CHECK(run_cli("selftest --filter combination_correctness") == 0);
    CHECK(run_cli("selftest --filter combination_correctness --inject-failure") == 1);
}

TEST_CASE("cli: config file provides defaults, flags win") {
    TempDir tmp;
    const std::string data = write_linear_csv(tmp.path, false);
    const fs::path conf = tmp.path / "depad.conf";
    depad::atomic_write_file(conf, "seed=99\nmodel=ols\n");

    const fs::path out1 = tmp.path / "c1";
    REQUIRE(run_cli("detect --data " + data + " --config " + conf.string() + " --out " +
                    out1.string()) == 0);
    json manifest = json::parse(depad::read_file(out1 / "manifest.json"));
    CHECK(manifest["seed"] == 99);
    CHECK(manifest["config"]["model"] == "OLS");

    const fs::path out2 = tmp.path / "c2";
    REQUIRE(run_cli("detect --data " + data + " --config " + conf.string() +
                    " --seed 123 --out " + out2.string()) == 0);
    manifest = json::parse(depad::read_file(out2 / "manifest.json"));
    CHECK(manifest["seed"] == 123);  // flag beats config
}

TEST_CASE("cli: DEPAD_SEED is the seed fallback") {
    TempDir tmp;
    const std::string data = write_linear_csv(tmp.path, false);
    const fs::path out = tmp.path / "env";
    const std::string cmd = "DEPAD_SEED=77 " + cli + " detect --data " + data + " --out " +
                            out.string() + " >/dev/null 2>&1";
    REQUIRE(WEXITSTATUS(std::system(cmd.c_str())) == 0);
    const json manifest = json::parse(depad::read_file(out / "manifest.json"));
    CHECK(manifest["seed"] == 77);
}

TEST_CASE("cli: train/score split mode fits on one file and scores another") {
    TempDir tmp;
    const std::string train_csv = write_linear_csv(tmp.path, false);
    // scored file: same schema, different content
    depad::Rng rng(17);
    std::string csv = "a,b\n";
    for (int i = 0; i < 40; ++i) {
        const double x = rng.normal();
        csv += depad::format_double(x) + "," + depad::format_double(2.0 * x) + "\n";
    }
    const fs::path score_path = tmp.path / "score.csv";
    depad::atomic_write_file(score_path, csv);
    const fs::path out = tmp.path / "split";
    CHECK(run_cli("detect --data " + score_path.string() + " --train-data " + train_csv +
                  " --model ols --out " + out.string()) == 0);
    const std::string scores = depad::read_file(out / "scores.csv");
    // scores cover the scored file's 40 objects
    int lines = 0;
    for (char c : scores)
        if (c == '\n') ++lines;
    CHECK(lines == 42);  // schema comment + header + 40 rows

    // mismatched schema is an ingest error
    const fs::path bad = tmp.path / "bad.csv";
    depad::atomic_write_file(bad, "a,zzz\n1,2\n3,4\n");
    CHECK(run_cli("detect --data " + bad.string() + " --train-data " + train_csv) == 3);
}

TEST_CASE("cli: categorical data writes the encoding map next to the scores") {
    TempDir tmp;
    depad::Rng rng(18);
    std::string csv = "color,v,w\n";
    const char* colors[3] = {"r", "g", "b"};
    for (int i = 0; i < 60; ++i) {
        const std::size_t k = rng.bounded(3);
        csv += std::string(colors[k]) + "," + depad::format_double(rng.normal()) + "," +
               depad::format_double(static_cast<double>(k) + 0.1 * rng.normal()) + "\n";
    }
    const fs::path p = tmp.path / "cat.csv";
    depad::atomic_write_file(p, csv);
    const fs::path out = tmp.path / "out";
    REQUIRE(run_cli("detect --data " + p.string() + " --model ols --out " + out.string()) == 0);
    REQUIRE(fs::exists(out / "encoding.json"));
    const json enc = json::parse(depad::read_file(out / "encoding.json"));
    CHECK(enc["encoded_columns"][0]["source"] == "color");
}

TEST_CASE("cli: zoo dataset in the repo matches the embedded copy's shape") {
    // data/zoo.csv ships for CLI use; confirm it ingests to 101 x 16
    if (!fs::exists(DEPAD_ZOO_CSV)) return;  // out-of-tree checkouts
    TempDir tmp;
    const fs::path out = tmp.path / "zoo";
    CHECK(run_cli(std::string("detect --data ") + DEPAD_ZOO_CSV +
                  " --id-col animal --label-col class_type --normal-labels 1 --seed 1 --out " +
                  out.string()) == 0);
    const json manifest = json::parse(depad::read_file(out / "manifest.json"));
    CHECK(manifest["dataset"]["n"] == 101);
    CHECK(manifest["dataset"]["m"] == 16);

    // rank-1 explain resolves through the saved models
    const std::string cmd = cli + std::string(" explain --data ") + DEPAD_ZOO_CSV +
                            " --id-col animal --label-col class_type --run " + out.string() +
                            " --object 1 --vars 3";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string output;
    char buf[256];
    while (fgets(buf, sizeof buf, pipe)) output += buf;
    CHECK(pclose(pipe) == 0);
    CHECK(output.find("scorpion") != std::string::npos);
    CHECK(output.find("backbone") != std::string::npos);
}
