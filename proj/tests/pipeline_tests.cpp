#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <sstream>
#include <sys/wait.h>

#include "curveclock/pipeline.hpp"
#include "testdata.hpp"
#include "testutil.hpp"

using namespace curveclock;
using namespace testdata;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

#ifndef CURVECLOCK_CLI
#error "CURVECLOCK_CLI must point at the built binary"
#endif

int run_cli(const std::string& args) {
    const std::string cmd = std::string(CURVECLOCK_CLI) + " " + args + " >/dev/null 2>/dev/null";
    const int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

GrayImage filled_disk_image(int size, double radius) {
    GrayImage img;
    img.width = img.height = size;
    img.pixels.assign(static_cast<std::size_t>(size) * size, 255);
    const double mid = size / 2.0;
    for (int r = 0; r < size; ++r)
        for (int c = 0; c < size; ++c)
            if ((c - mid) * (c - mid) + (r - mid) * (r - mid) <= radius * radius)
                img.pixels[static_cast<std::size_t>(r) * size + c] = 0;
    return img;
}

} // namespace

TEST_CASE("config parser covers every key and rejects the rest") {
    std::stringstream text(R"(# full configuration
plan.direction = ccw
plan.start = max_y
plan.scale = unit_area
plan.translate = contour_centroid
plan.rotate = none
family.lambda = inf
family.sectors = 3
family.samples = 999
grid.lambdas = 0.5, 2, inf
grid.sectors = 0, 3
grid.samples = 300
split.train_per_class = 7
paths.manifest = m.csv
paths.in = data
paths.out = out
threshold = 90
threads = 2
seed = 42
classifier.knn_k = 3
classifier.logistic_penalty = 0.5
classifier.logistic_iters = 100
)");
    const RunConfig cfg = parse_config_text(text, "test");
    CHECK(cfg.plan.scale == ScaleRule::unit_area);
    CHECK(cfg.plan.translate == TranslateRule::contour_centroid);
    CHECK(cfg.plan.rotate == RotateRule::none);
    CHECK(is_arclength_lambda(cfg.family.lambda));
    CHECK(cfg.family.sectors == 3);
    CHECK(cfg.family.samples == 999);
    REQUIRE(cfg.grid.has_value());
    CHECK(cfg.grid->lambdas.size() == 3);
    CHECK(is_arclength_lambda(cfg.grid->lambdas[2]));
    CHECK(cfg.grid->sector_counts == std::vector<int>{0, 3});
    CHECK(cfg.grid->samples == 300);
    CHECK(cfg.split.train_per_class == 7);
    CHECK(cfg.manifest_path == "m.csv");
    CHECK(cfg.in_dir == "data");
    CHECK(cfg.out_dir == "out");
    CHECK(cfg.threshold == 90);
    CHECK(cfg.threads == 2);
    CHECK(cfg.seed == 42);
    CHECK(cfg.knn_k == 3);
    CHECK_THAT(cfg.logistic_penalty, WithinAbs(0.5, 1e-15));
    CHECK(cfg.logistic_iters == 100);
}

TEST_CASE("config errors name the offending key") {
    std::stringstream bad_key("plan.direciton = ccw\n");
    try {
        parse_config_text(bad_key, "test");
        FAIL("unknown key accepted");
    } catch (const ValidationError& e) {
        CHECK_THAT(e.what(), ContainsSubstring("plan.direciton"));
    }
    std::stringstream bad_value("family.lambda = sideways\n");
    try {
        parse_config_text(bad_value, "test");
        FAIL("bad value accepted");
    } catch (const ValidationError& e) {
        CHECK_THAT(e.what(), ContainsSubstring("family.lambda"));
    }
    std::stringstream no_eq("threads\n");
    CHECK_THROWS_AS(parse_config_text(no_eq, "test"), ValidationError);
}

TEST_CASE("effective_family rounds the sample count to the sector multiple") {
    RunConfig cfg;
    cfg.family.lambda = 1000.0;
    cfg.family.sectors = 3;
    cfg.family.samples = 1000;
    CHECK(effective_family(cfg).samples == 999);
}

TEST_CASE("split_dataset takes the first train_per_class of each class") {
    LoadedDataset all;
    all.data.class_count = 2;
    for (int i = 0; i < 6; ++i) {
        all.data.contours.push_back(testutil::unit_square());
        all.data.labels.push_back(i < 3 ? 0 : 1);
        all.paths.push_back("p" + std::to_string(i));
    }
    LoadedDataset train, test;
    split_dataset(all, SplitSpec{2}, train, test);
    CHECK(train.paths == std::vector<std::string>{"p0", "p1", "p3", "p4"});
    CHECK(test.paths == std::vector<std::string>{"p2", "p5"});
    CHECK(train.data.labels == std::vector<int>{0, 0, 1, 1});
    CHECK(test.data.labels == std::vector<int>{0, 1});
}

TEST_CASE("extract traces image manifests into contour CSVs") {
    const fs::path dir = fresh_dir("curveclock_cmd_extract");
    for (int i = 0; i < 3; ++i)
        write_pgm(filled_disk_image(140, 50.0 + 4 * i),
                  (dir / ("disk" + std::to_string(i) + ".pgm")).string());
    write_text_file(dir / "manifest.csv",
                    "path,class_id,class_name\ndisk0.pgm,0,d\ndisk1.pgm,0,d\ndisk2.pgm,0,d\n");

    const fs::path out = dir / "out";
    std::ostringstream log, errs;
    const int code =
        cmd_extract((dir / "manifest.csv").string(), out.string(), 128, 1, "", log, errs);
    CHECK(code == 0);
    for (int i = 0; i < 3; ++i) {
        const Contour c = read_contour_csv((out / ("disk" + std::to_string(i) + ".csv")).string());
        CHECK(c.size() >= 3);
        CHECK(is_simple(c));
    }
    CHECK_THAT(log.str(), ContainsSubstring("disk0.pgm "));

    // disk radius 58 -> traced area within 2% of analytic
    const Contour big = read_contour_csv((out / "disk2.csv").string());
    CHECK_THAT(std::abs(signed_area(big)), WithinRel(testutil::kPi * 58.0 * 58.0, 0.02));
}

TEST_CASE("extract keeps going past unreadable files and reports failure") {
    const fs::path dir = fresh_dir("curveclock_cmd_extract_fail");
    write_pgm(filled_disk_image(60, 15.0), (dir / "good.pgm").string());
    write_text_file(dir / "manifest.csv",
                    "path,class_id,class_name\ngood.pgm,0,d\nmissing.pgm,0,d\n");
    const fs::path out = dir / "out";
    std::ostringstream log, errs;
    const int code =
        cmd_extract((dir / "manifest.csv").string(), out.string(), 128, 1, "", log, errs);
    CHECK(code == 1);
    CHECK(fs::exists(out / "good.csv"));
    CHECK_THAT(errs.str(), ContainsSubstring("missing.pgm"));

    const int cli_code = run_cli("extract " + (dir / "manifest.csv").string() + " --out " +
                                 (dir / "out2").string());
    CHECK(cli_code == 1);
    CHECK(fs::exists(dir / "out2" / "good.csv"));
}

TEST_CASE("pipeline writes contours, the distance matrix and the Dunn report") {
    const SyntheticDataset ds = circles_squares_on_disk("curveclock_cmd_pipeline", 6, 101);
    const fs::path out = ds.dir / "out";
    write_text_file(ds.dir / "run.cfg", "paths.manifest = manifest.csv\npaths.out = " +
                                            out.string() +
                                            "\nsplit.train_per_class = 4\nfamily.samples = 200\n");
    RunConfig cfg = parse_config_file((ds.dir / "run.cfg").string());
    cfg.manifest_path = (ds.dir / "manifest.csv").string();
    std::ostringstream log, errs;
    CHECK(cmd_pipeline(cfg, log, errs) == 0);
    CHECK_THAT(log.str(), ContainsSubstring("dunn = "));

    CHECK(fs::exists(out / "dunn.txt"));
    CHECK(fs::exists(out / "distmat.csv"));
    CHECK(fs::exists(out / "contours" / "circle_000.csv"));
    const Contour canon = read_contour_csv((out / "contours" / "circle_000.csv").string());
    CHECK(canon.size() == 200);

    // distmat is an 8x8 csv (4 train per class)
    std::ifstream dm(out / "distmat.csv");
    std::string line;
    std::size_t rows = 0;
    while (std::getline(dm, line)) {
        CHECK(std::count(line.begin(), line.end(), ',') == 7);
        ++rows;
    }
    CHECK(rows == 8);

    // Dunn of well-separated classes under full normalization is large.
    const std::string dunn_text = read_file_bytes(out / "dunn.txt");
    CHECK_THAT(dunn_text, ContainsSubstring("dunn = "));
    CHECK(std::stod(dunn_text.substr(7)) > 1.0);
}

TEST_CASE("pipeline reports degenerate clustering with exit code 2") {
    const SyntheticDataset ds =
        circles_squares_on_disk("curveclock_cmd_pipeline_degenerate", 4, 7, /*identical=*/true);
    write_text_file(ds.dir / "run.cfg",
                    "paths.manifest = manifest.csv\npaths.in = " + ds.dir.string() +
                        "\npaths.out = " + (ds.dir / "out").string() +
                        "\nsplit.train_per_class = 3\nfamily.samples = 128\n");
    RunConfig cfg = parse_config_file((ds.dir / "run.cfg").string());
    cfg.manifest_path = ds.manifest.string();
    std::ostringstream log, errs;
    CHECK_THROWS_AS(cmd_pipeline(cfg, log, errs), NumericError);

    const int code = run_cli("pipeline --config " + (ds.dir / "run.cfg").string());
    CHECK(code == 2);
}

TEST_CASE("missing config files and bad configs exit with code 1") {
    CHECK(run_cli("pipeline --config /nonexistent/path.cfg") == 1);
    const fs::path dir = fresh_dir("curveclock_cmd_badcfg");
    write_text_file(dir / "bad.cfg", "plan.scale = sideways\n");
    CHECK(run_cli("pipeline --config " + (dir / "bad.cfg").string()) == 1);
}

TEST_CASE("gridsearch writes the table CSV and the argmax report") {
    const SyntheticDataset ds = circles_squares_on_disk("curveclock_cmd_grid", 5, 23);
    const fs::path out = ds.dir / "out";
    write_text_file(ds.dir / "run.cfg",
                    "paths.manifest = manifest.csv\npaths.out = " + out.string() +
                        "\nsplit.train_per_class = 4\n"
                        "grid.lambdas = 0.5, inf\ngrid.sectors = 0, 4\ngrid.samples = 160\n");
    RunConfig cfg = parse_config_file((ds.dir / "run.cfg").string());
    cfg.manifest_path = ds.manifest.string();
    std::ostringstream log, errs;
    CHECK(cmd_gridsearch(cfg, log, errs) == 0);
    CHECK_THAT(log.str(), ContainsSubstring("argmax"));

    const std::string grid_text = read_file_bytes(out / "grid.csv");
    CHECK_THAT(grid_text, ContainsSubstring("n,0.5,inf\n"));
    std::size_t newlines = static_cast<std::size_t>(
        std::count(grid_text.begin(), grid_text.end(), '\n'));
    CHECK(newlines == 3); // header + two sector rows
    CHECK_THAT(read_file_bytes(out / "report.txt"), ContainsSubstring("argmax: n = "));
}

TEST_CASE("classify separates the synthetic classes perfectly") {
    const SyntheticDataset ds = circles_squares_on_disk("curveclock_cmd_classify", 8, 31);
    const fs::path out = ds.dir / "out";
    write_text_file(ds.dir / "run.cfg",
                    "paths.manifest = manifest.csv\npaths.out = " + out.string() +
                        "\nsplit.train_per_class = 5\nfamily.samples = 200\n"
                        "classifier.logistic_iters = 200\n");
    RunConfig cfg = parse_config_file((ds.dir / "run.cfg").string());
    cfg.manifest_path = ds.manifest.string();
    std::ostringstream log, errs;
    CHECK(cmd_classify(cfg, log, errs) == 0);

    const std::string report = read_file_bytes(out / "report.txt");
    CHECK_THAT(report, ContainsSubstring("knn_accuracy = 1\n"));
    CHECK_THAT(report, ContainsSubstring("logistic_accuracy = 1\n"));

    const std::string preds = read_file_bytes(out / "predictions.csv");
    CHECK_THAT(preds, ContainsSubstring("path,true,pred\n"));
    // 2 classes x 3 test samples + header
    CHECK(std::count(preds.begin(), preds.end(), '\n') == 7);
    CHECK(fs::exists(out / "predictions_logistic.csv"));
}

TEST_CASE("pipeline runs are byte-identical") {
    const SyntheticDataset ds = circles_squares_on_disk("curveclock_cmd_determinism", 5, 47);
    auto run_into = [&](const std::string& sub, unsigned threads) {
        RunConfig cfg;
        cfg.manifest_path = ds.manifest.string();
        cfg.out_dir = (ds.dir / sub).string();
        cfg.split.train_per_class = 4;
        cfg.family.samples = 160;
        cfg.threads = threads;
        std::ostringstream log, errs;
        cmd_pipeline(cfg, log, errs);
        return log.str();
    };
    const std::string log_a = run_into("out_a", 2);
    const std::string log_b = run_into("out_b", 2);
    const std::string log_c = run_into("out_c", 1);
    CHECK(log_a == log_b);
    CHECK(log_a == log_c);
    for (const char* name : {"dunn.txt", "distmat.csv", "contours/circle_000.csv",
                             "contours/square_003.csv"}) {
        const std::string a = read_file_bytes(ds.dir / "out_a" / name);
        CHECK(a == read_file_bytes(ds.dir / "out_b" / name));
        CHECK(a == read_file_bytes(ds.dir / "out_c" / name));
    }
}

TEST_CASE("cli smoke test: gridsearch and classify through the binary") {
    const SyntheticDataset ds = circles_squares_on_disk("curveclock_cli_smoke", 4, 59);
    write_text_file(ds.dir / "run.cfg",
                    "paths.manifest = " + ds.manifest.string() +
                        "\npaths.out = " + (ds.dir / "out").string() +
                        "\nsplit.train_per_class = 3\nfamily.samples = 120\n"
                        "grid.lambdas = inf\ngrid.sectors = 0\ngrid.samples = 120\n"
                        "classifier.logistic_iters = 50\n");
    CHECK(run_cli("pipeline --config " + (ds.dir / "run.cfg").string()) == 0);
    CHECK(run_cli("gridsearch --config " + (ds.dir / "run.cfg").string()) == 0);
    CHECK(run_cli("classify --config " + (ds.dir / "run.cfg").string()) == 0);
    CHECK(run_cli("") != 0); // missing subcommand
}
