#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <string>

#include "fsk/container.hpp"
#include "fsk/errors.hpp"
#include "fsk/evaluate.hpp"
#include "fsk/manifest.hpp"
#include "fsk/report.hpp"
#include "testutil.hpp"

using namespace fsk;

namespace {

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

Raster f32_raster(std::mt19937_64& g, int w, int h, double lo, double hi) {
    std::vector<double> v(static_cast<std::size_t>(w) * h);
    for (auto& x : v) x = static_cast<double>(static_cast<float>(testutil::uniform(g, lo, hi)));
    return make_raster(w, h, std::move(v));
}

// Builds a little benchmark directory: id tiles with targets, event tiles
// with masks, control tiles. Returns the manifest path.
std::filesystem::path build_synthetic(const std::filesystem::path& dir, int ids, int events,
                                      int controls, int size, std::uint64_t seed) {
    auto g = testutil::rng(seed);
    EvalManifest m;
    m.base_dir = dir;
    auto add = [&](const std::string& id, TileRole role) {
        TileRecord rec;
        rec.tile_id = id;
        rec.role = role;
        rec.prediction_path = id + "_pred.fskr";
        const Raster pred = f32_raster(g, size, size, 0.0, 1.0);
        save_raster(pred, RasterMeta{id, {}, {}}, dir / rec.prediction_path);
        if (role == TileRole::id_test) {
            rec.target_path = id + "_tgt.fskr";
            save_raster(f32_raster(g, size, size, 0.0, 1.0), RasterMeta{id, {}, {}},
                        dir / *rec.target_path);
        }
        if (role == TileRole::ood_event) {
            rec.mask_path = id + "_mask.fskr";
            std::vector<std::uint8_t> bits(static_cast<std::size_t>(size) * size, 0);
            for (auto& b : bits) b = (g() % 8 == 0) ? 1 : 0;
            bits[0] = 1;   // at least one burnt pixel
            save_mask(make_mask(size, size, std::move(bits)), id, dir / *rec.mask_path);
        }
        m.entries.push_back(std::move(rec));
    };
    for (int i = 0; i < ids; ++i) add("id_" + std::to_string(i), TileRole::id_test);
    for (int i = 0; i < events; ++i) add("ev_" + std::to_string(i), TileRole::ood_event);
    for (int i = 0; i < controls; ++i) add("ct_" + std::to_string(i), TileRole::ood_control);
    const auto path = dir / "manifest.json";
    save_manifest(m, path);
    return path;
}

std::string cli_path() { return FSK_CLI_PATH; }

int run_cli(const std::string& args, const std::filesystem::path& stdout_to) {
    const std::string cmd = cli_path() + " " + args + " >" + stdout_to.string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("run_evaluation identity id tile") {
    testutil::TempDir dir("eval_id");
    auto g = testutil::rng(101);
    const Raster pred = f32_raster(g, 16, 16, 0.0, 1.0);
    save_raster(pred, dir.path() / "p.fskr");
    save_raster(pred, dir.path() / "t.fskr");

    EvalManifest m;
    m.base_dir = dir.path();
    m.entries.push_back({"t0", TileRole::id_test, "p.fskr", std::string("t.fskr"), std::nullopt,
                         std::nullopt, std::nullopt, std::nullopt});
    save_manifest(m, dir.path() / "manifest.json");

    const MetricReport report = run_evaluation(load_manifest(dir.path() / "manifest.json"), {});
    REQUIRE(report.id.has_value());
    CHECK(report.id->mse == 0.0);
    CHECK(report.id->mae == 0.0);
    CHECK(report.id->ssim == 1.0);
    CHECK(report.id->tiles == 1);
    REQUIRE(report.ordinal.has_value());
    CHECK(report.ordinal->qwk == 1.0);
    CHECK(report.ordinal->brier == 0.0);
    CHECK_FALSE(report.ood_event.has_value());
}

TEST_CASE("run_evaluation perfect event/control separation") {
    testutil::TempDir dir("eval_ood");
    const int size = 12;
    save_raster(make_constant_raster(size, size, 1.0), dir.path() / "e.fskr");
    save_raster(make_constant_raster(size, size, 0.0), dir.path() / "c.fskr");
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(size) * size, 0);
    bits[3] = 1;
    save_mask(make_mask(size, size, std::move(bits)), "e", dir.path() / "m.fskr");

    EvalManifest m;
    m.base_dir = dir.path();
    m.entries.push_back({"e", TileRole::ood_event, "e.fskr", std::nullopt, std::string("m.fskr"),
                         std::nullopt, std::nullopt, std::nullopt});
    m.entries.push_back({"c", TileRole::ood_control, "c.fskr", std::nullopt, std::nullopt,
                         std::nullopt, std::nullopt, std::nullopt});
    save_manifest(m, dir.path() / "manifest.json");

    const MetricReport report = run_evaluation(load_manifest(dir.path() / "manifest.json"), {});
    REQUIRE(report.ood_event.has_value());
    CHECK(report.ood_event->brier == 0.0);
    CHECK(report.ood_event->roc_auc == 1.0);
    CHECK(report.ood_event->ece == 0.0);
    REQUIRE(report.ood_pixel.has_value());
    CHECK(report.ood_pixel->roc_auc == 1.0);
    CHECK(report.ood_pixel->positives == 1);
    CHECK(report.ood_pixel->negatives == static_cast<std::uint64_t>(size) * size);
    CHECK(report.ood_pixel->background == static_cast<std::uint64_t>(size) * size - 1);
    // Prediction >= 0.5 everywhere: TP=1, FP=all non-burnt, FN=0.
    CHECK(report.ood_pixel->iou ==
          doctest::Approx(1.0 / (static_cast<double>(size) * size)).epsilon(1e-12));
}

TEST_CASE("run_evaluation is byte-identical across job counts") {
    testutil::TempDir dir("eval_jobs");
    const auto manifest_path = build_synthetic(dir.path(), 4, 3, 3, 16, 2024);
    const EvalManifest manifest = load_manifest(manifest_path);

    std::string previous;
    for (int jobs : {1, 4, 8}) {
        EvalConfig cfg;
        cfg.jobs = jobs;
        cfg.seed = 7;
        const MetricReport report = run_evaluation(manifest, cfg);
        const std::string text = emit_report(report, ReportFormat::structured_text);
        if (!previous.empty()) CHECK(text == previous);
        previous = text;
    }
}

TEST_CASE("run_evaluation result does not depend on entry order") {
    testutil::TempDir dir("eval_order");
    const auto manifest_path = build_synthetic(dir.path(), 3, 2, 2, 16, 55);
    EvalManifest manifest = load_manifest(manifest_path);
    const MetricReport sorted_report = run_evaluation(manifest, {});
    std::reverse(manifest.entries.begin(), manifest.entries.end());
    CHECK(run_evaluation(manifest, {}) == sorted_report);
}

TEST_CASE("run_evaluation rejects incomplete OOD blocks") {
    testutil::TempDir dir("eval_bad");
    const int size = 12;
    save_raster(make_constant_raster(size, size, 0.5), dir.path() / "e.fskr");
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(size) * size, 0);
    bits[0] = 1;
    save_mask(make_mask(size, size, std::move(bits)), "e", dir.path() / "m.fskr");
    EvalManifest m;
    m.base_dir = dir.path();
    m.entries.push_back({"e", TileRole::ood_event, "e.fskr", std::nullopt, std::string("m.fskr"),
                         std::nullopt, std::nullopt, std::nullopt});
    save_manifest(m, dir.path() / "manifest.json");
    CHECK_THROWS_AS(run_evaluation(load_manifest(dir.path() / "manifest.json"), {}),
                    ValidationError);
}

TEST_CASE("run_evaluation reports missing files with their path") {
    testutil::TempDir dir("eval_missing");
    EvalManifest m;
    m.base_dir = dir.path();
    m.entries.push_back({"t", TileRole::ood_control, "absent.fskr", std::nullopt, std::nullopt,
                         std::nullopt, std::nullopt, std::nullopt});
    // Bypass save/load to keep the dangling reference.
    CHECK_THROWS_WITH_AS(run_evaluation(m, {}),
                         doctest::Contains("absent.fskr"), Error);
}

TEST_CASE("config hash changes iff a config value changes") {
    EvalConfig a;
    EvalConfig b;
    CHECK(config_hash(a) == config_hash(b));
    b.jobs = 8;                       // execution detail, not hashed
    CHECK(config_hash(a) == config_hash(b));
    b.threshold = 0.6;
    CHECK(config_hash(a) != config_hash(b));
    b = a;
    b.ece_bins = 10;
    CHECK(config_hash(a) != config_hash(b));
    b = a;
    b.ssim.sigma = 2.0;
    CHECK(config_hash(a) != config_hash(b));
    b = a;
    b.seed = 1;
    CHECK(config_hash(a) != config_hash(b));
    b = a;
    b.pooling = ScorePooling::max;
    CHECK(config_hash(a) != config_hash(b));
}

TEST_CASE("FSK_JOBS env var feeds the default job count") {
    setenv("FSK_JOBS", "3", 1);
    CHECK(resolve_jobs(0) == 3);
    CHECK(resolve_jobs(5) == 5);
    setenv("FSK_JOBS", "junk", 1);
    CHECK_THROWS_AS(resolve_jobs(0), ValidationError);
    unsetenv("FSK_JOBS");
    CHECK(resolve_jobs(0) >= 1);
}

TEST_CASE("cli: eval is deterministic and respects formats") {
    testutil::TempDir dir("cli_eval");
    const auto manifest_path = build_synthetic(dir.path(), 3, 2, 2, 16, 99);
    const auto out1 = dir.path() / "r1.json";
    const auto out2 = dir.path() / "r2.json";
    const auto log = dir.path() / "log.txt";

    CHECK(run_cli("eval --manifest " + manifest_path.string() + " --out " + out1.string() +
                      " --jobs 4 --seed 5",
                  log) == 0);
    CHECK(run_cli("eval --manifest " + manifest_path.string() + " --out " + out2.string() +
                      " --jobs 1 --seed 5",
                  log) == 0);
    CHECK(slurp(out1) == slurp(out2));
    CHECK(parse_report(slurp(out1)).id.has_value());

    const auto csv = dir.path() / "r.csv";
    CHECK(run_cli("eval --manifest " + manifest_path.string() + " --out " + csv.string() +
                      " --format csv",
                  log) == 0);
    CHECK(slurp(csv).rfind("block,metric,value\n", 0) == 0);

    const auto curves = dir.path() / "curves.csv";
    CHECK(run_cli("eval --manifest " + manifest_path.string() + " --out " + out1.string() +
                      " --curves " + curves.string(),
                  log) == 0);
    CHECK(slurp(curves).find("roc_event,") != std::string::npos);
    CHECK(slurp(curves).find("calibration_event,") != std::string::npos);
}

TEST_CASE("cli: config file overrides flags") {
    testutil::TempDir dir("cli_config");
    const auto manifest_path = build_synthetic(dir.path(), 2, 2, 2, 16, 123);
    const auto cfg_path = dir.path() / "cfg.json";
    {
        std::ofstream out(cfg_path);
        out << "{\"ece_bins\": 10, \"seed\": 77}\n";
    }
    const auto out = dir.path() / "r.json";
    const auto log = dir.path() / "log.txt";
    CHECK(run_cli("eval --manifest " + manifest_path.string() + " --out " + out.string() +
                      " --ece-bins 15 --seed 1 --config " + cfg_path.string(),
                  log) == 0);
    const MetricReport report = parse_report(slurp(out));
    CHECK(report.provenance.seed == 77);

    EvalConfig expect;
    expect.ece_bins = 10;
    expect.seed = 77;
    CHECK(report.provenance.config_hash == config_hash(expect));
}

TEST_CASE("cli: reward and interp adapters") {
    testutil::TempDir dir("cli_small");
    const auto log = dir.path() / "out.txt";
    CHECK(run_cli("reward --pred 7 --actual 7 --format-ok", log) == 0);
    CHECK(slurp(log) == "1.0\n");
    CHECK(run_cli("reward --pred 4 --actual 7 --format-ok", log) == 0);
    CHECK(slurp(log) == "0.7\n");
    CHECK(run_cli("reward --actual 7", log) == 0);
    CHECK(slurp(log) == "0.0\n");
    CHECK(run_cli("reward --pred 3 --actual 99", log) == 1);

    // Dyadic values stay exact through the f32 container.
    save_raster(make_raster(1, 1, {0.25}), dir.path() / "orig.fskr");
    save_raster(make_raster(1, 1, {0.625}), dir.path() / "mod.fskr");
    CHECK(run_cli("interp --kind perturbed --orig " + (dir.path() / "orig.fskr").string() +
                      " --mod " + (dir.path() / "mod.fskr").string(),
                  log) == 0);
    CHECK(slurp(log) == "0.5\n");
}

TEST_CASE("cli: tile, normalize, sample") {
    testutil::TempDir dir("cli_pipe");
    const auto log = dir.path() / "out.txt";
    auto g = testutil::rng(7);
    save_raster(f32_raster(g, 8, 8, 0.0, 4.0), RasterMeta{"parent", {}, {}},
                dir.path() / "parent.fskr");

    CHECK(run_cli("tile --input " + (dir.path() / "parent.fskr").string() + " --size 4 --out " +
                      (dir.path() / "tiles").string(),
                  log) == 0);
    CHECK(std::filesystem::exists(dir.path() / "tiles" / "parent_r0_c0.fskr"));
    CHECK(std::filesystem::exists(dir.path() / "tiles" / "parent_r1_c1.fskr"));

    CHECK(run_cli("normalize --input " + (dir.path() / "parent.fskr").string() + " --out " +
                      (dir.path() / "norm.fskr").string(),
                  log) == 0);
    const Raster norm = load_raster(dir.path() / "norm.fskr");
    for (double v : norm.values) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }

    // Explicit reference population: a reference spanning [0,4] pins the
    // transform, so a raster above the range clamps to 1.
    save_raster(make_raster(2, 1, {0.0, 4.0}), dir.path() / "ref.fskr");
    save_raster(make_raster(2, 1, {9.0, 12.0}), dir.path() / "hi.fskr");
    CHECK(run_cli("normalize --reference " + (dir.path() / "ref.fskr").string() + " --input " +
                      (dir.path() / "hi.fskr").string() + " --out " +
                      (dir.path() / "hi_norm.fskr").string(),
                  log) == 0);
    const Raster hi = load_raster(dir.path() / "hi_norm.fskr");
    CHECK(hi.values == std::vector<double>{1.0, 1.0});

    {
        std::ofstream out(dir.path() / "cands.json");
        out << "[";
        for (int i = 0; i < 20; ++i) {
            out << (i ? "," : "") << "{\"id\":\"c" << i << "\",\"geo_cell\":" << i % 2
                << ",\"risk_bin\":" << i % 3 << "}";
        }
        out << "]";
    }
    CHECK(run_cli("sample --candidates " + (dir.path() / "cands.json").string() +
                      " --train 10 --val 5 --test 5 --seed 3 --out " +
                      (dir.path() / "splits.json").string(),
                  log) == 0);
    const std::string splits = slurp(dir.path() / "splits.json");
    CHECK(splits.find("\"train\"") != std::string::npos);
    CHECK(splits.find("\"test\"") != std::string::npos);
}

TEST_CASE("cli: exit codes distinguish validation from io") {
    testutil::TempDir dir("cli_exit");
    const auto log = dir.path() / "out.txt";
    CHECK(run_cli("eval --manifest " + (dir.path() / "missing.json").string(), log) == 2);
    CHECK(run_cli("eval --no-such-flag", log) == 1);
    CHECK(run_cli("interp --kind bogus --orig a --mod b", log) == 1);
}
