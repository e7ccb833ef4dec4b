// fsk: batch tool for wildfire-risk raster work — tiling, quintile
// normalization, stratified sampling, metric evaluation, rollout rewards,
// and reasoning-trace interpretability scores.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fsk/container.hpp"
#include "fsk/errors.hpp"
#include "fsk/evaluate.hpp"
#include "fsk/grpo.hpp"
#include "fsk/interpret.hpp"
#include "fsk/quintile.hpp"
#include "fsk/split.hpp"
#include "fsk/tiling.hpp"
#include "fsk/version.hpp"

namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitIo = 2;

// Prints a scalar with 12 significant digits, keeping a trailing ".0" on
// integral values so 1.0 reads as a real.
std::string pretty_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    std::string s(buf);
    if (s.find('.') == std::string::npos && s.find('e') == std::string::npos &&
        s.find("inf") == std::string::npos && s.find("nan") == std::string::npos) {
        s += ".0";
    }
    return s;
}

std::string zero_pad(int v, int width) {
    std::string s = std::to_string(v);
    while (static_cast<int>(s.size()) < width) s.insert(s.begin(), '0');
    return s;
}

ordered_json parse_json_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw fsk::IoError(path.string() + ": cannot open file");
    }
    try {
        return ordered_json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw fsk::ValidationError(path.string() + ": invalid JSON: " + e.what());
    }
}

struct EvalOptions {
    std::string manifest_path;
    std::string out_path;
    std::string format = "json";
    std::string curves_path;
    std::string config_path;
    fsk::EvalConfig cfg;
};

// The config file takes precedence over flags for any key it carries.
void apply_config_file(const fs::path& path, EvalOptions& opt) {
    const ordered_json doc = parse_json_file(path);
    if (!doc.is_object()) {
        throw fsk::ValidationError(path.string() + ": config must be a JSON object");
    }
    const std::string ctx = path.string();
    auto number = [&](const char* key) {
        if (!doc.at(key).is_number()) {
            throw fsk::ValidationError(ctx + ": '" + std::string(key) + "' must be a number");
        }
        return doc.at(key).get<double>();
    };
    if (doc.contains("threshold")) opt.cfg.threshold = number("threshold");
    if (doc.contains("ece_bins")) opt.cfg.ece_bins = static_cast<int>(number("ece_bins"));
    if (doc.contains("jobs")) opt.cfg.jobs = static_cast<int>(number("jobs"));
    if (doc.contains("seed")) opt.cfg.seed = doc.at("seed").get<std::uint64_t>();
    if (doc.contains("pooling")) {
        const std::string p = doc.at("pooling").get<std::string>();
        if (p == "mean") opt.cfg.pooling = fsk::ScorePooling::mean;
        else if (p == "max") opt.cfg.pooling = fsk::ScorePooling::max;
        else throw fsk::ValidationError(ctx + ": pooling must be 'mean' or 'max'");
    }
    if (doc.contains("ssim")) {
        const auto& s = doc.at("ssim");
        if (!s.is_object()) {
            throw fsk::ValidationError(ctx + ": 'ssim' must be an object");
        }
        if (s.contains("window")) opt.cfg.ssim.window = s.at("window").get<int>();
        if (s.contains("sigma")) opt.cfg.ssim.sigma = s.at("sigma").get<double>();
        if (s.contains("c1")) opt.cfg.ssim.c1 = s.at("c1").get<double>();
        if (s.contains("c2")) opt.cfg.ssim.c2 = s.at("c2").get<double>();
    }
}

int cmd_tile(const std::string& input, int size, const std::string& out_dir) {
    const auto [parent, meta] = fsk::load_raster_with_meta(input);
    fs::create_directories(out_dir);
    const auto tiles = fsk::tile_raster(parent, size, meta.tile_id);
    int rows = parent.height / size;
    int cols = parent.width / size;
    const int pad = static_cast<int>(std::to_string(std::max(rows, cols)).size());
    for (const auto& [geom, raster] : tiles) {
        const std::string name = (meta.tile_id.empty() ? std::string("tile") : meta.tile_id) + "_r" +
                                 zero_pad(geom.origin_row / size, pad) + "_c" +
                                 zero_pad(geom.origin_col / size, pad) + ".fskr";
        fsk::save_raster(raster, fsk::RasterMeta{name.substr(0, name.size() - 5), {}, {}},
                         fs::path(out_dir) / name);
    }
    std::cout << tiles.size() << " tiles written to " << out_dir << "\n";
    return kExitOk;
}

int cmd_normalize(const std::vector<std::string>& references, const std::string& input,
                  const std::string& out) {
    const auto [raster, meta] = fsk::load_raster_with_meta(input);
    std::vector<double> population;
    if (references.empty()) {
        for (std::size_t i = 0; i < raster.pixel_count(); ++i) {
            if (!raster.excluded(i)) population.push_back(raster.values[i]);
        }
    } else {
        for (const auto& ref : references) {
            const fsk::Raster r = fsk::load_raster(ref);
            for (std::size_t i = 0; i < r.pixel_count(); ++i) {
                if (!r.excluded(i)) population.push_back(r.values[i]);
            }
        }
    }
    const auto transform = fsk::fit_quintile(population);
    fsk::save_raster(fsk::apply_quintile(transform, raster), meta, out);
    std::cout << "normalized " << input << " -> " << out << "\n";
    return kExitOk;
}

int cmd_sample(const std::string& candidates_path, std::size_t train, std::size_t val,
               std::size_t test, std::uint64_t seed, const std::string& out) {
    const ordered_json doc = parse_json_file(candidates_path);
    if (!doc.is_array()) {
        throw fsk::ValidationError(candidates_path +
                                   ": expected a JSON array of {id, geo_cell, risk_bin}");
    }
    std::vector<fsk::SplitCandidate> candidates;
    for (std::size_t i = 0; i < doc.size(); ++i) {
        const auto& obj = doc.at(i);
        const std::string ctx = candidates_path + ": candidate " + std::to_string(i);
        if (!obj.is_object() || !obj.contains("id") || !obj.at("id").is_string() ||
            !obj.contains("geo_cell") || !obj.at("geo_cell").is_number_integer() ||
            !obj.contains("risk_bin") || !obj.at("risk_bin").is_number_integer()) {
            throw fsk::ValidationError(ctx + ": needs string 'id' and integer 'geo_cell', 'risk_bin'");
        }
        candidates.push_back({obj.at("id").get<std::string>(), obj.at("geo_cell").get<std::int64_t>(),
                              obj.at("risk_bin").get<int>()});
    }
    fsk::SplitSpec spec;
    spec.target_counts = {train, val, test};
    spec.seed = seed;
    const auto assignment = fsk::stratified_split(candidates, spec);

    ordered_json result;
    for (const auto& c : candidates) {   // candidate order, assigned only
        auto it = assignment.find(c.id);
        if (it != assignment.end()) result[c.id] = fsk::split_name(it->second);
    }
    std::ofstream os(out, std::ios::trunc);
    if (!os) {
        throw fsk::IoError(out + ": cannot open file for writing");
    }
    os << result.dump(2) << '\n';
    if (!os) {
        throw fsk::IoError(out + ": write failed");
    }
    std::cout << assignment.size() << " of " << candidates.size() << " candidates assigned\n";
    return kExitOk;
}

int cmd_eval(EvalOptions& opt) {
    if (!opt.config_path.empty()) {
        apply_config_file(opt.config_path, opt);
    }
    fsk::ReportFormat fmt;
    if (opt.format == "json") fmt = fsk::ReportFormat::structured_text;
    else if (opt.format == "csv") fmt = fsk::ReportFormat::delimited_table;
    else throw fsk::ValidationError("eval: --format must be json or csv, got '" + opt.format + "'");

    const fsk::EvalManifest manifest = fsk::load_manifest(opt.manifest_path);
    std::vector<fsk::CurvePoint> curves;
    const fsk::MetricReport report = fsk::run_evaluation(
        manifest, opt.cfg, opt.curves_path.empty() ? nullptr : &curves);

    if (opt.out_path.empty()) {
        std::cout << fsk::emit_report(report, fmt);
    } else {
        fsk::write_report_file(report, fmt, opt.out_path);
    }
    if (!opt.curves_path.empty()) {
        std::ofstream os(opt.curves_path, std::ios::trunc);
        if (!os) {
            throw fsk::IoError(opt.curves_path + ": cannot open file for writing");
        }
        os << fsk::emit_curves(curves);
        if (!os) {
            throw fsk::IoError(opt.curves_path + ": write failed");
        }
    }
    return kExitOk;
}

int cmd_reward(int pred, bool no_pred, int actual, bool format_ok,
               const std::string& frequencies) {
    fsk::RewardConfig cfg;
    if (!frequencies.empty()) {
        std::array<std::uint64_t, 10> freq{};
        std::stringstream ss(frequencies);
        std::string item;
        std::size_t k = 0;
        while (std::getline(ss, item, ',')) {
            if (k >= freq.size()) {
                throw fsk::ValidationError("reward: --frequencies needs exactly 10 counts");
            }
            freq[k++] = std::stoull(item);
        }
        if (k != freq.size()) {
            throw fsk::ValidationError("reward: --frequencies needs exactly 10 counts, got " +
                                       std::to_string(k));
        }
        cfg.class_frequencies = freq;
    }
    const std::optional<int> predicted = no_pred ? std::nullopt : std::optional<int>(pred);
    std::cout << pretty_double(fsk::reward(predicted, actual, format_ok, cfg)) << "\n";
    return kExitOk;
}

int cmd_interp(const std::string& kind, const std::string& orig, const std::string& mod) {
    if (kind != "perturbed" && kind != "paraphrased") {
        throw fsk::ValidationError("interp: --kind must be perturbed or paraphrased, got '" +
                                   kind + "'");
    }
    fsk::PairedPrediction pair;
    pair.original = fsk::load_raster(orig);
    pair.modified = fsk::load_raster(mod);
    pair.kind = kind == "perturbed" ? fsk::PairKind::perturbed : fsk::PairKind::paraphrased;
    const double value =
        pair.kind == fsk::PairKind::perturbed ? fsk::fidelity(pair) : fsk::consistency(pair);
    std::cout << pretty_double(value) << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fsk — wildfire-risk raster evaluation toolkit"};
    app.set_version_flag("--version", std::string(fsk::kToolVersion));
    app.require_subcommand(1);

    // tile
    auto* tile = app.add_subcommand("tile", "Cut a raster container into fixed-size tiles");
    std::string tile_input, tile_out_dir;
    int tile_size = fsk::kDefaultTileSize;
    tile->add_option("--input", tile_input, "Parent raster container")->required();
    tile->add_option("--size", tile_size, "Tile edge length in pixels");
    tile->add_option("--out", tile_out_dir, "Output directory")->required();

    // normalize
    auto* normalize = app.add_subcommand("normalize", "Quintile-normalize a raster into [0,1]");
    std::vector<std::string> norm_refs;
    std::string norm_input, norm_out;
    normalize->add_option("--reference", norm_refs,
                          "Reference raster(s) defining the value population (repeatable); "
                          "defaults to the input itself");
    normalize->add_option("--input", norm_input, "Raster to transform")->required();
    normalize->add_option("--out", norm_out, "Output raster path")->required();

    // sample
    auto* sample = app.add_subcommand("sample", "Stratified train/val/test assignment");
    std::string sample_candidates, sample_out;
    std::size_t sample_train = 0, sample_val = 0, sample_test = 0;
    std::uint64_t sample_seed = 0;
    sample->add_option("--candidates", sample_candidates, "JSON array of {id, geo_cell, risk_bin}")
        ->required();
    sample->add_option("--train", sample_train, "Training count")->required();
    sample->add_option("--val", sample_val, "Validation count")->required();
    sample->add_option("--test", sample_test, "Test count")->required();
    sample->add_option("--seed", sample_seed, "Shuffle seed");
    sample->add_option("--out", sample_out, "Assignment JSON output")->required();

    // eval
    auto* eval = app.add_subcommand("eval", "Run the full metric suite over a manifest");
    EvalOptions opt;
    eval->add_option("--manifest", opt.manifest_path, "Evaluation manifest")->required();
    eval->add_option("--out", opt.out_path, "Report output path (stdout when omitted)");
    eval->add_option("--format", opt.format, "Report format: json|csv");
    eval->add_option("--threshold", opt.cfg.threshold, "IoU binarization threshold");
    eval->add_option("--ece-bins", opt.cfg.ece_bins, "Calibration bin count");
    eval->add_option("--jobs", opt.cfg.jobs, "Worker threads (default: FSK_JOBS env or hardware)");
    eval->add_option("--seed", opt.cfg.seed, "Seed recorded in provenance");
    eval->add_option("--config", opt.config_path, "JSON config file; its keys override flags");
    eval->add_option("--curves", opt.curves_path, "Write ROC/calibration points to this CSV");

    // reward
    auto* rew = app.add_subcommand("reward", "Score one rollout's parsed answer");
    int rew_pred = -1, rew_actual = 0;
    bool rew_format_ok = false;
    std::string rew_freq;
    auto* pred_opt = rew->add_option("--pred", rew_pred, "Parsed digit 0-9 (omit if none)");
    rew->add_option("--actual", rew_actual, "Ground-truth label 0-9")->required();
    rew->add_flag("--format-ok", rew_format_ok, "Output had a well-formed answer block");
    rew->add_option("--frequencies", rew_freq, "10 comma-separated class counts");

    // interp
    auto* interp = app.add_subcommand("interp", "Fidelity/consistency of a prediction pair");
    std::string interp_kind, interp_orig, interp_mod;
    interp->add_option("--kind", interp_kind, "perturbed|paraphrased")->required();
    interp->add_option("--orig", interp_orig, "Original prediction raster")->required();
    interp->add_option("--mod", interp_mod, "Modified prediction raster")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n\n" << app.help();
        return kExitValidation;
    }

    try {
        if (tile->parsed()) return cmd_tile(tile_input, tile_size, tile_out_dir);
        if (normalize->parsed()) return cmd_normalize(norm_refs, norm_input, norm_out);
        if (sample->parsed()) {
            return cmd_sample(sample_candidates, sample_train, sample_val, sample_test,
                              sample_seed, sample_out);
        }
        if (eval->parsed()) return cmd_eval(opt);
        if (rew->parsed()) {
            return cmd_reward(rew_pred, pred_opt->count() == 0, rew_actual, rew_format_ok, rew_freq);
        }
        if (interp->parsed()) return cmd_interp(interp_kind, interp_orig, interp_mod);
    } catch (const fsk::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.kind() == fsk::ErrorKind::io ? kExitIo : kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    }
    return kExitOk;
}
