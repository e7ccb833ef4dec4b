#include "fsk/evaluate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <optional>
#include <thread>

#include "fsk/container.hpp"
#include "fsk/errors.hpp"
#include "fsk/kahan.hpp"
#include "fsk/raster.hpp"
#include "fsk/version.hpp"

namespace fsk {

namespace {

struct TileOutcome {
    // id_test
    std::optional<double> mse_v, mae_v, ssim_v;
    std::optional<OrdinalPair> ordinal;
    // ood
    std::optional<double> score;
    bool is_event = false;
    std::vector<double> positives, negatives, background;
    IouCounts iou;
    std::optional<double> tile_iou;
};

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string hex16(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[v & 0xF];
        v >>= 4;
    }
    return out;
}

void require_unit_range(const Raster& r, const std::string& ctx) {
    for (std::size_t i = 0; i < r.pixel_count(); ++i) {
        if (!r.excluded(i) && (r.values[i] < 0.0 || r.values[i] > 1.0)) {
            throw ValidationError(ctx + ": value " + std::to_string(r.values[i]) + " at pixel " +
                                  std::to_string(i) + " outside [0,1]");
        }
    }
}

double pool_score(const Raster& r, ScorePooling pooling, const std::string& ctx) {
    if (pooling == ScorePooling::mean) return raster_mean(r, ctx);
    double best = -1.0;
    bool any = false;
    for (std::size_t i = 0; i < r.pixel_count(); ++i) {
        if (r.excluded(i)) continue;
        best = std::max(best, r.values[i]);
        any = true;
    }
    if (!any) throw ValidationError(ctx + ": no evaluable pixels");
    return best;
}

TileOutcome evaluate_tile(const EvalManifest& manifest, const TileRecord& rec,
                          const EvalConfig& cfg) {
    const std::string ctx = "tile '" + rec.tile_id + "'";
    TileOutcome out;
    Raster pred = load_raster(manifest.resolve(rec.prediction_path));
    require_unit_range(pred, ctx + ": prediction");

    switch (rec.role) {
        case TileRole::id_test: {
            Raster target = load_raster(manifest.resolve(*rec.target_path));
            require_unit_range(target, ctx + ": target");
            out.mse_v = mse(pred, target);
            out.mae_v = mae(pred, target);
            out.ssim_v = ssim(match_range(pred), match_range(target), cfg.ssim);
            out.ordinal = OrdinalPair{discretize_mean_risk(pred), discretize_mean_risk(target)};
            break;
        }
        case TileRole::ood_event: {
            const BinaryMask mask = load_mask(manifest.resolve(*rec.mask_path));
            out.is_event = true;
            out.score = pool_score(pred, cfg.pooling, ctx);
            out.iou = iou_counts(pred, mask, cfg.threshold);
            out.tile_iou = iou_from_counts(out.iou);
            PixelEvalTile t{rec.tile_id, true, &pred, &mask};
            PixelEvalSet set = assemble_pixel_eval({&t, 1});
            out.positives = std::move(set.positive_scores);
            out.background = std::move(set.background_scores);
            break;
        }
        case TileRole::ood_control: {
            out.is_event = false;
            out.score = pool_score(pred, cfg.pooling, ctx);
            PixelEvalTile t{rec.tile_id, false, &pred, nullptr};
            PixelEvalSet set = assemble_pixel_eval({&t, 1});
            out.negatives = std::move(set.negative_scores);
            break;
        }
    }
    return out;
}

// Evenly rank-spaced subsample keeping first and last, so huge pixel sets
// produce readable curves.
std::vector<double> decimate_sorted(std::vector<double> sorted, std::size_t max_points) {
    if (sorted.size() <= max_points) return sorted;
    std::vector<double> out;
    out.reserve(max_points);
    for (std::size_t i = 0; i < max_points; ++i) {
        const std::size_t idx = i * (sorted.size() - 1) / (max_points - 1);
        out.push_back(sorted[idx]);
    }
    return out;
}

void roc_points(const std::vector<double>& pos, const std::vector<double>& neg,
                const std::string& name, std::vector<CurvePoint>& out) {
    std::vector<double> thresholds;
    thresholds.reserve(pos.size() + neg.size());
    thresholds.insert(thresholds.end(), pos.begin(), pos.end());
    thresholds.insert(thresholds.end(), neg.begin(), neg.end());
    std::sort(thresholds.begin(), thresholds.end());
    thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
    thresholds = decimate_sorted(std::move(thresholds), 512);

    std::vector<double> ps = pos, ns = neg;
    std::sort(ps.begin(), ps.end());
    std::sort(ns.begin(), ns.end());
    out.push_back({name, 0.0, 0.0});
    for (auto it = thresholds.rbegin(); it != thresholds.rend(); ++it) {
        const double t = *it;
        const auto tp = ps.end() - std::lower_bound(ps.begin(), ps.end(), t);
        const auto fp = ns.end() - std::lower_bound(ns.begin(), ns.end(), t);
        out.push_back({name, static_cast<double>(fp) / static_cast<double>(ns.size()),
                       static_cast<double>(tp) / static_cast<double>(ps.size())});
    }
    out.push_back({name, 1.0, 1.0});
}

void calibration_points(const std::vector<double>& probs, const std::vector<int>& labels,
                        int bins, std::vector<CurvePoint>& out) {
    std::vector<KahanSum> conf(static_cast<std::size_t>(bins));
    std::vector<std::size_t> count(static_cast<std::size_t>(bins), 0), hits(static_cast<std::size_t>(bins), 0);
    for (std::size_t i = 0; i < probs.size(); ++i) {
        int b = static_cast<int>(probs[i] * bins);
        if (b >= bins) b = bins - 1;
        conf[static_cast<std::size_t>(b)].add(probs[i]);
        count[static_cast<std::size_t>(b)] += 1;
        hits[static_cast<std::size_t>(b)] += static_cast<std::size_t>(labels[i]);
    }
    for (int b = 0; b < bins; ++b) {
        const std::size_t nb = count[static_cast<std::size_t>(b)];
        if (nb == 0) continue;
        out.push_back({"calibration_event",
                       conf[static_cast<std::size_t>(b)].value() / static_cast<double>(nb),
                       static_cast<double>(hits[static_cast<std::size_t>(b)]) / static_cast<double>(nb)});
    }
}

}  // namespace

std::string config_hash(const EvalConfig& cfg) {
    std::string canon;
    canon += "threshold=" + format_double(cfg.threshold);
    canon += ";ece_bins=" + std::to_string(cfg.ece_bins);
    canon += ";ssim_window=" + std::to_string(cfg.ssim.window);
    canon += ";ssim_sigma=" + format_double(cfg.ssim.sigma);
    canon += ";ssim_c1=" + format_double(cfg.ssim.c1);
    canon += ";ssim_c2=" + format_double(cfg.ssim.c2);
    canon += std::string(";pooling=") + (cfg.pooling == ScorePooling::mean ? "mean" : "max");
    canon += ";seed=" + std::to_string(cfg.seed);
    return hex16(fnv1a(canon));
}

int resolve_jobs(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("FSK_JOBS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0 && v <= 1024) {
            return static_cast<int>(v);
        }
        throw ValidationError(std::string("FSK_JOBS: invalid job count '") + env + "'");
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

MetricReport run_evaluation(const EvalManifest& manifest, const EvalConfig& cfg,
                            std::vector<CurvePoint>* curves) {
    validate_manifest(manifest);
    if (cfg.ece_bins < 1) {
        throw ValidationError("run_evaluation: ece_bins must be >= 1");
    }

    // Work lands in index-addressed slots and every reduction walks tiles
    // in ascending tile-id order, so results are identical for any worker
    // count and any manifest entry order.
    const std::size_t n = manifest.entries.size();
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return manifest.entries[a].tile_id < manifest.entries[b].tile_id;
    });

    std::vector<TileOutcome> outcomes(n);
    std::vector<std::string> failures(n);
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};

    const int jobs = std::max(1, std::min<int>(resolve_jobs(cfg.jobs), static_cast<int>(n)));
    auto worker = [&]() {
        for (;;) {
            const std::size_t slot = next.fetch_add(1);
            if (slot >= n) return;
            const TileRecord& rec = manifest.entries[order[slot]];
            try {
                outcomes[slot] = evaluate_tile(manifest, rec, cfg);
            } catch (const Error& e) {
                failures[slot] = e.what();
                failed.store(true);
            } catch (const std::exception& e) {
                failures[slot] = std::string("tile '") + rec.tile_id + "': " + e.what();
                failed.store(true);
            }
        }
    };
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(jobs));
        for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (failed.load()) {
        for (std::size_t i = 0; i < n; ++i) {   // first failure in tile order
            if (!failures[i].empty()) throw ValidationError(failures[i]);
        }
    }

    MetricReport report;
    report.provenance.tool_version = std::string(kToolVersion);
    report.provenance.config_hash = config_hash(cfg);
    report.provenance.seed = cfg.seed;

    // ID block + ordinal block.
    KahanSum mse_sum, mae_sum, ssim_sum;
    std::vector<OrdinalPair> ordinal_pairs;
    std::uint64_t id_tiles = 0;
    for (const auto& o : outcomes) {
        if (!o.mse_v) continue;
        mse_sum.add(*o.mse_v);
        mae_sum.add(*o.mae_v);
        ssim_sum.add(*o.ssim_v);
        ordinal_pairs.push_back(*o.ordinal);
        ++id_tiles;
    }
    if (id_tiles > 0) {
        const double m = static_cast<double>(id_tiles);
        report.id = IdBlock{mse_sum.value() / m, mae_sum.value() / m, ssim_sum.value() / m, id_tiles};
        KahanSum ord_sq, ord_abs;
        for (const auto& p : ordinal_pairs) {
            const double d = (p.predicted - p.actual) / 9.0;
            ord_sq.add(d * d);
            ord_abs.add(std::fabs(d));
        }
        report.ordinal = OrdinalBlock{qwk(ordinal_pairs), ord_sq.value() / m, ord_abs.value() / m,
                                      id_tiles};
    }

    // Tile-level event/control discrimination.
    std::vector<double> scores, event_scores, control_scores;
    std::vector<int> labels;
    std::uint64_t event_tiles = 0, control_tiles = 0;
    for (const auto& o : outcomes) {
        if (!o.score) continue;
        scores.push_back(*o.score);
        labels.push_back(o.is_event ? 1 : 0);
        if (o.is_event) {
            event_scores.push_back(*o.score);
            ++event_tiles;
        } else {
            control_scores.push_back(*o.score);
            ++control_tiles;
        }
    }
    if (event_tiles + control_tiles > 0) {
        if (event_tiles == 0 || control_tiles == 0) {
            throw ValidationError(std::string("run_evaluation: OOD block needs both event and "
                                              "control tiles, got ") +
                                  std::to_string(event_tiles) + " events and " +
                                  std::to_string(control_tiles) + " controls");
        }
        report.ood_event = EventBlock{brier(scores, labels), roc_auc(event_scores, control_scores),
                                      ece(scores, labels, cfg.ece_bins), event_tiles, control_tiles};

        // Pixel-level block under the background rule.
        std::vector<double> pos, neg, bg;
        IouCounts pooled;
        KahanSum macro;
        std::uint64_t macro_n = 0;
        for (const auto& o : outcomes) {
            if (!o.score) continue;
            pos.insert(pos.end(), o.positives.begin(), o.positives.end());
            neg.insert(neg.end(), o.negatives.begin(), o.negatives.end());
            bg.insert(bg.end(), o.background.begin(), o.background.end());
            if (o.is_event) {
                pooled.tp += o.iou.tp;
                pooled.fp += o.iou.fp;
                pooled.fn += o.iou.fn;
                macro.add(*o.tile_iou);
                ++macro_n;
            }
        }
        report.ood_pixel = PixelBlock{roc_auc(pos, neg), iou_from_counts(pooled),
                                      macro.value() / static_cast<double>(macro_n),
                                      pos.size(), neg.size(), bg.size()};
        if (curves != nullptr) {
            roc_points(event_scores, control_scores, "roc_event", *curves);
            roc_points(pos, neg, "roc_pixel", *curves);
            calibration_points(scores, labels, cfg.ece_bins, *curves);
        }
    }

    if (!report.id && !report.ood_event) {
        throw ValidationError("run_evaluation: manifest produced no metric blocks");
    }
    return report;
}

}  // namespace fsk
