#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fsk/manifest.hpp"
#include "fsk/metrics.hpp"
#include "fsk/report.hpp"

namespace fsk {

enum class ScorePooling { mean, max };

struct EvalConfig {
    double threshold = 0.5;        // IoU binarization
    int ece_bins = 15;
    SsimParams ssim;
    ScorePooling pooling = ScorePooling::mean;   // tile-level event score
    int jobs = 0;                  // 0 = FSK_JOBS env var, else hardware
    std::uint64_t seed = 0;        // recorded in provenance
};

// Hash over every result-affecting config value (jobs excluded: it never
// changes results).
std::string config_hash(const EvalConfig& cfg);

int resolve_jobs(int requested);

/// Runs the full metric protocol over the manifest: per-tile ID errors and
/// structural similarity, ordinal agreement of discretized means, tile-level
/// event/control discrimination and calibration, and pixel-level
/// discrimination under the background rule. Deterministic for a fixed
/// (manifest, config) regardless of the worker count. If `curves` is given,
/// ROC/calibration points are collected into it.
MetricReport run_evaluation(const EvalManifest& manifest, const EvalConfig& cfg,
                            std::vector<CurvePoint>* curves = nullptr);

}  // namespace fsk
