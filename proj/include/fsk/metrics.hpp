#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fsk/raster.hpp"

namespace fsk {

/// Gaussian-window structural similarity parameters.
struct SsimParams {
    int window = 11;        // odd, >= 3
    double sigma = 1.5;
    double c1 = 1e-4;
    double c2 = 9e-4;
};

/// Pixel scores partitioned for out-of-distribution discrimination:
/// burnt pixels are positives, control-tile pixels are negatives, and
/// non-burnt pixels inside event tiles are background (kept out of the
/// discrimination sets because ignition is stochastic).
struct PixelEvalSet {
    std::vector<double> positive_scores;
    std::vector<double> negative_scores;
    std::vector<double> background_scores;
};

struct OrdinalPair {
    int predicted = 0;      // 0..k-1
    int actual = 0;
};

struct IouCounts {
    std::uint64_t tp = 0;
    std::uint64_t fp = 0;
    std::uint64_t fn = 0;
};

// One tile's worth of input for assemble_pixel_eval. Event tiles carry a
// mask; control tiles must not.
struct PixelEvalTile {
    std::string tile_id;
    bool is_event = false;
    const Raster* prediction = nullptr;
    const BinaryMask* mask = nullptr;
};

double mse(const Raster& a, const Raster& b);
double mae(const Raster& a, const Raster& b);

/// Mean local SSIM over fully interior gaussian windows. Both rasters are
/// expected to be range-matched into [0,1] by the caller. Windows touching
/// a masked pixel are skipped.
double ssim(const Raster& a, const Raster& b, const SsimParams& p = {});

double brier(std::span<const double> probs, std::span<const int> labels);

/// Mann-Whitney statistic: P(positive score > negative score), ties 0.5.
double roc_auc(std::span<const double> positives, std::span<const double> negatives);

/// Expected calibration error over equally spaced bins (final bin
/// right-closed); the per-bin accuracy term is the observed positive
/// frequency. Empty bins contribute nothing.
double ece(std::span<const double> probs, std::span<const int> labels, int bins = 15);

// Prediction binarized at `threshold` (>= compares positive). Two empty
// sets count as perfect overlap.
IouCounts iou_counts(const Raster& pred, const BinaryMask& truth, double threshold = 0.5);
double iou(const Raster& pred, const BinaryMask& truth, double threshold = 0.5);
double iou_from_counts(const IouCounts& c);

/// Quadratic weighted kappa over k ordinal classes.
double qwk(std::span<const OrdinalPair> pairs, int k = 10);

PixelEvalSet assemble_pixel_eval(std::span<const PixelEvalTile> tiles);

}  // namespace fsk
