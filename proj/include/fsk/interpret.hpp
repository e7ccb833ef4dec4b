#pragma once

#include <span>

#include "fsk/raster.hpp"

namespace fsk {

enum class PairKind { perturbed, paraphrased };

/// A prediction raster paired with the prediction regenerated after the
/// reasoning trace was adversarially perturbed or meaning-preservingly
/// paraphrased. Both rasters live in [0,1] and share dimensions.
struct PairedPrediction {
    Raster original;
    Raster modified;
    PairKind kind = PairKind::perturbed;
};

/// Mean fraction of the maximal possible per-pixel shift realized by the
/// perturbed prediction, where the shift target is 1 for original values
/// below 0.5 and 0 otherwise. In [-1, 1]; negative means the prediction
/// moved away from the target.
double fidelity(const PairedPrediction& pair);

/// One minus the mean per-pixel shift under paraphrase, each shift
/// normalized by the distance to the raster bound it moved towards.
/// In [0, 1]; 1 means the prediction did not move.
double consistency(const PairedPrediction& pair);

// Test-set aggregation: unweighted mean of per-pair scores.
double mean_fidelity(std::span<const PairedPrediction> pairs);
double mean_consistency(std::span<const PairedPrediction> pairs);

}  // namespace fsk
