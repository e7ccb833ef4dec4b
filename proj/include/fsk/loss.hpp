#pragma once

#include "fsk/metrics.hpp"
#include "fsk/raster.hpp"

namespace fsk {

/// Mean Smooth-L1: 0.5*d^2/beta for |d| < beta, |d| - 0.5*beta otherwise.
double smooth_l1(const Raster& y, const Raster& yhat, double beta = 1.0);

struct LossWeights {
    double ssim_weight = 0.5;
    double edge_weight = 0.2;
    double smooth_l1_beta = 1.0;
    SsimParams ssim_params;
};

struct CompositeLoss {
    double total = 0.0;
    double reconstruction = 0.0;    // smooth_l1(y, yhat)
    double ssim = 0.0;              // ssim of the range-matched rasters
    double edge_l1 = 0.0;           // mean |grad y - grad yhat|
};

/// Raster regression loss over targets in [-1,1]:
///   smooth_l1 + ssim_weight*(1 - ssim(match_range(y), match_range(yhat)))
///             + edge_weight * L1(finite_diff(y), finite_diff(yhat)).
CompositeLoss composite_loss(const Raster& y, const Raster& yhat,
                             const LossWeights& w = {});

}  // namespace fsk
