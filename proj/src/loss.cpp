#include "fsk/loss.hpp"

#include <cmath>

#include "fsk/errors.hpp"
#include "fsk/kahan.hpp"

namespace fsk {

namespace {

void require_same_shape(const Raster& a, const Raster& b, const char* op) {
    if (a.width != b.width || a.height != b.height) {
        throw ValidationError(std::string(op) + ": dimension mismatch " + std::to_string(a.width) +
                              "x" + std::to_string(a.height) + " vs " + std::to_string(b.width) +
                              "x" + std::to_string(b.height));
    }
}

// Sum of |a-b| and count over jointly evaluable pixels.
void abs_diff_sums(const Raster& a, const Raster& b, KahanSum& sum, std::size_t& n) {
    for (std::size_t i = 0; i < a.pixel_count(); ++i) {
        if (a.excluded(i) || b.excluded(i)) continue;
        sum.add(std::fabs(a.values[i] - b.values[i]));
        ++n;
    }
}

void require_in_unit_ball(const Raster& r, const char* name) {
    for (std::size_t i = 0; i < r.pixel_count(); ++i) {
        if (!r.excluded(i) && (r.values[i] < -1.0 || r.values[i] > 1.0)) {
            throw ValidationError(std::string("composite_loss: ") + name + " value " +
                                  std::to_string(r.values[i]) + " at pixel " + std::to_string(i) +
                                  " outside [-1,1]");
        }
    }
}

}  // namespace

double smooth_l1(const Raster& y, const Raster& yhat, double beta) {
    require_same_shape(y, yhat, "smooth_l1");
    if (!(beta > 0.0)) {
        throw ValidationError("smooth_l1: beta must be positive, got " + std::to_string(beta));
    }
    KahanSum sum;
    std::size_t n = 0;
    for (std::size_t i = 0; i < y.pixel_count(); ++i) {
        if (y.excluded(i) || yhat.excluded(i)) continue;
        const double d = std::fabs(y.values[i] - yhat.values[i]);
        if (!std::isfinite(d)) {
            throw ValidationError("smooth_l1: non-finite value at pixel " + std::to_string(i));
        }
        sum.add(d < beta ? 0.5 * d * d / beta : d - 0.5 * beta);
        ++n;
    }
    if (n == 0) {
        throw ValidationError("smooth_l1: no evaluable pixels");
    }
    return sum.value() / static_cast<double>(n);
}

CompositeLoss composite_loss(const Raster& y, const Raster& yhat, const LossWeights& w) {
    require_same_shape(y, yhat, "composite_loss");
    if (w.ssim_weight < 0.0 || w.edge_weight < 0.0) {
        throw ValidationError("composite_loss: weights must be non-negative");
    }
    require_in_unit_ball(y, "target");
    require_in_unit_ball(yhat, "prediction");

    CompositeLoss loss;
    loss.reconstruction = smooth_l1(y, yhat, w.smooth_l1_beta);
    loss.ssim = ssim(match_range(y), match_range(yhat), w.ssim_params);

    const auto [dx_y, dy_y] = finite_diff(y);
    const auto [dx_h, dy_h] = finite_diff(yhat);
    KahanSum edge_sum;
    std::size_t edge_n = 0;
    abs_diff_sums(dx_y, dx_h, edge_sum, edge_n);
    abs_diff_sums(dy_y, dy_h, edge_sum, edge_n);
    if (edge_n == 0) {
        throw ValidationError("composite_loss: no evaluable gradient pixels");
    }
    loss.edge_l1 = edge_sum.value() / static_cast<double>(edge_n);

    loss.total = loss.reconstruction + w.ssim_weight * (1.0 - loss.ssim) +
                 w.edge_weight * loss.edge_l1;
    return loss;
}

}  // namespace fsk
