#pragma once

#include <span>
#include <vector>

#include "fsk/raster.hpp"

namespace fsk {

/// Rank-based normalization fitted on a reference value population.
/// A reference value with (average, 1-based) rank r maps to (r - 0.5)/n;
/// ties share the average of their ranks. Values between reference points
/// interpolate linearly; values outside the reference range clamp to 0/1.
struct QuintileTransform {
    std::vector<double> breakpoints;   // distinct reference values, ascending
    std::vector<double> positions;     // (midrank - 0.5)/n per breakpoint
};

// Requires at least 2 distinct finite values.
QuintileTransform fit_quintile(std::span<const double> reference_values);

double apply_quintile(const QuintileTransform& t, double value);

// Transforms non-masked pixels; masked pixels and the mask pass through.
Raster apply_quintile(const QuintileTransform& t, const Raster& r);

}  // namespace fsk
