#include "fsk/quintile.hpp"

#include <algorithm>
#include <cmath>

#include "fsk/errors.hpp"

namespace fsk {

QuintileTransform fit_quintile(std::span<const double> reference_values) {
    std::vector<double> sorted;
    sorted.reserve(reference_values.size());
    for (double v : reference_values) {
        if (!std::isfinite(v)) {
            throw ValidationError("fit_quintile: reference population contains a non-finite value");
        }
        sorted.push_back(v);
    }
    std::sort(sorted.begin(), sorted.end());

    const std::size_t n = sorted.size();
    QuintileTransform t;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && sorted[j] == sorted[i]) ++j;
        // Run occupies 1-based ranks i+1 .. j; ties share the average rank.
        const double midrank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        t.breakpoints.push_back(sorted[i]);
        t.positions.push_back((midrank - 0.5) / static_cast<double>(n));
        i = j;
    }
    if (t.breakpoints.size() < 2) {
        throw ValidationError("fit_quintile: degenerate population, need at least 2 distinct values, got " +
                              std::to_string(t.breakpoints.size()));
    }
    return t;
}

double apply_quintile(const QuintileTransform& t, double value) {
    if (value < t.breakpoints.front()) return 0.0;
    if (value > t.breakpoints.back()) return 1.0;
    auto it = std::lower_bound(t.breakpoints.begin(), t.breakpoints.end(), value);
    const std::size_t k = static_cast<std::size_t>(it - t.breakpoints.begin());
    if (t.breakpoints[k] == value) return t.positions[k];
    // Strictly between breakpoints k-1 and k: interpolate the rank position.
    const double v0 = t.breakpoints[k - 1], v1 = t.breakpoints[k];
    const double p0 = t.positions[k - 1], p1 = t.positions[k];
    return p0 + (p1 - p0) * (value - v0) / (v1 - v0);
}

Raster apply_quintile(const QuintileTransform& t, const Raster& r) {
    validate_raster(r);
    Raster out = r;
    for (std::size_t i = 0; i < out.pixel_count(); ++i) {
        if (out.excluded(i)) continue;
        out.values[i] = apply_quintile(t, out.values[i]);
    }
    return out;
}

}  // namespace fsk
