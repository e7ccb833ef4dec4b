#include "fsk/raster.hpp"

#include <cmath>
#include <limits>

#include "fsk/errors.hpp"
#include "fsk/kahan.hpp"

namespace fsk {

void validate_raster(const Raster& r, const std::string& context) {
    if (r.width <= 0 || r.height <= 0) {
        throw ValidationError(context + ": width and height must be positive, got " +
                              std::to_string(r.width) + "x" + std::to_string(r.height));
    }
    const std::size_t n = static_cast<std::size_t>(r.width) * r.height;
    if (r.values.size() != n) {
        throw ValidationError(context + ": values length " + std::to_string(r.values.size()) +
                              " does not match " + std::to_string(r.width) + "x" +
                              std::to_string(r.height));
    }
    if (!r.nodata.empty() && r.nodata.size() != n) {
        throw ValidationError(context + ": nodata mask length " + std::to_string(r.nodata.size()) +
                              " does not match pixel count " + std::to_string(n));
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!r.excluded(i) && !std::isfinite(r.values[i])) {
            throw ValidationError(context + ": non-finite value at pixel " + std::to_string(i));
        }
    }
}

Raster make_raster(int width, int height, std::vector<double> values,
                   std::vector<std::uint8_t> nodata, const std::string& context) {
    Raster r{width, height, std::move(values), std::move(nodata)};
    validate_raster(r, context);
    return r;
}

Raster make_constant_raster(int width, int height, double value) {
    return make_raster(width, height,
                       std::vector<double>(static_cast<std::size_t>(width) * height, value));
}

BinaryMask make_mask(int width, int height, std::vector<std::uint8_t> bits,
                     const std::string& context) {
    if (width <= 0 || height <= 0) {
        throw ValidationError(context + ": width and height must be positive");
    }
    if (bits.size() != static_cast<std::size_t>(width) * height) {
        throw ValidationError(context + ": bits length " + std::to_string(bits.size()) +
                              " does not match " + std::to_string(width) + "x" +
                              std::to_string(height));
    }
    return BinaryMask{width, height, std::move(bits)};
}

double raster_mean(const Raster& r, const std::string& context) {
    KahanSum sum;
    std::size_t n = 0;
    for (std::size_t i = 0; i < r.pixel_count(); ++i) {
        if (r.excluded(i)) continue;
        sum.add(r.values[i]);
        ++n;
    }
    if (n == 0) {
        throw ValidationError(context + ": no evaluable pixels (all masked or empty)");
    }
    return sum.value() / static_cast<double>(n);
}

Raster match_range(const Raster& r) {
    validate_raster(r);
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < r.pixel_count(); ++i) {
        if (r.excluded(i)) continue;
        lo = std::min(lo, r.values[i]);
        hi = std::max(hi, r.values[i]);
    }
    Raster out = r;
    if (!(hi > lo)) {
        // Constant (or fully masked) raster: maps to all zeros.
        for (std::size_t i = 0; i < out.pixel_count(); ++i) {
            if (!out.excluded(i)) out.values[i] = 0.0;
        }
        return out;
    }
    const double span = hi - lo;
    for (std::size_t i = 0; i < out.pixel_count(); ++i) {
        if (out.excluded(i)) continue;
        out.values[i] = (out.values[i] - lo) / span;
    }
    return out;
}

std::pair<Raster, Raster> finite_diff(const Raster& r) {
    validate_raster(r);
    if (r.width < 2 || r.height < 2) {
        throw ValidationError("finite_diff: raster must be at least 2x2, got " +
                              std::to_string(r.width) + "x" + std::to_string(r.height));
    }
    Raster dx{r.width - 1, r.height, std::vector<double>(static_cast<std::size_t>(r.width - 1) * r.height), {}};
    Raster dy{r.width, r.height - 1, std::vector<double>(static_cast<std::size_t>(r.width) * (r.height - 1)), {}};
    if (r.has_mask()) {
        dx.nodata.assign(dx.pixel_count(), 0);
        dy.nodata.assign(dy.pixel_count(), 0);
    }
    for (int row = 0; row < r.height; ++row) {
        for (int col = 0; col + 1 < r.width; ++col) {
            dx.at(row, col) = r.at(row, col + 1) - r.at(row, col);
            if (r.has_mask() && (r.excluded(row, col) || r.excluded(row, col + 1))) {
                dx.nodata[static_cast<std::size_t>(row) * dx.width + col] = 1;
            }
        }
    }
    for (int row = 0; row + 1 < r.height; ++row) {
        for (int col = 0; col < r.width; ++col) {
            dy.at(row, col) = r.at(row + 1, col) - r.at(row, col);
            if (r.has_mask() && (r.excluded(row, col) || r.excluded(row + 1, col))) {
                dy.nodata[static_cast<std::size_t>(row) * dy.width + col] = 1;
            }
        }
    }
    return {std::move(dx), std::move(dy)};
}

int discretize_mean_risk(const Raster& r) {
    validate_raster(r);
    for (std::size_t i = 0; i < r.pixel_count(); ++i) {
        if (!r.excluded(i) && (r.values[i] < 0.0 || r.values[i] > 1.0)) {
            throw ValidationError("discretize_mean_risk: value " + std::to_string(r.values[i]) +
                                  " at pixel " + std::to_string(i) + " outside [0,1]");
        }
    }
    const double mean = raster_mean(r, "discretize_mean_risk");
    const int label = static_cast<int>(mean * 10.0);
    return label > 9 ? 9 : label;
}

}  // namespace fsk
