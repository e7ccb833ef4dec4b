#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace fsk {

/// 2-D grid of continuous values, row-major. The optional nodata mask marks
/// pixels excluded from every statistic computed over the raster.
struct Raster {
    int width = 0;
    int height = 0;
    std::vector<double> values;         // row-major, width*height
    std::vector<std::uint8_t> nodata;   // empty, or width*height; 1 = excluded

    double at(int row, int col) const { return values[static_cast<std::size_t>(row) * width + col]; }
    double& at(int row, int col) { return values[static_cast<std::size_t>(row) * width + col]; }

    bool has_mask() const { return !nodata.empty(); }
    bool excluded(std::size_t i) const { return !nodata.empty() && nodata[i] != 0; }
    bool excluded(int row, int col) const { return excluded(static_cast<std::size_t>(row) * width + col); }

    std::size_t pixel_count() const { return static_cast<std::size_t>(width) * height; }
};

/// Per-pixel boolean annotation of a raster (true = burnt/positive).
struct BinaryMask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> bits;     // row-major, 1 = positive

    bool at(int row, int col) const { return bits[static_cast<std::size_t>(row) * width + col] != 0; }
    std::size_t pixel_count() const { return static_cast<std::size_t>(width) * height; }
};

// Validated constructors. `context` names the offending object in errors.
Raster make_raster(int width, int height, std::vector<double> values,
                   std::vector<std::uint8_t> nodata = {},
                   const std::string& context = "raster");
Raster make_constant_raster(int width, int height, double value);
BinaryMask make_mask(int width, int height, std::vector<std::uint8_t> bits,
                     const std::string& context = "mask");

// Throws ValidationError if the raster breaks its invariants.
void validate_raster(const Raster& r, const std::string& context = "raster");

// Mean over non-masked pixels (compensated). Throws if no pixel is evaluable.
double raster_mean(const Raster& r, const std::string& context = "raster");

/// Affine min-max map onto [0,1]. A constant raster maps to all zeros.
/// The nodata mask is preserved; masked values pass through untouched.
Raster match_range(const Raster& r);

/// Forward differences along each axis: dx is (width-1) x height,
/// dy is width x (height-1). Requires width, height >= 2.
std::pair<Raster, Raster> finite_diff(const Raster& r);

/// Bins the mean of a [0,1] raster into ten evenly spaced ordinal levels:
/// floor(mean*10), clamped to 9 at mean = 1.
int discretize_mean_risk(const Raster& r);

}  // namespace fsk
