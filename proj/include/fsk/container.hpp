#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>

#include "fsk/raster.hpp"

namespace fsk {

/// Raster container: a magic line, a one-line JSON header, then the raw
/// row-major payload of width*height little-endian 32-bit floats.
///
///   fskraster 1\n
///   {"width":W,"height":H,"dtype":"f32","order":"row-major",
///    "byte_order":"little-endian","tile_id":"...","lat":..,"lon":..}\n
///   <W*H*4 payload bytes>
///
/// The header is parsed and validated before any payload byte is touched.
/// lat/lon (tile centroid) are optional. The format carries no nodata mask.
struct RasterMeta {
    std::string tile_id;
    std::optional<double> lat;
    std::optional<double> lon;
};

Raster load_raster(const std::filesystem::path& path);
std::pair<Raster, RasterMeta> load_raster_with_meta(const std::filesystem::path& path);

void save_raster(const Raster& r, const RasterMeta& meta,
                 const std::filesystem::path& path);
// Convenience: tile_id defaults to the file stem.
void save_raster(const Raster& r, const std::filesystem::path& path);

// Masks are stored as 0/1 rasters; loading binarizes at 0.5.
BinaryMask load_mask(const std::filesystem::path& path);
void save_mask(const BinaryMask& m, const std::string& tile_id,
               const std::filesystem::path& path);

}  // namespace fsk
