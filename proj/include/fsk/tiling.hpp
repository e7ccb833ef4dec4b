#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fsk/raster.hpp"

namespace fsk {

inline constexpr int kDefaultTileSize = 341;

struct TileGeometry {
    int origin_row = 0;     // pixel offset in the parent raster
    int origin_col = 0;
    int size = kDefaultTileSize;
    std::string parent_id;
};

/// Cuts the parent into a non-overlapping grid of size x size tiles in
/// row-major order. Partial tiles at the right/bottom edges are dropped.
std::vector<std::pair<TileGeometry, Raster>> tile_raster(
    const Raster& parent, int size, std::string_view parent_id = "");

/// Extracts the size x size window at (offset_row, offset_col) from a
/// 2*size x 2*size supertile. Offsets range over [0, size]; offset (0,0)
/// reproduces the top-left original tile.
Raster crop_from_supertile(const Raster& supertile, int offset_row,
                           int offset_col, int size);

}  // namespace fsk
