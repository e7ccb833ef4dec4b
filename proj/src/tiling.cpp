#include "fsk/tiling.hpp"

#include "fsk/errors.hpp"

namespace fsk {

namespace {

Raster copy_window(const Raster& src, int origin_row, int origin_col, int size) {
    Raster out{size, size, std::vector<double>(static_cast<std::size_t>(size) * size), {}};
    if (src.has_mask()) out.nodata.assign(out.pixel_count(), 0);
    for (int r = 0; r < size; ++r) {
        for (int c = 0; c < size; ++c) {
            out.at(r, c) = src.at(origin_row + r, origin_col + c);
            if (src.has_mask() && src.excluded(origin_row + r, origin_col + c)) {
                out.nodata[static_cast<std::size_t>(r) * size + c] = 1;
            }
        }
    }
    return out;
}

}  // namespace

std::vector<std::pair<TileGeometry, Raster>> tile_raster(const Raster& parent, int size,
                                                         std::string_view parent_id) {
    validate_raster(parent, "tile_raster: parent");
    if (size <= 0) {
        throw ValidationError("tile_raster: size must be positive, got " + std::to_string(size));
    }
    if (size > parent.width || size > parent.height) {
        throw ValidationError("tile_raster: size " + std::to_string(size) +
                              " exceeds parent dimensions " + std::to_string(parent.width) + "x" +
                              std::to_string(parent.height));
    }
    const int rows = parent.height / size;
    const int cols = parent.width / size;
    std::vector<std::pair<TileGeometry, Raster>> tiles;
    tiles.reserve(static_cast<std::size_t>(rows) * cols);
    for (int tr = 0; tr < rows; ++tr) {
        for (int tc = 0; tc < cols; ++tc) {
            TileGeometry geom{tr * size, tc * size, size, std::string(parent_id)};
            tiles.emplace_back(std::move(geom), copy_window(parent, tr * size, tc * size, size));
        }
    }
    return tiles;
}

Raster crop_from_supertile(const Raster& supertile, int offset_row, int offset_col, int size) {
    validate_raster(supertile, "crop_from_supertile: supertile");
    if (size <= 0) {
        throw ValidationError("crop_from_supertile: size must be positive");
    }
    if (supertile.width != 2 * size || supertile.height != 2 * size) {
        throw ValidationError("crop_from_supertile: supertile must be " + std::to_string(2 * size) +
                              "x" + std::to_string(2 * size) + ", got " +
                              std::to_string(supertile.width) + "x" + std::to_string(supertile.height));
    }
    if (offset_row < 0 || offset_row > size || offset_col < 0 || offset_col > size) {
        throw ValidationError("crop_from_supertile: offset (" + std::to_string(offset_row) + "," +
                              std::to_string(offset_col) + ") outside [0," + std::to_string(size) + "]");
    }
    return copy_window(supertile, offset_row, offset_col, size);
}

}  // namespace fsk
