#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "fsk/climate.hpp"

namespace fsk {

enum class TileRole { id_test, ood_event, ood_control };

const char* tile_role_name(TileRole r);
TileRole tile_role_from(const std::string& name, const std::string& context);

/// Catalog entry binding a prediction to its evaluation inputs. Paths are
/// relative to the manifest file unless absolute.
struct TileRecord {
    std::string tile_id;
    TileRole role = TileRole::id_test;
    std::string prediction_path;
    std::optional<std::string> target_path;    // required for id_test
    std::optional<std::string> mask_path;      // required for ood_event
    std::optional<std::string> climate_path;
    std::optional<int> year;
    std::optional<std::string> country;
};

struct EvalManifest {
    std::vector<TileRecord> entries;           // sorted by tile_id on load
    std::filesystem::path base_dir;            // resolves relative paths

    std::filesystem::path resolve(const std::string& rel) const;
};

// Role-dependent path requirements and tile_id uniqueness are enforced.
EvalManifest load_manifest(const std::filesystem::path& path);
void save_manifest(const EvalManifest& m, const std::filesystem::path& path);
void validate_manifest(const EvalManifest& m);

/// Climate vectors are JSON: {"tile_id": .., "monthly": [{"month":1,
/// "temperature":..,"precipitation":..,"humidity":..,"wind_speed":..,
/// "wind_direction":..}, x12]}.
ClimateVector load_climate(const std::filesystem::path& path);

}  // namespace fsk
