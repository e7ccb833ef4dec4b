#include "fsk/manifest.hpp"

#include <algorithm>
#include <fstream>
#include <unordered_set>

#include <json.hpp>

#include "fsk/errors.hpp"
#include "fsk/version.hpp"

namespace fsk {

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json parse_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError(path.string() + ": cannot open file");
    }
    try {
        return ordered_json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(path.string() + ": invalid JSON: " + e.what());
    }
}

std::string entry_context(const std::filesystem::path& path, std::size_t index,
                          const std::string& tile_id) {
    std::string ctx = path.string() + ": entry " + std::to_string(index);
    if (!tile_id.empty()) ctx += " (tile_id '" + tile_id + "')";
    return ctx;
}

std::optional<std::string> optional_string(const ordered_json& obj, const char* key,
                                           const std::string& ctx) {
    if (!obj.contains(key)) return std::nullopt;
    if (!obj.at(key).is_string()) {
        throw ValidationError(ctx + ": field '" + std::string(key) + "' must be a string");
    }
    return obj.at(key).get<std::string>();
}

}  // namespace

const char* tile_role_name(TileRole r) {
    switch (r) {
        case TileRole::id_test: return "id_test";
        case TileRole::ood_event: return "ood_event";
        case TileRole::ood_control: return "ood_control";
    }
    return "?";
}

TileRole tile_role_from(const std::string& name, const std::string& context) {
    if (name == "id_test") return TileRole::id_test;
    if (name == "ood_event") return TileRole::ood_event;
    if (name == "ood_control") return TileRole::ood_control;
    throw ValidationError(context + ": unknown role '" + name +
                          "', expected id_test|ood_event|ood_control");
}

std::filesystem::path EvalManifest::resolve(const std::string& rel) const {
    std::filesystem::path p(rel);
    return p.is_absolute() ? p : base_dir / p;
}

void validate_manifest(const EvalManifest& m) {
    if (m.entries.empty()) {
        throw ValidationError("manifest: no entries");
    }
    std::unordered_set<std::string> ids;
    for (std::size_t i = 0; i < m.entries.size(); ++i) {
        const auto& e = m.entries[i];
        const std::string ctx = "manifest entry " + std::to_string(i) + " (tile_id '" + e.tile_id + "')";
        if (e.tile_id.empty()) {
            throw ValidationError("manifest entry " + std::to_string(i) + ": empty tile_id");
        }
        if (!ids.insert(e.tile_id).second) {
            throw ValidationError(ctx + ": duplicate tile_id");
        }
        if (e.prediction_path.empty()) {
            throw ValidationError(ctx + ": prediction_path missing");
        }
        switch (e.role) {
            case TileRole::id_test:
                if (!e.target_path) {
                    throw ValidationError(ctx + ": role id_test requires target_path");
                }
                if (e.mask_path) {
                    throw ValidationError(ctx + ": role id_test must not carry mask_path");
                }
                break;
            case TileRole::ood_event:
                if (!e.mask_path) {
                    throw ValidationError(ctx + ": role ood_event requires mask_path");
                }
                if (e.target_path) {
                    throw ValidationError(ctx + ": role ood_event must not carry target_path");
                }
                break;
            case TileRole::ood_control:
                if (e.mask_path || e.target_path) {
                    throw ValidationError(ctx + ": role ood_control must not carry mask_path or target_path");
                }
                break;
        }
    }
}

EvalManifest load_manifest(const std::filesystem::path& path) {
    const ordered_json doc = parse_json_file(path);
    if (!doc.is_object() || !doc.contains("schema") ||
        doc.at("schema") != std::string(kManifestSchema)) {
        throw ValidationError(path.string() + ": missing or unsupported schema, expected '" +
                              std::string(kManifestSchema) + "'");
    }
    if (!doc.contains("entries") || !doc.at("entries").is_array()) {
        throw ValidationError(path.string() + ": 'entries' must be an array");
    }

    EvalManifest m;
    m.base_dir = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
    for (std::size_t i = 0; i < doc.at("entries").size(); ++i) {
        const auto& obj = doc.at("entries").at(i);
        std::string ctx = entry_context(path, i, "");
        if (!obj.is_object()) {
            throw ValidationError(ctx + ": must be an object");
        }
        TileRecord rec;
        if (!obj.contains("tile_id") || !obj.at("tile_id").is_string()) {
            throw ValidationError(ctx + ": field 'tile_id' must be a string");
        }
        rec.tile_id = obj.at("tile_id").get<std::string>();
        ctx = entry_context(path, i, rec.tile_id);
        if (!obj.contains("role") || !obj.at("role").is_string()) {
            throw ValidationError(ctx + ": field 'role' must be a string");
        }
        rec.role = tile_role_from(obj.at("role").get<std::string>(), ctx);
        if (!obj.contains("prediction_path") || !obj.at("prediction_path").is_string()) {
            throw ValidationError(ctx + ": field 'prediction_path' must be a string");
        }
        rec.prediction_path = obj.at("prediction_path").get<std::string>();
        rec.target_path = optional_string(obj, "target_path", ctx);
        rec.mask_path = optional_string(obj, "mask_path", ctx);
        rec.climate_path = optional_string(obj, "climate_path", ctx);
        rec.country = optional_string(obj, "country", ctx);
        if (obj.contains("year")) {
            if (!obj.at("year").is_number_integer()) {
                throw ValidationError(ctx + ": field 'year' must be an integer");
            }
            rec.year = obj.at("year").get<int>();
        }
        m.entries.push_back(std::move(rec));
    }

    // Aggregations run in ascending tile-id order regardless of file order.
    std::sort(m.entries.begin(), m.entries.end(),
              [](const TileRecord& a, const TileRecord& b) { return a.tile_id < b.tile_id; });
    validate_manifest(m);
    return m;
}

void save_manifest(const EvalManifest& m, const std::filesystem::path& path) {
    validate_manifest(m);
    ordered_json doc;
    doc["schema"] = std::string(kManifestSchema);
    doc["entries"] = ordered_json::array();
    for (const auto& e : m.entries) {
        ordered_json obj;
        obj["tile_id"] = e.tile_id;
        obj["role"] = tile_role_name(e.role);
        obj["prediction_path"] = e.prediction_path;
        if (e.target_path) obj["target_path"] = *e.target_path;
        if (e.mask_path) obj["mask_path"] = *e.mask_path;
        if (e.climate_path) obj["climate_path"] = *e.climate_path;
        if (e.year) obj["year"] = *e.year;
        if (e.country) obj["country"] = *e.country;
        doc["entries"].push_back(std::move(obj));
    }
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw IoError(path.string() + ": cannot open file for writing");
    }
    out << doc.dump(2) << '\n';
    if (!out) {
        throw IoError(path.string() + ": write failed");
    }
}

ClimateVector load_climate(const std::filesystem::path& path) {
    const ordered_json doc = parse_json_file(path);
    if (!doc.is_object() || !doc.contains("monthly") || !doc.at("monthly").is_array()) {
        throw ValidationError(path.string() + ": 'monthly' must be an array of 12 records");
    }
    std::vector<MonthlyClimate> monthly;
    for (std::size_t i = 0; i < doc.at("monthly").size(); ++i) {
        const auto& obj = doc.at("monthly").at(i);
        const std::string ctx = path.string() + ": monthly record " + std::to_string(i);
        if (!obj.is_object() || !obj.contains("month") || !obj.at("month").is_number_integer()) {
            throw ValidationError(ctx + ": field 'month' must be an integer");
        }
        MonthlyClimate rec;
        rec.month = obj.at("month").get<int>();
        auto get = [&](const char* key) -> std::optional<double> {
            if (!obj.contains(key)) return std::nullopt;
            if (!obj.at(key).is_number()) {
                throw ValidationError(ctx + ": field '" + std::string(key) + "' must be a number");
            }
            return obj.at(key).get<double>();
        };
        rec.temperature = get("temperature");
        rec.precipitation = get("precipitation");
        rec.humidity = get("humidity");
        rec.wind_speed = get("wind_speed");
        rec.wind_direction = get("wind_direction");
        monthly.push_back(rec);
    }
    try {
        return build_climate_vector(monthly);
    } catch (const ValidationError& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
}

}  // namespace fsk
