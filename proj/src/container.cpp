#include "fsk/container.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include <json.hpp>

#include "fsk/errors.hpp"
#include "fsk/version.hpp"

namespace fsk {

namespace {

using ordered_json = nlohmann::ordered_json;

// Payload headers are one JSON line; anything bigger is malformed.
constexpr std::size_t kMaxHeaderBytes = 1 << 20;

std::uint32_t to_little(std::uint32_t v) {
    if constexpr (std::endian::native == std::endian::little) {
        return v;
    } else {
        return ((v & 0xFFu) << 24) | ((v & 0xFF00u) << 8) | ((v >> 8) & 0xFF00u) | (v >> 24);
    }
}

float decode_f32(const unsigned char* p) {
    std::uint32_t bits;
    std::memcpy(&bits, p, 4);
    bits = to_little(bits);
    float f;
    std::memcpy(&f, &bits, 4);
    return f;
}

void encode_f32(float f, unsigned char* p) {
    std::uint32_t bits;
    std::memcpy(&bits, &f, 4);
    bits = to_little(bits);
    std::memcpy(p, &bits, 4);
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError(path.string() + ": cannot open file");
    }
    std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) {
        throw IoError(path.string() + ": read failed");
    }
    return data;
}

int require_positive_int(const ordered_json& header, const char* key,
                         const std::string& context) {
    if (!header.contains(key)) {
        throw ValidationError(context + ": header missing field '" + std::string(key) + "'");
    }
    const auto& v = header.at(key);
    if (!v.is_number_integer()) {
        throw ValidationError(context + ": header field '" + std::string(key) +
                              "' must be an integer");
    }
    const auto i = v.get<std::int64_t>();
    if (i <= 0 || i > 1u << 20) {
        throw ValidationError(context + ": header field '" + std::string(key) +
                              "' out of range: " + std::to_string(i));
    }
    return static_cast<int>(i);
}

void require_string_field(const ordered_json& header, const char* key, const char* expected,
                          const std::string& context) {
    if (!header.contains(key) || !header.at(key).is_string()) {
        throw ValidationError(context + ": header missing string field '" + std::string(key) + "'");
    }
    const auto s = header.at(key).get<std::string>();
    if (s != expected) {
        throw ValidationError(context + ": header field '" + std::string(key) + "' must be '" +
                              expected + "', got '" + s + "'");
    }
}

}  // namespace

std::pair<Raster, RasterMeta> load_raster_with_meta(const std::filesystem::path& path) {
    const std::string ctx = path.string();
    const std::string data = read_file(path);

    const std::size_t magic_end = data.find('\n');
    if (magic_end == std::string::npos || data.substr(0, magic_end) != kContainerMagic) {
        throw ValidationError(ctx + ": bad magic line, expected '" + std::string(kContainerMagic) + "'");
    }
    const std::size_t header_end = data.find('\n', magic_end + 1);
    if (header_end == std::string::npos || header_end - magic_end > kMaxHeaderBytes) {
        throw ValidationError(ctx + ": missing or oversized header line");
    }

    ordered_json header;
    try {
        header = ordered_json::parse(data.substr(magic_end + 1, header_end - magic_end - 1));
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(ctx + ": header is not valid JSON: " + e.what());
    }
    if (!header.is_object()) {
        throw ValidationError(ctx + ": header must be a JSON object");
    }

    const int width = require_positive_int(header, "width", ctx);
    const int height = require_positive_int(header, "height", ctx);
    require_string_field(header, "dtype", "f32", ctx);
    require_string_field(header, "order", "row-major", ctx);
    require_string_field(header, "byte_order", "little-endian", ctx);
    if (!header.contains("tile_id") || !header.at("tile_id").is_string()) {
        throw ValidationError(ctx + ": header missing string field 'tile_id'");
    }

    RasterMeta meta;
    meta.tile_id = header.at("tile_id").get<std::string>();
    for (const char* key : {"lat", "lon"}) {
        if (header.contains(key)) {
            const auto& v = header.at(key);
            if (!v.is_number()) {
                throw ValidationError(ctx + ": header field '" + std::string(key) +
                                      "' must be a number");
            }
            (std::string(key) == "lat" ? meta.lat : meta.lon) = v.get<double>();
        }
    }

    const std::size_t expected = static_cast<std::size_t>(width) * height * 4;
    const std::size_t actual = data.size() - header_end - 1;
    if (actual != expected) {
        throw ValidationError(ctx + ": payload is " + std::to_string(actual) +
                              " bytes, header implies " + std::to_string(expected));
    }

    Raster r{width, height, std::vector<double>(static_cast<std::size_t>(width) * height), {}};
    const auto* payload = reinterpret_cast<const unsigned char*>(data.data()) + header_end + 1;
    for (std::size_t i = 0; i < r.pixel_count(); ++i) {
        const float f = decode_f32(payload + i * 4);
        if (!std::isfinite(f)) {
            throw ValidationError(ctx + ": non-finite payload value at pixel " + std::to_string(i));
        }
        r.values[i] = static_cast<double>(f);
    }
    return {std::move(r), std::move(meta)};
}

Raster load_raster(const std::filesystem::path& path) {
    return load_raster_with_meta(path).first;
}

void save_raster(const Raster& r, const RasterMeta& meta, const std::filesystem::path& path) {
    validate_raster(r, path.string());
    if (r.has_mask()) {
        throw ValidationError(path.string() + ": container format cannot carry a nodata mask");
    }

    ordered_json header;
    header["width"] = r.width;
    header["height"] = r.height;
    header["dtype"] = "f32";
    header["order"] = "row-major";
    header["byte_order"] = "little-endian";
    header["tile_id"] = meta.tile_id;
    if (meta.lat) header["lat"] = *meta.lat;
    if (meta.lon) header["lon"] = *meta.lon;

    std::vector<unsigned char> payload(r.pixel_count() * 4);
    for (std::size_t i = 0; i < r.pixel_count(); ++i) {
        const float f = static_cast<float>(r.values[i]);
        if (!std::isfinite(f)) {
            throw ValidationError(path.string() + ": value at pixel " + std::to_string(i) +
                                  " is not representable as a finite f32");
        }
        encode_f32(f, payload.data() + i * 4);
    }

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError(path.string() + ": cannot open file for writing");
    }
    out << kContainerMagic << '\n' << header.dump() << '\n';
    out.write(reinterpret_cast<const char*>(payload.data()),
              static_cast<std::streamsize>(payload.size()));
    out.flush();
    if (!out) {
        throw IoError(path.string() + ": write failed");
    }
}

void save_raster(const Raster& r, const std::filesystem::path& path) {
    save_raster(r, RasterMeta{path.stem().string(), std::nullopt, std::nullopt}, path);
}

BinaryMask load_mask(const std::filesystem::path& path) {
    const Raster r = load_raster(path);
    BinaryMask m{r.width, r.height, std::vector<std::uint8_t>(r.pixel_count(), 0)};
    for (std::size_t i = 0; i < r.pixel_count(); ++i) {
        m.bits[i] = r.values[i] >= 0.5 ? 1 : 0;
    }
    return m;
}

void save_mask(const BinaryMask& m, const std::string& tile_id,
               const std::filesystem::path& path) {
    Raster r{m.width, m.height, std::vector<double>(m.pixel_count()), {}};
    for (std::size_t i = 0; i < m.pixel_count(); ++i) {
        r.values[i] = m.bits[i] != 0 ? 1.0 : 0.0;
    }
    save_raster(r, RasterMeta{tile_id, std::nullopt, std::nullopt}, path);
}

}  // namespace fsk
