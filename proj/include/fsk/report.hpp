#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace fsk {

enum class ReportFormat { structured_text, delimited_table };

struct IdBlock {
    double mse = 0.0;
    double mae = 0.0;
    double ssim = 0.0;
    std::uint64_t tiles = 0;
    bool operator==(const IdBlock&) const = default;
};

struct OrdinalBlock {
    double qwk = 0.0;
    double brier = 0.0;     // on labels scaled to [0,1] (label/9)
    double mae = 0.0;       // same scale
    std::uint64_t tiles = 0;
    bool operator==(const OrdinalBlock&) const = default;
};

struct EventBlock {
    double brier = 0.0;
    double roc_auc = 0.0;
    double ece = 0.0;
    std::uint64_t event_tiles = 0;
    std::uint64_t control_tiles = 0;
    bool operator==(const EventBlock&) const = default;
};

struct PixelBlock {
    double roc_auc = 0.0;
    double iou = 0.0;          // micro: counts pooled over event tiles
    double iou_macro = 0.0;    // auxiliary: mean of per-tile IoU
    std::uint64_t positives = 0;
    std::uint64_t negatives = 0;
    std::uint64_t background = 0;
    bool operator==(const PixelBlock&) const = default;
};

struct Provenance {
    std::string tool_version;
    std::string config_hash;    // 16 hex chars; covers every config value
    std::uint64_t seed = 0;
    bool operator==(const Provenance&) const = default;
};

/// Structured evaluation results. Blocks are absent when the manifest
/// carried no tiles for them; every present number is finite.
struct MetricReport {
    Provenance provenance;
    std::optional<IdBlock> id;
    std::optional<OrdinalBlock> ordinal;
    std::optional<EventBlock> ood_event;
    std::optional<PixelBlock> ood_pixel;
    bool operator==(const MetricReport&) const = default;
};

// Serializes with stable key order; the structured-text form parses back
// into an equal report.
std::string emit_report(const MetricReport& r, ReportFormat format);
MetricReport parse_report(const std::string& structured_text);

// Write-to-temp then atomic rename; nothing is left behind on failure.
void write_report_file(const MetricReport& r, ReportFormat format,
                       const std::filesystem::path& path);

/// ROC and calibration curve points, emitted as data rows only.
struct CurvePoint {
    std::string curve;   // "roc_event", "roc_pixel", "calibration_event"
    double x = 0.0;
    double y = 0.0;
};
std::string emit_curves(const std::vector<CurvePoint>& points);

// Shortest round-trip decimal form of a double (deterministic).
std::string format_double(double v);

}  // namespace fsk
