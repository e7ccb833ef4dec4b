#include "fsk/report.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "fsk/errors.hpp"
#include "fsk/version.hpp"

namespace fsk {

namespace {

using ordered_json = nlohmann::ordered_json;

void require_finite(double v, const char* name) {
    if (!std::isfinite(v)) {
        throw ValidationError(std::string("report: metric '") + name + "' is not finite");
    }
}

void append_row(std::string& out, const std::string& block, const std::string& metric,
                const std::string& value) {
    out += block;
    out += ',';
    out += metric;
    out += ',';
    out += value;
    out += '\n';
}

double get_number(const ordered_json& obj, const char* key, const std::string& ctx) {
    if (!obj.contains(key) || !obj.at(key).is_number()) {
        throw ValidationError(ctx + ": missing numeric field '" + std::string(key) + "'");
    }
    return obj.at(key).get<double>();
}

std::uint64_t get_count(const ordered_json& obj, const char* key, const std::string& ctx) {
    if (!obj.contains(key) || !obj.at(key).is_number_unsigned()) {
        throw ValidationError(ctx + ": missing count field '" + std::string(key) + "'");
    }
    return obj.at(key).get<std::uint64_t>();
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string emit_report(const MetricReport& r, ReportFormat format) {
    if (r.id) {
        require_finite(r.id->mse, "id.mse");
        require_finite(r.id->mae, "id.mae");
        require_finite(r.id->ssim, "id.ssim");
    }
    if (r.ordinal) {
        require_finite(r.ordinal->qwk, "ordinal.qwk");
        require_finite(r.ordinal->brier, "ordinal.brier");
        require_finite(r.ordinal->mae, "ordinal.mae");
    }
    if (r.ood_event) {
        require_finite(r.ood_event->brier, "ood_event.brier");
        require_finite(r.ood_event->roc_auc, "ood_event.roc_auc");
        require_finite(r.ood_event->ece, "ood_event.ece");
    }
    if (r.ood_pixel) {
        require_finite(r.ood_pixel->roc_auc, "ood_pixel.roc_auc");
        require_finite(r.ood_pixel->iou, "ood_pixel.iou");
        require_finite(r.ood_pixel->iou_macro, "ood_pixel.iou_macro");
    }

    if (format == ReportFormat::structured_text) {
        ordered_json doc;
        doc["schema"] = std::string(kReportSchema);
        ordered_json prov;
        prov["tool_version"] = r.provenance.tool_version;
        prov["config_hash"] = r.provenance.config_hash;
        prov["seed"] = r.provenance.seed;
        doc["provenance"] = std::move(prov);
        if (r.id) {
            ordered_json b;
            b["mse"] = r.id->mse;
            b["mae"] = r.id->mae;
            b["ssim"] = r.id->ssim;
            b["tiles"] = r.id->tiles;
            doc["id"] = std::move(b);
        }
        if (r.ordinal) {
            ordered_json b;
            b["qwk"] = r.ordinal->qwk;
            b["brier"] = r.ordinal->brier;
            b["mae"] = r.ordinal->mae;
            b["tiles"] = r.ordinal->tiles;
            doc["ordinal"] = std::move(b);
        }
        if (r.ood_event) {
            ordered_json b;
            b["brier"] = r.ood_event->brier;
            b["roc_auc"] = r.ood_event->roc_auc;
            b["ece"] = r.ood_event->ece;
            b["event_tiles"] = r.ood_event->event_tiles;
            b["control_tiles"] = r.ood_event->control_tiles;
            doc["ood_event"] = std::move(b);
        }
        if (r.ood_pixel) {
            ordered_json b;
            b["roc_auc"] = r.ood_pixel->roc_auc;
            b["iou"] = r.ood_pixel->iou;
            b["iou_macro"] = r.ood_pixel->iou_macro;
            b["positives"] = r.ood_pixel->positives;
            b["negatives"] = r.ood_pixel->negatives;
            b["background"] = r.ood_pixel->background;
            doc["ood_pixel"] = std::move(b);
        }
        return doc.dump(2) + "\n";
    }

    std::string out = "block,metric,value\n";
    append_row(out, "provenance", "tool_version", r.provenance.tool_version);
    append_row(out, "provenance", "config_hash", r.provenance.config_hash);
    append_row(out, "provenance", "seed", std::to_string(r.provenance.seed));
    if (r.id) {
        append_row(out, "id", "mse", format_double(r.id->mse));
        append_row(out, "id", "mae", format_double(r.id->mae));
        append_row(out, "id", "ssim", format_double(r.id->ssim));
        append_row(out, "id", "tiles", std::to_string(r.id->tiles));
    }
    if (r.ordinal) {
        append_row(out, "ordinal", "qwk", format_double(r.ordinal->qwk));
        append_row(out, "ordinal", "brier", format_double(r.ordinal->brier));
        append_row(out, "ordinal", "mae", format_double(r.ordinal->mae));
        append_row(out, "ordinal", "tiles", std::to_string(r.ordinal->tiles));
    }
    if (r.ood_event) {
        append_row(out, "ood_event", "brier", format_double(r.ood_event->brier));
        append_row(out, "ood_event", "roc_auc", format_double(r.ood_event->roc_auc));
        append_row(out, "ood_event", "ece", format_double(r.ood_event->ece));
        append_row(out, "ood_event", "event_tiles", std::to_string(r.ood_event->event_tiles));
        append_row(out, "ood_event", "control_tiles", std::to_string(r.ood_event->control_tiles));
    }
    if (r.ood_pixel) {
        append_row(out, "ood_pixel", "roc_auc", format_double(r.ood_pixel->roc_auc));
        append_row(out, "ood_pixel", "iou", format_double(r.ood_pixel->iou));
        append_row(out, "ood_pixel", "iou_macro", format_double(r.ood_pixel->iou_macro));
        append_row(out, "ood_pixel", "positives", std::to_string(r.ood_pixel->positives));
        append_row(out, "ood_pixel", "negatives", std::to_string(r.ood_pixel->negatives));
        append_row(out, "ood_pixel", "background", std::to_string(r.ood_pixel->background));
    }
    return out;
}

MetricReport parse_report(const std::string& structured_text) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(structured_text);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("report: invalid JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("schema") ||
        doc.at("schema") != std::string(kReportSchema)) {
        throw ValidationError("report: missing or unsupported schema, expected '" +
                              std::string(kReportSchema) + "'");
    }
    MetricReport r;
    if (!doc.contains("provenance") || !doc.at("provenance").is_object()) {
        throw ValidationError("report: missing 'provenance' object");
    }
    const auto& prov = doc.at("provenance");
    if (!prov.contains("tool_version") || !prov.at("tool_version").is_string() ||
        !prov.contains("config_hash") || !prov.at("config_hash").is_string()) {
        throw ValidationError("report: provenance requires tool_version and config_hash strings");
    }
    r.provenance.tool_version = prov.at("tool_version").get<std::string>();
    r.provenance.config_hash = prov.at("config_hash").get<std::string>();
    r.provenance.seed = get_count(prov, "seed", "report provenance");
    if (doc.contains("id")) {
        const auto& b = doc.at("id");
        r.id = IdBlock{get_number(b, "mse", "report id"), get_number(b, "mae", "report id"),
                       get_number(b, "ssim", "report id"), get_count(b, "tiles", "report id")};
    }
    if (doc.contains("ordinal")) {
        const auto& b = doc.at("ordinal");
        r.ordinal = OrdinalBlock{get_number(b, "qwk", "report ordinal"),
                                 get_number(b, "brier", "report ordinal"),
                                 get_number(b, "mae", "report ordinal"),
                                 get_count(b, "tiles", "report ordinal")};
    }
    if (doc.contains("ood_event")) {
        const auto& b = doc.at("ood_event");
        r.ood_event = EventBlock{get_number(b, "brier", "report ood_event"),
                                 get_number(b, "roc_auc", "report ood_event"),
                                 get_number(b, "ece", "report ood_event"),
                                 get_count(b, "event_tiles", "report ood_event"),
                                 get_count(b, "control_tiles", "report ood_event")};
    }
    if (doc.contains("ood_pixel")) {
        const auto& b = doc.at("ood_pixel");
        r.ood_pixel = PixelBlock{get_number(b, "roc_auc", "report ood_pixel"),
                                 get_number(b, "iou", "report ood_pixel"),
                                 get_number(b, "iou_macro", "report ood_pixel"),
                                 get_count(b, "positives", "report ood_pixel"),
                                 get_count(b, "negatives", "report ood_pixel"),
                                 get_count(b, "background", "report ood_pixel")};
    }
    return r;
}

void write_report_file(const MetricReport& r, ReportFormat format,
                       const std::filesystem::path& path) {
    const std::string body = emit_report(r, format);   // may throw before any I/O
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw IoError(tmp.string() + ": cannot open file for writing");
        }
        out << body;
        out.flush();
        if (!out) {
            std::error_code ec;
            std::filesystem::remove(tmp, ec);
            throw IoError(tmp.string() + ": write failed");
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw IoError(path.string() + ": atomic rename failed: " + ec.message());
    }
}

std::string emit_curves(const std::vector<CurvePoint>& points) {
    std::string out = "curve,x,y\n";
    for (const auto& p : points) {
        out += p.curve;
        out += ',';
        out += format_double(p.x);
        out += ',';
        out += format_double(p.y);
        out += '\n';
    }
    return out;
}

}  // namespace fsk
