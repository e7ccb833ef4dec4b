#pragma once

#include <string_view>

namespace fsk {

inline constexpr std::string_view kToolVersion = "0.1.0";
inline constexpr std::string_view kContainerMagic = "fskraster 1";
inline constexpr std::string_view kManifestSchema = "fsk.manifest.v1";
inline constexpr std::string_view kReportSchema = "fsk.report.v1";

}  // namespace fsk
