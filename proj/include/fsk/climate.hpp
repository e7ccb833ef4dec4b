#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>

namespace fsk {

inline constexpr int kClimateVariables = 5;
inline constexpr int kClimateMonths = 12;
inline constexpr int kClimateDim = kClimateVariables * kClimateMonths;

struct MonthlyClimate {
    int month = 0;  // 1..12
    std::optional<double> temperature;
    std::optional<double> precipitation;
    std::optional<double> humidity;
    std::optional<double> wind_speed;
    std::optional<double> wind_direction;   // degrees, [0, 360)
};

/// 60 values in variable-major order: temperature x12, precipitation x12,
/// humidity x12, wind speed x12, wind direction x12 (months ascending).
struct ClimateVector {
    std::array<double, kClimateDim> values{};
};

void validate_climate_vector(const ClimateVector& v,
                             const std::string& context = "climate vector");

/// Assembles the vector from 12 monthly records. Missing months or
/// variables raise a ValidationError naming the gap.
ClimateVector build_climate_vector(std::span<const MonthlyClimate> monthly);

}  // namespace fsk
