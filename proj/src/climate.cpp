#include "fsk/climate.hpp"

#include <cmath>

#include "fsk/errors.hpp"

namespace fsk {

namespace {

const char* kVariableNames[kClimateVariables] = {
    "temperature", "precipitation", "humidity", "wind_speed", "wind_direction",
};

const std::optional<double>& variable_of(const MonthlyClimate& m, int v) {
    switch (v) {
        case 0: return m.temperature;
        case 1: return m.precipitation;
        case 2: return m.humidity;
        case 3: return m.wind_speed;
        default: return m.wind_direction;
    }
}

}  // namespace

void validate_climate_vector(const ClimateVector& v, const std::string& context) {
    for (int i = 0; i < kClimateDim; ++i) {
        if (!std::isfinite(v.values[static_cast<std::size_t>(i)])) {
            throw ValidationError(context + ": non-finite value at index " + std::to_string(i));
        }
    }
    for (int m = 0; m < kClimateMonths; ++m) {
        const double wd = v.values[static_cast<std::size_t>(4 * kClimateMonths + m)];
        if (wd < 0.0 || wd >= 360.0) {
            throw ValidationError(context + ": wind direction " + std::to_string(wd) +
                                  " for month " + std::to_string(m + 1) + " outside [0,360)");
        }
    }
}

ClimateVector build_climate_vector(std::span<const MonthlyClimate> monthly) {
    const MonthlyClimate* by_month[kClimateMonths] = {};
    for (const auto& rec : monthly) {
        if (rec.month < 1 || rec.month > 12) {
            throw ValidationError("build_climate_vector: month " + std::to_string(rec.month) +
                                  " outside 1..12");
        }
        if (by_month[rec.month - 1] != nullptr) {
            throw ValidationError("build_climate_vector: month " + std::to_string(rec.month) +
                                  " appears more than once");
        }
        by_month[rec.month - 1] = &rec;
    }
    for (int m = 0; m < kClimateMonths; ++m) {
        if (by_month[m] == nullptr) {
            throw ValidationError("build_climate_vector: month " + std::to_string(m + 1) +
                                  " missing");
        }
    }

    ClimateVector out;
    for (int v = 0; v < kClimateVariables; ++v) {
        for (int m = 0; m < kClimateMonths; ++m) {
            const auto& field = variable_of(*by_month[m], v);
            if (!field.has_value()) {
                throw ValidationError(std::string("build_climate_vector: month ") +
                                      std::to_string(m + 1) + ": " + kVariableNames[v] +
                                      " missing");
            }
            if (!std::isfinite(*field)) {
                throw ValidationError(std::string("build_climate_vector: month ") +
                                      std::to_string(m + 1) + ": " + kVariableNames[v] +
                                      " is not finite");
            }
            out.values[static_cast<std::size_t>(v * kClimateMonths + m)] = *field;
        }
    }
    validate_climate_vector(out, "build_climate_vector");
    return out;
}

}  // namespace fsk
