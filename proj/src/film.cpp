#include "fsk/film.hpp"

#include <string>

#include "fsk/errors.hpp"

namespace fsk {

FeatureGrid film(const FeatureGrid& features, std::span<const double> gamma,
                 std::span<const double> beta) {
    if (features.channels <= 0 || features.height <= 0 || features.width <= 0) {
        throw ValidationError("film: grid dimensions must be positive");
    }
    const std::size_t plane = static_cast<std::size_t>(features.height) * features.width;
    if (features.values.size() != plane * static_cast<std::size_t>(features.channels)) {
        throw ValidationError("film: values length " + std::to_string(features.values.size()) +
                              " does not match " + std::to_string(features.channels) + "x" +
                              std::to_string(features.height) + "x" + std::to_string(features.width));
    }
    if (gamma.size() != static_cast<std::size_t>(features.channels) ||
        beta.size() != static_cast<std::size_t>(features.channels)) {
        throw ValidationError("film: gamma/beta lengths (" + std::to_string(gamma.size()) + "," +
                              std::to_string(beta.size()) + ") do not match channel count " +
                              std::to_string(features.channels));
    }
    FeatureGrid out = features;
    for (int c = 0; c < features.channels; ++c) {
        const double g = gamma[static_cast<std::size_t>(c)];
        const double b = beta[static_cast<std::size_t>(c)];
        double* p = out.values.data() + static_cast<std::size_t>(c) * plane;
        for (std::size_t i = 0; i < plane; ++i) {
            p[i] = g * p[i] + b;
        }
    }
    return out;
}

}  // namespace fsk
