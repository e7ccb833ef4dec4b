#include "fsk/interpret.hpp"

#include <cmath>
#include <string>

#include "fsk/errors.hpp"
#include "fsk/kahan.hpp"

namespace fsk {

namespace {

void validate_pair(const PairedPrediction& pair, PairKind expected, const char* op) {
    if (pair.kind != expected) {
        throw ValidationError(std::string(op) + ": pair kind does not match the metric");
    }
    validate_raster(pair.original, std::string(op) + ": original");
    validate_raster(pair.modified, std::string(op) + ": modified");
    if (pair.original.width != pair.modified.width ||
        pair.original.height != pair.modified.height) {
        throw ValidationError(std::string(op) + ": original and modified dimensions differ");
    }
    for (std::size_t i = 0; i < pair.original.pixel_count(); ++i) {
        const bool skip = pair.original.excluded(i) || pair.modified.excluded(i);
        if (skip) continue;
        if (pair.original.values[i] < 0.0 || pair.original.values[i] > 1.0 ||
            pair.modified.values[i] < 0.0 || pair.modified.values[i] > 1.0) {
            throw ValidationError(std::string(op) + ": value outside [0,1] at pixel " +
                                  std::to_string(i));
        }
    }
}

}  // namespace

double fidelity(const PairedPrediction& pair) {
    validate_pair(pair, PairKind::perturbed, "fidelity");
    KahanSum sum;
    std::size_t n = 0;
    for (std::size_t i = 0; i < pair.original.pixel_count(); ++i) {
        if (pair.original.excluded(i) || pair.modified.excluded(i)) continue;
        const double y = pair.original.values[i];
        const double y_target = y < 0.5 ? 1.0 : 0.0;
        const double denom = y_target - y;
        if (denom == 0.0) continue;   // pixel already at its shift target
        sum.add((pair.modified.values[i] - y) / denom);
        ++n;
    }
    if (n == 0) {
        throw ValidationError("fidelity: no evaluable pixels");
    }
    return sum.value() / static_cast<double>(n);
}

double mean_fidelity(std::span<const PairedPrediction> pairs) {
    if (pairs.empty()) {
        throw ValidationError("mean_fidelity: empty pair list");
    }
    KahanSum sum;
    for (const auto& p : pairs) sum.add(fidelity(p));
    return sum.value() / static_cast<double>(pairs.size());
}

double consistency(const PairedPrediction& pair) {
    validate_pair(pair, PairKind::paraphrased, "consistency");
    KahanSum sum;
    std::size_t n = 0;
    for (std::size_t i = 0; i < pair.original.pixel_count(); ++i) {
        if (pair.original.excluded(i) || pair.modified.excluded(i)) continue;
        const double y = pair.original.values[i];
        const double yp = pair.modified.values[i];
        double d;
        if (yp < y) d = y;
        else if (yp > y) d = 1.0 - y;
        else d = 1.0;
        sum.add(std::fabs(yp - y) / d);
        ++n;
    }
    if (n == 0) {
        throw ValidationError("consistency: no evaluable pixels");
    }
    return 1.0 - sum.value() / static_cast<double>(n);
}

}  // namespace fsk
