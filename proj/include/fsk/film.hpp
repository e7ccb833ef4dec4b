#pragma once

#include <span>
#include <vector>

namespace fsk {

/// Channel-major feature block: values[c*height*width + r*width + col].
struct FeatureGrid {
    int channels = 0;
    int height = 0;
    int width = 0;
    std::vector<double> values;
};

/// Feature-wise linear modulation: out[c,..] = gamma[c]*in[c,..] + beta[c].
FeatureGrid film(const FeatureGrid& features, std::span<const double> gamma,
                 std::span<const double> beta);

}  // namespace fsk
