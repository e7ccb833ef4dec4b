#pragma once

namespace fsk {

// Compensated (Kahan) accumulator. Aggregations that must be bit-stable
// across worker counts reduce through this in a fixed order.
class KahanSum {
public:
    void add(double x) {
        double y = x - c_;
        double t = s_ + y;
        c_ = (t - s_) - y;
        s_ = t;
    }

    double value() const { return s_; }

private:
    double s_ = 0.0;
    double c_ = 0.0;
};

}  // namespace fsk
