#include "fsk/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fsk/errors.hpp"
#include "fsk/kahan.hpp"

namespace fsk {

namespace {

void require_same_shape(const Raster& a, const Raster& b, const char* op) {
    if (a.width != b.width || a.height != b.height) {
        throw ValidationError(std::string(op) + ": dimension mismatch " + std::to_string(a.width) +
                              "x" + std::to_string(a.height) + " vs " + std::to_string(b.width) +
                              "x" + std::to_string(b.height));
    }
}

bool jointly_excluded(const Raster& a, const Raster& b, std::size_t i) {
    return a.excluded(i) || b.excluded(i);
}

// Mean of |a-b|^power over jointly evaluable pixels.
double mean_pixel_error(const Raster& a, const Raster& b, bool squared, const char* op) {
    require_same_shape(a, b, op);
    KahanSum sum;
    std::size_t n = 0;
    for (std::size_t i = 0; i < a.pixel_count(); ++i) {
        if (jointly_excluded(a, b, i)) continue;
        const double d = a.values[i] - b.values[i];
        if (!std::isfinite(d)) {
            throw ValidationError(std::string(op) + ": non-finite value at pixel " + std::to_string(i));
        }
        sum.add(squared ? d * d : std::fabs(d));
        ++n;
    }
    if (n == 0) {
        throw ValidationError(std::string(op) + ": no evaluable pixels");
    }
    return sum.value() / static_cast<double>(n);
}

std::vector<double> gaussian_kernel(int window, double sigma) {
    std::vector<double> g(static_cast<std::size_t>(window));
    const double c = (window - 1) / 2.0;
    double total = 0.0;
    for (int i = 0; i < window; ++i) {
        const double d = (i - c) / sigma;
        g[static_cast<std::size_t>(i)] = std::exp(-0.5 * d * d);
        total += g[static_cast<std::size_t>(i)];
    }
    for (double& v : g) v /= total;
    return g;
}

// Valid-mode separable convolution: horizontal pass then vertical pass.
// in is h x w row-major; out is (h-window+1) x (w-window+1).
void conv_valid(const std::vector<double>& in, int w, int h, const std::vector<double>& g,
                std::vector<double>& mid, std::vector<double>& out) {
    const int k = static_cast<int>(g.size());
    const int ow = w - k + 1;
    const int oh = h - k + 1;
    mid.assign(static_cast<std::size_t>(ow) * h, 0.0);
    for (int r = 0; r < h; ++r) {
        const double* row = in.data() + static_cast<std::size_t>(r) * w;
        double* mrow = mid.data() + static_cast<std::size_t>(r) * ow;
        for (int c = 0; c < ow; ++c) {
            double acc = 0.0;
            for (int i = 0; i < k; ++i) acc += g[static_cast<std::size_t>(i)] * row[c + i];
            mrow[c] = acc;
        }
    }
    out.assign(static_cast<std::size_t>(ow) * oh, 0.0);
    for (int r = 0; r < oh; ++r) {
        double* orow = out.data() + static_cast<std::size_t>(r) * ow;
        for (int i = 0; i < k; ++i) {
            const double gi = g[static_cast<std::size_t>(i)];
            const double* mrow = mid.data() + static_cast<std::size_t>(r + i) * ow;
            for (int c = 0; c < ow; ++c) orow[c] += gi * mrow[c];
        }
    }
}

}  // namespace

double mse(const Raster& a, const Raster& b) { return mean_pixel_error(a, b, true, "mse"); }

double mae(const Raster& a, const Raster& b) { return mean_pixel_error(a, b, false, "mae"); }

double ssim(const Raster& a, const Raster& b, const SsimParams& p) {
    require_same_shape(a, b, "ssim");
    if (p.window < 3 || p.window % 2 == 0) {
        throw ValidationError("ssim: window must be odd and >= 3, got " + std::to_string(p.window));
    }
    if (!(p.sigma > 0.0) || !(p.c1 > 0.0) || !(p.c2 > 0.0)) {
        throw ValidationError("ssim: sigma, c1, c2 must be positive");
    }
    if (a.width < p.window || a.height < p.window) {
        throw ValidationError("ssim: raster " + std::to_string(a.width) + "x" +
                              std::to_string(a.height) + " smaller than window " +
                              std::to_string(p.window));
    }

    const int w = a.width, h = a.height;
    const std::size_t n = a.pixel_count();
    std::vector<double> prod_ab(n), sq_a(n), sq_b(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = a.values[i], y = b.values[i];
        if (!jointly_excluded(a, b, i) && (!std::isfinite(x) || !std::isfinite(y))) {
            throw ValidationError("ssim: non-finite value at pixel " + std::to_string(i));
        }
        prod_ab[i] = x * y;   // commutative, keeps ssim exactly symmetric
        sq_a[i] = x * x;
        sq_b[i] = y * y;
    }

    const auto g = gaussian_kernel(p.window, p.sigma);
    std::vector<double> mid, mu_a, mu_b, e_aa, e_bb, e_ab;
    conv_valid(a.values, w, h, g, mid, mu_a);
    conv_valid(b.values, w, h, g, mid, mu_b);
    conv_valid(sq_a, w, h, g, mid, e_aa);
    conv_valid(sq_b, w, h, g, mid, e_bb);
    conv_valid(prod_ab, w, h, g, mid, e_ab);

    // Windows overlapping any masked pixel are skipped (integral image of
    // the combined mask gives the per-window count).
    const bool masked = a.has_mask() || b.has_mask();
    std::vector<std::uint64_t> integral;
    if (masked) {
        integral.assign(static_cast<std::size_t>(w + 1) * (h + 1), 0);
        for (int r = 0; r < h; ++r) {
            std::uint64_t row_sum = 0;
            for (int c = 0; c < w; ++c) {
                const std::size_t i = static_cast<std::size_t>(r) * w + c;
                row_sum += (a.excluded(i) || b.excluded(i)) ? 1u : 0u;
                integral[static_cast<std::size_t>(r + 1) * (w + 1) + (c + 1)] =
                    integral[static_cast<std::size_t>(r) * (w + 1) + (c + 1)] + row_sum;
            }
        }
    }
    auto window_mask_count = [&](int r, int c) -> std::uint64_t {
        const int r1 = r + p.window, c1 = c + p.window;
        return integral[static_cast<std::size_t>(r1) * (w + 1) + c1] -
               integral[static_cast<std::size_t>(r) * (w + 1) + c1] -
               integral[static_cast<std::size_t>(r1) * (w + 1) + c] +
               integral[static_cast<std::size_t>(r) * (w + 1) + c];
    };

    const int ow = w - p.window + 1;
    const int oh = h - p.window + 1;
    KahanSum sum;
    std::size_t windows = 0;
    for (int r = 0; r < oh; ++r) {
        for (int c = 0; c < ow; ++c) {
            if (masked && window_mask_count(r, c) > 0) continue;
            const std::size_t i = static_cast<std::size_t>(r) * ow + c;
            const double ma = mu_a[i], mb = mu_b[i];
            const double va = e_aa[i] - ma * ma;
            const double vb = e_bb[i] - mb * mb;
            const double cov = e_ab[i] - ma * mb;
            const double local = ((2.0 * ma * mb + p.c1) * (2.0 * cov + p.c2)) /
                                 ((ma * ma + mb * mb + p.c1) * (va + vb + p.c2));
            sum.add(local);
            ++windows;
        }
    }
    if (windows == 0) {
        throw ValidationError("ssim: no fully valid windows (all positions overlap masked pixels)");
    }
    return sum.value() / static_cast<double>(windows);
}

double brier(std::span<const double> probs, std::span<const int> labels) {
    if (probs.size() != labels.size()) {
        throw ValidationError("brier: " + std::to_string(probs.size()) + " probabilities vs " +
                              std::to_string(labels.size()) + " labels");
    }
    if (probs.empty()) {
        throw ValidationError("brier: empty input");
    }
    KahanSum sum;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        if (!(probs[i] >= 0.0 && probs[i] <= 1.0)) {
            throw ValidationError("brier: probability " + std::to_string(probs[i]) + " at index " +
                                  std::to_string(i) + " outside [0,1]");
        }
        if (labels[i] != 0 && labels[i] != 1) {
            throw ValidationError("brier: label at index " + std::to_string(i) + " not in {0,1}");
        }
        const double d = probs[i] - labels[i];
        sum.add(d * d);
    }
    return sum.value() / static_cast<double>(probs.size());
}

double roc_auc(std::span<const double> positives, std::span<const double> negatives) {
    if (positives.empty() || negatives.empty()) {
        throw ValidationError(std::string("roc_auc: empty ") +
                              (positives.empty() ? "positive" : "negative") + " score set");
    }
    struct Scored {
        double score;
        int label;
    };
    std::vector<Scored> all;
    all.reserve(positives.size() + negatives.size());
    for (double s : positives) all.push_back({s, 1});
    for (double s : negatives) all.push_back({s, 0});
    for (const auto& e : all) {
        if (!std::isfinite(e.score)) {
            throw ValidationError("roc_auc: non-finite score");
        }
    }
    std::sort(all.begin(), all.end(),
              [](const Scored& x, const Scored& y) { return x.score < y.score; });

    // Midranks give tied pairs half credit.
    const std::size_t n = all.size();
    double rank_sum_pos = 0.0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && all[j].score == all[i].score) ++j;
        const double midrank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        for (std::size_t k = i; k < j; ++k) {
            if (all[k].label == 1) rank_sum_pos += midrank;
        }
        i = j;
    }
    const double n1 = static_cast<double>(positives.size());
    const double n0 = static_cast<double>(negatives.size());
    return (rank_sum_pos - n1 * (n1 + 1.0) / 2.0) / (n1 * n0);
}

double ece(std::span<const double> probs, std::span<const int> labels, int bins) {
    if (probs.size() != labels.size()) {
        throw ValidationError("ece: " + std::to_string(probs.size()) + " probabilities vs " +
                              std::to_string(labels.size()) + " labels");
    }
    if (probs.empty()) {
        throw ValidationError("ece: empty input");
    }
    if (bins < 1) {
        throw ValidationError("ece: bins must be >= 1, got " + std::to_string(bins));
    }
    std::vector<KahanSum> conf(static_cast<std::size_t>(bins));
    std::vector<std::size_t> count(static_cast<std::size_t>(bins), 0);
    std::vector<std::size_t> hits(static_cast<std::size_t>(bins), 0);
    for (std::size_t i = 0; i < probs.size(); ++i) {
        const double p = probs[i];
        if (!(p >= 0.0 && p <= 1.0)) {
            throw ValidationError("ece: probability " + std::to_string(p) + " at index " +
                                  std::to_string(i) + " outside [0,1]");
        }
        if (labels[i] != 0 && labels[i] != 1) {
            throw ValidationError("ece: label at index " + std::to_string(i) + " not in {0,1}");
        }
        int b = static_cast<int>(p * bins);   // final bin right-closed
        if (b >= bins) b = bins - 1;
        conf[static_cast<std::size_t>(b)].add(p);
        count[static_cast<std::size_t>(b)] += 1;
        hits[static_cast<std::size_t>(b)] += static_cast<std::size_t>(labels[i]);
    }
    KahanSum total;
    for (int b = 0; b < bins; ++b) {
        const std::size_t nb = count[static_cast<std::size_t>(b)];
        if (nb == 0) continue;
        const double mean_conf = conf[static_cast<std::size_t>(b)].value() / static_cast<double>(nb);
        const double freq = static_cast<double>(hits[static_cast<std::size_t>(b)]) /
                            static_cast<double>(nb);
        total.add(static_cast<double>(nb) * std::fabs(freq - mean_conf));
    }
    return total.value() / static_cast<double>(probs.size());
}

IouCounts iou_counts(const Raster& pred, const BinaryMask& truth, double threshold) {
    if (pred.width != truth.width || pred.height != truth.height) {
        throw ValidationError("iou: prediction " + std::to_string(pred.width) + "x" +
                              std::to_string(pred.height) + " vs mask " +
                              std::to_string(truth.width) + "x" + std::to_string(truth.height));
    }
    IouCounts c;
    for (std::size_t i = 0; i < pred.pixel_count(); ++i) {
        if (pred.excluded(i)) continue;
        if (!std::isfinite(pred.values[i])) {
            throw ValidationError("iou: non-finite prediction at pixel " + std::to_string(i));
        }
        const bool p = pred.values[i] >= threshold;
        const bool t = truth.bits[i] != 0;
        if (p && t) ++c.tp;
        else if (p && !t) ++c.fp;
        else if (!p && t) ++c.fn;
    }
    return c;
}

double iou_from_counts(const IouCounts& c) {
    const std::uint64_t denom = c.tp + c.fp + c.fn;
    if (denom == 0) return 1.0;   // both sets empty: vacuous perfection
    return static_cast<double>(c.tp) / static_cast<double>(denom);
}

double iou(const Raster& pred, const BinaryMask& truth, double threshold) {
    return iou_from_counts(iou_counts(pred, truth, threshold));
}

double qwk(std::span<const OrdinalPair> pairs, int k) {
    if (pairs.empty()) {
        throw ValidationError("qwk: empty pair list");
    }
    if (k < 2) {
        throw ValidationError("qwk: need at least 2 classes, got " + std::to_string(k));
    }
    std::vector<std::uint64_t> observed(static_cast<std::size_t>(k) * k, 0);
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const auto& p = pairs[i];
        if (p.predicted < 0 || p.predicted >= k || p.actual < 0 || p.actual >= k) {
            throw ValidationError("qwk: pair " + std::to_string(i) + " (" +
                                  std::to_string(p.predicted) + "," + std::to_string(p.actual) +
                                  ") outside 0.." + std::to_string(k - 1));
        }
        observed[static_cast<std::size_t>(p.predicted) * k + p.actual] += 1;
    }
    std::vector<std::uint64_t> row(static_cast<std::size_t>(k), 0), col(static_cast<std::size_t>(k), 0);
    for (int i = 0; i < k; ++i) {
        for (int j = 0; j < k; ++j) {
            const std::uint64_t o = observed[static_cast<std::size_t>(i) * k + j];
            row[static_cast<std::size_t>(i)] += o;
            col[static_cast<std::size_t>(j)] += o;
        }
    }
    // kappa = 1 - sum w*O / sum w*E with E_ij = row_i*col_j/N; computed as
    // 1 - N*sum(w*O)/sum(w*row*col) to stay in integers.
    double num = 0.0, den = 0.0;
    for (int i = 0; i < k; ++i) {
        for (int j = 0; j < k; ++j) {
            const double wgt = static_cast<double>((i - j)) * (i - j);
            num += wgt * static_cast<double>(observed[static_cast<std::size_t>(i) * k + j]);
            den += wgt * static_cast<double>(row[static_cast<std::size_t>(i)]) *
                   static_cast<double>(col[static_cast<std::size_t>(j)]);
        }
    }
    if (den == 0.0) {
        if (num == 0.0) return 1.0;   // all mass on one diagonal cell
        throw ValidationError("qwk: zero expected disagreement with off-diagonal observations");
    }
    return 1.0 - num * static_cast<double>(pairs.size()) / den;
}

PixelEvalSet assemble_pixel_eval(std::span<const PixelEvalTile> tiles) {
    PixelEvalSet out;
    for (const auto& t : tiles) {
        if (t.prediction == nullptr) {
            throw ValidationError("assemble_pixel_eval: tile '" + t.tile_id + "' has no prediction");
        }
        const Raster& pred = *t.prediction;
        validate_raster(pred, "assemble_pixel_eval: tile '" + t.tile_id + "' prediction");
        if (t.is_event) {
            if (t.mask == nullptr) {
                throw ValidationError("assemble_pixel_eval: event tile '" + t.tile_id +
                                      "' missing mask");
            }
            if (t.mask->width != pred.width || t.mask->height != pred.height) {
                throw ValidationError("assemble_pixel_eval: tile '" + t.tile_id +
                                      "': mask dimensions do not match prediction");
            }
            for (std::size_t i = 0; i < pred.pixel_count(); ++i) {
                if (pred.excluded(i)) continue;
                if (t.mask->bits[i] != 0) {
                    out.positive_scores.push_back(pred.values[i]);
                } else {
                    out.background_scores.push_back(pred.values[i]);
                }
            }
        } else {
            if (t.mask != nullptr) {
                throw ValidationError("assemble_pixel_eval: control tile '" + t.tile_id +
                                      "' must not carry a mask");
            }
            for (std::size_t i = 0; i < pred.pixel_count(); ++i) {
                if (pred.excluded(i)) continue;
                out.negative_scores.push_back(pred.values[i]);
            }
        }
    }
    return out;
}

}  // namespace fsk
