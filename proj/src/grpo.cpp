#include "fsk/grpo.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

#include "fsk/errors.hpp"
#include "fsk/kahan.hpp"

namespace fsk {

namespace {

constexpr double kZeroVarianceStd = 1e-8;

std::string_view trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

void require_finite(std::span<const double> xs, const char* op) {
    for (double x : xs) {
        if (!std::isfinite(x)) {
            throw ValidationError(std::string(op) + ": non-finite input");
        }
    }
}

double mean_of(std::span<const double> xs) {
    KahanSum s;
    for (double x : xs) s.add(x);
    return s.value() / static_cast<double>(xs.size());
}

}  // namespace

OracleOutput parse_oracle_output(std::string_view text) {
    // Split into lines, dropping trailing blank ones; the last non-blank
    // line must be a lone digit and the one before it the answer marker.
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t nl = text.find('\n', start);
        if (nl == std::string_view::npos) {
            lines.push_back(text.substr(start));
            break;
        }
        lines.push_back(text.substr(start, nl - start));
        start = nl + 1;
    }
    int last = static_cast<int>(lines.size()) - 1;
    while (last >= 0 && trim(lines[static_cast<std::size_t>(last)]).empty()) --last;
    if (last < 1) return {std::nullopt, false};

    const std::string_view digit_line = trim(lines[static_cast<std::size_t>(last)]);
    if (digit_line.size() != 1 || digit_line[0] < '0' || digit_line[0] > '9') {
        return {std::nullopt, false};
    }
    int marker = last - 1;
    while (marker >= 0 && trim(lines[static_cast<std::size_t>(marker)]).empty()) --marker;
    if (marker < 0 || trim(lines[static_cast<std::size_t>(marker)]) != "FINAL ANSWER:") {
        return {std::nullopt, false};
    }
    return {digit_line[0] - '0', true};
}

double reward(std::optional<int> predicted, int actual, bool format_ok,
              const RewardConfig& cfg) {
    if (actual < 0 || actual > 9) {
        throw ValidationError("reward: actual label " + std::to_string(actual) + " outside 0..9");
    }
    if (predicted && (*predicted < 0 || *predicted > 9)) {
        throw ValidationError("reward: predicted label " + std::to_string(*predicted) +
                              " outside 0..9");
    }
    if (cfg.acc_weight < 0.0 || cfg.fmt_weight < 0.0 ||
        std::fabs(cfg.acc_weight + cfg.fmt_weight - 1.0) > 1e-12) {
        throw ValidationError("reward: component weights must be non-negative and sum to 1");
    }

    double acc = 0.0;
    if (predicted) {
        double class_weight = 1.0;
        if (cfg.class_frequencies) {
            const auto& freq = *cfg.class_frequencies;
            std::uint64_t total = 0;
            for (std::size_t c = 0; c < freq.size(); ++c) {
                if (freq[c] == 0) {
                    throw ValidationError("reward: class frequency for label " + std::to_string(c) +
                                          " must be positive");
                }
                total += freq[c];
            }
            // Inverse-frequency weight, normalized so the frequency-weighted
            // mean over classes is 1.
            class_weight = static_cast<double>(total) /
                           (10.0 * static_cast<double>(freq[static_cast<std::size_t>(actual)]));
        }
        const double linear = 1.0 - std::abs(*predicted - actual) / 9.0;
        acc = std::min(1.0, class_weight * linear);
    }
    const double fmt = format_ok ? 1.0 : 0.0;
    return cfg.acc_weight * acc + cfg.fmt_weight * fmt;
}

std::vector<double> group_advantages(std::span<const double> rewards) {
    if (rewards.size() < 2) {
        throw ValidationError("group_advantages: need at least 2 rewards, got " +
                              std::to_string(rewards.size()));
    }
    require_finite(rewards, "group_advantages");
    const double mean = mean_of(rewards);
    KahanSum var;
    for (double r : rewards) {
        const double d = r - mean;
        var.add(d * d);
    }
    const double std_dev = std::sqrt(var.value() / static_cast<double>(rewards.size()));
    std::vector<double> out(rewards.size(), 0.0);
    if (std_dev < kZeroVarianceStd) return out;   // uniform group: no signal
    for (std::size_t i = 0; i < rewards.size(); ++i) {
        out[i] = (rewards[i] - mean) / std_dev;
    }
    return out;
}

double clipped_term(double logp_new, double logp_old, double advantage, double eps) {
    if (!(eps > 0.0 && eps < 1.0)) {
        throw ValidationError("clipped_term: eps must be in (0,1), got " + std::to_string(eps));
    }
    if (!std::isfinite(logp_new) || !std::isfinite(logp_old) || !std::isfinite(advantage)) {
        throw ValidationError("clipped_term: non-finite input");
    }
    const double ratio = std::exp(logp_new - logp_old);
    const double clipped = std::clamp(ratio, 1.0 - eps, 1.0 + eps);
    return std::min(ratio * advantage, clipped * advantage);
}

double kl_estimate(std::span<const double> logp_new, std::span<const double> logp_ref) {
    if (logp_new.size() != logp_ref.size()) {
        throw ValidationError("kl_estimate: " + std::to_string(logp_new.size()) + " vs " +
                              std::to_string(logp_ref.size()) + " log-probabilities");
    }
    if (logp_new.empty()) {
        throw ValidationError("kl_estimate: empty input");
    }
    require_finite(logp_new, "kl_estimate");
    require_finite(logp_ref, "kl_estimate");
    KahanSum s;
    for (std::size_t i = 0; i < logp_new.size(); ++i) {
        s.add(logp_new[i] - logp_ref[i]);
    }
    return s.value() / static_cast<double>(logp_new.size());
}

double grpo_objective(std::span<const RolloutGroup> groups, const GrpoConfig& cfg) {
    if (groups.empty()) {
        throw ValidationError("grpo_objective: empty group list");
    }
    if (cfg.kl_coeff < 0.0) {
        throw ValidationError("grpo_objective: kl_coeff must be >= 0");
    }
    KahanSum total;
    for (std::size_t gi = 0; gi < groups.size(); ++gi) {
        const auto& g = groups[gi];
        const std::size_t n = g.rewards.size();
        if (n < 2 || g.logp_new.size() != n || g.logp_old.size() != n || g.logp_ref.size() != n) {
            throw ValidationError("grpo_objective: group " + std::to_string(gi) +
                                  " needs >= 2 rollouts with matching reward/log-prob lengths");
        }
        const auto adv = group_advantages(g.rewards);
        KahanSum surrogate;
        for (std::size_t i = 0; i < n; ++i) {
            surrogate.add(clipped_term(g.logp_new[i], g.logp_old[i], adv[i], cfg.clip_epsilon));
        }
        const double kl = kl_estimate(g.logp_new, g.logp_ref);
        total.add(surrogate.value() / static_cast<double>(n) - cfg.kl_coeff * kl);
    }
    return total.value() / static_cast<double>(groups.size());
}

}  // namespace fsk
