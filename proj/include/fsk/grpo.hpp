#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace fsk {

struct OracleOutput {
    std::optional<int> digit;   // 0..9, present iff format_ok
    bool format_ok = false;
};

/// Scans a model transcript for the terminal answer block: a line reading
/// "FINAL ANSWER:" whose next non-blank line is a single digit 0-9, with
/// nothing but whitespace after it. Malformed text yields (nullopt, false).
OracleOutput parse_oracle_output(std::string_view text);

struct RewardConfig {
    double acc_weight = 0.9;
    double fmt_weight = 0.1;
    // Training label histogram for inverse-frequency class weighting;
    // absent means uniform weights.
    std::optional<std::array<std::uint64_t, 10>> class_frequencies;
};

/// Scalar rollout reward in [0,1]: acc_weight * R_acc + fmt_weight * R_fmt.
/// R_fmt is the format indicator. R_acc gives linear ordinal credit
/// 1 - |predicted - actual|/9 (zero when no digit was parsed), scaled by an
/// inverse-frequency class weight normalized to frequency-weighted mean 1
/// and clamped so the product never exceeds 1.
double reward(std::optional<int> predicted, int actual, bool format_ok,
              const RewardConfig& cfg = {});

/// Group-normalized advantages (r_i - mean)/std with population std.
/// Groups with std below 1e-8 get all-zero advantages.
std::vector<double> group_advantages(std::span<const double> rewards);

/// min(d*A, clip(d, 1-eps, 1+eps)*A) with d = exp(logp_new - logp_old).
double clipped_term(double logp_new, double logp_old, double advantage, double eps);

/// Sample-mean estimate of KL(new || ref) from per-output sequence
/// log-probabilities: mean(logp_new - logp_ref).
double kl_estimate(std::span<const double> logp_new, std::span<const double> logp_ref);

/// One sampled group: per-output rewards and sequence log-probabilities
/// under the current, sampling, and frozen reference policies.
struct RolloutGroup {
    std::vector<double> rewards;
    std::vector<double> logp_new;
    std::vector<double> logp_old;
    std::vector<double> logp_ref;
};

struct GrpoConfig {
    double clip_epsilon = 0.2;
    double kl_coeff = 0.01;
};

/// Mean over groups of the clipped surrogate minus kl_coeff times the KL
/// estimate, with advantages normalized within each group.
double grpo_objective(std::span<const RolloutGroup> groups, const GrpoConfig& cfg = {});

}  // namespace fsk
