#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace fsk {

enum class Split { train, val, test };

const char* split_name(Split s);

struct SplitCandidate {
    std::string id;
    std::int64_t geo_cell = 0;
    int risk_bin = 0;
};

struct SplitSpec {
    // Optional explicit stratum order; when empty, strata are derived from
    // the candidates and processed in sorted (geo_cell, risk_bin) order.
    std::vector<std::pair<std::int64_t, int>> strata;
    std::array<std::size_t, 3> target_counts{};   // train, val, test
    std::uint64_t seed = 0;
};

/// Deterministic stratified assignment. Each split's quota is spread over
/// strata proportionally to stratum size (largest-remainder rounding,
/// capped by remaining stratum capacity); members are drawn by a seeded
/// per-stratum shuffle. Candidates beyond the targets stay unassigned.
std::map<std::string, Split> stratified_split(
    std::span<const SplitCandidate> candidates, const SplitSpec& spec);

/// Index of the cell_deg x cell_deg geographic cell containing (lat, lon).
std::int64_t geo_cell_for(double lat, double lon, double cell_deg = 5.0);

}  // namespace fsk
