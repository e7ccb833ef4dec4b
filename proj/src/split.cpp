#include "fsk/split.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <unordered_set>

#include "fsk/errors.hpp"

namespace fsk {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Unbiased-enough bounded draw that is identical on every platform
// (std::uniform_int_distribution is implementation-defined).
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t n) {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(rng()) * n) >> 64);
}

void seeded_shuffle(std::vector<std::size_t>& items, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    for (std::size_t i = items.size(); i > 1; --i) {
        std::swap(items[i - 1], items[bounded(rng, i)]);
    }
}

struct Stratum {
    std::pair<std::int64_t, int> key;
    std::vector<std::size_t> members;   // candidate indexes
    std::size_t remaining = 0;
};

// Largest-remainder apportionment of `target` over strata weighted by their
// full sizes, capped by remaining capacity. Deterministic tie-breaks.
std::vector<std::size_t> apportion(const std::vector<Stratum>& strata, std::size_t total,
                                   std::size_t target) {
    const std::size_t g = strata.size();
    std::vector<std::size_t> quota(g, 0);
    std::vector<double> frac(g, 0.0);
    std::size_t assigned = 0;
    for (std::size_t i = 0; i < g; ++i) {
        const double ideal = static_cast<double>(target) * strata[i].members.size() /
                             static_cast<double>(total);
        std::size_t base = static_cast<std::size_t>(std::floor(ideal));
        frac[i] = ideal - std::floor(ideal);
        base = std::min(base, strata[i].remaining);
        quota[i] = base;
        assigned += base;
    }
    std::vector<std::size_t> order(g);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return frac[a] > frac[b]; });
    while (assigned < target) {
        bool progressed = false;
        for (std::size_t i : order) {
            if (assigned == target) break;
            if (quota[i] < strata[i].remaining) {
                ++quota[i];
                ++assigned;
                progressed = true;
            }
        }
        if (!progressed) {
            throw ValidationError("stratified_split: target counts exceed available candidates");
        }
    }
    return quota;
}

}  // namespace

const char* split_name(Split s) {
    switch (s) {
        case Split::train: return "train";
        case Split::val: return "val";
        case Split::test: return "test";
    }
    return "?";
}

std::int64_t geo_cell_for(double lat, double lon, double cell_deg) {
    if (!(cell_deg > 0.0)) {
        throw ValidationError("geo_cell_for: cell size must be positive");
    }
    const auto row = static_cast<std::int64_t>(std::floor((lat + 90.0) / cell_deg));
    const auto col = static_cast<std::int64_t>(std::floor((lon + 180.0) / cell_deg));
    const auto cols = static_cast<std::int64_t>(std::ceil(360.0 / cell_deg));
    return row * cols + col;
}

std::map<std::string, Split> stratified_split(std::span<const SplitCandidate> candidates,
                                              const SplitSpec& spec) {
    if (candidates.empty()) {
        throw ValidationError("stratified_split: empty candidate list");
    }
    std::unordered_set<std::string> seen;
    for (const auto& c : candidates) {
        if (!seen.insert(c.id).second) {
            throw ValidationError("stratified_split: duplicate candidate id '" + c.id + "'");
        }
    }

    // Stratum order: explicit spec order when given, else sorted keys.
    std::map<std::pair<std::int64_t, int>, std::vector<std::size_t>> grouped;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        grouped[{candidates[i].geo_cell, candidates[i].risk_bin}].push_back(i);
    }
    std::vector<Stratum> strata;
    if (spec.strata.empty()) {
        for (auto& [key, members] : grouped) {
            strata.push_back({key, std::move(members), 0});
        }
    } else {
        std::set<std::pair<std::int64_t, int>> listed(spec.strata.begin(), spec.strata.end());
        for (const auto& [key, members] : grouped) {
            if (!listed.count(key)) {
                throw ValidationError("stratified_split: candidate stratum (cell " +
                                      std::to_string(key.first) + ", bin " +
                                      std::to_string(key.second) + ") not in the declared strata");
            }
        }
        for (const auto& key : spec.strata) {
            auto it = grouped.find(key);
            if (it != grouped.end()) strata.push_back({key, std::move(it->second), 0});
        }
    }
    for (auto& s : strata) s.remaining = s.members.size();

    const std::size_t total = candidates.size();
    const std::size_t wanted = spec.target_counts[0] + spec.target_counts[1] + spec.target_counts[2];
    if (wanted > total) {
        throw ValidationError("stratified_split: target counts sum to " + std::to_string(wanted) +
                              " but only " + std::to_string(total) + " candidates exist");
    }

    // Per-stratum seeded shuffle; quotas for the three splits are consumed
    // from the front of the shuffled order.
    for (std::size_t g = 0; g < strata.size(); ++g) {
        seeded_shuffle(strata[g].members, splitmix64(spec.seed ^ (0x9E3779B97F4A7C15ULL * (g + 1))));
    }

    std::map<std::string, Split> assignment;
    std::vector<std::size_t> cursor(strata.size(), 0);
    for (int s = 0; s < 3; ++s) {
        const auto quota = apportion(strata, total, spec.target_counts[static_cast<std::size_t>(s)]);
        for (std::size_t g = 0; g < strata.size(); ++g) {
            for (std::size_t k = 0; k < quota[g]; ++k) {
                assignment[candidates[strata[g].members[cursor[g]++]].id] = static_cast<Split>(s);
            }
            strata[g].remaining -= quota[g];
        }
    }
    return assignment;
}

}  // namespace fsk
