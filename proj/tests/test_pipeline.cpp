#include <doctest.h>

#include <map>
#include <set>

#include "fsk/climate.hpp"
#include "fsk/errors.hpp"
#include "fsk/split.hpp"
#include "fsk/tiling.hpp"
#include "testutil.hpp"

using namespace fsk;

namespace {

Raster numbered_raster(int w, int h) {
    std::vector<double> v(static_cast<std::size_t>(w) * h);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<double>(i);
    return make_raster(w, h, std::move(v));
}

std::vector<SplitCandidate> uniform_candidates(int n, std::int64_t cell, int bin,
                                               const std::string& prefix) {
    std::vector<SplitCandidate> out;
    for (int i = 0; i < n; ++i) {
        out.push_back({prefix + std::to_string(i), cell, bin});
    }
    return out;
}

MonthlyClimate full_month(int month, double base) {
    MonthlyClimate m;
    m.month = month;
    m.temperature = base + 1;
    m.precipitation = base + 2;
    m.humidity = base + 3;
    m.wind_speed = base + 4;
    m.wind_direction = 90.0;
    return m;
}

}  // namespace

TEST_CASE("tile_raster exact division") {
    const auto tiles = tile_raster(numbered_raster(682, 682), 341, "p");
    CHECK(tiles.size() == 4);
    CHECK(tiles[0].first.origin_row == 0);
    CHECK(tiles[3].first.origin_row == 341);
    CHECK(tiles[3].first.origin_col == 341);
}

TEST_CASE("tile_raster drops partial edge tiles") {
    CHECK(tile_raster(numbered_raster(683, 683), 341).size() == 4);
}

TEST_CASE("tile_raster identity tile") {
    const Raster parent = numbered_raster(341, 341);
    const auto tiles = tile_raster(parent, 341);
    REQUIRE(tiles.size() == 1);
    CHECK(tiles[0].second.values == parent.values);
}

TEST_CASE("tile_raster rejects oversized tiles") {
    CHECK_THROWS_AS(tile_raster(numbered_raster(100, 100), 101), ValidationError);
}

TEST_CASE("tiles are disjoint and copy the parent exactly") {
    const Raster parent = numbered_raster(10, 7);
    const auto tiles = tile_raster(parent, 3, "p");
    std::set<std::pair<int, int>> covered;
    for (const auto& [geom, tile] : tiles) {
        for (int r = 0; r < geom.size; ++r) {
            for (int c = 0; c < geom.size; ++c) {
                CHECK(tile.at(r, c) == parent.at(geom.origin_row + r, geom.origin_col + c));
                CHECK(covered.insert({geom.origin_row + r, geom.origin_col + c}).second);
            }
        }
    }
}

TEST_CASE("crop_from_supertile corners reproduce the original tiles") {
    const Raster super = numbered_raster(8, 8);
    const auto originals = tile_raster(super, 4);
    REQUIRE(originals.size() == 4);
    CHECK(crop_from_supertile(super, 0, 0, 4).values == originals[0].second.values);
    CHECK(crop_from_supertile(super, 0, 4, 4).values == originals[1].second.values);
    CHECK(crop_from_supertile(super, 4, 0, 4).values == originals[2].second.values);
    CHECK(crop_from_supertile(super, 4, 4, 4).values == originals[3].second.values);
}

TEST_CASE("crop_from_supertile interior crop matches a copy loop") {
    auto g = testutil::rng(31);
    const Raster super = testutil::random_raster(g, 10, 10, -1.0, 1.0);
    const Raster crop = crop_from_supertile(super, 1, 0, 5);
    for (int r = 0; r < 5; ++r) {
        for (int c = 0; c < 5; ++c) {
            CHECK(crop.at(r, c) == super.at(r + 1, c));
        }
    }
}

TEST_CASE("crop_from_supertile rejects bad offsets and shapes") {
    const Raster super = numbered_raster(8, 8);
    CHECK_THROWS_AS(crop_from_supertile(super, 5, 0, 4), ValidationError);
    CHECK_THROWS_AS(crop_from_supertile(super, -1, 0, 4), ValidationError);
    CHECK_THROWS_AS(crop_from_supertile(numbered_raster(7, 8), 0, 0, 4), ValidationError);
}

TEST_CASE("stratified_split single stratum exact counts") {
    const auto candidates = uniform_candidates(100, 0, 3, "c");
    SplitSpec spec;
    spec.target_counts = {80, 10, 10};
    spec.seed = 7;
    const auto assignment = stratified_split(candidates, spec);
    std::map<Split, int> counts;
    for (const auto& [id, s] : assignment) counts[s]++;
    CHECK(assignment.size() == 100);
    CHECK(counts[Split::train] == 80);
    CHECK(counts[Split::val] == 10);
    CHECK(counts[Split::test] == 10);
}

TEST_CASE("stratified_split is deterministic for a fixed seed") {
    const auto candidates = uniform_candidates(50, 0, 1, "a");
    SplitSpec spec;
    spec.target_counts = {30, 10, 5};
    spec.seed = 99;
    CHECK(stratified_split(candidates, spec) == stratified_split(candidates, spec));
    spec.seed = 100;
    CHECK(stratified_split(candidates, spec) !=
          stratified_split(candidates, SplitSpec{{}, {30, 10, 5}, 99}));
}

TEST_CASE("stratified_split draws proportionally from equal strata") {
    auto candidates = uniform_candidates(50, 0, 1, "a");
    const auto more = uniform_candidates(50, 1, 1, "b");
    candidates.insert(candidates.end(), more.begin(), more.end());
    SplitSpec spec;
    spec.target_counts = {50, 0, 0};
    spec.seed = 5;
    const auto assignment = stratified_split(candidates, spec);
    int from_a = 0, from_b = 0;
    for (const auto& [id, s] : assignment) {
        (id[0] == 'a' ? from_a : from_b)++;
    }
    CHECK(from_a == 25);
    CHECK(from_b == 25);
}

TEST_CASE("stratified_split partitions: disjoint splits, each id once") {
    auto g = testutil::rng(32);
    std::vector<SplitCandidate> candidates;
    for (int i = 0; i < 300; ++i) {
        candidates.push_back({"x" + std::to_string(i),
                              static_cast<std::int64_t>(g() % 5),
                              static_cast<int>(g() % 10)});
    }
    SplitSpec spec;
    spec.target_counts = {200, 50, 30};
    spec.seed = 3;
    const auto assignment = stratified_split(candidates, spec);
    CHECK(assignment.size() == 280);
    std::map<Split, int> counts;
    for (const auto& [id, s] : assignment) counts[s]++;
    CHECK(counts[Split::train] == 200);
    CHECK(counts[Split::val] == 50);
    CHECK(counts[Split::test] == 30);
}

TEST_CASE("stratified_split per-stratum train share deviates at most one item") {
    std::vector<SplitCandidate> candidates;
    for (int s = 0; s < 4; ++s) {
        const auto part = uniform_candidates(25 + 10 * s, s, 0, "s" + std::to_string(s) + "_");
        candidates.insert(candidates.end(), part.begin(), part.end());
    }
    const std::size_t total = candidates.size();
    SplitSpec spec;
    spec.target_counts = {total / 2, 0, 0};
    spec.seed = 17;
    const auto assignment = stratified_split(candidates, spec);
    for (int s = 0; s < 4; ++s) {
        const double stratum_size = 25 + 10 * s;
        const double ideal = static_cast<double>(total / 2) * stratum_size / static_cast<double>(total);
        int got = 0;
        for (const auto& [id, sp] : assignment) {
            if (id[1] == '0' + s && sp == Split::train) ++got;
        }
        CHECK(std::fabs(got - ideal) <= 1.0);
    }
}

TEST_CASE("stratified_split error cases") {
    SplitSpec spec;
    spec.target_counts = {1, 0, 0};
    CHECK_THROWS_AS(stratified_split(std::vector<SplitCandidate>{}, spec), ValidationError);
    const auto candidates = uniform_candidates(5, 0, 0, "c");
    spec.target_counts = {4, 1, 1};
    CHECK_THROWS_AS(stratified_split(candidates, spec), ValidationError);
}

TEST_CASE("geo_cell_for maps to distinct cells") {
    CHECK(geo_cell_for(42.1, -118.2) == geo_cell_for(44.9, -116.0));
    CHECK(geo_cell_for(42.1, -118.2) != geo_cell_for(47.0, -118.2));
    CHECK(geo_cell_for(0.0, 0.0, 1.0) != geo_cell_for(0.0, 1.5, 1.0));
}

TEST_CASE("build_climate_vector assembles variable-major order") {
    std::vector<MonthlyClimate> months;
    for (int m = 1; m <= 12; ++m) months.push_back(full_month(m, m * 10.0));
    const ClimateVector v = build_climate_vector(months);
    CHECK(v.values[0] == 11.0);            // temperature, january
    CHECK(v.values[11] == 121.0);          // temperature, december
    CHECK(v.values[12] == 12.0);           // precipitation, january
    CHECK(v.values[59] == 90.0);           // wind direction, december
}

TEST_CASE("build_climate_vector errors name the gap") {
    std::vector<MonthlyClimate> months;
    for (int m = 1; m <= 12; ++m) {
        if (m == 7) continue;
        months.push_back(full_month(m, 0.0));
    }
    CHECK_THROWS_WITH_AS(build_climate_vector(months),
                         "build_climate_vector: month 7 missing", ValidationError);

    std::vector<MonthlyClimate> missing_var;
    for (int m = 1; m <= 12; ++m) missing_var.push_back(full_month(m, 0.0));
    missing_var[2].humidity.reset();
    CHECK_THROWS_WITH_AS(build_climate_vector(missing_var),
                         "build_climate_vector: month 3: humidity missing", ValidationError);
}

TEST_CASE("build_climate_vector all-zero records") {
    std::vector<MonthlyClimate> months;
    for (int m = 1; m <= 12; ++m) {
        MonthlyClimate rec;
        rec.month = m;
        rec.temperature = rec.precipitation = rec.humidity = rec.wind_speed = rec.wind_direction = 0.0;
        months.push_back(rec);
    }
    const ClimateVector v = build_climate_vector(months);
    for (double x : v.values) CHECK(x == 0.0);
}

TEST_CASE("build_climate_vector validates wind direction range") {
    std::vector<MonthlyClimate> months;
    for (int m = 1; m <= 12; ++m) months.push_back(full_month(m, 0.0));
    months[5].wind_direction = 360.0;
    CHECK_THROWS_AS(build_climate_vector(months), ValidationError);
}
