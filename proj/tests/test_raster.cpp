#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "fsk/errors.hpp"
#include "fsk/raster.hpp"
#include "testutil.hpp"

using namespace fsk;

TEST_CASE("make_raster enforces invariants") {
    CHECK_THROWS_AS(make_raster(0, 3, {}), ValidationError);
    CHECK_THROWS_AS(make_raster(2, 2, {1.0, 2.0, 3.0}), ValidationError);
    CHECK_THROWS_AS(make_raster(2, 1, {1.0, std::numeric_limits<double>::quiet_NaN()}),
                    ValidationError);
    // Masked pixels may hold non-finite values.
    CHECK_NOTHROW(make_raster(2, 1, {1.0, std::numeric_limits<double>::quiet_NaN()}, {0, 1}));
    CHECK_THROWS_AS(make_raster(2, 1, {1.0, 2.0}, {0, 1, 0}), ValidationError);
}

TEST_CASE("match_range maps endpoints") {
    const Raster r = make_raster(2, 1, {-1.0, 1.0});
    const Raster m = match_range(r);
    CHECK(m.values[0] == 0.0);
    CHECK(m.values[1] == 1.0);
}

TEST_CASE("match_range affine example") {
    const Raster r = make_raster(3, 1, {0.2, 0.4, 0.6});
    const Raster m = match_range(r);
    CHECK(m.values[0] == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(m.values[1] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(m.values[2] == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("match_range of a constant raster is all zeros") {
    const Raster m = match_range(make_constant_raster(4, 3, 7.5));
    for (double v : m.values) CHECK(v == 0.0);
}

TEST_CASE("match_range is idempotent on spanning [0,1] rasters") {
    auto g = testutil::rng(11);
    for (int it = 0; it < 200; ++it) {
        Raster r = testutil::random_raster(g, 5, 4, 0.0, 1.0);
        r.values[0] = 0.0;
        r.values[1] = 1.0;
        const Raster once = match_range(r);
        const Raster twice = match_range(once);
        CHECK(once.values == twice.values);
    }
}

TEST_CASE("match_range respects the nodata mask") {
    // The masked extreme value must not stretch the range.
    Raster r = make_raster(3, 1, {100.0, 0.0, 2.0}, {1, 0, 0});
    const Raster m = match_range(r);
    CHECK(m.values[1] == 0.0);
    CHECK(m.values[2] == 1.0);
    CHECK(m.values[0] == 100.0);   // untouched
}

TEST_CASE("finite_diff row example") {
    const Raster r = make_raster(3, 2, {0.0, 1.0, 3.0, 0.0, 1.0, 3.0});
    const auto [dx, dy] = finite_diff(r);
    CHECK(dx.width == 2);
    CHECK(dx.height == 2);
    CHECK(dx.values[0] == 1.0);
    CHECK(dx.values[1] == 2.0);
}

TEST_CASE("finite_diff 2x2 example") {
    const Raster r = make_raster(2, 2, {0.0, 2.0, 1.0, 5.0});
    const auto [dx, dy] = finite_diff(r);
    CHECK(dx.values == std::vector<double>{2.0, 4.0});
    CHECK(dy.width == 2);
    CHECK(dy.height == 1);
    CHECK(dy.values == std::vector<double>{1.0, 3.0});
}

TEST_CASE("finite_diff of a constant raster is zero") {
    const auto [dx, dy] = finite_diff(make_constant_raster(5, 5, 3.25));
    CHECK(std::all_of(dx.values.begin(), dx.values.end(), [](double v) { return v == 0.0; }));
    CHECK(std::all_of(dy.values.begin(), dy.values.end(), [](double v) { return v == 0.0; }));
}

TEST_CASE("finite_diff shift invariance on lattice values") {
    auto g = testutil::rng(12);
    for (int it = 0; it < 500; ++it) {
        const Raster a = testutil::random_dyadic_raster(g, 6, 5, -0.5, 0.5);
        Raster b = a;
        const double c = 0.25;
        for (auto& v : b.values) v += c;
        const auto [dxa, dya] = finite_diff(a);
        const auto [dxb, dyb] = finite_diff(b);
        CHECK(dxa.values == dxb.values);
        CHECK(dya.values == dyb.values);
    }
}

TEST_CASE("finite_diff rejects thin rasters") {
    CHECK_THROWS_AS(finite_diff(make_constant_raster(1, 5, 0.0)), ValidationError);
    CHECK_THROWS_AS(finite_diff(make_constant_raster(5, 1, 0.0)), ValidationError);
}

TEST_CASE("discretize_mean_risk bin edges") {
    CHECK(discretize_mean_risk(make_constant_raster(3, 3, 0.0)) == 0);
    CHECK(discretize_mean_risk(make_constant_raster(3, 3, 1.0)) == 9);
    CHECK(discretize_mean_risk(make_constant_raster(3, 3, 0.55)) == 5);
}

TEST_CASE("discretize_mean_risk is permutation invariant") {
    auto g = testutil::rng(13);
    for (int it = 0; it < 300; ++it) {
        Raster r = testutil::random_raster(g, 8, 8, 0.0, 1.0);
        const int label = discretize_mean_risk(r);
        std::shuffle(r.values.begin(), r.values.end(), g);
        CHECK(discretize_mean_risk(r) == label);
    }
}

TEST_CASE("discretize_mean_risk errors") {
    Raster r = make_constant_raster(2, 2, 0.5);
    r.nodata.assign(4, 1);
    CHECK_THROWS_AS(discretize_mean_risk(r), ValidationError);
    CHECK_THROWS_AS(discretize_mean_risk(make_constant_raster(2, 2, 1.5)), ValidationError);
}
