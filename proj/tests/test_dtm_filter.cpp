// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The popest Authors

#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "popest/dtm_filter.hpp"
#include "popest/synth.hpp"

using namespace popest;

namespace {

synth::Prism rect_prism(const std::string& id, double x, double y, double w, double h, double height) {
    return {make_footprint(id, "T", {{x, y}, {x + w, y}, {x + w, y + h}, {x, y + h}}), height};
}

} // namespace

TEST_CASE("window and threshold schedules for the default parameters") {
    const DtmFilterParams p;
    CHECK(window_schedule(p, 1.0) == std::vector<int>{3, 5, 9, 17, 33, 65});
    const auto dh = threshold_schedule(p, 1.0);
    REQUIRE(dh.size() == 6);
    CHECK(dh[0] == doctest::Approx(0.5));
    CHECK(dh[1] == doctest::Approx(1.1));
    CHECK(dh[2] == doctest::Approx(1.7));
    CHECK(dh[3] == doctest::Approx(2.9));
    CHECK(dh[4] == doctest::Approx(3.0));
    CHECK(dh[5] == doctest::Approx(3.0));
    // Coarser cells reach the span sooner: 3*5 = 15, 5*5 = 25, 9*5 = 45 >= 35.
    CHECK(window_schedule(p, 5.0) == std::vector<int>{3, 5, 9});
}

TEST_CASE("parameter validation") {
    DtmFilterParams p;
    p.initial_window = 4;
    CHECK_THROWS_AS(p.validate(1.0), InvalidArgument);
    p = {};
    p.max_window_m = 2.0;
    CHECK_THROWS_AS(p.validate(1.0), InvalidArgument);
    p = {};
    p.max_threshold_m = 0.1;
    CHECK_THROWS_AS(p.validate(1.0), InvalidArgument);
    p = {};
    p.slope = -1.0;
    CHECK_THROWS_AS(p.validate(1.0), InvalidArgument);
    p = {};
    p.initial_threshold_m = 0.0;
    CHECK_THROWS_AS(p.validate(1.0), InvalidArgument);
}

TEST_CASE("morphological opening") {
    const GridGeoref geo{9, 7, 0.0, 0.0, 1.0};
    SUBCASE("window 1 is the identity") {
        std::mt19937_64 rng(3);
        std::uniform_real_distribution<double> u(0, 10);
        Grid g(geo, 0.0);
        for (Index r = 0; r < g.rows(); ++r)
            for (Index c = 0; c < g.cols(); ++c) g(r, c) = u(rng);
        CHECK(morphological_opening(g, 1) == g);
    }
    SUBCASE("constant grid unchanged") {
        const Grid g(geo, 12.5);
        for (int w : {1, 3, 5, 9, 21}) CHECK(morphological_opening(g, w) == g);
    }
    SUBCASE("single spike removed by window 3") {
        Grid g(geo, 0.0);
        g(3, 4) = 20.0;
        const Grid expected = oracle::brute_force_opening(g, 3);
        CHECK(expected(3, 4) == 0.0);
        CHECK(morphological_opening(g, 3) == expected);
    }
    SUBCASE("even or non-positive window rejected") {
        const Grid g(geo, 0.0);
        CHECK_THROWS_AS(morphological_opening(g, 2), InvalidArgument);
        CHECK_THROWS_AS(morphological_opening(g, 0), InvalidArgument);
        CHECK_THROWS_AS(morphological_opening(g, -3), InvalidArgument);
    }
}

TEST_CASE("separable opening matches the brute-force oracle with nodata holes") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0, 30);
    std::bernoulli_distribution hole(0.1);
    for (int trial = 0; trial < 10; ++trial) {
        const GridGeoref geo{5 + trial, 4 + 2 * trial, 0.0, 0.0, 1.0};
        Grid g(geo, 0.0);
        for (Index r = 0; r < g.rows(); ++r)
            for (Index c = 0; c < g.cols(); ++c) g(r, c) = hole(rng) ? g.nodata() : u(rng);
        for (int w : {1, 3, 5, 7, 11}) CHECK(morphological_opening(g, w) == oracle::brute_force_opening(g, w));
    }
}

TEST_CASE("all-nodata window yields nodata") {
    Grid g(GridGeoref{7, 1, 0, 0, 1}, kDefaultNodata);
    g(0, 0) = 5.0;
    const Grid o = morphological_erosion(g, 3);
    CHECK(o(0, 1) == 5.0);
    CHECK(o.is_nodata(0, 3));
}

TEST_CASE("flat DSM is its own DTM") {
    const Grid dsm(GridGeoref{40, 30, 100.0, 200.0, 1.0}, 42.0);
    const auto out = progressive_morphological_filter(dsm, DtmFilterParams{});
    CHECK(out.dtm == dsm);
    CHECK(out.ground.all());
}

TEST_CASE("single prism on flat terrain is removed") {
    synth::Scene scene;
    scene.georef = {100, 100, 0.0, 0.0, 1.0};
    scene.terrain.origin_elev = 50.0;
    scene.prisms.push_back(rect_prism("P", 35, 35, 30, 30, 19.8));
    const auto syn = synth::synthesize_dsm(scene);
    const auto out = progressive_morphological_filter(syn.dsm, DtmFilterParams{});
    CHECK((out.dtm.values() - 50.0).abs().maxCoeff() < 0.01);
    for (const auto& cell : rasterize_polygon(scene.prisms[0].footprint, scene.georef))
        CHECK_FALSE(out.ground(cell.row, cell.col));
    CHECK(out.ground.count() == 100 * 100 - 30 * 30);

    // Idempotence: a second pass changes nothing.
    const auto again = progressive_morphological_filter(out.dtm, DtmFilterParams{});
    CHECK((again.dtm.values() - out.dtm.values()).abs().maxCoeff() <= 1e-9);
}

TEST_CASE("idempotence on a noisy prism scene") {
    synth::Scene scene;
    scene.georef = {100, 100, 0.0, 0.0, 1.0};
    scene.terrain.origin_elev = 50.0;
    scene.noise_amplitude_m = 0.1;
    scene.seed = 99;
    scene.prisms.push_back(rect_prism("P", 35, 35, 30, 30, 19.8));
    const auto syn = synth::synthesize_dsm(scene);
    const auto once = progressive_morphological_filter(syn.dsm, DtmFilterParams{});
    const auto twice = progressive_morphological_filter(once.dtm, DtmFilterParams{});
    CHECK((twice.dtm.values() - once.dtm.values()).abs().maxCoeff() <= 1e-9);
}

TEST_CASE("planar 5 percent ramp is left within the initial threshold") {
    synth::Scene scene;
    scene.georef = {120, 80, 0.0, 0.0, 1.0};
    scene.terrain = {10.0, 0.05, 0.0};
    const auto syn = synth::synthesize_dsm(scene);
    const DtmFilterParams p;
    const auto out = progressive_morphological_filter(syn.dsm, p);
    CHECK((out.dtm.values() - syn.dsm.values()).abs().maxCoeff() < p.initial_threshold_m);

    scene.terrain = {10.0, 0.0, -0.05};
    const auto syn2 = synth::synthesize_dsm(scene);
    const auto out2 = progressive_morphological_filter(syn2.dsm, p);
    CHECK((out2.dtm.values() - syn2.dsm.values()).abs().maxCoeff() < p.initial_threshold_m);
}

TEST_CASE("nodata stays nodata and unflagged") {
    Grid dsm(GridGeoref{30, 30, 0, 0, 1}, 10.0);
    for (Index c = 0; c < 30; ++c) dsm(0, c) = dsm.nodata();
    dsm(15, 15) = 30.0;
    const auto out = progressive_morphological_filter(dsm, DtmFilterParams{});
    for (Index c = 0; c < 30; ++c) {
        CHECK(out.dtm.is_nodata(0, c));
        CHECK_FALSE(out.ground(0, c));  // ground mask only covers valid cells
    }
    CHECK_FALSE(out.ground(15, 15));
    CHECK(out.dtm(15, 15) == 10.0);
}

TEST_CASE("filter invariants on random scenes") {
    std::mt19937_64 rng(123);
    std::uniform_real_distribution<double> height(4.5, 20.0), side(6.0, 34.0), grad(-0.01, 0.01),
        noise(0.0, 0.1);
    const DtmFilterParams p;
    for (int trial = 0; trial < 8; ++trial) {
        synth::Scene scene;
        scene.georef = {90, 70, 0.0, 0.0, 1.0};
        scene.terrain = {30.0, grad(rng), grad(rng)};
        scene.noise_amplitude_m = noise(rng);
        scene.seed = static_cast<std::uint64_t>(trial);
        const double w = side(rng), h = std::min(side(rng), 30.0);
        scene.prisms.push_back(rect_prism("A", 5, 5, w, h, height(rng)));
        scene.prisms.push_back(rect_prism("B", 50, 38, 30, 25, height(rng)));
        const auto syn = synth::synthesize_dsm(scene);
        const auto out = progressive_morphological_filter(syn.dsm, p);
        CHECK((out.dtm.values() <= syn.dsm.values()).all());
        for (Index r = 0; r < out.dtm.rows(); ++r)
            for (Index c = 0; c < out.dtm.cols(); ++c)
                if (out.ground(r, c)) CHECK(out.dtm(r, c) == syn.dsm(r, c));
    }
}

TEST_CASE("templated on scalar: float DSM") {
    BasicGrid<float> dsm(GridGeoref{20, 20, 0, 0, 1}, 5.0f);
    dsm(10, 10) = 25.0f;
    const auto out = progressive_morphological_filter(dsm, DtmFilterParams{});
    CHECK(out.dtm(10, 10) == 5.0f);
    CHECK_FALSE(out.ground(10, 10));
}
