// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The popest Authors

#include <doctest.h>

#include <cstdlib>
#include <fstream>

#include "oracles.hpp"
#include "popest/pipeline.hpp"

using namespace popest;
using namespace popest::pipeline;
using nlohmann::json;

namespace {

const fs::path kData = POPEST_DATA_DIR;
const fs::path kTestData = POPEST_TEST_DATA_DIR;

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::current_path() / "pipeline_tmp" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream(p, std::ios::binary) << text;
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string("\"") + POPEST_CLI + "\" " + args + " >/dev/null 2>&1";
    return std::system(cmd.c_str());
}

/// Synthesizes the five-building scene once into `dir`.
fs::path five_building_inputs() {
    static const fs::path dir = [] {
        const fs::path d = fresh_dir("five_inputs");
        cmd_synth(kData / "five_building_scene.json", d);
        return d;
    }();
    return dir;
}

} // namespace

TEST_CASE("config precedence and path resolution") {
    const fs::path dir = fresh_dir("config");
    write_file(dir / "cfg.json", R"({"dsm":"in/dsm.asc","floor_height_m":3.2,"max_window_m":20,
                                     "output_dir":"/abs/out","reported_total_persons":100})");
    const auto cfg = load_config(dir / "cfg.json");
    CHECK(*cfg.dsm == dir / "in/dsm.asc");
    CHECK(cfg.output_dir == fs::path("/abs/out"));
    CHECK(cfg.estimation.floor_height_m == 3.2);
    CHECK(cfg.estimation.efficiency == 0.7);
    CHECK(cfg.filter.max_window_m == 20);
    CHECK(*cfg.reported_total_persons == 100);

    write_file(dir / "bad.json", R"({"dsm":"x","flor_height_m":3})");
    CHECK_THROWS_AS(load_config(dir / "bad.json"), ConfigError);
    write_file(dir / "bad2.json", R"({"floor_height_m":"three"})");
    CHECK_THROWS_AS(load_config(dir / "bad2.json"), ConfigError);
    CHECK_THROWS(load_config(dir / "missing.json"));
}

TEST_CASE("run input checks") {
    PipelineConfig cfg;
    CHECK_THROWS_AS(check_run_inputs(cfg), ConfigError);
    cfg.dsm = "/nonexistent/dsm.asc";
    cfg.footprints = kData / "case_study_scene.json";
    CHECK_THROWS_AS(check_run_inputs(cfg), ConfigError);
    const fs::path in = five_building_inputs();
    cfg.dsm = in / "dsm.asc";
    cfg.footprints = in / "footprints.geojson";
    CHECK_NOTHROW(check_run_inputs(cfg));
    cfg.osm = kTestData / "amenities.osm";
    CHECK_THROWS_AS(check_run_inputs(cfg), ConfigError);  // rules, center and radius missing
}

TEST_CASE("subcommand chain on the five-building scene") {
    const fs::path in = five_building_inputs();
    const fs::path out = fresh_dir("chain");
    const auto dtm = cmd_dtm(in / "dsm.asc", DtmFilterParams{}, out / "dtm.asc", out / "ground_mask.asc");
    CHECK(fs::exists(out / "dtm.asc"));
    CHECK(fs::exists(out / "ground_mask.asc"));
    const Grid mask = read_ascii_grid(out / "ground_mask.asc");
    CHECK(mask.georef().same_frame(dtm.dtm.georef()));

    const auto est = cmd_estimate(in / "dsm.asc", out / "dtm.asc", in / "footprints.geojson",
                                  EstimationConfig{}, out / "heights.csv", out / "estimates.csv");
    CHECK(est.failures.empty());
    REQUIRE(est.heights.size() == 5);

    std::ifstream truth_in(in / "truth_heights.csv");
    const auto truth = read_heights_csv(truth_in);
    long truth_units = 0;
    const auto fps = parse_footprints(in / "footprints.geojson");
    for (std::size_t i = 0; i < truth.size(); ++i) {
        CHECK(est.heights[i].id == truth[i].id);
        CHECK(std::abs(est.heights[i].height_m - truth[i].height_m) <= 0.2);
        truth_units += estimate_building(truth[i], fps[i], EstimationConfig{}).units;
    }
    CHECK(est.society.total_units == truth_units);

    const auto m = cmd_model3d(in / "footprints.geojson", out / "heights.csv", out / "dtm.asc", 0.0,
                               out / "model.obj");
    CHECK(m.mesh.objects.size() == 5);
    const auto counts = oracle::read_obj_counts(oracle::slurp((out / "model.obj").string()));
    CHECK(counts.vertices == 40);
    CHECK(counts.faces == 30);
}

TEST_CASE("partial failure for an off-grid footprint") {
    const fs::path in = five_building_inputs();
    const fs::path out = fresh_dir("partial");
    auto fps = parse_footprints(in / "footprints.geojson");
    fps.push_back(make_footprint("offgrid", "Type1", {{5000, 5000}, {5010, 5000}, {5010, 5010}, {5000, 5010}},
                                 187.5, 4));
    {
        std::ofstream f(out / "footprints.geojson");
        write_footprints(f, fps);
    }
    PipelineConfig cfg;
    cfg.dsm = in / "dsm.asc";
    cfg.footprints = out / "footprints.geojson";
    cfg.output_dir = out / "run";
    const auto r = cmd_run(cfg);
    CHECK(r.ok);
    CHECK(r.summary["status"] == "partial");
    CHECK(r.summary["totals"]["failed"] == 1);
    CHECK(r.summary["totals"]["buildings"] == 6);
    REQUIRE(r.summary["errors"].size() == 1);
    CHECK(r.summary["errors"][0]["id"] == "offgrid");
    CHECK(fs::exists(out / "run" / "model.obj"));
    std::ifstream ein(out / "run" / "estimates.csv");
    const auto es = read_estimates_csv(ein);
    REQUIRE(es.size() == 6);
    CHECK(es.back().excluded);
    CHECK(es.back().exclusion_reason.rfind("error:", 0) == 0);
}

TEST_CASE("empty footprint collection") {
    const fs::path in = five_building_inputs();
    const fs::path out = fresh_dir("empty");
    write_file(out / "fp.geojson", R"({"type":"FeatureCollection","features":[]})");
    PipelineConfig cfg;
    cfg.dsm = in / "dsm.asc";
    cfg.footprints = out / "fp.geojson";
    cfg.output_dir = out / "run";
    const auto r = cmd_run(cfg);
    CHECK(r.ok);
    CHECK(r.summary["totals"]["units"] == 0);
    CHECK(r.summary["totals"]["persons_rounded"] == 0);
    CHECK(oracle::read_obj_counts(oracle::slurp((out / "run" / "model.obj").string())).vertices == 0);
}

TEST_CASE("amenities subcommand pre-seeds rule categories") {
    const fs::path out = fresh_dir("amenities");
    const auto rc = cmd_amenities(kTestData / "amenities.osm", kTestData / "amenity_rules.json",
                                  {23.0225, 72.5}, 100.0, out / "a.csv", out / "s.csv");
    CHECK(rc.counts.at("hospital") == 0);
    CHECK(rc.counts.at("school") == 0);
    CHECK(oracle::slurp((out / "s.csv").string()) == "category,count\nhospital,0\nschool,0\n");
}

TEST_CASE("CLI run is deterministic") {
    const fs::path in = five_building_inputs();
    const fs::path out = fresh_dir("cli_run");
    write_file(out / "cfg.json", json{{"dsm", (in / "dsm.asc").string()},
                                      {"footprints", (in / "footprints.geojson").string()},
                                      {"osm", (kTestData / "amenities.osm").string()},
                                      {"rules", (kTestData / "amenity_rules.json").string()},
                                      {"center_lat", 23.0225},
                                      {"center_lon", 72.5},
                                      {"radius_m", 2000.0}}
                                     .dump());
    const std::string base = "run --config \"" + (out / "cfg.json").string() + "\" --output-dir ";
    REQUIRE(run_cli(base + "\"" + (out / "a").string() + "\"") == 0);
    REQUIRE(run_cli(base + "\"" + (out / "b").string() + "\"") == 0);
    for (const char* f : {"dtm.asc", "ground_mask.asc", "heights.csv", "estimates.csv", "model.obj",
                          "amenities.csv", "amenity_summary.csv", "summary.json"}) {
        CAPTURE(f);
        const std::string a = oracle::slurp((out / "a" / f).string());
        CHECK_FALSE(a.empty());
        CHECK(a == oracle::slurp((out / "b" / f).string()));
    }
    const json summary = json::parse(oracle::slurp((out / "a" / "summary.json").string()));
    CHECK(summary["status"] == "ok");
    CHECK(summary["amenities"]["counts"]["hospital"] == 2);
    CHECK(summary["amenities"]["counts"]["school"] == 1);

    // Flags override the config file.
    REQUIRE(run_cli(base + "\"" + (out / "c").string() + "\" --floor-height 100") == 0);
    const json c = json::parse(oracle::slurp((out / "c" / "summary.json").string()));
    CHECK(c["totals"]["units"] == 20);  // one floor of four units each
}

TEST_CASE("CLI exit codes") {
    const fs::path in = five_building_inputs();
    const fs::path out = fresh_dir("cli_exit");
    write_file(out / "nodsm.json", json{{"footprints", (in / "footprints.geojson").string()}}.dump());
    CHECK(run_cli("run --config \"" + (out / "nodsm.json").string() + "\"") != 0);
    CHECK(run_cli("dtm --dsm /nonexistent.asc --out \"" + (out / "d.asc").string() + "\"") != 0);
    CHECK(run_cli("estimate --dsm x") != 0);
    CHECK(run_cli("synth --scene \"" + (kData / "five_building_scene.json").string() + "\" --out-dir \"" +
                  (out / "s").string() + "\"") == 0);
    CHECK(fs::exists(out / "s" / "dsm.asc"));
    CHECK(run_cli("model3d --footprints \"" + (out / "s" / "footprints.geojson").string() + "\" --heights \"" +
                  (out / "s" / "truth_heights.csv").string() + "\" --out \"" + (out / "m.obj").string() +
                  "\" --base 50") == 0);
    CHECK(oracle::read_obj_counts(oracle::slurp((out / "m.obj").string())).objects == 5);
}
