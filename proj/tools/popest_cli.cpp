// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The popest Authors

// popest: building-height based population estimation pipeline.

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

#include "popest/pipeline.hpp"

namespace fs = std::filesystem;
using namespace popest;

namespace {

struct Overrides {
    std::optional<double> floor_height_m, min_building_height_m, occupancy_rate, efficiency,
        height_percentile;
    std::optional<long> min_cells;
    std::optional<int> initial_window;
    std::optional<double> max_window_m, slope, initial_threshold_m, max_threshold_m;

    void add_estimation(CLI::App* app) {
        app->add_option("--floor-height", floor_height_m, "Height of one floor [m]");
        app->add_option("--min-height", min_building_height_m, "Minimum building height [m]");
        app->add_option("--occupancy", occupancy_rate, "Occupancy rate in [0,1]");
        app->add_option("--efficiency", efficiency, "Built-up to carpet area factor");
        app->add_option("--percentile", height_percentile, "Height percentile under a footprint");
        app->add_option("--min-cells", min_cells, "Minimum valid cells per footprint");
    }
    void add_filter(CLI::App* app) {
        app->add_option("--initial-window", initial_window, "Initial filter window [cells]");
        app->add_option("--max-window", max_window_m, "Maximum filter window [m]");
        app->add_option("--slope", slope, "Terrain slope (rise/run)");
        app->add_option("--initial-threshold", initial_threshold_m, "Initial height threshold [m]");
        app->add_option("--max-threshold", max_threshold_m, "Maximum height threshold [m]");
    }
    void apply(pipeline::PipelineConfig& cfg) const {
        auto set = [](auto& dst, const auto& src) {
            if (src) dst = *src;
        };
        set(cfg.estimation.floor_height_m, floor_height_m);
        set(cfg.estimation.min_building_height_m, min_building_height_m);
        set(cfg.estimation.occupancy_rate, occupancy_rate);
        set(cfg.estimation.efficiency, efficiency);
        set(cfg.estimation.height_percentile, height_percentile);
        set(cfg.estimation.min_cells, min_cells);
        set(cfg.filter.initial_window, initial_window);
        set(cfg.filter.max_window_m, max_window_m);
        set(cfg.filter.slope, slope);
        set(cfg.filter.initial_threshold_m, initial_threshold_m);
        set(cfg.filter.max_threshold_m, max_threshold_m);
    }
};

pipeline::PipelineConfig base_config(const std::string& config_path) {
    if (config_path.empty()) return {};
    return pipeline::load_config(config_path);
}

void report_failures(const std::vector<pipeline::BuildingFailure>& failures) {
    for (const auto& f : failures) std::cerr << "warning: [" << f.stage << "] " << f.message << '\n';
    if (!failures.empty()) std::cerr << failures.size() << " building(s) failed\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Population estimation from surface models and building footprints"};
    app.require_subcommand(1);

    std::string config_path;
    Overrides ov;

    // dtm
    auto* dtm = app.add_subcommand("dtm", "Derive a bare-earth DTM and ground mask from a DSM");
    std::string dtm_dsm, dtm_out, dtm_mask;
    dtm->add_option("--dsm", dtm_dsm, "Input DSM (ESRI ASCII grid)")->required();
    dtm->add_option("--out", dtm_out, "Output DTM grid")->required();
    dtm->add_option("--mask-out", dtm_mask, "Output ground mask grid (default: ground_mask.asc beside --out)");
    dtm->add_option("--config", config_path, "JSON config");
    ov.add_filter(dtm);

    // estimate
    auto* est = app.add_subcommand("estimate", "Per-building heights, floors, units and persons");
    std::string est_dsm, est_dtm, est_fp, est_dir;
    est->add_option("--dsm", est_dsm, "DSM grid")->required();
    est->add_option("--dtm", est_dtm, "DTM grid")->required();
    est->add_option("--footprints", est_fp, "Footprints GeoJSON")->required();
    est->add_option("--out-dir", est_dir, "Directory for heights.csv and estimates.csv")->required();
    est->add_option("--config", config_path, "JSON config");
    ov.add_estimation(est);

    // validate
    auto* val = app.add_subcommand("validate", "Compare estimated units with ground truth");
    std::string val_est, val_gt, val_out;
    val->add_option("--estimates", val_est, "Estimates CSV")->required();
    val->add_option("--ground-truth", val_gt, "Ground-truth CSV")->required();
    val->add_option("--out", val_out, "Report CSV")->required();

    // amenities
    auto* am = app.add_subcommand("amenities", "Count OSM amenities within a radius");
    std::string am_osm, am_rules, am_dir;
    double am_lat = 0, am_lon = 0, am_radius = 0;
    am->add_option("--osm", am_osm, "OSM XML extract")->required();
    am->add_option("--rules", am_rules, "Tag rules JSON")->required();
    am->add_option("--lat", am_lat, "Center latitude [deg]")->required();
    am->add_option("--lon", am_lon, "Center longitude [deg]")->required();
    am->add_option("--radius", am_radius, "Radius [m]")->required();
    am->add_option("--out-dir", am_dir, "Directory for amenities.csv and amenity_summary.csv")->required();

    // model3d
    auto* m3 = app.add_subcommand("model3d", "Extrude footprints into an OBJ block model");
    std::string m3_fp, m3_heights, m3_out, m3_dtm;
    double m3_base = 0.0;
    m3->add_option("--footprints", m3_fp, "Footprints GeoJSON")->required();
    m3->add_option("--heights", m3_heights, "Heights CSV")->required();
    m3->add_option("--out", m3_out, "Output OBJ")->required();
    auto* m3_dtm_opt = m3->add_option("--dtm", m3_dtm, "DTM grid for per-building base elevation");
    m3->add_option("--base", m3_base, "Constant base elevation [m]")->excludes(m3_dtm_opt);

    // synth
    auto* sy = app.add_subcommand("synth", "Synthesize a DSM scene with known ground truth");
    std::string sy_scene, sy_dir;
    sy->add_option("--scene", sy_scene, "Scene JSON")->required();
    sy->add_option("--out-dir", sy_dir, "Output directory")->required();

    // run
    auto* run = app.add_subcommand("run", "Full pipeline driven by a JSON config");
    std::optional<std::string> run_dsm, run_fp, run_gt, run_osm, run_rules, run_dir;
    std::optional<double> run_lat, run_lon, run_radius;
    run->add_option("--config", config_path, "JSON config")->required();
    run->add_option("--dsm", run_dsm, "Override DSM path");
    run->add_option("--footprints", run_fp, "Override footprints path");
    run->add_option("--ground-truth", run_gt, "Override ground-truth path");
    run->add_option("--osm", run_osm, "Override OSM path");
    run->add_option("--rules", run_rules, "Override rules path");
    run->add_option("--lat", run_lat, "Override amenity center latitude");
    run->add_option("--lon", run_lon, "Override amenity center longitude");
    run->add_option("--radius", run_radius, "Override amenity radius [m]");
    run->add_option("--output-dir", run_dir, "Override output directory");
    ov.add_estimation(run);
    ov.add_filter(run);

    CLI11_PARSE(app, argc, argv);

    try {
        if (dtm->parsed()) {
            auto cfg = base_config(config_path);
            ov.apply(cfg);
            const fs::path mask = dtm_mask.empty() ? fs::path(dtm_out).parent_path() / "ground_mask.asc"
                                                   : fs::path(dtm_mask);
            const auto result = pipeline::cmd_dtm(dtm_dsm, cfg.filter, dtm_out, mask);
            const auto ground = result.ground.count();
            std::cout << "dtm: " << ground << " ground cells of " << result.ground.size() << '\n';
        } else if (est->parsed()) {
            auto cfg = base_config(config_path);
            ov.apply(cfg);
            const fs::path dir = est_dir;
            const auto out = pipeline::cmd_estimate(est_dsm, est_dtm, est_fp, cfg.estimation,
                                                    dir / "heights.csv", dir / "estimates.csv");
            report_failures(out.failures);
            std::cout << "estimate: " << out.estimates.size() << " buildings, "
                      << out.society.total_units << " units, " << out.society.total_persons_rounded
                      << " persons\n";
        } else if (val->parsed()) {
            const auto report = pipeline::cmd_validate(val_est, val_gt, val_out);
            for (const auto& note : report.footnotes) std::cout << "note: " << note.text << '\n';
            std::cout << "validate: estimated " << report.total.estimated_units << ", ground "
                      << report.total.ground_units << '\n';
        } else if (am->parsed()) {
            const fs::path dir = am_dir;
            const auto result = pipeline::cmd_amenities(am_osm, am_rules, {am_lat, am_lon}, am_radius,
                                                        dir / "amenities.csv", dir / "amenity_summary.csv");
            for (const auto& [category, count] : result.counts)
                std::cout << category << ": " << count << '\n';
        } else if (m3->parsed()) {
            std::optional<fs::path> dtm_path;
            if (!m3_dtm.empty()) dtm_path = m3_dtm;
            const auto result = pipeline::cmd_model3d(m3_fp, m3_heights, dtm_path, m3_base, m3_out);
            for (const auto& id : result.skipped) std::cerr << "warning: skipped " << id << '\n';
            std::cout << "model3d: " << result.mesh.objects.size() << " buildings, "
                      << result.mesh.vertices.size() << " vertices\n";
        } else if (sy->parsed()) {
            const auto result = pipeline::cmd_synth(sy_scene, sy_dir);
            std::cout << "synth: " << result.heights.size() << " prisms\n";
        } else if (run->parsed()) {
            auto cfg = pipeline::load_config(config_path);
            if (run_dsm) cfg.dsm = *run_dsm;
            if (run_fp) cfg.footprints = *run_fp;
            if (run_gt) cfg.ground_truth = *run_gt;
            if (run_osm) cfg.osm = *run_osm;
            if (run_rules) cfg.rules = *run_rules;
            if (run_lat) cfg.center_lat = *run_lat;
            if (run_lon) cfg.center_lon = *run_lon;
            if (run_radius) cfg.radius_m = *run_radius;
            if (run_dir) cfg.output_dir = *run_dir;
            ov.apply(cfg);
            const auto result = pipeline::cmd_run(cfg);
            std::cout << "run: " << result.summary.at("status").get<std::string>() << '\n';
            if (!result.ok) return 1;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
