// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The popest Authors

#include "popest/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "popest/csv.hpp"

namespace popest::pipeline {

using nlohmann::json;

namespace {

void ensure_parent(const fs::path& path) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
}

std::ofstream open_out(const fs::path& path) {
    ensure_parent(path);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    return out;
}

std::ifstream open_in(const fs::path& path, const char* what) {
    if (!fs::exists(path)) throw Error(std::string(what) + " not found: '" + path.string() + "'");
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(std::string("cannot open ") + what + " '" + path.string() + "'");
    return in;
}

double number(const json& v, const std::string& key) {
    if (!v.is_number()) throw ConfigError("config key '" + key + "' must be a number");
    return v.get<double>();
}

fs::path path_value(const json& v, const std::string& key, const fs::path& base) {
    if (!v.is_string()) throw ConfigError("config key '" + key + "' must be a path string");
    fs::path p = v.get<std::string>();
    return p.is_relative() && !base.empty() ? base / p : p;
}

} // namespace

void apply_config_json(PipelineConfig& cfg, const json& doc, const fs::path& base_dir) {
    if (!doc.is_object()) throw ConfigError("config must be a JSON object");
    auto& e = cfg.estimation;
    auto& f = cfg.filter;
    for (const auto& [key, v] : doc.items()) {
        if (key == "dsm") cfg.dsm = path_value(v, key, base_dir);
        else if (key == "footprints") cfg.footprints = path_value(v, key, base_dir);
        else if (key == "ground_truth") cfg.ground_truth = path_value(v, key, base_dir);
        else if (key == "osm") cfg.osm = path_value(v, key, base_dir);
        else if (key == "rules") cfg.rules = path_value(v, key, base_dir);
        else if (key == "output_dir") cfg.output_dir = path_value(v, key, base_dir);
        else if (key == "center_lat") cfg.center_lat = number(v, key);
        else if (key == "center_lon") cfg.center_lon = number(v, key);
        else if (key == "radius_m") cfg.radius_m = number(v, key);
        else if (key == "base_elevation_m") cfg.base_elevation_m = number(v, key);
        else if (key == "floor_height_m") e.floor_height_m = number(v, key);
        else if (key == "min_building_height_m") e.min_building_height_m = number(v, key);
        else if (key == "occupancy_rate") e.occupancy_rate = number(v, key);
        else if (key == "efficiency") e.efficiency = number(v, key);
        else if (key == "height_percentile") e.height_percentile = number(v, key);
        else if (key == "min_cells") e.min_cells = static_cast<long>(number(v, key));
        else if (key == "initial_window") f.initial_window = static_cast<int>(number(v, key));
        else if (key == "max_window_m") f.max_window_m = number(v, key);
        else if (key == "slope") f.slope = number(v, key);
        else if (key == "initial_threshold_m") f.initial_threshold_m = number(v, key);
        else if (key == "max_threshold_m") f.max_threshold_m = number(v, key);
        else if (key == "bands") {
            if (!v.is_array()) throw ConfigError("config key 'bands' must be an array");
            e.bands.clear();
            for (const auto& b : v) {
                if (!b.is_object()) throw ConfigError("each band must be an object");
                e.bands.push_back({number(b.value("min_area_m2", json()), "bands.min_area_m2"),
                                   number(b.value("max_area_m2", json()), "bands.max_area_m2"),
                                   number(b.value("persons", json()), "bands.persons")});
            }
        } else if (key == "reported_persons") {
            if (!v.is_object()) throw ConfigError("config key 'reported_persons' must be an object");
            cfg.reported_persons.clear();
            for (const auto& [label, n] : v.items()) cfg.reported_persons[label] = number(n, key);
        } else if (key == "reported_total_persons") {
            cfg.reported_total_persons = number(v, key);
        } else {
            throw ConfigError("unknown config key '" + key + "'");
        }
    }
}

PipelineConfig load_config(const fs::path& path) {
    auto in = open_in(path, "config file");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& err) {
        throw ConfigError(path.string() + ": invalid JSON: " + err.what());
    }
    PipelineConfig cfg;
    apply_config_json(cfg, doc, path.parent_path());
    return cfg;
}

EstimateOutputs estimate_buildings(const Grid& dsm, const Grid& dtm,
                                   const std::vector<Footprint>& footprints,
                                   const EstimationConfig& cfg) {
    cfg.validate();
    const Grid ndsm = grid_subtract(dsm, dtm);
    EstimateOutputs out;
    for (const auto& fp : footprints) {
        std::string stage = "heights";
        try {
            auto rec = zonal_height(ndsm, fp, cfg.height_percentile, cfg.min_cells);
            stage = "estimate";
            auto est = estimate_building(rec, fp, cfg);
            out.heights.push_back(std::move(rec));
            out.estimates.push_back(std::move(est));
        } catch (const BuildingError& err) {
            out.failures.push_back({fp.id, stage, err.what()});
            out.estimates.push_back(failed_estimate(fp, err.what()));
        }
    }
    out.society = aggregate(out.estimates);
    return out;
}

std::vector<ExtrusionInput> extrusion_inputs(const std::vector<Footprint>& footprints,
                                             const std::vector<BuildingHeightRecord>& heights,
                                             const Grid* dtm, double base_elevation_m,
                                             std::vector<BuildingFailure>& failures) {
    std::map<std::string, double> by_id;
    for (const auto& h : heights) by_id[h.id] = h.height_m;
    std::vector<ExtrusionInput> inputs;
    for (const auto& fp : footprints) {
        auto it = by_id.find(fp.id);
        if (it == by_id.end()) {
            failures.push_back({fp.id, "model3d", fp.id + ": no height record"});
            continue;
        }
        double base = base_elevation_m;
        if (dtm) {
            try {
                // Not zonal_height: that clamps at 0 and terrain may lie below sea level.
                std::vector<double> z;
                for (const auto& c : rasterize_polygon(fp, dtm->georef()))
                    if (dtm->is_valid(c.row, c.col)) z.push_back((*dtm)(c.row, c.col));
                if (z.empty()) throw InsufficientCoverage(fp.id, 0, 1);
                base = nearest_rank_percentile(std::move(z), 50.0);
            } catch (const BuildingError& err) {
                failures.push_back({fp.id, "model3d", err.what()});
                continue;
            }
        }
        inputs.push_back({fp, it->second, base});
    }
    return inputs;
}

std::vector<std::string> population_footnotes(const SocietyEstimate& society,
                                              const std::map<std::string, double>& reported,
                                              std::optional<double> reported_total) {
    std::vector<std::string> notes;
    for (const auto& [label, value] : reported) {
        auto it = society.by_type.find(label);
        if (it == society.by_type.end()) {
            notes.push_back(label + ": reported " + csv::fixed(value, 0) +
                            " persons but no buildings of this type were estimated");
            continue;
        }
        const double computed = it->second.persons;
        if (std::abs(computed - value) < 0.5) {
            notes.push_back(label + ": computed " + csv::fixed(computed, 1) + " persons matches reported " +
                            csv::fixed(value, 0));
        } else {
            notes.push_back(label + ": computed " + csv::fixed(computed, 1) + " persons (" +
                            std::to_string(it->second.units) + " units) vs reported " +
                            csv::fixed(value, 0) + " (arithmetic discrepancy)");
        }
    }
    if (reported_total) {
        const long computed = society.total_persons_rounded;
        notes.push_back(std::string("total: computed ") + std::to_string(computed) + " persons " +
                        (std::abs(computed - *reported_total) < 0.5 ? "matches" : "vs") +
                        " reported " + csv::fixed(*reported_total, 0));
    }
    return notes;
}

DtmResult<double> cmd_dtm(const fs::path& dsm_path, const DtmFilterParams& params,
                          const fs::path& dtm_out, const fs::path& mask_out) {
    open_in(dsm_path, "DSM");
    const Grid dsm = read_ascii_grid(dsm_path);
    auto result = progressive_morphological_filter(dsm, params);
    ensure_parent(dtm_out);
    ensure_parent(mask_out);
    write_ascii_grid(dtm_out, result.dtm);
    write_ascii_grid(mask_out, mask_to_grid(dsm.georef(), result.ground, dsm.valid_mask()));
    return result;
}

EstimateOutputs cmd_estimate(const fs::path& dsm_path, const fs::path& dtm_path,
                             const fs::path& footprints_path, const EstimationConfig& cfg,
                             const fs::path& heights_out, const fs::path& estimates_out) {
    open_in(dsm_path, "DSM");
    open_in(dtm_path, "DTM");
    open_in(footprints_path, "footprint file");
    const Grid dsm = read_ascii_grid(dsm_path);
    const Grid dtm = read_ascii_grid(dtm_path);
    const auto footprints = parse_footprints(footprints_path);
    auto out = estimate_buildings(dsm, dtm, footprints, cfg);
    {
        auto h = open_out(heights_out);
        write_heights_csv(h, out.heights);
    }
    {
        auto e = open_out(estimates_out);
        write_estimates_csv(e, out.estimates);
    }
    return out;
}

ValidationReport cmd_validate(const fs::path& estimates_path, const fs::path& gt_path,
                              const fs::path& report_out) {
    auto ein = open_in(estimates_path, "estimates CSV");
    auto gin = open_in(gt_path, "ground-truth CSV");
    const auto estimates = read_estimates_csv(ein);
    const auto truth = read_ground_truth_csv(gin);
    auto report = validate_report(aggregate(estimates), truth);
    auto out = open_out(report_out);
    write_report_csv(out, report);
    return report;
}

osm::RadiusCount cmd_amenities(const fs::path& osm_file, const fs::path& rules_path,
                               const osm::LatLon& center, double radius_m,
                               const fs::path& amenities_out, const fs::path& summary_out) {
    open_in(osm_file, "OSM file");
    auto rin = open_in(rules_path, "rules file");
    const auto parsed = osm::parse_osm(osm_file);
    const auto rules = osm::parse_rules(rin);
    auto result = osm::count_within_radius(osm::filter_amenities(parsed.elements, rules), center, radius_m);
    for (const auto& r : rules) result.counts.try_emplace(r.category, 0);
    {
        auto out = open_out(amenities_out);
        osm::write_amenities_csv(out, result);
    }
    {
        auto out = open_out(summary_out);
        osm::write_summary_csv(out, result);
    }
    return result;
}

ExtrusionResult cmd_model3d(const fs::path& footprints_path, const fs::path& heights_path,
                            const std::optional<fs::path>& dtm_path, double base_elevation_m,
                            const fs::path& obj_out) {
    open_in(footprints_path, "footprint file");
    auto hin = open_in(heights_path, "heights CSV");
    const auto footprints = parse_footprints(footprints_path);
    const auto heights = read_heights_csv(hin);
    std::optional<Grid> dtm;
    if (dtm_path) {
        open_in(*dtm_path, "DTM");
        dtm = read_ascii_grid(*dtm_path);
    }
    std::vector<BuildingFailure> failures;
    auto inputs = extrusion_inputs(footprints, heights, dtm ? &*dtm : nullptr, base_elevation_m, failures);
    auto result = extrude(inputs);
    for (const auto& f : failures) result.skipped.push_back(f.id);
    auto out = open_out(obj_out);
    write_obj(out, result.mesh);
    return result;
}

synth::SyntheticDsm cmd_synth(const fs::path& scene_path, const fs::path& out_dir) {
    open_in(scene_path, "scene file");
    const auto scene = synth::parse_scene(scene_path);
    auto result = synth::synthesize_dsm(scene);
    fs::create_directories(out_dir);
    write_ascii_grid(out_dir / "dsm.asc", result.dsm);
    write_ascii_grid(out_dir / "truth_dtm.asc", result.truth_dtm);
    {
        auto out = open_out(out_dir / "truth_heights.csv");
        synth::write_true_heights_csv(out, result, scene);
    }
    {
        auto out = open_out(out_dir / "footprints.geojson");
        write_footprints(out, synth::scene_footprints(scene));
    }
    return result;
}

void check_run_inputs(const PipelineConfig& cfg) {
    if (!cfg.dsm) throw ConfigError("config is missing the 'dsm' path");
    if (!cfg.footprints) throw ConfigError("config is missing the 'footprints' path");
    auto must_exist = [](const std::optional<fs::path>& p, const char* what) {
        if (p && !fs::exists(*p)) throw ConfigError(std::string(what) + " not found: '" + p->string() + "'");
    };
    must_exist(cfg.dsm, "DSM");
    must_exist(cfg.footprints, "footprint file");
    must_exist(cfg.ground_truth, "ground-truth CSV");
    must_exist(cfg.osm, "OSM file");
    must_exist(cfg.rules, "rules file");
    const bool any_amenity = cfg.osm || cfg.rules || cfg.center_lat || cfg.center_lon || cfg.radius_m;
    const bool all_amenity = cfg.osm && cfg.rules && cfg.center_lat && cfg.center_lon && cfg.radius_m;
    if (any_amenity && !all_amenity)
        throw ConfigError("amenity stage needs osm, rules, center_lat, center_lon and radius_m together");
    cfg.estimation.validate();
}

namespace {

json society_json(const SocietyEstimate& soc, const EstimateOutputs& est) {
    json by_type = json::object();
    long excluded = 0;
    for (const auto& [label, t] : soc.by_type) {
        by_type[label] = {{"buildings", t.buildings},
                          {"excluded", t.excluded},
                          {"units", t.units},
                          {"persons", t.persons}};
        excluded += t.excluded;
    }
    return {{"buildings", est.estimates.size()},
            {"excluded", excluded},
            {"failed", est.failures.size()},
            {"units", soc.total_units},
            {"persons", soc.total_persons},
            {"persons_rounded", soc.total_persons_rounded},
            {"by_type", by_type}};
}

json row_json(const ReportRow& r) {
    json j = {{"type_label", r.type_label},
              {"estimated_units", r.estimated_units},
              {"ground_units", r.ground_units},
              {"diff_pct", r.diff_pct}};
    if (r.reported_diff_pct) j["reported_diff_pct"] = *r.reported_diff_pct;
    return j;
}

} // namespace

RunResult cmd_run(const PipelineConfig& cfg) {
    check_run_inputs(cfg);
    const fs::path& dir = cfg.output_dir;
    fs::create_directories(dir);

    RunResult run;
    json stages = json::array();
    json errors = json::array();
    json footnotes = json::array();
    auto stage_failed = [&](const std::string& name, const std::string& msg) {
        stages.push_back({{"name", name}, {"status", "failed"}, {"message", msg}});
        run.ok = false;
    };

    const Grid dsm = read_ascii_grid(*cfg.dsm);
    const auto footprints = parse_footprints(*cfg.footprints);

    std::optional<DtmResult<double>> dtm;
    try {
        dtm = progressive_morphological_filter(dsm, cfg.filter);
        write_ascii_grid(dir / "dtm.asc", dtm->dtm);
        write_ascii_grid(dir / "ground_mask.asc", mask_to_grid(dsm.georef(), dtm->ground, dsm.valid_mask()));
        stages.push_back({{"name", "dtm"}, {"status", "ok"}, {"outputs", {"dtm.asc", "ground_mask.asc"}}});
    } catch (const Error& err) {
        stage_failed("dtm", err.what());
    }

    std::optional<EstimateOutputs> est;
    if (dtm) {
        est = estimate_buildings(dsm, dtm->dtm, footprints, cfg.estimation);
        {
            auto out = open_out(dir / "heights.csv");
            write_heights_csv(out, est->heights);
        }
        {
            auto out = open_out(dir / "estimates.csv");
            write_estimates_csv(out, est->estimates);
        }
        for (const auto& f : est->failures)
            errors.push_back({{"id", f.id}, {"stage", f.stage}, {"message", f.message}});
        stages.push_back({{"name", "estimate"},
                          {"status", est->failures.empty() ? "ok" : "partial"},
                          {"outputs", {"heights.csv", "estimates.csv"}}});
        for (auto& note : population_footnotes(est->society, cfg.reported_persons, cfg.reported_total_persons))
            footnotes.push_back(std::move(note));
    }

    json validation;
    if (est && cfg.ground_truth) {
        try {
            std::ifstream gin(*cfg.ground_truth);
            const auto report = validate_report(est->society, read_ground_truth_csv(gin));
            auto out = open_out(dir / "validation.csv");
            write_report_csv(out, report);
            validation = {{"rows", json::array()}, {"total", row_json(report.total)}};
            for (const auto& r : report.rows) validation["rows"].push_back(row_json(r));
            for (const auto& n : report.footnotes) footnotes.push_back(n.text);
            stages.push_back({{"name", "validate"}, {"status", "ok"}, {"outputs", {"validation.csv"}}});
        } catch (const Error& err) {
            stage_failed("validate", err.what());
        }
    }

    if (est) {
        try {
            std::vector<BuildingFailure> failures;
            const auto inputs = extrusion_inputs(footprints, est->heights, &dtm->dtm, cfg.base_elevation_m, failures);
            const auto mesh = extrude(inputs);
            auto out = open_out(dir / "model.obj");
            write_obj(out, mesh.mesh);
            for (const auto& f : failures)
                if (std::none_of(est->failures.begin(), est->failures.end(),
                                 [&](const BuildingFailure& g) { return g.id == f.id; }))
                    errors.push_back({{"id", f.id}, {"stage", f.stage}, {"message", f.message}});
            stages.push_back({{"name", "model3d"},
                              {"status", "ok"},
                              {"outputs", {"model.obj"}},
                              {"objects", mesh.mesh.objects.size()},
                              {"skipped", mesh.skipped}});
        } catch (const Error& err) {
            stage_failed("model3d", err.what());
        }
    }

    json amenities;
    if (cfg.osm) {
        try {
            const auto parsed = osm::parse_osm(*cfg.osm);
            std::ifstream rin(*cfg.rules);
            const auto rules = osm::parse_rules(rin);
            auto result = osm::count_within_radius(osm::filter_amenities(parsed.elements, rules),
                                                   {*cfg.center_lat, *cfg.center_lon}, *cfg.radius_m);
            for (const auto& r : rules) result.counts.try_emplace(r.category, 0);
            {
                auto out = open_out(dir / "amenities.csv");
                osm::write_amenities_csv(out, result);
            }
            {
                auto out = open_out(dir / "amenity_summary.csv");
                osm::write_summary_csv(out, result);
            }
            amenities = {{"center", {{"lat", *cfg.center_lat}, {"lon", *cfg.center_lon}}},
                         {"radius_m", *cfg.radius_m},
                         {"counts", result.counts},
                         {"dropped_ways", parsed.dropped_ways}};
            stages.push_back({{"name", "amenities"},
                              {"status", "ok"},
                              {"outputs", {"amenities.csv", "amenity_summary.csv"}}});
        } catch (const Error& err) {
            stage_failed("amenities", err.what());
        }
    }

    json summary = {{"status", !run.ok ? "failed" : (errors.empty() ? "ok" : "partial")},
                    {"stages", stages},
                    {"errors", errors},
                    {"footnotes", footnotes}};
    if (est) summary["totals"] = society_json(est->society, *est);
    if (!validation.is_null()) summary["validation"] = validation;
    if (!amenities.is_null()) summary["amenities"] = amenities;
    {
        auto out = open_out(dir / "summary.json");
        out << summary.dump(2) << '\n';
    }
    run.summary = std::move(summary);
    return run;
}

} // namespace popest::pipeline
