// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The popest Authors

#pragma once

#include <json.hpp>

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "popest/dtm_filter.hpp"
#include "popest/estimator.hpp"
#include "popest/model3d.hpp"
#include "popest/osm.hpp"
#include "popest/synth.hpp"
#include "popest/validation.hpp"

namespace popest::pipeline {

namespace fs = std::filesystem;

/// Everything a full run needs. Populated from defaults, then a JSON config,
/// then command-line flags (later sources win).
struct PipelineConfig {
    EstimationConfig estimation;
    DtmFilterParams filter;

    std::optional<fs::path> dsm;
    std::optional<fs::path> footprints;
    std::optional<fs::path> ground_truth;
    std::optional<fs::path> osm;
    std::optional<fs::path> rules;
    std::optional<double> center_lat;
    std::optional<double> center_lon;
    std::optional<double> radius_m;
    fs::path output_dir = "out";

    /// Constant base elevation for the block model when no DTM is at hand.
    double base_elevation_m = 0.0;

    /// Previously published per-type and total person counts to compare against.
    std::map<std::string, double> reported_persons;
    std::optional<double> reported_total_persons;
};

/// Applies flat JSON keys onto `cfg`. Relative paths resolve against `base_dir`.
/// Unknown keys are rejected.
void apply_config_json(PipelineConfig& cfg, const nlohmann::json& doc, const fs::path& base_dir);
PipelineConfig load_config(const fs::path& path);

struct BuildingFailure {
    std::string id;
    std::string stage;
    std::string message;
};

struct EstimateOutputs {
    std::vector<BuildingHeightRecord> heights;
    std::vector<BuildingEstimate> estimates;  ///< one per footprint, failures flagged
    std::vector<BuildingFailure> failures;
    SocietyEstimate society;
};

/// Heights and estimates for every footprint. A per-building error never aborts
/// the batch; it becomes an excluded row and a failure entry.
EstimateOutputs estimate_buildings(const Grid& dsm, const Grid& dtm,
                                   const std::vector<Footprint>& footprints,
                                   const EstimationConfig& cfg);

/// Block-model inputs: footprints joined with heights by id, base from the DTM
/// median under the footprint when a DTM is given.
std::vector<ExtrusionInput> extrusion_inputs(const std::vector<Footprint>& footprints,
                                             const std::vector<BuildingHeightRecord>& heights,
                                             const Grid* dtm, double base_elevation_m,
                                             std::vector<BuildingFailure>& failures);

/// Population footnotes against previously published counts.
std::vector<std::string> population_footnotes(const SocietyEstimate& society,
                                              const std::map<std::string, double>& reported,
                                              std::optional<double> reported_total);

// Subcommand bodies. Each throws popest::Error on failure; the CLI maps that to a
// non-zero exit with a one-line diagnostic.

DtmResult<double> cmd_dtm(const fs::path& dsm, const DtmFilterParams& params, const fs::path& dtm_out,
                          const fs::path& mask_out);

EstimateOutputs cmd_estimate(const fs::path& dsm, const fs::path& dtm, const fs::path& footprints,
                             const EstimationConfig& cfg, const fs::path& heights_out,
                             const fs::path& estimates_out);

ValidationReport cmd_validate(const fs::path& estimates, const fs::path& ground_truth,
                              const fs::path& report_out);

osm::RadiusCount cmd_amenities(const fs::path& osm_file, const fs::path& rules, const osm::LatLon& center,
                               double radius_m, const fs::path& amenities_out,
                               const fs::path& summary_out);

ExtrusionResult cmd_model3d(const fs::path& footprints, const fs::path& heights,
                            const std::optional<fs::path>& dtm, double base_elevation_m,
                            const fs::path& obj_out);

/// Writes dsm.asc, truth_dtm.asc, truth_heights.csv and footprints.geojson.
synth::SyntheticDsm cmd_synth(const fs::path& scene, const fs::path& out_dir);

struct RunResult {
    nlohmann::json summary;
    bool ok = true;  ///< false when a whole stage failed
};

/// Full chain dtm -> heights -> estimate -> validate -> model3d (-> amenities),
/// writing every artifact plus summary.json into the output directory.
RunResult cmd_run(const PipelineConfig& cfg);

/// Throws ConfigError when a path required by cmd_run is missing or absent on disk.
void check_run_inputs(const PipelineConfig& cfg);

} // namespace popest::pipeline
