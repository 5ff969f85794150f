// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The popest Authors

#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "popest/footprint.hpp"

namespace popest {

/// Persons per dwelling unit for units whose built-up area falls in [min, max].
/// Fractional values encode ranges such as "3-4 persons" as 3.5.
struct PersonsBand {
    double min_area_m2 = 0.0;
    double max_area_m2 = 0.0;
    double persons = 0.0;
};

/// The area-band table of the township case study. Single-valued
/// entries (43.1 and 35.75 m^2) are widened to +/-0.5 m^2 bands.
std::vector<PersonsBand> default_persons_bands();

struct EstimationConfig {
    double floor_height_m = 3.0;
    double min_building_height_m = 2.0;
    double occupancy_rate = 1.0;
    double efficiency = 0.7;
    std::vector<PersonsBand> bands = default_persons_bands();
    double height_percentile = 90.0;
    long min_cells = 4;

    void validate() const;
};

struct BuildingEstimate {
    std::string id;
    std::string type_label;
    double height_m = 0.0;
    int floors = 0;
    int units_per_floor = 0;
    int units = 0;
    std::optional<double> unit_area_m2;
    double persons = 0.0;
    bool excluded = false;
    std::string exclusion_reason;
};

/// ceil(height / floor_height), at least 1; nullopt when the building is below
/// the minimum height.
std::optional<int> floors_from_height(double height_m, const EstimationConfig& cfg);

/// Override when present, otherwise max(1, floor(area * efficiency / unit_area)).
int units_per_floor(const std::string& id, double footprint_area_m2,
                    std::optional<double> unit_area_m2, const EstimationConfig& cfg,
                    std::optional<int> override_units);

/// Band lookup with inclusive bounds. Areas in a gap take the band with the
/// nearest midpoint (ties go to the smaller band); areas beyond the table take
/// the nearest extreme band.
double persons_per_unit(double unit_area_m2, const std::vector<PersonsBand>& bands);

BuildingEstimate estimate_building(const BuildingHeightRecord& rec, const Footprint& fp,
                                   const EstimationConfig& cfg);

/// Building that failed upstream (e.g. no raster coverage): kept in the batch
/// as an excluded row with zero contribution.
BuildingEstimate failed_estimate(const Footprint& fp, const std::string& reason);

struct TypeTotals {
    long buildings = 0;
    long excluded = 0;
    long units = 0;
    double persons = 0.0;
};

struct SocietyEstimate {
    std::map<std::string, TypeTotals> by_type;
    long total_units = 0;
    double total_persons = 0.0;
    long total_persons_rounded = 0;  ///< half-up, applied only to the grand total
};

SocietyEstimate aggregate(const std::vector<BuildingEstimate>& estimates);

/// Estimates CSV: id,type_label,height_m,floors,units_per_floor,units,unit_area_m2,persons,excluded
/// `excluded` is empty for counted buildings and holds the reason otherwise.
void write_estimates_csv(std::ostream& out, const std::vector<BuildingEstimate>& estimates);
std::vector<BuildingEstimate> read_estimates_csv(std::istream& in);

} // namespace popest
