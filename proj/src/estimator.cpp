// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The popest Authors

#include "popest/estimator.hpp"

#include <cmath>
#include <istream>
#include <ostream>

#include "popest/csv.hpp"

namespace popest {

namespace {
// Absorbs representation error in quotients that are mathematically integral (e.g. 9 / 3).
constexpr double kQuotientSlack = 1e-9;
} // namespace

std::vector<PersonsBand> default_persons_bands() {
    return {
        {35.25, 36.25, 2.0},
        {42.6, 43.6, 3.0},
        {50.0, 52.0, 3.5},
        {85.0, 90.0, 4.0},
        {146.0, 187.0, 6.0},
    };
}

void EstimationConfig::validate() const {
    if (!(floor_height_m > 0.0)) throw ConfigError("floor_height_m must be > 0");
    if (!(min_building_height_m >= 0.0)) throw ConfigError("min_building_height_m must be >= 0");
    if (!(occupancy_rate >= 0.0 && occupancy_rate <= 1.0))
        throw ConfigError("occupancy_rate must lie in [0, 1]");
    if (!(efficiency > 0.0 && efficiency <= 1.0))
        throw ConfigError("efficiency must lie in (0, 1]");
    if (!(height_percentile >= 0.0 && height_percentile <= 100.0))
        throw ConfigError("height_percentile must lie in [0, 100]");
    if (min_cells < 1) throw ConfigError("min_cells must be >= 1");
    if (bands.empty()) throw ConfigError("persons band table is empty");
    for (std::size_t i = 0; i < bands.size(); ++i) {
        const auto& b = bands[i];
        if (!(b.min_area_m2 < b.max_area_m2))
            throw ConfigError("band " + std::to_string(i) + ": min_area_m2 must be < max_area_m2");
        if (!(b.persons > 0.0 && b.persons <= 20.0))
            throw ConfigError("band " + std::to_string(i) + ": persons must lie in (0, 20]");
        if (i > 0 && !(bands[i - 1].max_area_m2 < b.min_area_m2))
            throw ConfigError("bands must be sorted ascending and non-overlapping (band " +
                              std::to_string(i) + ")");
    }
}

std::optional<int> floors_from_height(double height_m, const EstimationConfig& cfg) {
    if (height_m < cfg.min_building_height_m) return std::nullopt;
    const double floors = std::ceil(height_m / cfg.floor_height_m - kQuotientSlack);
    return std::max(1, static_cast<int>(floors));
}

int units_per_floor(const std::string& id, double footprint_area_m2,
                    std::optional<double> unit_area_m2, const EstimationConfig& cfg,
                    std::optional<int> override_units) {
    if (override_units) {
        if (*override_units < 1) throw BuildingError(id, "units_per_floor override must be >= 1");
        return *override_units;
    }
    if (!unit_area_m2)
        throw BuildingError(id, "configuration error: neither unit_area_m2 nor units_per_floor given");
    if (!(*unit_area_m2 > 0.0) || !(footprint_area_m2 > 0.0))
        throw BuildingError(id, "configuration error: areas must be > 0");
    const double ratio = footprint_area_m2 * cfg.efficiency / *unit_area_m2;
    return std::max(1, static_cast<int>(std::floor(ratio + kQuotientSlack)));
}

double persons_per_unit(double unit_area_m2, const std::vector<PersonsBand>& bands) {
    if (bands.empty()) throw ConfigError("persons band table is empty");
    for (const auto& b : bands)
        if (unit_area_m2 >= b.min_area_m2 && unit_area_m2 <= b.max_area_m2) return b.persons;
    if (unit_area_m2 < bands.front().min_area_m2) return bands.front().persons;
    if (unit_area_m2 > bands.back().max_area_m2) return bands.back().persons;
    std::size_t best = 0;
    double best_dist = std::abs(unit_area_m2 - 0.5 * (bands[0].min_area_m2 + bands[0].max_area_m2));
    for (std::size_t i = 1; i < bands.size(); ++i) {
        const double mid = 0.5 * (bands[i].min_area_m2 + bands[i].max_area_m2);
        const double dist = std::abs(unit_area_m2 - mid);
        if (dist < best_dist) {
            best = i;
            best_dist = dist;
        }
    }
    return bands[best].persons;
}

BuildingEstimate estimate_building(const BuildingHeightRecord& rec, const Footprint& fp,
                                   const EstimationConfig& cfg) {
    BuildingEstimate est;
    est.id = fp.id;
    est.type_label = fp.type_label;
    est.height_m = rec.height_m;
    est.unit_area_m2 = fp.unit_area_m2;
    if (rec.height_m < 0.0) throw BuildingError(fp.id, "negative building height");

    const auto floors = floors_from_height(rec.height_m, cfg);
    if (!floors) {
        est.excluded = true;
        est.exclusion_reason = "below minimum height";
        return est;
    }
    est.floors = *floors;
    est.units_per_floor =
        units_per_floor(fp.id, rec.footprint_area_m2, fp.unit_area_m2, cfg, fp.units_per_floor_override);
    est.units = est.floors * est.units_per_floor;
    if (!fp.unit_area_m2)
        throw BuildingError(fp.id, "configuration error: unit_area_m2 is required for persons per unit");
    est.persons = est.units * persons_per_unit(*fp.unit_area_m2, cfg.bands) * cfg.occupancy_rate;
    return est;
}

BuildingEstimate failed_estimate(const Footprint& fp, const std::string& reason) {
    BuildingEstimate est;
    est.id = fp.id;
    est.type_label = fp.type_label;
    est.unit_area_m2 = fp.unit_area_m2;
    est.excluded = true;
    est.exclusion_reason = "error: " + reason;
    return est;
}

SocietyEstimate aggregate(const std::vector<BuildingEstimate>& estimates) {
    SocietyEstimate soc;
    for (const auto& e : estimates) {
        auto& t = soc.by_type[e.type_label];
        ++t.buildings;
        if (e.excluded) {
            ++t.excluded;
            continue;
        }
        t.units += e.units;
        t.persons += e.persons;
    }
    for (const auto& [label, t] : soc.by_type) {
        soc.total_units += t.units;
        soc.total_persons += t.persons;
    }
    soc.total_persons_rounded = static_cast<long>(std::floor(soc.total_persons + 0.5));
    return soc;
}

void write_estimates_csv(std::ostream& out, const std::vector<BuildingEstimate>& estimates) {
    out << "id,type_label,height_m,floors,units_per_floor,units,unit_area_m2,persons,excluded\n";
    for (const auto& e : estimates) {
        out << csv::escape(e.id) << ',' << csv::escape(e.type_label) << ','
            << csv::fixed(e.height_m, 3) << ',' << e.floors << ',' << e.units_per_floor << ','
            << e.units << ',' << (e.unit_area_m2 ? csv::fixed(*e.unit_area_m2, 3) : "") << ','
            << csv::fixed(e.persons, 3) << ',' << csv::escape(e.exclusion_reason) << '\n';
    }
}

std::vector<BuildingEstimate> read_estimates_csv(std::istream& in) {
    const auto t = csv::read(in);
    const auto c_id = t.column("id");
    const auto c_type = t.column("type_label");
    const auto c_h = t.column("height_m");
    const auto c_fl = t.column("floors");
    const auto c_upf = t.column("units_per_floor");
    const auto c_units = t.column("units");
    const auto c_area = t.column("unit_area_m2");
    const auto c_persons = t.column("persons");
    const auto c_excl = t.column("excluded");
    std::vector<BuildingEstimate> out;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const auto& row = t.rows[i];
        const auto line = t.lines[i];
        BuildingEstimate e;
        e.id = row[c_id];
        e.type_label = row[c_type];
        e.height_m = csv::parse_real(row[c_h], line, "height_m");
        e.floors = static_cast<int>(csv::parse_integer(row[c_fl], line, "floors"));
        e.units_per_floor = static_cast<int>(csv::parse_integer(row[c_upf], line, "units_per_floor"));
        e.units = static_cast<int>(csv::parse_integer(row[c_units], line, "units"));
        if (!row[c_area].empty()) e.unit_area_m2 = csv::parse_real(row[c_area], line, "unit_area_m2");
        e.persons = csv::parse_real(row[c_persons], line, "persons");
        e.exclusion_reason = row[c_excl];
        e.excluded = !e.exclusion_reason.empty();
        out.push_back(std::move(e));
    }
    return out;
}

} // namespace popest
