// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The popest Authors

#pragma once

#include <Eigen/Core>

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "popest/raster.hpp"

namespace popest {

using Ring = std::vector<Eigen::Vector2d>;

/// Building ground plan. The ring is open (no repeated closing vertex) and
/// counter-clockwise once built through make_footprint().
struct Footprint {
    std::string id;
    std::string type_label;
    Ring ring;
    std::optional<double> unit_area_m2;
    std::optional<int> units_per_floor_override;
};

/// Normalizes and validates a ring: drops a repeated closing vertex, removes
/// consecutive duplicates, enforces >= 3 vertices, non-self-intersection and
/// non-zero area, then orients counter-clockwise.
Ring normalize_ring(Ring ring, const std::string& id);

Footprint make_footprint(std::string id, std::string type_label, Ring ring,
                         std::optional<double> unit_area_m2 = std::nullopt,
                         std::optional<int> units_per_floor_override = std::nullopt);

/// Shoelace area; positive for counter-clockwise rings.
double signed_area(const Ring& ring) noexcept;

/// Planimetric footprint area in m^2.
double footprint_area(const Footprint& f) noexcept;

bool ring_self_intersects(const Ring& ring) noexcept;

/// Even-odd point-in-polygon test.
bool point_in_ring(const Ring& ring, const Eigen::Vector2d& p) noexcept;

/// Parses a GeoJSON FeatureCollection of Polygon features (exterior ring only).
std::vector<Footprint> parse_footprints(std::istream& in);
std::vector<Footprint> parse_footprints(const std::filesystem::path& path);
std::vector<Footprint> parse_footprints_text(const std::string& text);

void write_footprints(std::ostream& out, const std::vector<Footprint>& footprints);

struct Cell {
    Index row;
    Index col;
    friend bool operator==(const Cell&, const Cell&) = default;
    friend auto operator<=>(const Cell&, const Cell&) = default;
};

/// Cells whose center lies inside the ring, in row-major order. Centers are
/// nudged by +1e-9 cellsize on both axes so boundary-grazing centers resolve
/// deterministically. Throws EmptySelection when nothing is selected.
std::vector<Cell> rasterize_polygon(const Footprint& f, const GridGeoref& georef);

struct BuildingHeightRecord {
    std::string id;
    std::string type_label;
    double height_m = 0.0;
    double footprint_area_m2 = 0.0;
    long valid_cells = 0;
};

/// Nearest-rank percentile (rank = ceil(p/100 n), 1-based) of unsorted values.
double nearest_rank_percentile(std::vector<double> values, double percentile);

/// Building height from the nDSM: nearest-rank percentile of the valid cells
/// under the footprint, clamped at 0.
BuildingHeightRecord zonal_height(const Grid& ndsm, const Footprint& f, double percentile = 90.0,
                                  long min_cells = 4);

/// Heights CSV: id,type_label,height_m,footprint_area_m2,valid_cells
void write_heights_csv(std::ostream& out, const std::vector<BuildingHeightRecord>& records);
std::vector<BuildingHeightRecord> read_heights_csv(std::istream& in);

} // namespace popest
