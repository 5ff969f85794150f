// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The popest Authors

#include "popest/footprint.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "popest/csv.hpp"

namespace popest {

using nlohmann::json;

namespace {

double cross(const Eigen::Vector2d& o, const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
    return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}

int sign(double v) { return (v > 0.0) - (v < 0.0); }

bool on_segment(const Eigen::Vector2d& p, const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
    return std::min(a.x(), b.x()) <= p.x() && p.x() <= std::max(a.x(), b.x()) &&
           std::min(a.y(), b.y()) <= p.y() && p.y() <= std::max(a.y(), b.y());
}

bool segments_intersect(const Eigen::Vector2d& p1, const Eigen::Vector2d& p2,
                        const Eigen::Vector2d& q1, const Eigen::Vector2d& q2) {
    const int d1 = sign(cross(q1, q2, p1));
    const int d2 = sign(cross(q1, q2, p2));
    const int d3 = sign(cross(p1, p2, q1));
    const int d4 = sign(cross(p1, p2, q2));
    if (d1 * d2 < 0 && d3 * d4 < 0) return true;
    if (d1 == 0 && on_segment(p1, q1, q2)) return true;
    if (d2 == 0 && on_segment(p2, q1, q2)) return true;
    if (d3 == 0 && on_segment(q1, p1, p2)) return true;
    if (d4 == 0 && on_segment(q2, p1, p2)) return true;
    return false;
}

} // namespace

double signed_area(const Ring& ring) noexcept {
    const std::size_t n = ring.size();
    if (n < 3) return 0.0;
    // Shoelace about the first vertex keeps large projected coordinates well conditioned.
    const Eigen::Vector2d o = ring.front();
    double twice = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const Eigen::Vector2d a = ring[i] - o;
        const Eigen::Vector2d b = ring[(i + 1) % n] - o;
        twice += a.x() * b.y() - b.x() * a.y();
    }
    return 0.5 * twice;
}

double footprint_area(const Footprint& f) noexcept { return std::abs(signed_area(f.ring)); }

bool ring_self_intersects(const Ring& ring) noexcept {
    const std::size_t n = ring.size();
    for (std::size_t i = 0; i < n; ++i) {
        const auto& a1 = ring[i];
        const auto& a2 = ring[(i + 1) % n];
        for (std::size_t j = i + 1; j < n; ++j) {
            const bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
            const auto& b1 = ring[j];
            const auto& b2 = ring[(j + 1) % n];
            if (adjacent) {
                // Adjacent edges share one vertex; they may only overlap if collinear and folding back.
                const Eigen::Vector2d& shared = (j == i + 1) ? a2 : a1;
                const Eigen::Vector2d& other_a = (j == i + 1) ? a1 : a2;
                const Eigen::Vector2d& other_b = (j == i + 1) ? b2 : b1;
                if (sign(cross(shared, other_a, other_b)) == 0 &&
                    (other_a - shared).dot(other_b - shared) > 0.0)
                    return true;
                continue;
            }
            if (segments_intersect(a1, a2, b1, b2)) return true;
        }
    }
    return false;
}

bool point_in_ring(const Ring& ring, const Eigen::Vector2d& p) noexcept {
    bool inside = false;
    const std::size_t n = ring.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const auto& a = ring[i];
        const auto& b = ring[j];
        if ((a.y() > p.y()) != (b.y() > p.y())) {
            const double x_cross = a.x() + (p.y() - a.y()) * (b.x() - a.x()) / (b.y() - a.y());
            if (p.x() < x_cross) inside = !inside;
        }
    }
    return inside;
}

Ring normalize_ring(Ring ring, const std::string& id) {
    for (const auto& v : ring)
        if (!v.allFinite()) throw BuildingError(id, "ring has a non-finite vertex");
    Ring cleaned;
    for (const auto& v : ring)
        if (cleaned.empty() || cleaned.back() != v) cleaned.push_back(v);
    while (cleaned.size() > 1 && cleaned.front() == cleaned.back()) cleaned.pop_back();
    if (cleaned.size() < 3) throw BuildingError(id, "ring needs at least 3 distinct vertices");
    if (ring_self_intersects(cleaned)) throw BuildingError(id, "ring is self-intersecting");
    const double area = signed_area(cleaned);
    if (!(std::abs(area) > 0.0)) throw BuildingError(id, "ring has zero area");
    if (area < 0.0) std::reverse(cleaned.begin(), cleaned.end());
    return cleaned;
}

Footprint make_footprint(std::string id, std::string type_label, Ring ring,
                         std::optional<double> unit_area_m2,
                         std::optional<int> units_per_floor_override) {
    if (id.empty()) throw InvalidArgument("footprint id must not be empty");
    if (unit_area_m2 && !(*unit_area_m2 > 0.0) )
        throw BuildingError(id, "unit_area_m2 must be > 0");
    if (units_per_floor_override && *units_per_floor_override < 1)
        throw BuildingError(id, "units_per_floor must be >= 1");
    Footprint f;
    f.ring = normalize_ring(std::move(ring), id);
    f.id = std::move(id);
    f.type_label = std::move(type_label);
    f.unit_area_m2 = unit_area_m2;
    f.units_per_floor_override = units_per_floor_override;
    return f;
}

std::vector<Footprint> parse_footprints_text(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("invalid GeoJSON: ") + e.what());
    }
    if (!doc.is_object() || doc.value("type", "") != "FeatureCollection")
        throw ParseError("GeoJSON root must be a FeatureCollection");
    if (!doc.contains("features") || !doc["features"].is_array())
        throw ParseError("FeatureCollection has no 'features' array");

    std::vector<Footprint> out;
    std::set<std::string> seen;
    std::size_t index = 0;
    for (const auto& feat : doc["features"]) {
        const std::string where = "feature #" + std::to_string(index++);
        if (!feat.is_object()) throw ParseError(where + ": not an object");
        const json props = feat.contains("properties") && feat["properties"].is_object()
                               ? feat["properties"]
                               : json::object();
        std::string id;
        if (props.contains("id") && props["id"].is_string())
            id = props["id"].get<std::string>();
        else if (props.contains("id") && props["id"].is_number_integer())
            id = std::to_string(props["id"].get<long long>());
        if (id.empty()) throw ParseError(where + ": missing property 'id'");
        const std::string label = where + " (id '" + id + "')";

        if (!feat.contains("geometry") || !feat["geometry"].is_object())
            throw ParseError(label + ": missing geometry");
        const auto& geom = feat["geometry"];
        const std::string gtype = geom.value("type", "");
        if (gtype != "Polygon")
            throw ParseError(label + ": unsupported geometry type '" + gtype +
                             "', only Polygon is accepted");
        if (!geom.contains("coordinates") || !geom["coordinates"].is_array() ||
            geom["coordinates"].empty())
            throw ParseError(label + ": Polygon has no rings");
        if (geom["coordinates"].size() > 1)
            throw ParseError(label + ": Polygon holes are not supported");

        Ring ring;
        for (const auto& pos : geom["coordinates"][0]) {
            if (!pos.is_array() || pos.size() < 2 || !pos[0].is_number() || !pos[1].is_number())
                throw ParseError(label + ": malformed coordinate position");
            ring.emplace_back(pos[0].get<double>(), pos[1].get<double>());
        }

        std::string type_label = "untyped";
        if (props.contains("type_label") && props["type_label"].is_string())
            type_label = props["type_label"].get<std::string>();
        std::optional<double> unit_area;
        if (props.contains("unit_area_m2") && !props["unit_area_m2"].is_null()) {
            if (!props["unit_area_m2"].is_number())
                throw ParseError(label + ": unit_area_m2 must be a number");
            unit_area = props["unit_area_m2"].get<double>();
        }
        std::optional<int> upf;
        if (props.contains("units_per_floor") && !props["units_per_floor"].is_null()) {
            if (!props["units_per_floor"].is_number_integer())
                throw ParseError(label + ": units_per_floor must be an integer");
            upf = props["units_per_floor"].get<int>();
        }

        if (!seen.insert(id).second) throw ParseError("duplicate footprint id '" + id + "'");
        try {
            out.push_back(make_footprint(id, type_label, std::move(ring), unit_area, upf));
        } catch (const BuildingError& e) {
            throw ParseError(label + ": " + e.what());
        }
    }
    return out;
}

std::vector<Footprint> parse_footprints(std::istream& in) {
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_footprints_text(buf.str());
}

std::vector<Footprint> parse_footprints(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open footprint file '" + path.string() + "'");
    try {
        return parse_footprints(in);
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

void write_footprints(std::ostream& out, const std::vector<Footprint>& footprints) {
    json features = json::array();
    for (const auto& f : footprints) {
        json ring = json::array();
        for (const auto& v : f.ring) ring.push_back({v.x(), v.y()});
        ring.push_back({f.ring.front().x(), f.ring.front().y()});
        json props = {{"id", f.id}, {"type_label", f.type_label}};
        if (f.unit_area_m2) props["unit_area_m2"] = *f.unit_area_m2;
        if (f.units_per_floor_override) props["units_per_floor"] = *f.units_per_floor_override;
        features.push_back({{"type", "Feature"},
                            {"properties", props},
                            {"geometry", {{"type", "Polygon"}, {"coordinates", {ring}}}}});
    }
    out << json{{"type", "FeatureCollection"}, {"features", features}}.dump(1) << '\n';
}

std::vector<Cell> rasterize_polygon(const Footprint& f, const GridGeoref& georef) {
    double xmin = f.ring.front().x(), xmax = xmin;
    double ymin = f.ring.front().y(), ymax = ymin;
    for (const auto& v : f.ring) {
        xmin = std::min(xmin, v.x());
        xmax = std::max(xmax, v.x());
        ymin = std::min(ymin, v.y());
        ymax = std::max(ymax, v.y());
    }
    const double cs = georef.cellsize;
    const double nudge = 1e-9 * cs;
    auto clamp_col = [&](double v) {
        return std::clamp<Index>(static_cast<Index>(std::floor(v)), 0, georef.ncols - 1);
    };
    auto clamp_row = [&](double v) {
        return std::clamp<Index>(static_cast<Index>(std::floor(v)), 0, georef.nrows - 1);
    };
    // Column c has center xll + (c + 0.5) cs; row r has center yll + (nrows - r - 0.5) cs.
    const Index c0 = clamp_col((xmin - georef.xll) / cs - 1.0);
    const Index c1 = clamp_col((xmax - georef.xll) / cs + 1.0);
    const Index r0 = clamp_row(static_cast<double>(georef.nrows) - (ymax - georef.yll) / cs - 1.0);
    const Index r1 = clamp_row(static_cast<double>(georef.nrows) - (ymin - georef.yll) / cs + 1.0);

    std::vector<Cell> cells;
    const bool overlaps = xmax > georef.xll && xmin < georef.xmax() && ymax > georef.yll &&
                          ymin < georef.ymax();
    if (overlaps) {
        for (Index r = r0; r <= r1; ++r) {
            const double y = georef.cell_center_y(r) + nudge;
            for (Index c = c0; c <= c1; ++c) {
                const Eigen::Vector2d p(georef.cell_center_x(c) + nudge, y);
                if (point_in_ring(f.ring, p)) cells.push_back({r, c});
            }
        }
    }
    if (cells.empty()) throw EmptySelection(f.id);
    return cells;
}

double nearest_rank_percentile(std::vector<double> values, double percentile) {
    if (values.empty()) throw InvalidArgument("percentile of an empty sample");
    if (!(percentile >= 0.0 && percentile <= 100.0))
        throw InvalidArgument("percentile must lie in [0, 100]");
    std::sort(values.begin(), values.end());
    const auto n = static_cast<double>(values.size());
    auto rank = static_cast<std::size_t>(std::ceil(percentile / 100.0 * n));
    rank = std::clamp<std::size_t>(rank, 1, values.size());
    return values[rank - 1];
}

BuildingHeightRecord zonal_height(const Grid& ndsm, const Footprint& f, double percentile,
                                  long min_cells) {
    if (min_cells < 1) throw InvalidArgument("min_cells must be >= 1");
    const auto cells = rasterize_polygon(f, ndsm.georef());
    std::vector<double> samples;
    samples.reserve(cells.size());
    for (const auto& cell : cells)
        if (ndsm.is_valid(cell.row, cell.col)) samples.push_back(ndsm(cell.row, cell.col));
    const auto found = static_cast<long>(samples.size());
    if (found < min_cells) throw InsufficientCoverage(f.id, found, min_cells);

    BuildingHeightRecord rec;
    rec.id = f.id;
    rec.type_label = f.type_label;
    rec.height_m = std::max(0.0, nearest_rank_percentile(std::move(samples), percentile));
    rec.footprint_area_m2 = footprint_area(f);
    rec.valid_cells = found;
    return rec;
}

void write_heights_csv(std::ostream& out, const std::vector<BuildingHeightRecord>& records) {
    out << "id,type_label,height_m,footprint_area_m2,valid_cells\n";
    for (const auto& r : records) {
        out << csv::escape(r.id) << ',' << csv::escape(r.type_label) << ','
            << csv::fixed(r.height_m, 3) << ',' << csv::fixed(r.footprint_area_m2, 3) << ','
            << r.valid_cells << '\n';
    }
}

std::vector<BuildingHeightRecord> read_heights_csv(std::istream& in) {
    const auto table = csv::read(in);
    const auto id = table.column("id");
    const auto type = table.column("type_label");
    const auto height = table.column("height_m");
    const auto area = table.column("footprint_area_m2");
    const auto cells = table.column("valid_cells");
    std::vector<BuildingHeightRecord> out;
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& row = table.rows[i];
        const auto line = table.lines[i];
        BuildingHeightRecord rec;
        rec.id = row[id];
        rec.type_label = row[type];
        rec.height_m = csv::parse_real(row[height], line, "height_m");
        rec.footprint_area_m2 = csv::parse_real(row[area], line, "footprint_area_m2");
        rec.valid_cells = csv::parse_integer(row[cells], line, "valid_cells");
        out.push_back(std::move(rec));
    }
    return out;
}

} // namespace popest
