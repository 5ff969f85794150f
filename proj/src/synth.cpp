// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The popest Authors

#include "popest/synth.hpp"

#include <json.hpp>

#include <fstream>
#include <ostream>
#include <sstream>

#include "popest/csv.hpp"

namespace popest::synth {

using nlohmann::json;

SyntheticDsm synthesize_dsm(const Scene& scene) {
    const GridGeoref& geo = scene.georef;
    geo.validate();
    if (!(scene.noise_amplitude_m >= 0.0)) throw InvalidArgument("noise_amplitude_m must be >= 0");

    Eigen::Array<int, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> owner =
        Eigen::Array<int, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>::Constant(geo.nrows,
                                                                                    geo.ncols, -1);
    SyntheticDsm out;
    for (std::size_t i = 0; i < scene.prisms.size(); ++i) {
        const auto& p = scene.prisms[i];
        const auto& fp = p.footprint;
        if (!(p.height_m >= 0.0)) throw BuildingError(fp.id, "prism height must be >= 0");
        for (const auto& v : fp.ring) {
            if (v.x() < geo.xll || v.x() > geo.xmax() || v.y() < geo.yll || v.y() > geo.ymax())
                throw BuildingError(fp.id, "prism lies outside the grid extent");
        }
        const auto cells = rasterize_polygon(fp, geo);
        for (const auto& c : cells) {
            int& o = owner(c.row, c.col);
            if (o >= 0)
                throw InvalidArgument("prisms '" + scene.prisms[o].footprint.id + "' and '" + fp.id +
                                      "' overlap");
            o = static_cast<int>(i);
        }
        out.heights.push_back({fp.id, fp.type_label, p.height_m, static_cast<long>(cells.size())});
    }

    Grid::Values terrain(geo.nrows, geo.ncols);
    Grid::Values dsm(geo.nrows, geo.ncols);
    Lcg64 rng(scene.seed);
    for (Index r = 0; r < geo.nrows; ++r) {
        const double y = geo.cell_center_y(r);
        for (Index c = 0; c < geo.ncols; ++c) {
            const double z = scene.terrain.at(geo, geo.cell_center_x(c), y);
            const double noise = rng.symmetric(scene.noise_amplitude_m);
            const int o = owner(r, c);
            terrain(r, c) = z;
            dsm(r, c) = z + (o >= 0 ? scene.prisms[o].height_m : 0.0) + noise;
        }
    }
    out.dsm = Grid(geo, std::move(dsm));
    out.truth_dtm = Grid(geo, std::move(terrain));
    return out;
}

Scene parse_scene_text(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("invalid scene JSON: ") + e.what());
    }
    try {
        Scene s;
        const auto& g = doc.at("georef");
        s.georef.ncols = g.at("ncols").get<Index>();
        s.georef.nrows = g.at("nrows").get<Index>();
        s.georef.xll = g.value("xll", 0.0);
        s.georef.yll = g.value("yll", 0.0);
        s.georef.cellsize = g.at("cellsize").get<double>();
        s.georef.validate();
        if (doc.contains("terrain")) {
            const auto& t = doc["terrain"];
            s.terrain.origin_elev = t.value("origin_elev", 0.0);
            s.terrain.grad_x = t.value("grad_x", 0.0);
            s.terrain.grad_y = t.value("grad_y", 0.0);
        }
        s.noise_amplitude_m = doc.value("noise_amplitude_m", 0.0);
        s.seed = doc.value("seed", std::uint64_t{0});
        for (const auto& p : doc.value("prisms", json::array())) {
            Ring ring;
            for (const auto& v : p.at("ring")) ring.emplace_back(v.at(0).get<double>(), v.at(1).get<double>());
            std::optional<double> unit_area;
            if (p.contains("unit_area_m2")) unit_area = p["unit_area_m2"].get<double>();
            std::optional<int> upf;
            if (p.contains("units_per_floor")) upf = p["units_per_floor"].get<int>();
            Prism prism;
            prism.footprint = make_footprint(p.at("id").get<std::string>(),
                                             p.value("type_label", std::string("untyped")),
                                             std::move(ring), unit_area, upf);
            prism.height_m = p.at("height_m").get<double>();
            s.prisms.push_back(std::move(prism));
        }
        return s;
    } catch (const json::exception& e) {
        throw ParseError(std::string("scene JSON: ") + e.what());
    }
}

Scene parse_scene(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open scene file '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scene_text(buf.str());
}

std::string scene_to_json(const Scene& scene) {
    json prisms = json::array();
    for (const auto& p : scene.prisms) {
        json ring = json::array();
        for (const auto& v : p.footprint.ring) ring.push_back({v.x(), v.y()});
        json entry = {{"id", p.footprint.id},
                      {"type_label", p.footprint.type_label},
                      {"ring", ring},
                      {"height_m", p.height_m}};
        if (p.footprint.unit_area_m2) entry["unit_area_m2"] = *p.footprint.unit_area_m2;
        if (p.footprint.units_per_floor_override)
            entry["units_per_floor"] = *p.footprint.units_per_floor_override;
        prisms.push_back(std::move(entry));
    }
    const auto& g = scene.georef;
    json doc = {{"georef",
                 {{"ncols", g.ncols}, {"nrows", g.nrows}, {"xll", g.xll}, {"yll", g.yll},
                  {"cellsize", g.cellsize}}},
                {"terrain",
                 {{"origin_elev", scene.terrain.origin_elev},
                  {"grad_x", scene.terrain.grad_x},
                  {"grad_y", scene.terrain.grad_y}}},
                {"prisms", prisms},
                {"noise_amplitude_m", scene.noise_amplitude_m},
                {"seed", scene.seed}};
    return doc.dump(1) + "\n";
}

std::vector<Footprint> scene_footprints(const Scene& scene) {
    std::vector<Footprint> out;
    out.reserve(scene.prisms.size());
    for (const auto& p : scene.prisms) out.push_back(p.footprint);
    return out;
}

void write_true_heights_csv(std::ostream& out, const SyntheticDsm& result, const Scene& scene) {
    std::vector<BuildingHeightRecord> records;
    for (std::size_t i = 0; i < result.heights.size(); ++i) {
        const auto& h = result.heights[i];
        records.push_back({h.id, h.type_label, h.height_m, footprint_area(scene.prisms[i].footprint),
                           h.cells});
    }
    write_heights_csv(out, records);
}

} // namespace popest::synth
