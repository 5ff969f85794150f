// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The popest Authors

#pragma once

#include <Eigen/Core>

#include <iosfwd>
#include <string>
#include <vector>

#include "popest/footprint.hpp"

namespace popest {

/// Polygon mesh with 1-based, outward-wound (counter-clockwise seen from
/// outside) faces, grouped into one object per building.
struct Mesh {
    struct Object {
        std::string id;
        std::size_t first_vertex = 0;  ///< 0-based offset into vertices
        std::size_t vertex_count = 0;
        std::size_t first_face = 0;
        std::size_t face_count = 0;
    };

    std::vector<Eigen::Vector3d> vertices;
    std::vector<std::vector<std::size_t>> faces;
    std::vector<Object> objects;
};

struct ExtrusionInput {
    Footprint footprint;
    double height_m = 0.0;
    double base_elevation_m = 0.0;
};

struct ExtrusionResult {
    Mesh mesh;
    std::vector<std::string> skipped;  ///< ids of zero-height buildings
};

/// LoD1 block model: one flat-roofed prism per building.
ExtrusionResult extrude(const std::vector<ExtrusionInput>& buildings);

/// Enclosed volume by the divergence theorem (fan-triangulated faces).
double mesh_volume(const Mesh& mesh);
double object_volume(const Mesh& mesh, const Mesh::Object& object);

void write_obj(std::ostream& out, const Mesh& mesh);

} // namespace popest
