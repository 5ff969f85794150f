// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The popest Authors

#include "popest/model3d.hpp"

#include <algorithm>
#include <charconv>
#include <ostream>

namespace popest {

ExtrusionResult extrude(const std::vector<ExtrusionInput>& buildings) {
    ExtrusionResult result;
    Mesh& mesh = result.mesh;
    for (const auto& b : buildings) {
        if (b.height_m < 0.0) throw BuildingError(b.footprint.id, "negative extrusion height");
        if (b.height_m == 0.0) {
            result.skipped.push_back(b.footprint.id);
            continue;
        }
        Ring ring = b.footprint.ring;
        if (signed_area(ring) < 0.0) std::reverse(ring.begin(), ring.end());
        const std::size_t n = ring.size();
        const double z0 = b.base_elevation_m;
        const double z1 = b.base_elevation_m + b.height_m;

        Mesh::Object obj{b.footprint.id, mesh.vertices.size(), 2 * n, mesh.faces.size(), n + 2};
        // 1-based indices: bottom ring at base + 1 .. base + n, top ring after it.
        const std::size_t base = mesh.vertices.size() + 1;
        for (const auto& v : ring) mesh.vertices.emplace_back(v.x(), v.y(), z0);
        for (const auto& v : ring) mesh.vertices.emplace_back(v.x(), v.y(), z1);

        std::vector<std::size_t> bottom(n), top(n);
        for (std::size_t i = 0; i < n; ++i) {
            bottom[i] = base + (n - 1 - i);
            top[i] = base + n + i;
        }
        mesh.faces.push_back(std::move(bottom));
        mesh.faces.push_back(std::move(top));
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t j = (i + 1) % n;
            mesh.faces.push_back({base + i, base + j, base + n + j, base + n + i});
        }
        mesh.objects.push_back(std::move(obj));
    }
    return result;
}

namespace {

double face_range_volume(const Mesh& mesh, std::size_t first, std::size_t count) {
    if (count == 0) return 0.0;
    // Local origin avoids cancellation with large projected coordinates.
    const Eigen::Vector3d origin = mesh.vertices[mesh.faces[first][0] - 1];
    double six_v = 0.0;
    for (std::size_t f = first; f < first + count; ++f) {
        const auto& face = mesh.faces[f];
        const Eigen::Vector3d a = mesh.vertices[face[0] - 1] - origin;
        for (std::size_t k = 1; k + 1 < face.size(); ++k) {
            const Eigen::Vector3d b = mesh.vertices[face[k] - 1] - origin;
            const Eigen::Vector3d c = mesh.vertices[face[k + 1] - 1] - origin;
            six_v += a.dot(b.cross(c));
        }
    }
    return six_v / 6.0;
}

void put(std::ostream& out, double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    out.write(buf, ptr - buf);
}

} // namespace

double mesh_volume(const Mesh& mesh) { return face_range_volume(mesh, 0, mesh.faces.size()); }

double object_volume(const Mesh& mesh, const Mesh::Object& object) {
    return face_range_volume(mesh, object.first_face, object.face_count);
}

void write_obj(std::ostream& out, const Mesh& mesh) {
    out << "# LoD1 block model\n";
    for (const auto& obj : mesh.objects) {
        out << "o " << obj.id << '\n';
        for (std::size_t i = obj.first_vertex; i < obj.first_vertex + obj.vertex_count; ++i) {
            const auto& v = mesh.vertices[i];
            out << "v ";
            put(out, v.x());
            out << ' ';
            put(out, v.y());
            out << ' ';
            put(out, v.z());
            out << '\n';
        }
        for (std::size_t f = obj.first_face; f < obj.first_face + obj.face_count; ++f) {
            out << 'f';
            for (auto idx : mesh.faces[f]) out << ' ' << idx;
            out << '\n';
        }
    }
}

} // namespace popest
