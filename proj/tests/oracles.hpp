// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The popest Authors

// Test-only reference routes. Nothing here calls into the code under test
// except for plain data types.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "popest/raster.hpp"

namespace oracle {

/// Direct 2D min-then-max over square windows; nodata treated as absent.
inline popest::Grid brute_force_opening(const popest::Grid& g, int window) {
    const auto rows = g.rows(), cols = g.cols();
    const long h = window / 2;
    const double nd = g.nodata();
    popest::Grid eroded(g.georef(), nd, nd);
    for (long r = 0; r < rows; ++r)
        for (long c = 0; c < cols; ++c) {
            double m = std::numeric_limits<double>::infinity();
            for (long i = r - h; i <= r + h; ++i)
                for (long j = c - h; j <= c + h; ++j)
                    if (i >= 0 && j >= 0 && i < rows && j < cols && g.is_valid(i, j))
                        m = std::min(m, g(i, j));
            eroded(r, c) = std::isinf(m) ? nd : m;
        }
    popest::Grid opened(g.georef(), nd, nd);
    for (long r = 0; r < rows; ++r)
        for (long c = 0; c < cols; ++c) {
            double m = -std::numeric_limits<double>::infinity();
            for (long i = r - h; i <= r + h; ++i)
                for (long j = c - h; j <= c + h; ++j)
                    if (i >= 0 && j >= 0 && i < rows && j < cols && eroded.is_valid(i, j))
                        m = std::max(m, eroded(i, j));
            opened(r, c) = std::isinf(m) ? nd : m;
        }
    return opened;
}

/// Great-circle distance from the chord between unit vectors (no haversine).
inline double chord_distance_m(double lat1, double lon1, double lat2, double lon2) {
    constexpr double R = 6371008.8;
    constexpr double d = std::numbers::pi / 180.0;
    auto unit = [&](double lat, double lon) {
        return std::array<double, 3>{std::cos(lat * d) * std::cos(lon * d),
                                     std::cos(lat * d) * std::sin(lon * d), std::sin(lat * d)};
    };
    const auto a = unit(lat1, lon1), b = unit(lat2, lon2);
    const double chord = std::sqrt((a[0] - b[0]) * (a[0] - b[0]) + (a[1] - b[1]) * (a[1] - b[1]) +
                                   (a[2] - b[2]) * (a[2] - b[2]));
    return 2.0 * R * std::asin(std::min(1.0, chord / 2.0));
}

/// One tabulated building of the township case study.
struct CaseStudyRow {
    const char* type_label;
    int serial;
    double height_m;
    int printed_floors;   ///< parenthesized floor count as printed
    double length_m, breadth_m;
    double unit_length_m, unit_breadth_m;
};

// Heights, printed floor counts and dimensions as published for the five building types.
inline const std::vector<CaseStudyRow>& case_study_rows() {
    static const std::vector<CaseStudyRow> rows = {
        {"Type1", 1, 19.8, 7, 30, 30.5, 15, 12.5},   {"Type1", 2, 19.8, 7, 30, 29.8, 15, 12},
        {"Type1", 3, 20.0, 7, 30, 27, 15, 11.8},     {"Type1", 4, 4.5, 2, 28, 28, 13, 11.2},
        {"Type1", 5, 4.5, 2, 28, 28, 13, 11.2},      {"Type1", 6, 4.5, 2, 28, 28, 13, 11.2},
        {"Type1", 7, 19.3, 7, 28.5, 29, 13, 11.2},
        {"Type2", 1, 19.5, 7, 19, 27.2, 9.5, 9.5},   {"Type2", 2, 19.5, 7, 19, 27.2, 9.5, 9.5},
        {"Type2", 3, 19.8, 7, 19, 27.2, 9.5, 9.5},   {"Type2", 4, 5.6, 2, 20.5, 31, 8.5, 10},
        {"Type2", 5, 5.0, 2, 20.5, 31, 8.5, 10},     {"Type2", 6, 4.85, 2, 20.5, 31, 8.5, 10},
        {"Type2", 7, 4.8, 2, 20.5, 31, 8.5, 10},     {"Type2", 8, 4.2, 2, 20.5, 31, 8.5, 10},
        {"Type2", 9, 19.5, 7, 18.5, 27.7, 9, 9.9},   {"Type2", 10, 19.2, 7, 18.5, 27.7, 9, 9.9},
        {"Type2", 11, 19.7, 7, 18.5, 27.7, 9, 9.9},
        {"Type3", 1, 11, 4, 17, 17.5, 8, 6.5},       {"Type3", 2, 9, 3, 17, 17.5, 8, 6.5},
        {"Type3", 3, 8, 3, 17, 17.5, 8, 6.5},        {"Type3", 4, 8, 3, 17, 17.5, 8, 6.5},
        {"Type3", 5, 8, 3, 17, 17.5, 8, 6.5},        {"Type3", 6, 10, 3, 17, 17.5, 8, 6.5},
        {"Type3", 7, 8, 3, 17, 17.5, 8, 6.5},        {"Type3", 8, 8, 3, 17, 17.5, 8, 6.5},
        {"Type3", 9, 10, 4, 17, 17.5, 8, 6.5},       {"Type3", 10, 12, 4, 17, 17.5, 8, 6.5},
        {"Type3", 11, 10, 4, 17, 17.5, 8, 6.5},      {"Type3", 12, 12, 4, 20, 17, 8.5, 6},
        {"Type3", 13, 12, 4, 20, 17, 8.5, 6},        {"Type3", 14, 11, 4, 20, 17, 8.5, 6},
        {"Type3", 15, 6, 2, 20, 17, 8.5, 6},         {"Type3", 16, 10, 4, 20, 17, 8.5, 6},
        {"Type3", 17, 12, 4, 20, 17, 8.5, 6},
        {"Type4", 1, 10, 4, 15, 16.5, 7.2, 6},       {"Type4", 2, 11, 4, 15, 16.5, 7.2, 6},
        {"Type5", 1, 10, 4, 14, 16, 6.5, 5.5},       {"Type5", 2, 10, 4, 14, 16, 6.5, 5.5},
    };
    return rows;
}

inline std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

struct ObjCounts {
    std::size_t vertices = 0;
    std::size_t faces = 0;
    std::size_t objects = 0;
    std::size_t max_index = 0;
};

/// Minimal OBJ reader: counts v/f/o records and the largest face index.
inline ObjCounts read_obj_counts(const std::string& text) {
    ObjCounts c;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string tag;
        ls >> tag;
        if (tag == "v") ++c.vertices;
        else if (tag == "o") ++c.objects;
        else if (tag == "f") {
            ++c.faces;
            std::size_t idx;
            while (ls >> idx) c.max_index = std::max(c.max_index, idx);
        }
    }
    return c;
}

} // namespace oracle
