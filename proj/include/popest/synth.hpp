// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The popest Authors

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "popest/footprint.hpp"
#include "popest/raster.hpp"

namespace popest::synth {

/// 64-bit linear congruential generator (Knuth's MMIX constants):
///   state <- state * 6364136223846793005 + 1442695040888963407  (mod 2^64)
/// Each draw advances the state once and maps its top 53 bits to [0, 1).
class Lcg64 {
public:
    static constexpr std::uint64_t kMultiplier = 6364136223846793005ULL;
    static constexpr std::uint64_t kIncrement = 1442695040888963407ULL;

    explicit Lcg64(std::uint64_t seed) noexcept : state_(seed) {}

    std::uint64_t next() noexcept {
        state_ = state_ * kMultiplier + kIncrement;
        return state_;
    }
    double uniform01() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    /// Uniform in [-a, a).
    double symmetric(double a) noexcept { return a * (2.0 * uniform01() - 1.0); }

private:
    std::uint64_t state_;
};

/// Planar terrain z = origin_elev + grad_x (x - xll) + grad_y (y - yll).
struct Terrain {
    double origin_elev = 0.0;
    double grad_x = 0.0;
    double grad_y = 0.0;

    double at(const GridGeoref& g, double x, double y) const noexcept {
        return origin_elev + grad_x * (x - g.xll) + grad_y * (y - g.yll);
    }
};

struct Prism {
    Footprint footprint;
    double height_m = 0.0;
};

struct Scene {
    GridGeoref georef;
    Terrain terrain;
    std::vector<Prism> prisms;
    double noise_amplitude_m = 0.0;
    std::uint64_t seed = 0;
};

struct TrueHeight {
    std::string id;
    std::string type_label;
    double height_m = 0.0;
    long cells = 0;
};

struct SyntheticDsm {
    Grid dsm;
    Grid truth_dtm;
    std::vector<TrueHeight> heights;
};

/// DSM = terrain at cell center + covering prism height + noise. Noise is drawn
/// once per cell in row-major order. Prisms sharing any cell are rejected.
SyntheticDsm synthesize_dsm(const Scene& scene);

/// Scene JSON: {georef:{ncols,nrows,xll,yll,cellsize}, terrain:{origin_elev,grad_x,grad_y},
/// prisms:[{id, ring:[[x,y],...], height_m, type_label?, unit_area_m2?, units_per_floor?}],
/// noise_amplitude_m, seed}
Scene parse_scene_text(const std::string& text);
Scene parse_scene(const std::filesystem::path& path);
std::string scene_to_json(const Scene& scene);

std::vector<Footprint> scene_footprints(const Scene& scene);

/// Heights CSV in the same schema as the zonal stage, with true heights.
void write_true_heights_csv(std::ostream& out, const SyntheticDsm& result, const Scene& scene);

} // namespace popest::synth
