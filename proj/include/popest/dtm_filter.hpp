// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The popest Authors

#pragma once

#include <algorithm>
#include <limits>
#include <vector>

#include "popest/raster.hpp"

namespace popest {

/// Parameters of the progressive morphological ground filter.
struct DtmFilterParams {
    int initial_window = 3;            ///< cells, odd, >= 3
    double max_window_m = 35.0;        ///< growth stops after the first window reaching this span
    double slope = 0.3;                ///< rise/run used to grow the height threshold
    double initial_threshold_m = 0.5;
    double max_threshold_m = 3.0;

    /// Throws InvalidArgument on a violated parameter invariant.
    void validate(double cellsize) const;
};

/// Window sizes (cells) visited by the filter: w1 = initial_window, w(k+1) = 2 w(k) - 1,
/// ending with the first window whose span reaches max_window_m.
std::vector<int> window_schedule(const DtmFilterParams& p, double cellsize);

/// Height thresholds paired with window_schedule().
std::vector<double> threshold_schedule(const DtmFilterParams& p, double cellsize);

namespace detail {

// Separable moving-window extremum over a square window with truncation at the
// grid border. Cells equal to `absent` are ignored; an all-absent window yields `absent`.
template <typename Scalar, typename Pick>
Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>
window_extremum(const Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>& in,
                int window, Pick pick) {
    using Values = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    const Index half = window / 2;
    const Index rows = in.rows();
    const Index cols = in.cols();
    Values across(rows, cols);
    for (Index r = 0; r < rows; ++r) {
        for (Index c = 0; c < cols; ++c) {
            const Index c0 = std::max<Index>(0, c - half);
            const Index c1 = std::min<Index>(cols - 1, c + half);
            Scalar best = in(r, c0);
            for (Index k = c0 + 1; k <= c1; ++k) best = pick(best, in(r, k));
            across(r, c) = best;
        }
    }
    Values out(rows, cols);
    for (Index r = 0; r < rows; ++r) {
        const Index r0 = std::max<Index>(0, r - half);
        const Index r1 = std::min<Index>(rows - 1, r + half);
        out.row(r) = across.row(r0);
        for (Index k = r0 + 1; k <= r1; ++k)
            for (Index c = 0; c < cols; ++c) out(r, c) = pick(out(r, c), across(k, c));
    }
    return out;
}

inline void check_window(int window) {
    if (window < 1 || window % 2 == 0)
        throw InvalidArgument("morphological window must be a positive odd cell count, got " +
                              std::to_string(window));
}

} // namespace detail

/// Moving-window minimum over a square window; nodata cells are ignored.
template <typename Scalar>
BasicGrid<Scalar> morphological_erosion(const BasicGrid<Scalar>& g, int window) {
    detail::check_window(window);
    constexpr Scalar inf = std::numeric_limits<Scalar>::infinity();
    auto staged = g.valid_mask().select(g.values(), inf).eval();
    auto out = detail::window_extremum<Scalar>(staged, window,
                                                [](Scalar a, Scalar b) { return std::min(a, b); });
    out = (out == inf).select(g.nodata(), out);
    return BasicGrid<Scalar>(g.georef(), std::move(out), g.nodata());
}

/// Moving-window maximum over a square window; nodata cells are ignored.
template <typename Scalar>
BasicGrid<Scalar> morphological_dilation(const BasicGrid<Scalar>& g, int window) {
    detail::check_window(window);
    constexpr Scalar inf = std::numeric_limits<Scalar>::infinity();
    auto staged = g.valid_mask().select(g.values(), -inf).eval();
    auto out = detail::window_extremum<Scalar>(staged, window,
                                                [](Scalar a, Scalar b) { return std::max(a, b); });
    out = (out == -inf).select(g.nodata(), out);
    return BasicGrid<Scalar>(g.georef(), std::move(out), g.nodata());
}

/// Erosion followed by dilation with the same square window. Removes raised
/// features narrower than the window; never increases a valid cell.
template <typename Scalar>
BasicGrid<Scalar> morphological_opening(const BasicGrid<Scalar>& g, int window) {
    return morphological_dilation(morphological_erosion(g, window), window);
}

template <typename Scalar>
struct DtmResult {
    BasicGrid<Scalar> dtm;
    Mask ground;  ///< true where the cell was never flagged as an object
};

/// Progressive morphological filter.
///
/// Openings are applied with growing windows; at each step cells rising more than the
/// step's threshold above the opened surface are flagged as objects and lowered to the
/// opened value. Nodata cells stay nodata and are never flagged.
template <typename Scalar>
DtmResult<Scalar> progressive_morphological_filter(const BasicGrid<Scalar>& dsm,
                                                   const DtmFilterParams& p) {
    const double cellsize = dsm.georef().cellsize;
    p.validate(cellsize);
    const auto windows = window_schedule(p, cellsize);
    const auto thresholds = threshold_schedule(p, cellsize);

    const Mask valid = dsm.valid_mask();
    BasicGrid<Scalar> surface = dsm;
    Mask ground = valid;
    for (std::size_t k = 0; k < windows.size(); ++k) {
        const BasicGrid<Scalar> opened = morphological_opening(surface, windows[k]);
        const Scalar dh = static_cast<Scalar>(thresholds[k]);
        for (Index r = 0; r < surface.rows(); ++r) {
            for (Index c = 0; c < surface.cols(); ++c) {
                if (!valid(r, c) || opened.is_nodata(r, c)) continue;
                if (surface(r, c) - opened(r, c) > dh) {
                    ground(r, c) = false;
                    surface(r, c) = opened(r, c);
                }
            }
        }
    }
    return {std::move(surface), std::move(ground)};
}

} // namespace popest
