// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The popest Authors

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>

#include "popest/error.hpp"

namespace popest {

using Index = Eigen::Index;

/// Spatial frame of a north-up raster with square cells.
///
/// Row 0 is the northernmost row, matching ESRI ASCII grid file order.
struct GridGeoref {
    Index ncols = 1;
    Index nrows = 1;
    double xll = 0.0;       ///< easting of the lower-left corner
    double yll = 0.0;       ///< northing of the lower-left corner
    double cellsize = 1.0;  ///< meters per cell side

    Index size() const noexcept { return ncols * nrows; }

    double cell_center_x(Index col) const noexcept {
        return xll + (static_cast<double>(col) + 0.5) * cellsize;
    }
    double cell_center_y(Index row) const noexcept {
        return yll + (static_cast<double>(nrows - 1 - row) + 0.5) * cellsize;
    }
    Eigen::Vector2d cell_center(Index row, Index col) const noexcept {
        return {cell_center_x(col), cell_center_y(row)};
    }

    double xmax() const noexcept { return xll + static_cast<double>(ncols) * cellsize; }
    double ymax() const noexcept { return yll + static_cast<double>(nrows) * cellsize; }

    /// Throws InvalidArgument unless ncols, nrows >= 1 and cellsize > 0.
    void validate() const;

    bool same_frame(const GridGeoref& other, double tol = 1e-6) const noexcept {
        return ncols == other.ncols && nrows == other.nrows &&
               std::abs(xll - other.xll) <= tol && std::abs(yll - other.yll) <= tol &&
               std::abs(cellsize - other.cellsize) <= tol;
    }
};

inline constexpr double kDefaultNodata = -9999.0;

using Mask = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Single-band elevation raster. Values are stored row-major, north row first;
/// a cell is masked when it compares equal to the nodata sentinel.
template <typename Scalar>
class BasicGrid {
public:
    using Values = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

    BasicGrid() : BasicGrid(GridGeoref{}, Scalar(0)) {}

    BasicGrid(const GridGeoref& georef, Scalar fill, Scalar nodata = Scalar(kDefaultNodata))
        : georef_(georef), nodata_(nodata) {
        georef_.validate();
        values_.setConstant(georef_.nrows, georef_.ncols, fill);
    }

    BasicGrid(const GridGeoref& georef, Values values, Scalar nodata = Scalar(kDefaultNodata))
        : georef_(georef), values_(std::move(values)), nodata_(nodata) {
        georef_.validate();
        if (values_.rows() != georef_.nrows || values_.cols() != georef_.ncols)
            throw InvalidArgument("grid values do not match georef dimensions");
    }

    const GridGeoref& georef() const noexcept { return georef_; }
    Index rows() const noexcept { return georef_.nrows; }
    Index cols() const noexcept { return georef_.ncols; }
    Scalar nodata() const noexcept { return nodata_; }

    const Values& values() const noexcept { return values_; }
    Values& values() noexcept { return values_; }

    Scalar operator()(Index row, Index col) const { return values_(row, col); }
    Scalar& operator()(Index row, Index col) { return values_(row, col); }

    bool is_nodata(Index row, Index col) const { return values_(row, col) == nodata_; }
    bool is_valid(Index row, Index col) const { return !is_nodata(row, col); }

    Mask valid_mask() const { return values_ != nodata_; }

    bool operator==(const BasicGrid& other) const {
        return georef_.same_frame(other.georef_, 0.0) && nodata_ == other.nodata_ &&
               values_.rows() == other.values_.rows() && values_.cols() == other.values_.cols() &&
               (values_ == other.values_).all();
    }

private:
    GridGeoref georef_;
    Values values_;
    Scalar nodata_;
};

using Grid = BasicGrid<double>;

struct GridStats {
    std::optional<double> min;
    std::optional<double> max;
    std::optional<double> mean;
    Index count = 0;
};

/// Cell-wise a - b. A cell is nodata in the result if it is nodata in either operand;
/// the result carries a's sentinel.
template <typename Scalar>
BasicGrid<Scalar> grid_subtract(const BasicGrid<Scalar>& a, const BasicGrid<Scalar>& b) {
    if (!a.georef().same_frame(b.georef()))
        throw GeorefMismatch("grid_subtract: operands differ in dimensions, origin or cellsize");
    const Mask valid = a.valid_mask() && b.valid_mask();
    typename BasicGrid<Scalar>::Values diff =
        valid.select(a.values() - b.values(), a.nodata());
    return BasicGrid<Scalar>(a.georef(), std::move(diff), a.nodata());
}

template <typename Scalar>
GridStats grid_stats(const BasicGrid<Scalar>& g) {
    GridStats stats;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    double sum = 0.0;
    for (Index r = 0; r < g.rows(); ++r) {
        for (Index c = 0; c < g.cols(); ++c) {
            if (g.is_nodata(r, c)) continue;
            const double v = static_cast<double>(g(r, c));
            lo = std::min(lo, v);
            hi = std::max(hi, v);
            sum += v;
            ++stats.count;
        }
    }
    if (stats.count > 0) {
        stats.min = lo;
        stats.max = hi;
        stats.mean = sum / static_cast<double>(stats.count);
    }
    return stats;
}

/// Boolean mask as a 1/0 grid; cells where `valid` is false become nodata.
Grid mask_to_grid(const GridGeoref& georef, const Mask& mask, const Mask& valid);

/// ESRI ASCII grid reader. Header keys are case-insensitive; NODATA_value defaults
/// to -9999. Errors are ParseError carrying the offending line.
Grid read_ascii_grid(std::istream& in);
Grid read_ascii_grid(const std::filesystem::path& path);

/// Writes values in shortest round-trip form, so read_ascii_grid(write) is exact.
void write_ascii_grid(std::ostream& out, const Grid& g);
void write_ascii_grid(const std::filesystem::path& path, const Grid& g);
std::string to_ascii_grid(const Grid& g);

} // namespace popest
