// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The popest Authors

#include "popest/dtm_filter.hpp"

#include <cmath>
#include <string>

namespace popest {

void DtmFilterParams::validate(double cellsize) const {
    if (initial_window < 3 || initial_window % 2 == 0)
        throw InvalidArgument("initial_window must be an odd integer >= 3");
    if (!(slope >= 0.0) || !std::isfinite(slope))
        throw InvalidArgument("slope must be >= 0");
    if (!(initial_threshold_m > 0.0)) throw InvalidArgument("initial_threshold_m must be > 0");
    if (!(max_threshold_m >= initial_threshold_m))
        throw InvalidArgument("max_threshold_m must be >= initial_threshold_m");
    if (!(cellsize > 0.0)) throw InvalidArgument("cellsize must be > 0");
    if (!(max_window_m >= initial_window * cellsize))
        throw InvalidArgument("max_window_m (" + std::to_string(max_window_m) +
                              ") is smaller than the initial window span (" +
                              std::to_string(initial_window * cellsize) + ")");
}

std::vector<int> window_schedule(const DtmFilterParams& p, double cellsize) {
    p.validate(cellsize);
    std::vector<int> windows{p.initial_window};
    while (windows.back() * cellsize < p.max_window_m) windows.push_back(2 * windows.back() - 1);
    return windows;
}

std::vector<double> threshold_schedule(const DtmFilterParams& p, double cellsize) {
    const auto windows = window_schedule(p, cellsize);
    std::vector<double> dh{p.initial_threshold_m};
    for (std::size_t k = 1; k < windows.size(); ++k) {
        const double grown =
            p.slope * (windows[k] - windows[k - 1]) * cellsize + p.initial_threshold_m;
        dh.push_back(std::min(p.max_threshold_m, grown));
    }
    return dh;
}

} // namespace popest
