#pragma once

#include "orblab/types.hpp"

#include <string>
#include <vector>

namespace orblab {

struct LineSeries {
    std::string name;
    std::vector<Scalar> x;
    std::vector<Scalar> y;
};

/// Polyline chart with axes and per-series labels.
void write_line_svg(const std::string& path, const std::vector<LineSeries>& series,
                    const std::string& title, bool log_x = false, bool log_y = false);

/// Raster of values(i, j) over xs[i], ys[j] colored by value, with
/// marching-squares contour overlays at the given levels.  NaN cells are
/// left blank.
void write_heatmap_svg(const std::string& path, const std::vector<Scalar>& xs,
                       const std::vector<Scalar>& ys, const MatX& values,
                       const std::vector<Scalar>& contour_levels, const std::string& title);

} // namespace orblab
