#pragma once

#include "orblab/config.hpp"
#include "orblab/types.hpp"

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

namespace orblab {

struct RunOptions {
    std::string out_dir = "out";
    std::optional<std::uint64_t> seed_override;
    int jobs = 1;
};

/// Runs the experiment named by [experiment] id, writing CSV artifacts and
/// a summary into out_dir.  Returns 0 when every assertion passed, 1
/// otherwise.  Configuration problems raise config_error.
int run_experiment(const Config& cfg, const RunOptions& opts, std::ostream& log);

/// Renders a CSV artifact to SVG; kind is "line" or "heatmap".
/// Returns 0 on success, 2 on schema mismatch (no file written).
int plot_csv(const std::string& csv_path, const std::string& kind, const std::string& out_svg,
             std::ostream& log);

} // namespace orblab
