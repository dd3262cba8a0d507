#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "rpmcts/config.hpp"
#include "rpmcts/records.hpp"

namespace rpmcts {

struct PlotAxis {
  PrimaryMetric metric = PrimaryMetric::kSteps;
  double plot_constant = 100.0;  // steps are drawn as plot_constant - steps
};

struct PlotOutput {
  std::vector<std::filesystem::path> files;
  std::vector<std::string> warnings;
};

/// Renders one chart as SVG text: mean metric per trial budget for each
/// strategy, with 95% CI bands for the steps metric.
std::string render_svg(const std::string& env, const std::vector<EpisodeRecord>& records,
                       const PlotAxis& axis, std::vector<std::string>* warnings = nullptr);

/// One <env>.svg per environment in `records`. Throws std::runtime_error on
/// empty input without writing anything.
PlotOutput emit_plots(const std::vector<EpisodeRecord>& records,
                      const std::function<PlotAxis(const std::string& env)>& axis_for,
                      const std::filesystem::path& out_dir);

}  // namespace rpmcts
