#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "netgame/sim.h"
#include "netgame/synthesis.h"

namespace netgame {

/// Certificates embedded next to the gains in a controller file.
struct ControllerCertificates {
  bool stable = false;
  double abscissa = 0.0;
  std::optional<double> perturbed_abscissa;
  double residual_dyn = 0.0;
  double residual_err = 0.0;
  double relative_dyn = 0.0;
  double relative_err = 0.0;
  bool regulator_certified = false;
  /// |y_ss - y*| from the regulator solution.
  double steady_state_ne_gap = 0.0;
  Vector y_star;
};

struct ControllerFile {
  std::string scenario_hash;
  StrategyKind strategy = StrategyKind::kDigraph;
  SynthesisOptions synthesis;
  std::vector<Controller> controllers;
  ControllerCertificates certificates;
};

std::string serialize_controllers(const ControllerFile& file);
/// Throws ParseError with the JSON pointer of the offending field.
ControllerFile parse_controllers(std::string_view text);

/// Shortest decimal that parses back to the same double.
std::string format_double(double x);

/// `t,y_1_1,...,e_1_1,...,w_1_1,...` for the given agent dimensions.
std::string csv_header(const std::vector<AgentDims>& dims);
void write_csv(std::ostream& out, const Trajectory& tr);

struct PlotSeries {
  std::string label;
  std::vector<double> values;
};

/// Standalone 800x500 SVG line plot. Series alternate between a solid and a
/// dashed stroke.
std::string render_svg_plot(const std::string& title, const std::string& y_label,
                            const std::vector<double>& times,
                            const std::vector<PlotSeries>& series);

/// `<stem>_gap.svg` (per-agent |y_i - y_i*|) and `<stem>_error.svg`
/// (per-agent |e_i|) next to `svg_path`. Returns both paths.
std::pair<std::filesystem::path, std::filesystem::path> write_svg_plots(
    const Trajectory& tr, const std::filesystem::path& svg_path);

}  // namespace netgame
