#include "netgame/report.h"

#include <gtest/gtest.h>

#include <unistd.h>

#include <charconv>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "netgame/errors.h"
#include "netgame/scenario.h"
#include "test_util.h"

namespace netgame {
namespace {

ControllerFile synthesize(const std::string& relative, StrategyKind kind) {
  const Scenario s = load_scenario(testing::source_path(relative));
  const NetworkGame game = game_of(s);
  const auto plants = plants_of(s);
  ControllerFile f;
  f.scenario_hash = scenario_hash(s);
  f.strategy = kind;
  f.synthesis = s.synthesis;
  f.controllers = synthesize_controllers(s, game, plants, kind);
  const ClosedLoopSystem cl = assemble_closed_loop(game, plants, s.exosystems, f.controllers, kind);
  const StabilityCertificate cert = certify_stability(cl);
  const RegulatorSolution reg = solve_regulator(cl);
  f.certificates.stable = cert.stable;
  f.certificates.abscissa = cert.abscissa;
  f.certificates.residual_dyn = reg.residual_dyn;
  f.certificates.residual_err = reg.residual_err;
  f.certificates.relative_dyn = reg.relative_dyn;
  f.certificates.relative_err = reg.relative_err;
  f.certificates.regulator_certified = reg.certified();
  f.certificates.steady_state_ne_gap = steady_state(reg, cl, cl.v0).ne_gap;
  f.certificates.y_star = cl.y_star;
  return f;
}

TEST(FormatDoubleTest, Examples) {
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(-2.0), "-2");
  EXPECT_EQ(format_double(1e-300), "1e-300");
  EXPECT_EQ(format_double(0.0), "0");
}

TEST(FormatDoubleTest, RoundTripsRandomBits) {
  std::mt19937_64 rng(97);
  for (int k = 0; k < 10000; ++k) {
    double x;
    const std::uint64_t bits = rng();
    std::memcpy(&x, &bits, sizeof x);
    if (!std::isfinite(x)) continue;
    const std::string s = format_double(x);
    double back = 0.0;
    std::from_chars(s.data(), s.data() + s.size(), back);
    EXPECT_EQ(back, x) << s;
  }
}

TEST(ControllerFileTest, RoundTripBothStrategies) {
  for (StrategyKind kind : {StrategyKind::kDigraph, StrategyKind::kGeneral}) {
    const ControllerFile f = synthesize("scenarios/sensor_network_digraph.json", kind);
    const std::string text = serialize_controllers(f);
    const ControllerFile back = parse_controllers(text);
    EXPECT_EQ(back.scenario_hash, f.scenario_hash);
    EXPECT_EQ(back.strategy, kind);
    EXPECT_EQ(back.synthesis, f.synthesis);
    ASSERT_EQ(back.controllers.size(), 5u);
    for (std::size_t i = 0; i < 5; ++i) {
      EXPECT_EQ(kind_of(back.controllers[i]), kind);
      const AgentGains& a = gains_of(f.controllers[i]);
      const AgentGains& b = gains_of(back.controllers[i]);
      EXPECT_EQ(a.l, b.l);
      EXPECT_EQ(a.k1, b.k1);
      EXPECT_EQ(a.k2, b.k2);
      EXPECT_EQ(a.im.g1, b.im.g1);
      EXPECT_EQ(a.im.order, b.im.order);
    }
    if (kind == StrategyKind::kDigraph) {
      const auto& a = std::get<ControllerDigraph>(f.controllers[3]);
      const auto& b = std::get<ControllerDigraph>(back.controllers[3]);
      EXPECT_EQ(a.m1, b.m1);
      EXPECT_EQ(a.m2, b.m2);
    }
    EXPECT_EQ(back.certificates.abscissa, f.certificates.abscissa);
    EXPECT_EQ(back.certificates.y_star, f.certificates.y_star);
    EXPECT_EQ(serialize_controllers(back), text);
  }
}

TEST(ControllerFileTest, SynthesisIsByteDeterministic) {
  const std::string a =
      serialize_controllers(synthesize("scenarios/sensor_network_undirected.json", StrategyKind::kGeneral));
  const std::string b =
      serialize_controllers(synthesize("scenarios/sensor_network_undirected.json", StrategyKind::kGeneral));
  EXPECT_EQ(a, b);
}

TEST(ControllerFileTest, ParseErrors) {
  EXPECT_THROW(parse_controllers("{"), ParseError);
  EXPECT_THROW(parse_controllers("{\"format\": \"something-else\", \"version\": 1}"), ParseError);
  const std::string text =
      serialize_controllers(synthesize("scenarios/sensor_network_digraph.json", StrategyKind::kDigraph));
  std::string broken = text;
  broken.replace(broken.find("\"strategy\": \"digraph\""), 21, "\"strategy\": 7");
  try {
    parse_controllers(broken);
    FAIL() << "accepted";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("/strategy"), std::string::npos) << e.what();
  }
}

Trajectory tiny_trajectory() {
  Trajectory tr;
  tr.dims = {{1, 0, 2, 2}, {1, 0, 1, 0}};
  tr.y_star = Vector::Zero(3);
  for (int k = 0; k < 3; ++k) {
    tr.times.push_back(0.5 * k);
    tr.x.push_back(Vector::Zero(2));
    tr.ctrl.push_back(Vector::Zero(0));
    tr.y.push_back(Vector::Constant(3, 1.0 / (k + 1)));
    tr.e.push_back(Vector::Constant(3, -0.1 * k));
    tr.w.push_back(Vector::Constant(2, 0.25));
  }
  return tr;
}

TEST(CsvTest, HeaderAndRows) {
  EXPECT_EQ(csv_header({{4, 10, 2, 2}, {4, 10, 1, 0}}),
            "t,y_1_1,y_1_2,y_2_1,e_1_1,e_1_2,e_2_1,w_1_1,w_1_2");
  std::ostringstream os;
  write_csv(os, tiny_trajectory());
  std::istringstream in(os.str());
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line)) lines.push_back(line);
  ASSERT_EQ(lines.size(), 4u);
  EXPECT_EQ(lines[2], "0.5,0.5,0.5,0.5,-0.1,-0.1,-0.1,0.25,0.25");

  Trajectory empty = tiny_trajectory();
  empty.times.clear();
  std::ostringstream header_only;
  write_csv(header_only, empty);
  EXPECT_EQ(header_only.str(), csv_header(empty.dims) + "\n");
}

TEST(SvgTest, WritesTwoStandalonePlots) {
  const std::filesystem::path dir =
      std::filesystem::temp_directory_path() / ("netgame_svg_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  const auto [gap, err] = write_svg_plots(tiny_trajectory(), dir / "run.svg");
  EXPECT_EQ(gap.filename(), "run_gap.svg");
  EXPECT_EQ(err.filename(), "run_error.svg");
  for (const auto& path : {gap, err}) {
    std::ifstream in(path);
    const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    EXPECT_NE(text.find("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"500\""),
              std::string::npos);
    EXPECT_NE(text.find("stroke-dasharray"), std::string::npos);
    EXPECT_EQ(text.find("nan"), std::string::npos);
    EXPECT_EQ(text.rfind("</svg>\n"), text.size() - 7);
  }
  std::filesystem::remove_all(dir);
}

TEST(SvgTest, HandlesDegenerateSeries) {
  const std::string flat = render_svg_plot("flat", "v", {0.0}, {{"a", {0.0}}});
  EXPECT_NE(flat.find("</svg>"), std::string::npos);
  const std::string none = render_svg_plot("empty", "v", {}, {});
  EXPECT_NE(none.find("</svg>"), std::string::npos);
}

}  // namespace
}  // namespace netgame
