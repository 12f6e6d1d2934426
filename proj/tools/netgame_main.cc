// Command-line front end: check, ne, synth and sim on scenario files.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "netgame/commands.h"
#include "netgame/errors.h"

namespace {

std::optional<netgame::StrategyKind> strategy_flag(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return netgame::parse_strategy(s);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nash-equilibrium-seeking controller synthesis and simulation for network games"};
  app.require_subcommand(1);

  std::string scenario;
  std::string strategy;
  std::string out_path;
  netgame::SimOverrides sim;
  std::string controllers, csv, svg;
  double t_end = 0.0, dt = 0.0, perturb_scale = 0.0;
  int record_stride = 1;

  const auto strategy_check = CLI::IsMember({"digraph", "general"});

  CLI::App* check = app.add_subcommand("check", "Run every assumption checker on a scenario");
  check->add_option("scenario", scenario, "Scenario JSON file")->required();
  check->add_option("--strategy", strategy, "Override the scenario's strategy")->check(strategy_check);

  CLI::App* ne = app.add_subcommand("ne", "Solve for the Nash equilibrium");
  ne->add_option("scenario", scenario, "Scenario JSON file")->required();

  CLI::App* synth = app.add_subcommand("synth", "Synthesize controllers and certificates");
  synth->add_option("scenario", scenario, "Scenario JSON file")->required();
  synth->add_option("--strategy", strategy, "Override the scenario's strategy")->check(strategy_check);
  synth->add_option("--out", out_path, "Controller JSON to write")->required();

  CLI::App* simc = app.add_subcommand("sim", "Simulate the closed loop and export trajectories");
  simc->add_option("scenario", scenario, "Scenario JSON file")->required();
  simc->add_option("--controllers", controllers, "Controller JSON from synth")->required();
  simc->add_option("--out", csv, "Trajectory CSV to write")->required();
  auto* o_tend = simc->add_option("--t-end", t_end, "Horizon [s]")->check(CLI::NonNegativeNumber);
  auto* o_dt = simc->add_option("--dt", dt, "Step size [s]")->check(CLI::PositiveNumber);
  auto* o_stride = simc->add_option("--record-stride", record_stride, "Record every k-th step")
                       ->check(CLI::PositiveNumber);
  simc->add_option("--svg", svg, "Plot path; writes <stem>_gap.svg and <stem>_error.svg");
  simc->add_flag("--distributed", sim.distributed, "Use the agent-by-agent simulation");
  auto* o_scale = simc->add_option("--perturb-scale", perturb_scale,
                                   "Robustness sweep: entrywise perturbation bound")
                      ->check(CLI::NonNegativeNumber);
  simc->add_option("--seed", sim.seed, "Seed for the perturbation sweep");
  simc->add_option("--samples", sim.samples, "Number of perturbation draws")
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : netgame::kExitUsage;
  }

  if (*check) return netgame::cmd_check(scenario, strategy_flag(strategy), std::cout, std::cerr);
  if (*ne) return netgame::cmd_ne(scenario, std::cout, std::cerr);
  if (*synth) {
    return netgame::cmd_synth(scenario, strategy_flag(strategy), out_path, std::cout, std::cerr);
  }
  sim.controllers = controllers;
  sim.out_csv = csv;
  if (!svg.empty()) sim.svg = svg;
  if (*o_tend) sim.t_end = t_end;
  if (*o_dt) sim.dt = dt;
  if (*o_stride) sim.record_stride = record_stride;
  if (*o_scale) sim.perturb_scale = perturb_scale;
  return netgame::cmd_sim(scenario, sim, std::cout, std::cerr);
}
