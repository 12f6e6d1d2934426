#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>

#include "netgame/scenario.h"

namespace netgame {

/// Process exit statuses of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitParse = 2,
  kExitIo = 3,
  /// 10 + k - 1 for the first failing Assumption k (1..6).
  kExitAssumption1 = 10,
  kExitAssumption2 = 11,
  kExitAssumption3 = 12,
  kExitAssumption4 = 13,
  kExitAssumption5 = 14,
  kExitAssumption6 = 15,
  kExitSynthesis = 20,
  kExitStaleController = 21,
  kExitDivergence = 22,
};

int exit_code_for_assumption(int assumption);

/// One row of the `check` table.
struct AssumptionRow {
  int assumption = 0;
  bool required = false;
  bool holds = false;
  std::string detail;
};

/// Runs every checker for the scenario under `strategy`.
std::vector<AssumptionRow> check_scenario(const Scenario& s, StrategyKind strategy);

int cmd_check(const std::filesystem::path& scenario, std::optional<StrategyKind> strategy,
              std::ostream& out, std::ostream& err);

int cmd_ne(const std::filesystem::path& scenario, std::ostream& out, std::ostream& err);

int cmd_synth(const std::filesystem::path& scenario, std::optional<StrategyKind> strategy,
              const std::filesystem::path& out_path, std::ostream& out, std::ostream& err);

struct SimOverrides {
  std::filesystem::path controllers;
  std::filesystem::path out_csv;
  std::optional<std::filesystem::path> svg;
  std::optional<double> t_end;
  std::optional<double> dt;
  std::optional<int> record_stride;
  /// Runs the agent-by-agent path instead of the stacked one.
  bool distributed = false;
  /// Robustness sweep: `samples` random perturbations of this scale.
  std::optional<double> perturb_scale;
  std::uint64_t seed = 1;
  int samples = 20;
};

int cmd_sim(const std::filesystem::path& scenario, const SimOverrides& opts,
            std::ostream& out, std::ostream& err);

}  // namespace netgame
