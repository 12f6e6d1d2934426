#include "netgame/commands.h"

#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>

#include "netgame/errors.h"
#include "netgame/report.h"
#include "netgame/sim.h"

namespace netgame {

namespace {

std::string format_values(const ComplexValues& values) {
  std::ostringstream os;
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (k) os << ", ";
    os << values[k].real();
    if (values[k].imag() != 0.0) os << (values[k].imag() > 0 ? "+" : "-") << std::abs(values[k].imag()) << "i";
  }
  return os.str();
}

std::string trim_separator(std::string s) {
  if (s.size() >= 2 && s.compare(s.size() - 2, 2, "; ") == 0) s.resize(s.size() - 2);
  return s;
}

std::string agent_label(AgentIndex i) { return "agent " + std::to_string(i + 1); }

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::ios_base::failure("cannot write " + path.string());
  out << text;
  if (!out) throw std::ios_base::failure("cannot write " + path.string());
}

// Maps library exceptions to exit codes; every command funnels through here.
template <typename F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return kExitParse;
  } catch (const AssumptionError& e) {
    err << e.what() << "\n";
    return exit_code_for_assumption(e.assumption());
  } catch (const SynthesisError& e) {
    err << "synthesis error: " << e.what() << "\n";
    return kExitSynthesis;
  } catch (const StaleControllerError& e) {
    err << "stale controller: " << e.what() << "\n";
    return kExitStaleController;
  } catch (const DivergenceError& e) {
    err << "divergence: " << e.what() << "\n";
    return kExitDivergence;
  } catch (const std::ios_base::failure& e) {
    err << "i/o error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::invalid_argument& e) {
    err << "invalid input: " << e.what() << "\n";
    return kExitParse;
  } catch (const std::domain_error& e) {
    err << "invalid input: " << e.what() << "\n";
    return kExitParse;
  }
}

int first_failure(const std::vector<AssumptionRow>& rows) {
  for (const AssumptionRow& r : rows) {
    if (r.required && !r.holds) return exit_code_for_assumption(r.assumption);
  }
  return kExitOk;
}

}  // namespace

int exit_code_for_assumption(int assumption) {
  if (assumption < 1 || assumption > 6) return kExitUsage;
  return kExitAssumption1 + assumption - 1;
}

std::vector<AssumptionRow> check_scenario(const Scenario& s, StrategyKind strategy) {
  std::vector<AssumptionRow> rows;
  const NetworkGame game = game_of(s);
  const std::vector<AgentPlant> plants = plants_of(s);
  std::ostringstream os;

  {
    const MonotonicityCertificate m = check_assumption_1(assemble_pseudo_gradient(game));
    os << "lambda_min of the symmetric part of Rbar = " << m.modulus;
    rows.push_back({1, true, m.holds, os.str()});
    os.str("");
  }
  {
    bool holds = true;
    for (AgentIndex i = 0; i < s.agent_count; ++i) {
      const SpectrumReport r = check_assumption_2(s.exosystems[i]);
      if (!r.holds) {
        holds = false;
        os << agent_label(i) << ": S has eigenvalues with negative real part {"
           << format_values(r.offending) << "}; ";
      }
    }
    if (holds) os << "no exosystem eigenvalue has negative real part";
    rows.push_back({2, true, holds, trim_separator(os.str())});
    os.str("");
  }
  {
    bool holds = true;
    for (AgentIndex i = 0; i < s.agent_count; ++i) {
      const PbhReport r = check_assumption_3(plants[i]);
      if (!r.stabilizable) {
        holds = false;
        os << agent_label(i) << ": (A, B) not stabilizable at {" << format_values(r.uncontrollable) << "}; ";
      }
      if (!r.detectable) {
        holds = false;
        os << agent_label(i) << ": (A, C) not detectable at {" << format_values(r.unobservable) << "}; ";
      }
    }
    if (holds) os << "every (A_i, B_i) stabilizable and (A_i, C_i) detectable";
    rows.push_back({3, true, holds, trim_separator(os.str())});
    os.str("");
  }
  {
    bool holds = true;
    for (AgentIndex i = 0; i < s.agent_count; ++i) {
      const SpectrumReport r = check_assumption_4(plants[i], s.exosystems[i]);
      if (!r.holds) {
        holds = false;
        os << agent_label(i) << ": rank [[A - lambda I, B], [C, 0]] deficient at {"
           << format_values(r.offending) << "}; ";
      }
    }
    if (holds) os << "transmission rank full on spec(S_i) and at 0 for every agent";
    rows.push_back({4, true, holds, trim_separator(os.str())});
    os.str("");
  }
  const CommGraph& graph = game.graph();
  {
    bool holds = false;
    if (!graph.directed()) {
      holds = graph.edges().empty();
      os << (holds ? "no edges" : "undirected edges are 2-cycles");
    } else {
      const AcyclicResult a = check_acyclic(graph);
      holds = a.acyclic;
      if (holds) {
        os << "acyclic; topological order";
        for (AgentIndex v : a.order) os << " " << v + 1;
      } else {
        os << "directed cycle";
        for (std::size_t k = 0; k < a.cycle.size(); ++k) os << (k ? " -> " : " ") << a.cycle[k] + 1;
      }
    }
    rows.push_back({5, strategy == StrategyKind::kDigraph, holds, os.str()});
    os.str("");
  }
  {
    const Connectivity c = check_connected(graph);
    rows.push_back({6, strategy == StrategyKind::kGeneral, c != Connectivity::kDisconnected,
                    std::string(to_string(c))});
  }
  return rows;
}

int cmd_check(const std::filesystem::path& path, std::optional<StrategyKind> strategy,
              std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Scenario s = load_scenario(path);
    const StrategyKind kind = strategy.value_or(s.strategy);
    const std::vector<AssumptionRow> rows = check_scenario(s, kind);
    out << "scenario " << (s.name.empty() ? path.filename().string() : s.name) << ": "
        << s.agent_count << " agents, " << (s.directed ? "directed" : "undirected")
        << " graph, strategy " << to_string(kind) << "\n";
    for (const AssumptionRow& r : rows) {
      out << "  assumption " << r.assumption << "  " << (r.holds ? "PASS" : "FAIL") << "  "
          << (r.required ? "required" : "unused  ") << "  " << r.detail << "\n";
    }
    const int code = first_failure(rows);
    if (code != kExitOk) err << "check failed: assumption " << code - kExitAssumption1 + 1 << "\n";
    return code;
  });
}

int cmd_ne(const std::filesystem::path& path, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Scenario s = load_scenario(path);
    const NetworkGame game = game_of(s);
    const PseudoGradient pg = assemble_pseudo_gradient(game);
    const MonotonicityCertificate m = check_assumption_1(pg);
    if (!m.holds) {
      err << "refusing to solve: pseudo-gradient is not strongly monotone, lambda_min = "
          << m.modulus << "\n";
      return static_cast<int>(kExitAssumption1);
    }
    const Vector y = solve_ne(pg);
    out << std::setprecision(12);
    out << "lambda_min " << m.modulus << "\n";
    for (AgentIndex i = 0; i < game.agent_count(); ++i) {
      out << "y*_" << i + 1;
      const Vector yi = y.segment(game.output_offset(i), game.output_dim(i));
      for (Eigen::Index k = 0; k < yi.size(); ++k) out << " " << yi(k);
      out << "\n";
    }
    out << "residual " << (pg.rbar * y + pg.qbar).norm() << "\n";
    return static_cast<int>(kExitOk);
  });
}

int cmd_synth(const std::filesystem::path& path, std::optional<StrategyKind> strategy,
              const std::filesystem::path& out_path, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Scenario s = load_scenario(path);
    const StrategyKind kind = strategy.value_or(s.strategy);
    for (const AssumptionRow& r : check_scenario(s, kind)) {
      if (r.required && !r.holds) {
        err << "assumption " << r.assumption << " fails: " << r.detail << "\n";
        return exit_code_for_assumption(r.assumption);
      }
    }
    const NetworkGame game = game_of(s);
    const std::vector<AgentPlant> plants = plants_of(s);
    ControllerFile file;
    file.scenario_hash = scenario_hash(s);
    file.strategy = kind;
    file.synthesis = s.synthesis;
    file.controllers = synthesize_controllers(s, game, plants, kind);

    const ClosedLoopSystem cl =
        assemble_closed_loop(game, plants, s.exosystems, file.controllers, kind);
    std::optional<ClosedLoopSystem> perturbed;
    if (has_perturbation(s)) {
      perturbed = assemble_closed_loop(game, plants, s.exosystems, file.controllers, kind,
                                       Realization::kPerturbed);
    }
    const StabilityCertificate cert = certify_stability(cl, perturbed);
    ControllerCertificates& c = file.certificates;
    c.stable = cert.stable;
    c.abscissa = cert.abscissa;
    c.perturbed_abscissa = cert.perturbed_abscissa;
    c.y_star = cl.y_star;
    if (!cert.stable) {
      err << "synthesis error: closed loop is not Hurwitz (abscissa " << cert.abscissa << ")\n";
      return static_cast<int>(kExitSynthesis);
    }
    const RegulatorSolution reg = solve_regulator(cl);
    c.residual_dyn = reg.residual_dyn;
    c.residual_err = reg.residual_err;
    c.relative_dyn = reg.relative_dyn;
    c.relative_err = reg.relative_err;
    c.regulator_certified = reg.certified();
    c.steady_state_ne_gap = steady_state(reg, cl, cl.v0).ne_gap;
    write_text(out_path, serialize_controllers(file));

    out << "strategy " << to_string(kind) << ": spectral abscissa " << cert.abscissa;
    if (cert.perturbed_abscissa) out << " (perturbed " << *cert.perturbed_abscissa << ")";
    out << ", regulator residuals " << reg.relative_dyn << " / " << reg.relative_err
        << ", steady-state NE gap " << c.steady_state_ne_gap << "\n";
    out << "wrote " << out_path.string() << "\n";
    if (!reg.certified()) {
      err << "synthesis error: regulator equations not certified\n";
      return static_cast<int>(kExitSynthesis);
    }
    return static_cast<int>(kExitOk);
  });
}

int cmd_sim(const std::filesystem::path& path, const SimOverrides& opts, std::ostream& out,
            std::ostream& err) {
  return guarded(err, [&] {
    const Scenario s = load_scenario(path);
    ControllerFile file;
    try {
      file = parse_controllers(read_file(opts.controllers));
    } catch (const ParseError& e) {
      throw ParseError(opts.controllers.string() + ": " + e.what());
    }
    const std::string hash = scenario_hash(s);
    if (file.scenario_hash != hash) {
      throw StaleControllerError("controllers in " + opts.controllers.string() +
                                 " were synthesized for scenario " + file.scenario_hash +
                                 ", but the scenario now hashes to " + hash);
    }
    if (file.controllers.size() != s.agent_count) {
      throw ParseError(opts.controllers.string() + ": controller count differs from agent count");
    }
    const NetworkGame game = game_of(s);
    const std::vector<AgentPlant> plants = plants_of(s);
    const Realization realization =
        has_perturbation(s) ? Realization::kPerturbed : Realization::kNominal;

    SimConfig cfg;
    cfg.dt = opts.dt.value_or(s.sim.dt);
    cfg.t_end = opts.t_end.value_or(s.sim.t_end);
    cfg.record_stride = opts.record_stride.value_or(s.sim.record_stride);

    const ClosedLoopSystem cl = assemble_closed_loop(game, plants, s.exosystems,
                                                     file.controllers, file.strategy, realization);
    if (cfg.t_end == 0.0) {
      // Zero horizon: nothing to record beyond the column layout.
      Trajectory empty;
      for (AgentIndex i = 0; i < s.agent_count; ++i) {
        empty.dims.push_back({plants[i].states(), controller_state_dim(file.controllers[i]),
                              plants[i].outputs(), s.exosystems[i].s.rows()});
      }
      std::ostringstream csv;
      write_csv(csv, empty);
      write_text(opts.out_csv, csv.str());
      err << "zero horizon: wrote header only\n";
      return static_cast<int>(kExitOk);
    }
    cfg.validate();

    const std::vector<Vector> x0 = initial_plant_states(s);
    const Trajectory tr =
        opts.distributed
            ? simulate_distributed(game, plants, s.exosystems, file.controllers, cfg, x0,
                                   realization)
            : simulate(cl, cfg, initial_state(cl, x0), cl.v0);
    std::ostringstream csv;
    write_csv(csv, tr);
    write_text(opts.out_csv, csv.str());
    if (opts.svg) {
      const auto [gap, error] = write_svg_plots(tr, *opts.svg);
      err << "wrote " << gap.string() << " and " << error.string() << "\n";
    }
    const ConvergenceMetrics m = convergence_metrics(tr, s.sim.tol);
    err << "samples " << tr.size() << ", T_conv ";
    if (m.t_conv) {
      err << *m.t_conv << " s";
    } else {
      err << "none";
    }
    err << " (tol " << s.sim.tol << "), final gap " << m.final_output_gap
        << ", max |e| over last 10% " << m.max_error_tail << "\n";

    if (opts.perturb_scale) {
      std::mt19937_64 rng(opts.seed);
      out << "sample  abscissa        stable  T_conv      tail_gap\n";
      for (int k = 0; k < opts.samples; ++k) {
        const std::vector<AgentPlant> drawn = sample_perturbation(plants, *opts.perturb_scale, rng);
        const ClosedLoopSystem pcl = assemble_closed_loop(game, drawn, s.exosystems,
                                                          file.controllers, file.strategy,
                                                          Realization::kPerturbed);
        const StabilityCertificate cert = certify_stability(pcl);
        out << std::left << std::setw(8) << k + 1 << std::setw(16) << cert.abscissa
            << std::setw(8) << (cert.stable ? "yes" : "no");
        if (!cert.stable) {
          out << "-           -\n";
          continue;
        }
        try {
          const Trajectory ptr = simulate(pcl, cfg, initial_state(pcl, x0), pcl.v0);
          const ConvergenceMetrics pm = convergence_metrics(ptr, s.sim.tol);
          out << std::setw(12) << (pm.t_conv ? format_double(*pm.t_conv) : std::string("none"))
              << pm.max_gap_tail << "\n";
        } catch (const DivergenceError&) {
          out << "diverged    -\n";
        }
      }
    }
    return static_cast<int>(kExitOk);
  });
}

}  // namespace netgame
