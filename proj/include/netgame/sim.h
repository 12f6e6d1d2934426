#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "netgame/game.h"
#include "netgame/plant.h"
#include "netgame/synthesis.h"

namespace netgame {

struct SimConfig {
  double dt = 1e-3;
  double t_end = 100.0;
  int record_stride = 1;

  /// Throws DomainError unless dt > 0, t_end >= dt and record_stride >= 1.
  void validate() const;
  std::int64_t steps() const;
};

struct AgentDims {
  Eigen::Index x = 0, ctrl = 0, y = 0, w = 0;
};

/// Recorded samples. Every stacked vector is in original agent order; agent
/// i's piece is located with `offset(i, &AgentDims::...)`.
struct Trajectory {
  std::vector<double> times;
  std::vector<Vector> x, ctrl, y, e, w;
  std::vector<AgentDims> dims;
  Vector y_star;

  std::size_t size() const { return times.size(); }
  Eigen::Index offset(AgentIndex i, Eigen::Index AgentDims::*field) const;
  Vector agent(const Vector& stacked, AgentIndex i,
               Eigen::Index AgentDims::*field) const;
};

/// z0 with the given plant states and zero controller states.
Vector initial_state(const ClosedLoopSystem& cl, const std::vector<Vector>& x0);

/// Classic RK4 on z' = A_c z + P_c v with v advanced exactly by
/// expm(S_hat dt). Throws DivergenceError on a non-finite state.
Trajectory simulate(const ClosedLoopSystem& cl, const SimConfig& cfg,
                    const Vector& z0, const Vector& v0);

/// Read access to what agent `self` receives over the network. Reading an
/// agent outside N_self (or a quantity the strategy does not exchange) throws
/// FirewallViolation.
class NeighborView {
 public:
  NeighborView(const CommGraph& graph, AgentIndex self,
               const std::vector<Vector>& outputs,
               const std::vector<Vector>* observer_outputs);

  /// y_j.
  const Vector& output(AgentIndex j) const;
  /// C_j xi_j (general strategy only).
  const Vector& observer_output(AgentIndex j) const;

 private:
  void require_neighbor(AgentIndex j) const;

  const CommGraph& graph_;
  AgentIndex self_;
  const std::vector<Vector>& outputs_;
  const std::vector<Vector>* observer_outputs_;
};

/// Agent-by-agent RK4 where each agent's right-hand side only sees its own
/// states and what its neighbors broadcast. Plants use `realization`,
/// controllers always their nominal copies.
Trajectory simulate_distributed(const NetworkGame& game,
                                const std::vector<AgentPlant>& plants,
                                const std::vector<Exosystem>& exos,
                                const std::vector<Controller>& controllers,
                                const SimConfig& cfg,
                                const std::vector<Vector>& x0,
                                Realization realization = Realization::kNominal);

struct ConvergenceMetrics {
  /// First time after which |y - y*| <= tol for the rest of the horizon.
  std::optional<double> t_conv;
  double final_output_gap = 0.0;
  /// max |e| over the last 10% of the horizon.
  double max_error_tail = 0.0;
  /// Peak-to-peak of |y - y*| over the last 10% of the horizon.
  double steady_oscillation = 0.0;
  /// max |y - y*| over the last 10% of the horizon.
  double max_gap_tail = 0.0;
};

ConvergenceMetrics convergence_metrics(const Trajectory& tr, double tol);

/// Every entry of dA, dB, dC, dP drawn uniformly from [-scale, scale].
std::vector<AgentPlant> sample_perturbation(const std::vector<AgentPlant>& plants,
                                            double scale, std::mt19937_64& rng);

struct PerturbationScaleReport {
  double scale = 0.0;
  int draws = 0;
  int stable_draws = 0;
  double worst_abscissa = 0.0;
};

/// For each scale, draws perturbations and certifies A_c(mu). The largest
/// scale whose draws were all Hurwitz is the reported robustness margin.
std::vector<PerturbationScaleReport> perturbation_sweep(
    const NetworkGame& game, const std::vector<AgentPlant>& plants,
    const std::vector<Exosystem>& exos, const std::vector<Controller>& controllers,
    StrategyKind kind, const std::vector<double>& scales, int draws,
    std::uint64_t seed);

std::optional<double> largest_stable_scale(
    const std::vector<PerturbationScaleReport>& reports);

}  // namespace netgame
