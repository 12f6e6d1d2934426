#pragma once

#include <map>
#include <optional>
#include <string_view>
#include <variant>
#include <vector>

#include "netgame/game.h"
#include "netgame/internal_model.h"
#include "netgame/linalg.h"
#include "netgame/plant.h"

namespace netgame {

enum class StrategyKind {
  kDigraph,  // error feedback with internal model, acyclic digraphs
  kGeneral,  // observer + internal model exchanging C_j xi_j, connected graphs
};

std::string_view to_string(StrategyKind k);
StrategyKind parse_strategy(std::string_view s);

/// Scalar Riccati weights: Qw = q I, Rw = r I.
struct ObserverWeights {
  double q = 1.0;
  double r = 1.0;

  friend bool operator==(const ObserverWeights&, const ObserverWeights&) = default;
};

/// Qw = blockdiag(q_state I_n, q_internal I_{ps}), Rw = r I.
struct StabilizerWeights {
  double q_state = 1.0;
  double q_internal = 1.0;
  double r = 1.0;

  friend bool operator==(const StabilizerWeights&, const StabilizerWeights&) = default;
};

struct SynthesisOptions {
  ObserverWeights observer;
  StabilizerWeights stabilizer;

  friend bool operator==(const SynthesisOptions&, const SynthesisOptions&) = default;
};

struct ObserverDesign {
  Matrix gain;  // L
  double abscissa = 0.0;  // of A - L Cw
};

/// L from the dual Riccati equation on (A', Cw'); A - L Cw is certified
/// Hurwitz. Throws SynthesisError naming the PBH witness when (A, Cw) is not
/// detectable.
ObserverDesign observer_gain(const Matrix& a, const Matrix& cw,
                             const ObserverWeights& w = {});

struct StabilizerDesign {
  Matrix k1;  // m x n
  Matrix k2;  // m x ps
  double abscissa = 0.0;  // of [[A + B K1, B K2], [G2 Cw, G1]]
};

/// [K1 K2] stabilizing ([A 0; G2 Cw G1], [B; 0]). Throws SynthesisError when
/// the rank condition fails at some eigenvalue of G1 or (A, B) is not
/// stabilizable.
StabilizerDesign augmented_stabilizer(const Matrix& a, const Matrix& b,
                                      const Matrix& cw, const InternalModel& im,
                                      const StabilizerWeights& w = {});

/// Per-agent gains shared by both strategies.
struct AgentGains {
  Matrix r_sym;  // R_ii + R_ii'
  Matrix l;      // observer gain
  InternalModel im;
  Matrix k1, k2;
  double observer_abscissa = 0.0;
  double augmented_abscissa = 0.0;
};

AgentGains synthesize_gains(const AgentPlant& plant, const LocalCost& cost,
                            const Exosystem& exo,
                            const SynthesisOptions& opts = {});

/// eta' = M1 eta + M2 e, u = K eta.
struct ControllerDigraph {
  AgentGains gains;
  Matrix m1, m2, k;

  Eigen::Index state_dim() const { return m1.rows(); }
};

/// xi' = A xi + B u - L (e_hat - e), zeta' = G1 zeta + G2 e,
/// u = K1 xi + K2 zeta.
struct ControllerGeneral {
  AgentGains gains;
  Matrix a, b, c;

  Eigen::Index observer_dim() const { return a.rows(); }
  Eigen::Index internal_dim() const { return gains.im.dim(); }
};

using Controller = std::variant<ControllerDigraph, ControllerGeneral>;

StrategyKind kind_of(const Controller& c);
const AgentGains& gains_of(const Controller& c);
Eigen::Index controller_state_dim(const Controller& c);

/// Assembles M1 = [[A + B K1 - L Rs C, B K2], [0, G1]], M2 = [L; G2], K = [K1 K2].
ControllerDigraph make_digraph_controller(const AgentPlant& plant, AgentGains gains);
ControllerGeneral make_general_controller(const AgentPlant& plant, AgentGains gains);

ControllerDigraph build_strategy_digraph(const AgentPlant& plant,
                                         const LocalCost& cost,
                                         const Exosystem& exo,
                                         const SynthesisOptions& opts = {});

ControllerGeneral build_strategy_general(const AgentPlant& plant,
                                         const LocalCost& cost,
                                         const Exosystem& exo,
                                         const SynthesisOptions& opts = {});

/// Agent i's closed loop in its local coordinates s_i = (x_i, controller state):
///   s_i' = a s_i + p v_i + sum_j (from_output[j] y_j + from_observer[j] C_j xi_j),
///   y_i = output s_i,  u_i = input s_i,  C_i xi_i = observer_output s_i,
///   e_i = error s_i + error_v v_i + sum_j R_ij y_j.
/// Plant blocks use `realization`; controller blocks are always nominal.
struct AgentClosedLoop {
  Matrix a, p;
  Matrix output, input, error, error_v;
  /// Zero rows under the digraph strategy.
  Matrix observer_output;
  std::map<AgentIndex, Matrix> from_output, from_observer;
};

AgentClosedLoop agent_closed_loop(const AgentPlant& plant, const LocalCost& cost,
                                  const Exosystem& exo, const Controller& controller,
                                  Realization realization = Realization::kNominal);

/// Where agent i's pieces live inside the stacked closed loop.
struct AgentLayout {
  Eigen::Index x_offset = 0, x_dim = 0;
  /// Offset of x_i inside the stacked plant state (state_map rows).
  Eigen::Index xs_offset = 0;
  /// eta for the digraph strategy; xi for the general one.
  Eigen::Index ctrl_offset = 0, ctrl_dim = 0;
  /// zeta for the general strategy; unused (0) for the digraph one.
  Eigen::Index ctrl2_offset = 0, ctrl2_dim = 0;
  Eigen::Index v_offset = 0, v_dim = 0;
  Eigen::Index e_offset = 0, e_dim = 0;
  Eigen::Index u_offset = 0, u_dim = 0;
};

/// z' = A_c z + P_c v, v' = S_hat v, e = C_c z + Q_c v.
/// For the digraph strategy z stacks (x_i, eta_i) agent by agent in
/// topological order; for the general strategy z = (x, xi, zeta) with agents
/// in their original order. v, e, y and u follow the same agent order.
struct ClosedLoopSystem {
  StrategyKind kind = StrategyKind::kDigraph;
  Realization realization = Realization::kNominal;
  Matrix a, p, c, q, s_hat;
  Vector v0;
  /// y = output_map z, u = input_map z, x = state_map z (stacked in closed-loop order).
  Matrix output_map, input_map, state_map;
  /// Stacked plant A(mu), B(mu), [P(mu) 0] in closed-loop order.
  Matrix plant_a, plant_b, plant_p;
  /// order[k] = original index of the k-th agent block.
  std::vector<AgentIndex> order;
  /// Indexed by original agent index.
  std::vector<AgentLayout> layout;
  /// NE of the game in original agent order.
  Vector y_star;

  Eigen::Index state_dim() const { return a.rows(); }
  Eigen::Index exo_dim() const { return s_hat.rows(); }
};

/// Throws AssumptionError(5) for the digraph strategy on a graph with a
/// directed cycle (or an undirected graph with edges) and AssumptionError(6)
/// for the general strategy on a disconnected graph.
void check_strategy_graph(const CommGraph& graph, StrategyKind kind);

/// Applies check_strategy_graph before assembling.
ClosedLoopSystem assemble_closed_loop(const NetworkGame& game,
                                      const std::vector<AgentPlant>& plants,
                                      const std::vector<Exosystem>& exos,
                                      const std::vector<Controller>& controllers,
                                      StrategyKind kind,
                                      Realization realization = Realization::kNominal);

struct StabilityCertificate {
  bool stable = false;
  double abscissa = 0.0;
  std::optional<double> perturbed_abscissa;
};

StabilityCertificate certify_stability(
    const ClosedLoopSystem& cl,
    const std::optional<ClosedLoopSystem>& perturbed = std::nullopt);

struct RegulatorSolution {
  Matrix x_c;
  double residual_dyn = 0.0;  // |X S_hat - A_c X - P_c|_F
  double residual_err = 0.0;  // |C_c X + Q_c|_F
  /// Residuals divided by their natural scale; both <= kRegulatorTol certify.
  double relative_dyn = 0.0;
  double relative_err = 0.0;

  bool certified() const;
};

inline constexpr double kRegulatorTol = 1e-8;

RegulatorSolution solve_regulator(const ClosedLoopSystem& cl);

struct SteadyState {
  /// Stacked in original agent order.
  Vector x, u, y;
  /// |X_x S_hat v - (A x + B u + [P 0] v)|.
  double dynamics_residual = 0.0;
  /// |y - y*|.
  double ne_gap = 0.0;
};

SteadyState steady_state(const RegulatorSolution& reg, const ClosedLoopSystem& cl,
                         const Vector& v);

/// Reorders a closed-loop-ordered stacked vector into original agent order.
Vector to_original_order(const ClosedLoopSystem& cl, const Vector& stacked,
                         Eigen::Index AgentLayout::*offset,
                         Eigen::Index AgentLayout::*dim);

}  // namespace netgame
