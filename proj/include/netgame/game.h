#pragma once

#include <map>
#include <vector>

#include "netgame/graph.h"
#include "netgame/linalg.h"

namespace netgame {

/// Quadratic local cost
///   J_i = y_i' R_ii y_i + Q_ii y_i + q_i + sum_{j in N_i} (y_i' R_ij y_j + y_j' Q_ij y_j).
struct LocalCost {
  Matrix r_self;                          // p_i x p_i
  Matrix q_self;                          // 1 x p_i
  double q_const = 0.0;
  std::map<AgentIndex, Matrix> r_neighbor;  // p_i x p_j
  std::map<AgentIndex, Matrix> q_neighbor;  // p_j x p_j
};

class NetworkGame {
 public:
  NetworkGame() = default;
  /// Validates block shapes, R_ii > 0 (via its symmetric part) and that the
  /// coupling maps are keyed exactly by the neighbor sets.
  NetworkGame(CommGraph graph, std::vector<LocalCost> costs);

  const CommGraph& graph() const { return graph_; }
  const std::vector<LocalCost>& costs() const { return costs_; }
  const LocalCost& cost(AgentIndex i) const { return costs_.at(i); }
  std::size_t agent_count() const { return costs_.size(); }

  /// p_i.
  Eigen::Index output_dim(AgentIndex i) const { return dims_.at(i); }
  /// Offset of y_i inside the stacked output.
  Eigen::Index output_offset(AgentIndex i) const { return offsets_.at(i); }
  /// Sum of all p_i.
  Eigen::Index total_output_dim() const { return total_; }

 private:
  CommGraph graph_;
  std::vector<LocalCost> costs_;
  std::vector<Eigen::Index> dims_;
  std::vector<Eigen::Index> offsets_;
  Eigen::Index total_ = 0;
};

/// F(y) = rbar y + qbar.
struct PseudoGradient {
  Matrix rbar;
  Vector qbar;
};

PseudoGradient assemble_pseudo_gradient(const NetworkGame& game);

struct MonotonicityCertificate {
  bool holds = false;
  /// lambda_min of (rbar + rbar') / 2: the strong-monotonicity modulus.
  double modulus = 0.0;
};

MonotonicityCertificate check_assumption_1(const PseudoGradient& pg);

/// Unique NE y* with rbar y* + qbar = 0.
Vector solve_ne(const PseudoGradient& pg);

/// e_i = (R_ii + R_ii') y_i + sum_{j in N_i} R_ij y_j + Q_ii'.
Vector partial_gradient(const NetworkGame& game, AgentIndex i, const Vector& y);

double evaluate_cost(const NetworkGame& game, AgentIndex i, const Vector& y);

/// J_i = |y_i - r_i|^2 + sum_{j in N_i} |y_i - y_j|^2.
NetworkGame cost_from_targets(const std::vector<Vector>& targets,
                              const CommGraph& graph);

}  // namespace netgame
