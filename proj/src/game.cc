#include "netgame/game.h"

#include <sstream>

#include <Eigen/Eigenvalues>

#include "netgame/errors.h"

namespace netgame {

namespace {

void check_shape(const Matrix& m, Eigen::Index rows, Eigen::Index cols,
                 const char* what, AgentIndex i) {
  if (m.rows() != rows || m.cols() != cols) {
    std::ostringstream os;
    os << "agent " << i + 1 << ": " << what << " is " << m.rows() << "x"
       << m.cols() << ", expected " << rows << "x" << cols;
    throw DimensionError(os.str());
  }
}

void check_index(const NetworkGame& game, AgentIndex i) {
  if (i >= game.agent_count()) {
    throw std::out_of_range("agent index out of range");
  }
}

}  // namespace

NetworkGame::NetworkGame(CommGraph graph, std::vector<LocalCost> costs)
    : graph_(std::move(graph)), costs_(std::move(costs)) {
  const std::size_t n = graph_.agent_count();
  if (costs_.size() != n) {
    throw DimensionError("NetworkGame: one local cost per agent required");
  }
  dims_.resize(n);
  offsets_.resize(n);
  for (AgentIndex i = 0; i < n; ++i) {
    dims_[i] = costs_[i].r_self.rows();
    offsets_[i] = total_;
    total_ += dims_[i];
  }
  for (AgentIndex i = 0; i < n; ++i) {
    const LocalCost& c = costs_[i];
    const Eigen::Index p = dims_[i];
    if (p == 0) throw DimensionError("NetworkGame: empty output");
    check_shape(c.r_self, p, p, "R_ii", i);
    check_shape(c.q_self, 1, p, "Q_ii", i);
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (c.r_self + c.r_self.transpose()));
    if (es.eigenvalues().minCoeff() <= 0.0) {
      std::ostringstream os;
      os << "agent " << i + 1 << ": R_ii is not positive definite";
      throw DomainError(os.str());
    }
    const auto& nbrs = graph_.neighbors(i);
    auto keys_match = [&](const std::map<AgentIndex, Matrix>& m) {
      if (m.size() != nbrs.size()) return false;
      std::size_t k = 0;
      for (const auto& [j, block] : m) {
        if (j != nbrs[k++]) return false;
      }
      return true;
    };
    if (!keys_match(c.r_neighbor) || !keys_match(c.q_neighbor)) {
      std::ostringstream os;
      os << "agent " << i + 1
         << ": R_ij / Q_ij must be given exactly for the neighbor set";
      throw DomainError(os.str());
    }
    for (const auto& [j, block] : c.r_neighbor) {
      check_shape(block, p, dims_[j], "R_ij", i);
    }
    for (const auto& [j, block] : c.q_neighbor) {
      check_shape(block, dims_[j], dims_[j], "Q_ij", i);
    }
  }
}

PseudoGradient assemble_pseudo_gradient(const NetworkGame& game) {
  const Eigen::Index total = game.total_output_dim();
  PseudoGradient pg{Matrix::Zero(total, total), Vector::Zero(total)};
  for (AgentIndex i = 0; i < game.agent_count(); ++i) {
    const LocalCost& c = game.cost(i);
    const Eigen::Index oi = game.output_offset(i);
    const Eigen::Index pi = game.output_dim(i);
    pg.rbar.block(oi, oi, pi, pi) = c.r_self + c.r_self.transpose();
    for (const auto& [j, block] : c.r_neighbor) {
      pg.rbar.block(oi, game.output_offset(j), pi, game.output_dim(j)) = block;
    }
    pg.qbar.segment(oi, pi) = c.q_self.transpose();
  }
  return pg;
}

MonotonicityCertificate check_assumption_1(const PseudoGradient& pg) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (pg.rbar + pg.rbar.transpose()),
                                           Eigen::EigenvaluesOnly);
  MonotonicityCertificate out;
  out.modulus = es.eigenvalues().minCoeff();
  out.holds = out.modulus > 0.0;
  return out;
}

Vector solve_ne(const PseudoGradient& pg) {
  return linalg::solve_linear(pg.rbar, -pg.qbar);
}

Vector partial_gradient(const NetworkGame& game, AgentIndex i, const Vector& y) {
  check_index(game, i);
  if (y.size() != game.total_output_dim()) {
    throw DimensionError("partial_gradient: y has the wrong dimension");
  }
  const LocalCost& c = game.cost(i);
  const Eigen::Index pi = game.output_dim(i);
  Vector e = (c.r_self + c.r_self.transpose()) *
                 y.segment(game.output_offset(i), pi) +
             c.q_self.transpose();
  for (const auto& [j, block] : c.r_neighbor) {
    e += block * y.segment(game.output_offset(j), game.output_dim(j));
  }
  return e;
}

double evaluate_cost(const NetworkGame& game, AgentIndex i, const Vector& y) {
  check_index(game, i);
  if (y.size() != game.total_output_dim()) {
    throw DimensionError("evaluate_cost: y has the wrong dimension");
  }
  const LocalCost& c = game.cost(i);
  const Vector yi = y.segment(game.output_offset(i), game.output_dim(i));
  double j_val = yi.dot(c.r_self * yi) + (c.q_self * yi)(0) + c.q_const;
  for (const auto& [j, block] : c.r_neighbor) {
    const Vector yj = y.segment(game.output_offset(j), game.output_dim(j));
    j_val += yi.dot(block * yj) + yj.dot(c.q_neighbor.at(j) * yj);
  }
  return j_val;
}

NetworkGame cost_from_targets(const std::vector<Vector>& targets,
                              const CommGraph& graph) {
  if (targets.size() != graph.agent_count()) {
    throw DimensionError("cost_from_targets: one target per agent required");
  }
  std::vector<LocalCost> costs(targets.size());
  for (AgentIndex i = 0; i < targets.size(); ++i) {
    const Vector& r = targets[i];
    const Eigen::Index p = r.size();
    const auto& nbrs = graph.neighbors(i);
    LocalCost& c = costs[i];
    c.r_self = static_cast<double>(1 + nbrs.size()) * Matrix::Identity(p, p);
    c.q_self = -2.0 * r.transpose();
    c.q_const = r.squaredNorm();
    for (AgentIndex j : nbrs) {
      const Eigen::Index pj = targets[j].size();
      if (pj != p) {
        throw DimensionError(
            "cost_from_targets: neighboring targets must share a dimension");
      }
      c.r_neighbor[j] = -2.0 * Matrix::Identity(p, pj);
      c.q_neighbor[j] = Matrix::Identity(pj, pj);
    }
  }
  return NetworkGame(graph, std::move(costs));
}

}  // namespace netgame
