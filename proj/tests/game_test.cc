#include "netgame/game.h"

#include <gtest/gtest.h>

#include <random>

#include "netgame/errors.h"
#include "test_util.h"

namespace netgame {
namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index k = 0;
  for (double x : xs) v(k++) = x;
  return v;
}

// J_i = (y_i - r_i)^2 + (y_i - y_j)^2 for two scalar agents that see each other.
NetworkGame two_agent_game() {
  return cost_from_targets({vec({1.0}), vec({3.0})}, CommGraph(2, false, {{0, 1}}));
}

TEST(PseudoGradientTest, TwoScalarAgents) {
  const PseudoGradient pg = assemble_pseudo_gradient(two_agent_game());
  Matrix rbar(2, 2);
  rbar << 4, -2, -2, 4;
  EXPECT_TRUE(pg.rbar.isApprox(rbar));
  EXPECT_TRUE(pg.qbar.isApprox(vec({-2.0, -6.0})));
}

TEST(PseudoGradientTest, IsolatedAgent) {
  const PseudoGradient pg =
      assemble_pseudo_gradient(cost_from_targets({vec({2.5})}, CommGraph(1, true, {})));
  EXPECT_DOUBLE_EQ(pg.rbar(0, 0), 2.0);
  EXPECT_DOUBLE_EQ(pg.qbar(0), -5.0);
}

TEST(PseudoGradientTest, EmptyEdgeSetIsBlockDiagonal) {
  const NetworkGame g = cost_from_targets({vec({1, 2}), vec({3, 4}), vec({5, 6})},
                                          CommGraph(3, true, {}));
  const PseudoGradient pg = assemble_pseudo_gradient(g);
  Matrix off = pg.rbar;
  for (int i = 0; i < 3; ++i) off.block(2 * i, 2 * i, 2, 2).setZero();
  EXPECT_TRUE(off.isZero(0.0));
}

TEST(PseudoGradientTest, BlockSparsityFollowsNeighborSets) {
  const CommGraph graph(4, true, {{0, 1}, {1, 2}, {0, 3}});
  const NetworkGame g =
      cost_from_targets({vec({1, 0}), vec({0, 1}), vec({1, 1}), vec({2, 0})}, graph);
  const PseudoGradient pg = assemble_pseudo_gradient(g);
  for (AgentIndex i = 0; i < 4; ++i) {
    for (AgentIndex j = 0; j < 4; ++j) {
      if (i == j) continue;
      const Matrix block = pg.rbar.block(2 * i, 2 * j, 2, 2);
      EXPECT_EQ(block.isZero(0.0), !graph.is_neighbor(i, j)) << i << "," << j;
    }
  }
}

TEST(AssumptionOneTest, Examples) {
  PseudoGradient pg;
  pg.rbar.resize(2, 2);
  pg.rbar << 4, -2, -2, 4;
  pg.qbar = Vector::Zero(2);
  auto c = check_assumption_1(pg);
  EXPECT_TRUE(c.holds);
  EXPECT_NEAR(c.modulus, 2.0, 1e-12);

  pg.rbar = Matrix::Identity(2, 2);
  c = check_assumption_1(pg);
  EXPECT_TRUE(c.holds);
  EXPECT_NEAR(c.modulus, 1.0, 1e-15);

  pg.rbar << 1, 3, -3, -1;
  c = check_assumption_1(pg);
  EXPECT_FALSE(c.holds);
  EXPECT_LE(c.modulus, 0.0);
}

TEST(SolveNeTest, Examples) {
  const Vector y = solve_ne(assemble_pseudo_gradient(two_agent_game()));
  EXPECT_NEAR(y(0), 5.0 / 3.0, 1e-14);
  EXPECT_NEAR(y(1), 7.0 / 3.0, 1e-14);

  const Vector r = vec({-1.5, 0.25});
  const Vector iso = solve_ne(assemble_pseudo_gradient(cost_from_targets({r}, CommGraph(1, true, {}))));
  EXPECT_TRUE(iso.isApprox(r, 1e-15));
}

TEST(PartialGradientTest, Examples) {
  // R_ii = 1, Q_ii = -2r with r = -1, at y = 0: e = 2.
  const NetworkGame iso = cost_from_targets({vec({-1.0})}, CommGraph(1, true, {}));
  EXPECT_DOUBLE_EQ(partial_gradient(iso, 0, vec({0.0}))(0), 2.0);

  const NetworkGame g = two_agent_game();
  EXPECT_DOUBLE_EQ(partial_gradient(g, 0, vec({0, 0}))(0), -2.0);
  EXPECT_DOUBLE_EQ(partial_gradient(g, 1, vec({0, 0}))(0), -6.0);
  const Vector y = solve_ne(assemble_pseudo_gradient(g));
  EXPECT_NEAR(partial_gradient(g, 0, y)(0), 0.0, 1e-14);
  EXPECT_NEAR(partial_gradient(g, 1, y)(0), 0.0, 1e-14);
  EXPECT_THROW(partial_gradient(g, 2, y), std::out_of_range);
}

TEST(EvaluateCostTest, Examples) {
  const Vector r = vec({-1.0, 0.0});
  const NetworkGame iso = cost_from_targets({r}, CommGraph(1, true, {}));
  EXPECT_NEAR(evaluate_cost(iso, 0, r), 0.0, 1e-15);
  EXPECT_DOUBLE_EQ(evaluate_cost(two_agent_game(), 0, vec({1, 3})), 4.0);
}

TEST(CostFromTargetsTest, Blocks) {
  const NetworkGame iso = cost_from_targets({vec({-1, 0})}, CommGraph(1, true, {}));
  EXPECT_TRUE(iso.cost(0).r_self.isApprox(Matrix::Identity(2, 2)));
  EXPECT_TRUE(iso.cost(0).q_self.isApprox(vec({2, 0}).transpose()));
  EXPECT_DOUBLE_EQ(iso.cost(0).q_const, 1.0);
  EXPECT_TRUE(iso.cost(0).r_neighbor.empty());

  const NetworkGame g = cost_from_targets({vec({0, 0}), vec({0, 0}), vec({0, 0})},
                                          CommGraph(3, true, {{0, 2}, {1, 2}}));
  EXPECT_TRUE(g.cost(2).r_self.isApprox(3.0 * Matrix::Identity(2, 2)));
  EXPECT_TRUE(g.cost(2).r_neighbor.at(0).isApprox(-2.0 * Matrix::Identity(2, 2)));
  EXPECT_TRUE(g.cost(2).q_neighbor.at(1).isApprox(Matrix::Identity(2, 2)));
}

TEST(NetworkGameTest, RejectsInvalidCosts) {
  LocalCost c;
  c.r_self = -Matrix::Identity(1, 1);
  c.q_self = Matrix::Zero(1, 1);
  EXPECT_THROW(NetworkGame(CommGraph(1, true, {}), {c}), DomainError);

  // Coupling to a non-neighbor.
  LocalCost a;
  a.r_self = Matrix::Identity(1, 1);
  a.q_self = Matrix::Zero(1, 1);
  LocalCost b = a;
  b.r_neighbor[0] = Matrix::Ones(1, 1);
  b.q_neighbor[0] = Matrix::Ones(1, 1);
  EXPECT_THROW(NetworkGame(CommGraph(2, true, {}), {a, b}), DomainError);

  // Missing coupling for a neighbor.
  EXPECT_THROW(NetworkGame(CommGraph(2, true, {{0, 1}}), {a, a}), DomainError);

  LocalCost wrong = a;
  wrong.q_self = Matrix::Zero(1, 2);
  EXPECT_THROW(NetworkGame(CommGraph(1, true, {}), {wrong}), DimensionError);
}

// Random game: heterogeneous p_i, random couplings on a random digraph with
// R_ii dominant enough for strong monotonicity.
NetworkGame random_game(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> agents(2, 6), dim(1, 3);
  std::bernoulli_distribution coin(0.4);
  const int n = agents(rng);
  std::vector<Eigen::Index> p(n);
  for (int i = 0; i < n; ++i) p[i] = dim(rng);
  std::vector<Edge> edges;
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      if (a != b && coin(rng)) edges.push_back({static_cast<AgentIndex>(a), static_cast<AgentIndex>(b)});
    }
  }
  const CommGraph graph(n, true, edges);
  std::vector<LocalCost> costs(n);
  for (int i = 0; i < n; ++i) {
    LocalCost& c = costs[i];
    const Matrix m = testing::random_matrix(rng, p[i], p[i]);
    c.r_self = m * m.transpose() + (2.0 + n) * Matrix::Identity(p[i], p[i]) +
               0.3 * testing::random_matrix(rng, p[i], p[i]);
    c.q_self = testing::random_matrix(rng, 1, p[i], 3.0);
    c.q_const = testing::random_matrix(rng, 1, 1)(0, 0);
    for (AgentIndex j : graph.neighbors(i)) {
      c.r_neighbor[j] = testing::random_matrix(rng, p[i], p[j]);
      c.q_neighbor[j] = testing::random_matrix(rng, p[j], p[j]);
    }
  }
  return NetworkGame(graph, costs);
}

TEST(GamePropertyTest, StrongMonotonicityInequality) {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 100; ++trial) {
    const NetworkGame g = random_game(rng);
    const PseudoGradient pg = assemble_pseudo_gradient(g);
    const MonotonicityCertificate m = check_assumption_1(pg);
    if (!m.holds) continue;
    const Eigen::Index n = g.total_output_dim();
    const Vector y1 = testing::random_matrix(rng, n, 1, 5.0);
    const Vector y2 = testing::random_matrix(rng, n, 1, 5.0);
    const Vector f1 = pg.rbar * y1 + pg.qbar, f2 = pg.rbar * y2 + pg.qbar;
    EXPECT_GE((f1 - f2).dot(y1 - y2), m.modulus * (y1 - y2).squaredNorm() * (1 - 1e-12));
  }
}

TEST(GamePropertyTest, NashInequalityAgainstUnilateralDeviations) {
  std::mt19937_64 rng(43);
  int checked = 0;
  for (int trial = 0; trial < 30; ++trial) {
    const NetworkGame g = random_game(rng);
    const PseudoGradient pg = assemble_pseudo_gradient(g);
    if (!check_assumption_1(pg).holds) continue;
    const Vector y = solve_ne(pg);
    EXPECT_LE((pg.rbar * y + pg.qbar).norm(),
              1e-10 * (pg.rbar.norm() * y.norm() + pg.qbar.norm()));
    for (AgentIndex i = 0; i < g.agent_count(); ++i) {
      const double j_star = evaluate_cost(g, i, y);
      for (int d = 0; d < 100; ++d) {
        Vector dev = y;
        dev.segment(g.output_offset(i), g.output_dim(i)) +=
            testing::random_matrix(rng, g.output_dim(i), 1, 2.0);
        EXPECT_GE(evaluate_cost(g, i, dev), j_star - 1e-9);
      }
    }
    ++checked;
  }
  EXPECT_GT(checked, 10);
}

TEST(GamePropertyTest, NeIgnoresNeighborQuadraticsAndConstants) {
  std::mt19937_64 rng(47);
  for (int trial = 0; trial < 30; ++trial) {
    const NetworkGame g = random_game(rng);
    const PseudoGradient pg = assemble_pseudo_gradient(g);
    if (!check_assumption_1(pg).holds) continue;
    std::vector<LocalCost> costs = g.costs();
    for (LocalCost& c : costs) {
      c.q_const += 10.0;
      for (auto& [j, q] : c.q_neighbor) q += testing::random_matrix(rng, q.rows(), q.cols());
    }
    const NetworkGame h(g.graph(), costs);
    const Vector a = solve_ne(pg);
    const Vector b = solve_ne(assemble_pseudo_gradient(h));
    EXPECT_EQ(a, b);
  }
}

}  // namespace
}  // namespace netgame
