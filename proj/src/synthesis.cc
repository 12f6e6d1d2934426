#include "netgame/synthesis.h"

#include <sstream>

#include "netgame/errors.h"

namespace netgame {

namespace {

std::string format_complex(std::complex<double> z) {
  std::ostringstream os;
  os << z.real();
  if (z.imag() != 0.0) os << (z.imag() < 0 ? " - " : " + ") << std::abs(z.imag()) << "i";
  return os.str();
}

std::string format_values(const ComplexValues& values) {
  std::ostringstream os;
  os << "{";
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (k) os << ", ";
    os << format_complex(values[k]);
  }
  os << "}";
  return os.str();
}

// [0_{p x q}  Q_ii'].
Matrix extended_cost_offset(const LocalCost& cost, Eigen::Index q) {
  const Eigen::Index p = cost.q_self.cols();
  Matrix out = Matrix::Zero(p, q + 1);
  out.col(q) = cost.q_self.transpose();
  return out;
}

// Stacked positions of agent i's local coordinates (x_i, controller state).
std::vector<Eigen::Index> local_indices(const AgentLayout& lay) {
  std::vector<Eigen::Index> idx;
  for (Eigen::Index k = 0; k < lay.x_dim; ++k) idx.push_back(lay.x_offset + k);
  for (Eigen::Index k = 0; k < lay.ctrl_dim; ++k) idx.push_back(lay.ctrl_offset + k);
  for (Eigen::Index k = 0; k < lay.ctrl2_dim; ++k) idx.push_back(lay.ctrl2_offset + k);
  return idx;
}

}  // namespace

std::string_view to_string(StrategyKind k) {
  return k == StrategyKind::kDigraph ? "digraph" : "general";
}

StrategyKind parse_strategy(std::string_view s) {
  if (s == "digraph") return StrategyKind::kDigraph;
  if (s == "general") return StrategyKind::kGeneral;
  throw DomainError("unknown strategy '" + std::string(s) +
                    "' (expected digraph or general)");
}

ObserverDesign observer_gain(const Matrix& a, const Matrix& cw,
                             const ObserverWeights& w) {
  const Eigen::Index n = a.rows();
  const Eigen::Index p = cw.rows();
  if (cw.cols() != n) throw DimensionError("observer_gain: Cw must have n columns");
  const SpectrumReport det = pbh_stabilizable(a.transpose(), cw.transpose());
  if (!det.holds) {
    throw SynthesisError("observer_gain: (A, Cw) is not detectable; PBH fails at " +
                         format_values(det.offending));
  }
  const linalg::CareSolution dual =
      linalg::solve_care(a.transpose(), cw.transpose(),
                         w.q * Matrix::Identity(n, n), w.r * Matrix::Identity(p, p));
  ObserverDesign out;
  out.gain = -dual.gain.transpose();
  const linalg::HurwitzResult cert = linalg::is_hurwitz(a - out.gain * cw);
  if (!cert.hurwitz) {
    throw SynthesisError("observer_gain: A - L Cw is not Hurwitz");
  }
  out.abscissa = cert.abscissa;
  return out;
}

StabilizerDesign augmented_stabilizer(const Matrix& a, const Matrix& b,
                                      const Matrix& cw, const InternalModel& im,
                                      const StabilizerWeights& w) {
  const Eigen::Index n = a.rows();
  const Eigen::Index m = b.cols();
  const Eigen::Index v = im.dim();
  if (b.rows() != n || cw.cols() != n || im.g2.cols() != cw.rows()) {
    throw DimensionError("augmented_stabilizer: inconsistent dimensions");
  }
  const SpectrumReport stab = pbh_stabilizable(a, b);
  if (!stab.holds) {
    throw SynthesisError("augmented_stabilizer: (A, B) is not stabilizable; PBH fails at " +
                         format_values(stab.offending));
  }
  ComplexValues broken;
  for (const auto& z : distinct_eigenvalues(im.g1)) {
    if (!transmission_rank_full(a, b, cw, z)) broken.push_back(z);
  }
  if (!broken.empty()) {
    throw SynthesisError(
        "augmented_stabilizer: rank [[A - lambda I, B], [Cw, 0]] < n + p at "
        "internal-model eigenvalues " + format_values(broken));
  }

  Matrix aa = Matrix::Zero(n + v, n + v);
  aa.topLeftCorner(n, n) = a;
  aa.bottomLeftCorner(v, n) = im.g2 * cw;
  aa.bottomRightCorner(v, v) = im.g1;
  Matrix ba = Matrix::Zero(n + v, m);
  ba.topRows(n) = b;
  Matrix qw = Matrix::Zero(n + v, n + v);
  qw.diagonal().head(n).setConstant(w.q_state);
  qw.diagonal().tail(v).setConstant(w.q_internal);

  const linalg::CareSolution care =
      linalg::solve_care(aa, ba, qw, w.r * Matrix::Identity(m, m));
  StabilizerDesign out;
  out.k1 = care.gain.leftCols(n);
  out.k2 = care.gain.rightCols(v);
  out.abscissa = care.abscissa;
  return out;
}

AgentGains synthesize_gains(const AgentPlant& plant, const LocalCost& cost,
                            const Exosystem& exo, const SynthesisOptions& opts) {
  if (cost.r_self.rows() != plant.outputs()) {
    throw DimensionError("synthesize_gains: cost and plant output dimensions differ");
  }
  AgentGains g;
  g.r_sym = cost.r_self + cost.r_self.transpose();
  const Matrix cw = g.r_sym * plant.c;
  const ObserverDesign obs = observer_gain(plant.a, cw, opts.observer);
  g.l = obs.gain;
  g.observer_abscissa = obs.abscissa;
  g.im = build_p_copy(extend_exosystem(exo).s, plant.outputs());
  const StabilizerDesign st =
      augmented_stabilizer(plant.a, plant.b, cw, g.im, opts.stabilizer);
  g.k1 = st.k1;
  g.k2 = st.k2;
  g.augmented_abscissa = st.abscissa;
  return g;
}

ControllerDigraph make_digraph_controller(const AgentPlant& plant, AgentGains gains) {
  const Eigen::Index n = plant.states();
  const Eigen::Index v = gains.im.dim();
  ControllerDigraph c;
  c.m1 = Matrix::Zero(n + v, n + v);
  c.m1.topLeftCorner(n, n) =
      plant.a + plant.b * gains.k1 - gains.l * gains.r_sym * plant.c;
  c.m1.topRightCorner(n, v) = plant.b * gains.k2;
  c.m1.bottomRightCorner(v, v) = gains.im.g1;
  c.m2 = Matrix(n + v, plant.outputs());
  c.m2 << gains.l, gains.im.g2;
  c.k = Matrix(plant.inputs(), n + v);
  c.k << gains.k1, gains.k2;
  c.gains = std::move(gains);
  return c;
}

ControllerGeneral make_general_controller(const AgentPlant& plant, AgentGains gains) {
  ControllerGeneral c;
  c.a = plant.a;
  c.b = plant.b;
  c.c = plant.c;
  c.gains = std::move(gains);
  return c;
}

ControllerDigraph build_strategy_digraph(const AgentPlant& plant, const LocalCost& cost,
                                         const Exosystem& exo,
                                         const SynthesisOptions& opts) {
  return make_digraph_controller(plant, synthesize_gains(plant, cost, exo, opts));
}

ControllerGeneral build_strategy_general(const AgentPlant& plant, const LocalCost& cost,
                                         const Exosystem& exo,
                                         const SynthesisOptions& opts) {
  return make_general_controller(plant, synthesize_gains(plant, cost, exo, opts));
}

StrategyKind kind_of(const Controller& c) {
  return std::holds_alternative<ControllerDigraph>(c) ? StrategyKind::kDigraph
                                                      : StrategyKind::kGeneral;
}

const AgentGains& gains_of(const Controller& c) {
  return std::visit([](const auto& x) -> const AgentGains& { return x.gains; }, c);
}

Eigen::Index controller_state_dim(const Controller& c) {
  if (const auto* d = std::get_if<ControllerDigraph>(&c)) return d->state_dim();
  const auto& g = std::get<ControllerGeneral>(c);
  return g.observer_dim() + g.internal_dim();
}

AgentClosedLoop agent_closed_loop(const AgentPlant& plant, const LocalCost& cost,
                                  const Exosystem& exo, const Controller& controller,
                                  Realization realization) {
  const Matrix a_mu = plant.a_of(realization);
  const Matrix b_mu = plant.b_of(realization);
  const Matrix c_mu = plant.c_of(realization);
  const Matrix p_ext = extended_disturbance_input(plant.p_of(realization));
  const Matrix q_ext = extended_cost_offset(cost, exo.s.rows());
  const AgentGains& g = gains_of(controller);
  const Eigen::Index n = plant.states();
  const Eigen::Index py = plant.outputs();
  const Eigen::Index nc = controller_state_dim(controller);
  const Eigen::Index nz = n + nc;

  AgentClosedLoop out;
  out.a = Matrix::Zero(nz, nz);
  out.p = Matrix::Zero(nz, q_ext.cols());
  out.output = Matrix::Zero(py, nz);
  out.input = Matrix::Zero(plant.inputs(), nz);
  out.error = Matrix::Zero(py, nz);
  out.observer_output = Matrix::Zero(0, nz);
  out.error_v = q_ext;
  out.output.leftCols(n) = c_mu;
  out.error.leftCols(n) = g.r_sym * c_mu;
  out.a.topLeftCorner(n, n) = a_mu;
  out.p.topRows(n) = p_ext;

  if (const auto* dc = std::get_if<ControllerDigraph>(&controller)) {
    out.a.topRightCorner(n, nc) = b_mu * dc->k;
    out.a.bottomRightCorner(nc, nc) = dc->m1;
    out.a.bottomLeftCorner(nc, n) = dc->m2 * g.r_sym * c_mu;
    out.p.bottomRows(nc) = dc->m2 * q_ext;
    out.input.rightCols(nc) = dc->k;
    for (const auto& [j, r_ij] : cost.r_neighbor) {
      Matrix f = Matrix::Zero(nz, r_ij.cols());
      f.bottomRows(nc) = dc->m2 * r_ij;
      out.from_output[j] = std::move(f);
    }
    return out;
  }

  const auto& gc = std::get<ControllerGeneral>(controller);
  const Eigen::Index nim = gc.internal_dim();
  const Eigen::Index xo = n, zo = 2 * n;
  out.a.block(0, xo, n, n) = b_mu * g.k1;
  out.a.block(0, zo, n, nim) = b_mu * g.k2;
  // Observer driven by -L (e_hat - e).
  out.a.block(xo, xo, n, n) = gc.a + gc.b * g.k1 - g.l * g.r_sym * gc.c;
  out.a.block(xo, zo, n, nim) = gc.b * g.k2;
  out.a.block(xo, 0, n, n) = g.l * g.r_sym * c_mu;
  out.p.block(xo, 0, n, q_ext.cols()) = g.l * q_ext;
  // Internal model driven by e.
  out.a.block(zo, zo, nim, nim) = g.im.g1;
  out.a.block(zo, 0, nim, n) = g.im.g2 * g.r_sym * c_mu;
  out.p.block(zo, 0, nim, q_ext.cols()) = g.im.g2 * q_ext;
  out.input.block(0, xo, plant.inputs(), n) = g.k1;
  out.input.block(0, zo, plant.inputs(), nim) = g.k2;
  out.observer_output = Matrix::Zero(gc.c.rows(), nz);
  out.observer_output.block(0, xo, gc.c.rows(), n) = gc.c;
  for (const auto& [j, r_ij] : cost.r_neighbor) {
    Matrix fy = Matrix::Zero(nz, r_ij.cols());
    fy.block(xo, 0, n, r_ij.cols()) = g.l * r_ij;
    fy.block(zo, 0, nim, r_ij.cols()) = g.im.g2 * r_ij;
    out.from_output[j] = std::move(fy);
    Matrix fo = Matrix::Zero(nz, r_ij.cols());
    fo.block(xo, 0, n, r_ij.cols()) = -g.l * r_ij;
    out.from_observer[j] = std::move(fo);
  }
  return out;
}

void check_strategy_graph(const CommGraph& graph, StrategyKind kind) {
  if (kind == StrategyKind::kDigraph) {
    if (!graph.directed()) {
      if (!graph.edges().empty()) {
        throw AssumptionError(5, "Assumption 5: the digraph strategy needs a "
                                 "directed graph without cycles; an undirected "
                                 "edge is a 2-cycle");
      }
      return;
    }
    const AcyclicResult acyclic = check_acyclic(graph);
    if (!acyclic.acyclic) {
      std::ostringstream os;
      os << "Assumption 5: communication digraph has a cycle ";
      for (std::size_t k = 0; k < acyclic.cycle.size(); ++k) {
        os << (k ? " -> " : "") << acyclic.cycle[k] + 1;
      }
      throw AssumptionError(5, os.str());
    }
  } else if (check_connected(graph) == Connectivity::kDisconnected) {
    throw AssumptionError(6, "Assumption 6: communication graph is disconnected");
  }
}

ClosedLoopSystem assemble_closed_loop(const NetworkGame& game,
                                      const std::vector<AgentPlant>& plants,
                                      const std::vector<Exosystem>& exos,
                                      const std::vector<Controller>& controllers,
                                      StrategyKind kind, Realization realization) {
  const std::size_t n_agents = game.agent_count();
  if (plants.size() != n_agents || exos.size() != n_agents ||
      controllers.size() != n_agents) {
    throw DimensionError("assemble_closed_loop: one plant, exosystem and "
                         "controller per agent required");
  }
  for (AgentIndex i = 0; i < n_agents; ++i) {
    if (kind_of(controllers[i]) != kind) {
      throw DomainError("assemble_closed_loop: controller kind does not match strategy");
    }
    if (plants[i].outputs() != game.output_dim(i)) {
      throw DimensionError("assemble_closed_loop: plant output differs from cost dimension");
    }
    if (exos[i].s.rows() != plants[i].disturbances()) {
      throw DimensionError("assemble_closed_loop: exosystem size differs from P columns");
    }
  }
  const CommGraph& graph = game.graph();
  check_strategy_graph(graph, kind);

  ClosedLoopSystem cl;
  cl.kind = kind;
  cl.realization = realization;
  cl.layout.resize(n_agents);
  if (kind == StrategyKind::kDigraph && graph.directed()) {
    cl.order = check_acyclic(graph).order;
  } else {
    for (AgentIndex i = 0; i < n_agents; ++i) cl.order.push_back(i);
  }

  // Offsets.
  Eigen::Index nz = 0, nv = 0, ne = 0, nu = 0, nx = 0;
  for (AgentIndex i = 0; i < n_agents; ++i) {
    nx += plants[i].states();
  }
  Eigen::Index xi_base = nx, zeta_base = 2 * nx;
  if (kind == StrategyKind::kGeneral) {
    Eigen::Index total_im = 0;
    for (AgentIndex i = 0; i < n_agents; ++i) total_im += gains_of(controllers[i]).im.dim();
    nz = 2 * nx + total_im;
  }
  Eigen::Index xs = 0;
  for (AgentIndex i : cl.order) {
    AgentLayout& lay = cl.layout[i];
    const AgentPlant& pl = plants[i];
    lay.x_dim = pl.states();
    lay.xs_offset = xs;
    xs += lay.x_dim;
    if (kind == StrategyKind::kDigraph) {
      lay.x_offset = nz;
      lay.ctrl_offset = nz + lay.x_dim;
      lay.ctrl_dim = controller_state_dim(controllers[i]);
      nz += lay.x_dim + lay.ctrl_dim;
    } else {
      lay.x_offset = lay.xs_offset;
      lay.ctrl_offset = xi_base + lay.xs_offset;
      lay.ctrl_dim = lay.x_dim;
      lay.ctrl2_offset = zeta_base;
      lay.ctrl2_dim = gains_of(controllers[i]).im.dim();
      zeta_base += lay.ctrl2_dim;
    }
    lay.v_offset = nv;
    lay.v_dim = exos[i].s.rows() + 1;
    nv += lay.v_dim;
    lay.e_offset = ne;
    lay.e_dim = pl.outputs();
    ne += lay.e_dim;
    lay.u_offset = nu;
    lay.u_dim = pl.inputs();
    nu += lay.u_dim;
  }

  cl.a = Matrix::Zero(nz, nz);
  cl.p = Matrix::Zero(nz, nv);
  cl.c = Matrix::Zero(ne, nz);
  cl.q = Matrix::Zero(ne, nv);
  cl.s_hat = Matrix::Zero(nv, nv);
  cl.v0 = Vector::Zero(nv);
  cl.output_map = Matrix::Zero(ne, nz);
  cl.input_map = Matrix::Zero(nu, nz);
  cl.state_map = Matrix::Zero(nx, nz);
  cl.plant_a = Matrix::Zero(nx, nx);
  cl.plant_b = Matrix::Zero(nx, nu);
  cl.plant_p = Matrix::Zero(nx, nv);

  for (AgentIndex i = 0; i < n_agents; ++i) {
    const AgentLayout& li = cl.layout[i];
    const AgentPlant& pl = plants[i];
    const AgentClosedLoop blk =
        agent_closed_loop(pl, game.cost(i), exos[i], controllers[i], realization);
    const std::vector<Eigen::Index> zi = local_indices(li);
    const Eigen::Index n = li.x_dim;

    cl.s_hat.block(li.v_offset, li.v_offset, li.v_dim, li.v_dim) = extend_exosystem(exos[i]).s;
    cl.v0.segment(li.v_offset, li.v_dim) = extend_exosystem(exos[i]).v0;
    cl.a(zi, zi) = blk.a;
    cl.p(zi, Eigen::seqN(li.v_offset, li.v_dim)) = blk.p;
    cl.c(Eigen::seqN(li.e_offset, li.e_dim), zi) = blk.error;
    cl.q.block(li.e_offset, li.v_offset, li.e_dim, li.v_dim) = blk.error_v;
    cl.output_map(Eigen::seqN(li.e_offset, li.e_dim), zi) = blk.output;
    cl.input_map(Eigen::seqN(li.u_offset, li.u_dim), zi) = blk.input;
    cl.state_map.block(li.xs_offset, li.x_offset, n, n) = Matrix::Identity(n, n);
    cl.plant_a.block(li.xs_offset, li.xs_offset, n, n) = pl.a_of(realization);
    cl.plant_b.block(li.xs_offset, li.u_offset, n, li.u_dim) = pl.b_of(realization);
    cl.plant_p.block(li.xs_offset, li.v_offset, n, li.v_dim) =
        extended_disturbance_input(pl.p_of(realization));

    // Neighbor terms: y_j = C_j(mu) x_j and C_j xi_j with the nominal C_j.
    for (const auto& [j, r_ij] : game.cost(i).r_neighbor) {
      const AgentLayout& lj = cl.layout[j];
      const Matrix cj_mu = plants[j].c_of(realization);
      const auto xj = Eigen::seqN(lj.x_offset, lj.x_dim);
      cl.a(zi, xj) = blk.from_output.at(j) * cj_mu;
      cl.c(Eigen::seqN(li.e_offset, li.e_dim), xj) = r_ij * cj_mu;
      if (kind == StrategyKind::kGeneral) {
        const auto& gj = std::get<ControllerGeneral>(controllers[j]);
        cl.a(zi, Eigen::seqN(lj.ctrl_offset, lj.ctrl_dim)) = blk.from_observer.at(j) * gj.c;
      }
    }
  }

  const PseudoGradient pg = assemble_pseudo_gradient(game);
  if (check_assumption_1(pg).holds) cl.y_star = solve_ne(pg);
  return cl;
}

StabilityCertificate certify_stability(const ClosedLoopSystem& cl,
                                       const std::optional<ClosedLoopSystem>& perturbed) {
  StabilityCertificate out;
  const linalg::HurwitzResult nominal = linalg::is_hurwitz(cl.a);
  out.abscissa = nominal.abscissa;
  out.stable = nominal.hurwitz;
  if (perturbed) {
    const linalg::HurwitzResult pr = linalg::is_hurwitz(perturbed->a);
    out.perturbed_abscissa = pr.abscissa;
    out.stable = out.stable && pr.hurwitz;
  }
  return out;
}

bool RegulatorSolution::certified() const {
  return relative_dyn <= kRegulatorTol && relative_err <= kRegulatorTol;
}

RegulatorSolution solve_regulator(const ClosedLoopSystem& cl) {
  RegulatorSolution out;
  out.x_c = linalg::solve_sylvester(cl.a, cl.s_hat, cl.p);
  out.residual_dyn = (out.x_c * cl.s_hat - cl.a * out.x_c - cl.p).norm();
  out.residual_err = (cl.c * out.x_c + cl.q).norm();
  const double xn = out.x_c.norm();
  const double dyn_scale = (cl.a.norm() + cl.s_hat.norm()) * xn + cl.p.norm();
  const double err_scale = cl.c.norm() * xn + cl.q.norm();
  out.relative_dyn = dyn_scale > 0.0 ? out.residual_dyn / dyn_scale : out.residual_dyn;
  out.relative_err = err_scale > 0.0 ? out.residual_err / err_scale : out.residual_err;
  return out;
}

Vector to_original_order(const ClosedLoopSystem& cl, const Vector& stacked,
                         Eigen::Index AgentLayout::*offset,
                         Eigen::Index AgentLayout::*dim) {
  Vector out(stacked.size());
  Eigen::Index pos = 0;
  for (const AgentLayout& lay : cl.layout) {
    out.segment(pos, lay.*dim) = stacked.segment(lay.*offset, lay.*dim);
    pos += lay.*dim;
  }
  return out;
}

SteadyState steady_state(const RegulatorSolution& reg, const ClosedLoopSystem& cl,
                         const Vector& v) {
  if (v.size() != cl.exo_dim()) {
    throw DimensionError("steady_state: exogenous vector has the wrong size");
  }
  const Vector z = reg.x_c * v;
  const Vector x = cl.state_map * z;
  const Vector u = cl.input_map * z;
  const Vector y = cl.output_map * z;
  const Vector xdot = cl.state_map * (reg.x_c * (cl.s_hat * v));
  SteadyState out;
  out.dynamics_residual =
      (xdot - (cl.plant_a * x + cl.plant_b * u + cl.plant_p * v)).norm();
  out.x = to_original_order(cl, x, &AgentLayout::xs_offset, &AgentLayout::x_dim);
  out.u = to_original_order(cl, u, &AgentLayout::u_offset, &AgentLayout::u_dim);
  out.y = to_original_order(cl, y, &AgentLayout::e_offset, &AgentLayout::e_dim);
  if (cl.y_star.size() == out.y.size()) out.ne_gap = (out.y - cl.y_star).norm();
  return out;
}

}  // namespace netgame
