#include "netgame/sim.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "netgame/errors.h"

namespace netgame {

void SimConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw DomainError("SimConfig: dt must be positive");
  if (!(t_end >= dt) || !std::isfinite(t_end)) {
    throw DomainError("SimConfig: t_end must be at least dt");
  }
  if (record_stride < 1) throw DomainError("SimConfig: record_stride must be >= 1");
}

std::int64_t SimConfig::steps() const { return std::llround(t_end / dt); }

Eigen::Index Trajectory::offset(AgentIndex i, Eigen::Index AgentDims::*field) const {
  Eigen::Index off = 0;
  for (AgentIndex k = 0; k < i; ++k) off += dims.at(k).*field;
  return off;
}

Vector Trajectory::agent(const Vector& stacked, AgentIndex i,
                         Eigen::Index AgentDims::*field) const {
  return stacked.segment(offset(i, field), dims.at(i).*field);
}

namespace {

bool should_record(std::int64_t k, std::int64_t steps, int stride) {
  return k % stride == 0 || k == steps;
}

[[noreturn]] void diverged(double t) {
  std::ostringstream os;
  os << "simulation diverged: non-finite state at t = " << t;
  throw DivergenceError(os.str(), t);
}

std::vector<AgentDims> dims_from_layout(const ClosedLoopSystem& cl) {
  std::vector<AgentDims> dims;
  for (const AgentLayout& lay : cl.layout) {
    dims.push_back({lay.x_dim, lay.ctrl_dim + lay.ctrl2_dim, lay.e_dim, lay.v_dim - 1});
  }
  return dims;
}

}  // namespace

Vector initial_state(const ClosedLoopSystem& cl, const std::vector<Vector>& x0) {
  if (x0.size() != cl.layout.size()) {
    throw DimensionError("initial_state: one initial plant state per agent required");
  }
  Vector z = Vector::Zero(cl.state_dim());
  for (AgentIndex i = 0; i < x0.size(); ++i) {
    const AgentLayout& lay = cl.layout[i];
    if (x0[i].size() != lay.x_dim) {
      throw DimensionError("initial_state: x0 has the wrong dimension");
    }
    z.segment(lay.x_offset, lay.x_dim) = x0[i];
  }
  return z;
}

Trajectory simulate(const ClosedLoopSystem& cl, const SimConfig& cfg,
                    const Vector& z0, const Vector& v0) {
  cfg.validate();
  if (z0.size() != cl.state_dim() || v0.size() != cl.exo_dim()) {
    throw DimensionError("simulate: initial state dimensions do not match the closed loop");
  }
  const double h = cfg.dt;
  const Matrix phi = linalg::expm(cl.s_hat * h);
  const Matrix phi_half = linalg::expm(cl.s_hat * (0.5 * h));

  Trajectory tr;
  tr.dims = dims_from_layout(cl);
  tr.y_star = cl.y_star;

  const auto record = [&](double t, const Vector& z, const Vector& v) {
    tr.times.push_back(t);
    Eigen::Index nx = 0, nc = 0, ny = 0, nw = 0;
    for (const AgentDims& d : tr.dims) {
      nx += d.x;
      nc += d.ctrl;
      ny += d.y;
      nw += d.w;
    }
    Vector x(nx), c(nc), w(nw);
    const Vector y_cl = cl.output_map * z;
    const Vector e_cl = cl.c * z + cl.q * v;
    Eigen::Index ox = 0, oc = 0, ow = 0;
    for (AgentIndex i = 0; i < cl.layout.size(); ++i) {
      const AgentLayout& lay = cl.layout[i];
      x.segment(ox, lay.x_dim) = z.segment(lay.x_offset, lay.x_dim);
      c.segment(oc, lay.ctrl_dim) = z.segment(lay.ctrl_offset, lay.ctrl_dim);
      c.segment(oc + lay.ctrl_dim, lay.ctrl2_dim) = z.segment(lay.ctrl2_offset, lay.ctrl2_dim);
      w.segment(ow, lay.v_dim - 1) = v.segment(lay.v_offset, lay.v_dim - 1);
      ox += lay.x_dim;
      oc += lay.ctrl_dim + lay.ctrl2_dim;
      ow += lay.v_dim - 1;
    }
    tr.x.push_back(std::move(x));
    tr.ctrl.push_back(std::move(c));
    tr.w.push_back(std::move(w));
    tr.y.push_back(to_original_order(cl, y_cl, &AgentLayout::e_offset, &AgentLayout::e_dim));
    tr.e.push_back(to_original_order(cl, e_cl, &AgentLayout::e_offset, &AgentLayout::e_dim));
  };

  Vector z = z0;
  Vector v = v0;
  const std::int64_t steps = cfg.steps();
  record(0.0, z, v);
  for (std::int64_t k = 1; k <= steps; ++k) {
    const Vector v_half = phi_half * v;
    const Vector v_next = phi * v;
    const Vector k1 = cl.a * z + cl.p * v;
    const Vector k2 = cl.a * (z + 0.5 * h * k1) + cl.p * v_half;
    const Vector k3 = cl.a * (z + 0.5 * h * k2) + cl.p * v_half;
    const Vector k4 = cl.a * (z + h * k3) + cl.p * v_next;
    z += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    v = v_next;
    const double t = static_cast<double>(k) * h;
    if (!z.allFinite()) diverged(t);
    if (should_record(k, steps, cfg.record_stride)) record(t, z, v);
  }
  return tr;
}

NeighborView::NeighborView(const CommGraph& graph, AgentIndex self,
                           const std::vector<Vector>& outputs,
                           const std::vector<Vector>* observer_outputs)
    : graph_(graph), self_(self), outputs_(outputs),
      observer_outputs_(observer_outputs) {}

void NeighborView::require_neighbor(AgentIndex j) const {
  if (!graph_.is_neighbor(self_, j)) {
    std::ostringstream os;
    os << "agent " << self_ + 1 << " attempted to read agent " << j + 1
       << ", which is not in its neighbor set";
    throw FirewallViolation(os.str());
  }
}

const Vector& NeighborView::output(AgentIndex j) const {
  require_neighbor(j);
  return outputs_[j];
}

const Vector& NeighborView::observer_output(AgentIndex j) const {
  require_neighbor(j);
  if (observer_outputs_ == nullptr) {
    throw FirewallViolation("observer outputs are not exchanged under the digraph strategy");
  }
  return (*observer_outputs_)[j];
}

namespace {

// One agent as it runs in the field: true plant, nominal controller copy,
// local state s = (x, controller state).
struct AgentRuntime {
  AgentIndex index = 0;
  AgentClosedLoop loop;
  Eigen::Index x_dim = 0;
  Matrix phi, phi_half;  // exact exosystem steps
  std::vector<std::pair<AgentIndex, Matrix>> couplings;  // (j, R_ij)

  struct State {
    Vector z, v;
  };

  Vector error(const State& s, const NeighborView& view) const {
    Vector e = loop.error * s.z + loop.error_v * s.v;
    for (const auto& [j, r_ij] : couplings) e += r_ij * view.output(j);
    return e;
  }

  // d/dt of z; v is advanced exactly elsewhere.
  Vector derivative(const State& s, const NeighborView& view, bool general) const {
    Vector d = loop.a * s.z + loop.p * s.v;
    for (const auto& [j, f] : loop.from_output) d += f * view.output(j);
    if (general) {
      for (const auto& [j, f] : loop.from_observer) d += f * view.observer_output(j);
    }
    return d;
  }
};

class DistributedNetwork {
 public:
  DistributedNetwork(const NetworkGame& game, const std::vector<AgentPlant>& plants,
                     const std::vector<Exosystem>& exos,
                     const std::vector<Controller>& controllers, double dt,
                     Realization realization)
      : graph_(game.graph()) {
    const std::size_t n = game.agent_count();
    general_ = kind_of(controllers.front()) == StrategyKind::kGeneral;
    for (AgentIndex i = 0; i < n; ++i) {
      AgentRuntime rt;
      rt.index = i;
      rt.loop = agent_closed_loop(plants[i], game.cost(i), exos[i], controllers[i], realization);
      rt.x_dim = plants[i].states();
      const Matrix s_ext = extend_exosystem(exos[i]).s;
      rt.phi = linalg::expm(s_ext * dt);
      rt.phi_half = linalg::expm(s_ext * (0.5 * dt));
      for (const auto& [j, r_ij] : game.cost(i).r_neighbor) rt.couplings.emplace_back(j, r_ij);
      agents_.push_back(std::move(rt));
    }
  }

  using States = std::vector<AgentRuntime::State>;

  // Each agent broadcasts y_i (and C_i xi_i), then evaluates its own
  // right-hand side from what it received.
  std::vector<Vector> derivative(const States& s) const {
    std::vector<Vector> outputs, observer_outputs;
    broadcast(s, outputs, observer_outputs);
    std::vector<Vector> d(agents_.size());
    for (const AgentRuntime& rt : agents_) {
      const NeighborView view(graph_, rt.index, outputs, general_ ? &observer_outputs : nullptr);
      d[rt.index] = rt.derivative(s[rt.index], view, general_);
    }
    return d;
  }

  void observe(const States& s, std::vector<Vector>& outputs, std::vector<Vector>& errors) const {
    std::vector<Vector> observer_outputs;
    broadcast(s, outputs, observer_outputs);
    errors.assign(agents_.size(), Vector());
    for (const AgentRuntime& rt : agents_) {
      const NeighborView view(graph_, rt.index, outputs, nullptr);
      errors[rt.index] = rt.error(s[rt.index], view);
    }
  }

  const std::vector<AgentRuntime>& agents() const { return agents_; }

 private:
  void broadcast(const States& s, std::vector<Vector>& outputs,
                 std::vector<Vector>& observer_outputs) const {
    outputs.assign(agents_.size(), Vector());
    observer_outputs.assign(general_ ? agents_.size() : 0, Vector());
    for (const AgentRuntime& rt : agents_) {
      outputs[rt.index] = rt.loop.output * s[rt.index].z;
      if (general_) observer_outputs[rt.index] = rt.loop.observer_output * s[rt.index].z;
    }
  }

  const CommGraph& graph_;
  bool general_ = false;
  std::vector<AgentRuntime> agents_;
};

}  // namespace

Trajectory simulate_distributed(const NetworkGame& game,
                                const std::vector<AgentPlant>& plants,
                                const std::vector<Exosystem>& exos,
                                const std::vector<Controller>& controllers,
                                const SimConfig& cfg, const std::vector<Vector>& x0,
                                Realization realization) {
  cfg.validate();
  const std::size_t n = game.agent_count();
  if (plants.size() != n || exos.size() != n || controllers.size() != n || x0.size() != n) {
    throw DimensionError("simulate_distributed: per-agent inputs must have N entries");
  }
  const StrategyKind kind = kind_of(controllers.front());
  for (const Controller& c : controllers) {
    if (kind_of(c) != kind) throw DomainError("simulate_distributed: mixed controller kinds");
  }
  check_strategy_graph(game.graph(), kind);
  const DistributedNetwork net(game, plants, exos, controllers, cfg.dt, realization);
  const auto& agents = net.agents();

  using States = DistributedNetwork::States;
  States s(n);
  for (AgentIndex i = 0; i < n; ++i) {
    if (x0[i].size() != plants[i].states()) {
      throw DimensionError("simulate_distributed: x0 has the wrong dimension");
    }
    s[i].z = Vector::Zero(plants[i].states() + controller_state_dim(controllers[i]));
    s[i].z.head(plants[i].states()) = x0[i];
    s[i].v = extend_exosystem(exos[i]).v0;
  }

  Trajectory tr;
  const PseudoGradient pg = assemble_pseudo_gradient(game);
  if (check_assumption_1(pg).holds) tr.y_star = solve_ne(pg);
  for (AgentIndex i = 0; i < n; ++i) {
    tr.dims.push_back({plants[i].states(), controller_state_dim(controllers[i]),
                       plants[i].outputs(), exos[i].s.rows()});
  }

  const auto record = [&](double t, const States& st) {
    tr.times.push_back(t);
    std::vector<Vector> outputs, errors;
    net.observe(st, outputs, errors);
    Eigen::Index nx = 0, nc = 0, ny = 0, nw = 0;
    for (const AgentDims& d : tr.dims) {
      nx += d.x;
      nc += d.ctrl;
      ny += d.y;
      nw += d.w;
    }
    Vector x(nx), c(nc), y(ny), ev(ny), w(nw);
    Eigen::Index ox = 0, oc = 0, oy = 0, ow = 0;
    for (AgentIndex i = 0; i < n; ++i) {
      const AgentDims& d = tr.dims[i];
      x.segment(ox, d.x) = st[i].z.head(d.x);
      c.segment(oc, d.ctrl) = st[i].z.tail(d.ctrl);
      y.segment(oy, d.y) = outputs[i];
      ev.segment(oy, d.y) = errors[i];
      w.segment(ow, d.w) = st[i].v.head(d.w);
      ox += d.x;
      oc += d.ctrl;
      oy += d.y;
      ow += d.w;
    }
    tr.x.push_back(std::move(x));
    tr.ctrl.push_back(std::move(c));
    tr.y.push_back(std::move(y));
    tr.e.push_back(std::move(ev));
    tr.w.push_back(std::move(w));
  };

  const double h = cfg.dt;
  const auto combine = [&](const States& base, const std::vector<Vector>& k, double scale,
                           const std::vector<Vector>& v) {
    States out(n);
    for (AgentIndex i = 0; i < n; ++i) {
      out[i].z = base[i].z + scale * k[i];
      out[i].v = v[i];
    }
    return out;
  };

  const std::int64_t steps = cfg.steps();
  record(0.0, s);
  std::vector<Vector> v_half(n), v_next(n);
  for (std::int64_t k = 1; k <= steps; ++k) {
    for (AgentIndex i = 0; i < n; ++i) {
      v_half[i] = agents[i].phi_half * s[i].v;
      v_next[i] = agents[i].phi * s[i].v;
    }
    const std::vector<Vector> k1 = net.derivative(s);
    const std::vector<Vector> k2 = net.derivative(combine(s, k1, 0.5 * h, v_half));
    const std::vector<Vector> k3 = net.derivative(combine(s, k2, 0.5 * h, v_half));
    const std::vector<Vector> k4 = net.derivative(combine(s, k3, h, v_next));
    const double t = static_cast<double>(k) * h;
    bool finite = true;
    for (AgentIndex i = 0; i < n; ++i) {
      s[i].z += (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
      s[i].v = v_next[i];
      finite = finite && s[i].z.allFinite();
    }
    if (!finite) diverged(t);
    if (should_record(k, steps, cfg.record_stride)) record(t, s);
  }
  return tr;
}

ConvergenceMetrics convergence_metrics(const Trajectory& tr, double tol) {
  ConvergenceMetrics m;
  if (tr.size() == 0) throw DomainError("convergence_metrics: empty trajectory");
  const std::size_t n = tr.size();
  std::vector<double> gap(n);
  for (std::size_t k = 0; k < n; ++k) {
    gap[k] = tr.y_star.size() == tr.y[k].size() ? (tr.y[k] - tr.y_star).norm()
                                                 : std::numeric_limits<double>::infinity();
    if (!std::isfinite(gap[k])) gap[k] = std::numeric_limits<double>::infinity();
  }
  m.final_output_gap = gap.back();
  if (gap.back() <= tol) {
    std::size_t first = 0;
    for (std::size_t k = n; k-- > 0;) {
      if (gap[k] > tol) {
        first = k + 1;
        break;
      }
    }
    m.t_conv = tr.times[first];
  }
  const double t0 = tr.times.front();
  const double t1 = tr.times.back();
  const double tail_start = t1 - 0.1 * (t1 - t0);
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < n; ++k) {
    if (tr.times[k] < tail_start) continue;
    m.max_error_tail = std::max(m.max_error_tail, tr.e[k].norm());
    lo = std::min(lo, gap[k]);
    hi = std::max(hi, gap[k]);
  }
  m.steady_oscillation = hi - lo;
  m.max_gap_tail = hi;
  return m;
}

std::vector<AgentPlant> sample_perturbation(const std::vector<AgentPlant>& plants,
                                            double scale, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-scale, scale);
  const auto draw = [&](const Matrix& like) {
    Matrix m(like.rows(), like.cols());
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      for (Eigen::Index r = 0; r < m.rows(); ++r) m(r, c) = dist(rng);
    }
    return m;
  };
  std::vector<AgentPlant> out = plants;
  for (AgentPlant& p : out) {
    p.set_perturbation(draw(p.a), draw(p.b), draw(p.c), draw(p.p));
  }
  return out;
}

std::vector<PerturbationScaleReport> perturbation_sweep(
    const NetworkGame& game, const std::vector<AgentPlant>& plants,
    const std::vector<Exosystem>& exos, const std::vector<Controller>& controllers,
    StrategyKind kind, const std::vector<double>& scales, int draws, std::uint64_t seed) {
  std::vector<PerturbationScaleReport> out;
  std::mt19937_64 rng(seed);
  for (double scale : scales) {
    PerturbationScaleReport rep;
    rep.scale = scale;
    rep.worst_abscissa = -std::numeric_limits<double>::infinity();
    for (int d = 0; d < draws; ++d) {
      const auto perturbed = sample_perturbation(plants, scale, rng);
      const ClosedLoopSystem cl = assemble_closed_loop(game, perturbed, exos, controllers,
                                                       kind, Realization::kPerturbed);
      const StabilityCertificate cert = certify_stability(cl);
      ++rep.draws;
      if (cert.stable) ++rep.stable_draws;
      rep.worst_abscissa = std::max(rep.worst_abscissa, cert.abscissa);
    }
    out.push_back(rep);
  }
  return out;
}

std::optional<double> largest_stable_scale(const std::vector<PerturbationScaleReport>& reports) {
  std::optional<double> best;
  for (const auto& r : reports) {
    if (r.draws > 0 && r.stable_draws == r.draws && (!best || r.scale > *best)) best = r.scale;
  }
  return best;
}

}  // namespace netgame
