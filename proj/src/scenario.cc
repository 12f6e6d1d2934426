#include "netgame/scenario.h"

#include <openssl/evp.h>

#include <array>
#include <fstream>
#include <sstream>

#include "json_io.h"
#include "netgame/errors.h"

namespace netgame {

using json_io::Field;
using json_io::Json;

namespace {

bool same(const Matrix& a, const Matrix& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() && a == b;
}

bool same(const Vector& a, const Vector& b) { return a.size() == b.size() && a == b; }

bool same(const std::map<AgentIndex, Matrix>& a, const std::map<AgentIndex, Matrix>& b) {
  if (a.size() != b.size()) return false;
  for (auto ia = a.begin(), ib = b.begin(); ia != a.end(); ++ia, ++ib) {
    if (ia->first != ib->first || !same(ia->second, ib->second)) return false;
  }
  return true;
}

bool same(const LocalCost& a, const LocalCost& b) {
  return same(a.r_self, b.r_self) && same(a.q_self, b.q_self) && a.q_const == b.q_const &&
         same(a.r_neighbor, b.r_neighbor) && same(a.q_neighbor, b.q_neighbor);
}

void expect_shape(const Field& f, const Matrix& m, Eigen::Index rows, Eigen::Index cols) {
  if (m.rows() != rows || m.cols() != cols) {
    std::ostringstream os;
    os << "expected a " << rows << "x" << cols << " matrix, got " << m.rows() << "x" << m.cols();
    f.fail(os.str());
  }
}

AgentIndex agent_number(const Field& f, std::size_t agent_count) {
  const long long k = f.integer();
  if (k < 1 || static_cast<std::size_t>(k) > agent_count) {
    f.fail("agent number " + std::to_string(k) + " is outside 1.." + std::to_string(agent_count));
  }
  return static_cast<AgentIndex>(k - 1);
}

AgentSpec parse_agent(const Field& f) {
  AgentSpec a;
  const Field fa = f.at("A");
  a.a = fa.matrix();
  if (a.a.rows() != a.a.cols() || a.a.rows() == 0) fa.fail("A must be square and non-empty");
  const Eigen::Index n = a.a.rows();
  const Field fb = f.at("B");
  a.b = fb.matrix();
  if (a.b.rows() != n) fb.fail("B must have " + std::to_string(n) + " rows");
  const Field fc = f.at("C");
  a.c = fc.matrix();
  if (a.c.cols() != n || a.c.rows() == 0) fc.fail("C must have " + std::to_string(n) + " columns");
  const Field fp = f.at("P");
  a.p = fp.matrix();
  if (a.p.rows() != n) fp.fail("P must have " + std::to_string(n) + " rows");
  if (const auto px = f.find("x0")) {
    a.x0 = px->vector();
    if (a.x0.size() != n) px->fail("x0 must have " + std::to_string(n) + " entries");
  } else {
    a.x0 = Vector::Zero(n);
  }
  if (const auto pp = f.find("perturbation")) {
    PlantPerturbation d;
    const Field da = pp->at("A"), db = pp->at("B"), dc = pp->at("C"), dp = pp->at("P");
    d.da = da.matrix();
    expect_shape(da, d.da, a.a.rows(), a.a.cols());
    d.db = db.matrix();
    expect_shape(db, d.db, a.b.rows(), a.b.cols());
    d.dc = dc.matrix();
    expect_shape(dc, d.dc, a.c.rows(), a.c.cols());
    d.dp = dp.matrix();
    expect_shape(dp, d.dp, a.p.rows(), a.p.cols());
    a.perturbation = std::move(d);
  }
  return a;
}

LocalCost parse_cost_block(const Field& f, Eigen::Index p, std::size_t agent_count,
                           const std::vector<Eigen::Index>& output_dims) {
  LocalCost c;
  const Field fr = f.at("R_self");
  c.r_self = fr.matrix();
  expect_shape(fr, c.r_self, p, p);
  const Field fq = f.at("Q_self");
  c.q_self = fq.matrix();
  expect_shape(fq, c.q_self, 1, p);
  if (const auto fk = f.find("q")) c.q_const = fk->number();
  if (const auto fn = f.find("neighbors")) {
    for (std::size_t k = 0; k < fn->size(); ++k) {
      const Field entry = fn->at(k);
      const AgentIndex j = agent_number(entry.at("agent"), agent_count);
      const Field frj = entry.at("R");
      Matrix r = frj.matrix();
      expect_shape(frj, r, p, output_dims[j]);
      const Field fqj = entry.at("Q");
      Matrix q = fqj.matrix();
      expect_shape(fqj, q, output_dims[j], output_dims[j]);
      if (c.r_neighbor.count(j)) entry.fail("duplicate neighbor entry");
      c.r_neighbor.emplace(j, std::move(r));
      c.q_neighbor.emplace(j, std::move(q));
    }
  }
  return c;
}

Json agent_to_json(const AgentSpec& a) {
  Json j{{"A", json_io::matrix_to_json(a.a)},
         {"B", json_io::matrix_to_json(a.b)},
         {"C", json_io::matrix_to_json(a.c)},
         {"P", json_io::matrix_to_json(a.p)},
         {"x0", json_io::vector_to_json(a.x0)}};
  if (a.perturbation) {
    j["perturbation"] = Json{{"A", json_io::matrix_to_json(a.perturbation->da)},
                             {"B", json_io::matrix_to_json(a.perturbation->db)},
                             {"C", json_io::matrix_to_json(a.perturbation->dc)},
                             {"P", json_io::matrix_to_json(a.perturbation->dp)}};
  }
  return j;
}

Json cost_to_json(const Scenario& s) {
  if (const auto* t = std::get_if<TargetCost>(&s.cost)) {
    Json targets = Json::array();
    for (const Vector& r : t->targets) targets.push_back(json_io::vector_to_json(r));
    return Json{{"targets", std::move(targets)}};
  }
  Json blocks = Json::array();
  for (const LocalCost& c : std::get<ExplicitCost>(s.cost).blocks) {
    Json neighbors = Json::array();
    for (const auto& [j, r] : c.r_neighbor) {
      neighbors.push_back(Json{{"agent", j + 1},
                               {"R", json_io::matrix_to_json(r)},
                               {"Q", json_io::matrix_to_json(c.q_neighbor.at(j))}});
    }
    blocks.push_back(Json{{"R_self", json_io::matrix_to_json(c.r_self)},
                          {"Q_self", json_io::matrix_to_json(c.q_self)},
                          {"q", c.q_const},
                          {"neighbors", std::move(neighbors)}});
  }
  return Json{{"blocks", std::move(blocks)}};
}

}  // namespace

bool operator==(const PlantPerturbation& a, const PlantPerturbation& b) {
  return same(a.da, b.da) && same(a.db, b.db) && same(a.dc, b.dc) && same(a.dp, b.dp);
}

bool operator==(const AgentSpec& a, const AgentSpec& b) {
  return same(a.a, b.a) && same(a.b, b.b) && same(a.c, b.c) && same(a.p, b.p) &&
         a.perturbation == b.perturbation && same(a.x0, b.x0);
}

bool operator==(const TargetCost& a, const TargetCost& b) {
  if (a.targets.size() != b.targets.size()) return false;
  for (std::size_t k = 0; k < a.targets.size(); ++k) {
    if (!same(a.targets[k], b.targets[k])) return false;
  }
  return true;
}

bool operator==(const ExplicitCost& a, const ExplicitCost& b) {
  if (a.blocks.size() != b.blocks.size()) return false;
  for (std::size_t k = 0; k < a.blocks.size(); ++k) {
    if (!same(a.blocks[k], b.blocks[k])) return false;
  }
  return true;
}

bool operator==(const Scenario& a, const Scenario& b) {
  if (a.exosystems.size() != b.exosystems.size()) return false;
  for (std::size_t k = 0; k < a.exosystems.size(); ++k) {
    if (!same(a.exosystems[k].s, b.exosystems[k].s) ||
        !same(a.exosystems[k].w0, b.exosystems[k].w0)) {
      return false;
    }
  }
  return a.name == b.name && a.agent_count == b.agent_count && a.directed == b.directed &&
         a.edges == b.edges && a.agents == b.agents && a.cost == b.cost &&
         a.strategy == b.strategy && a.synthesis == b.synthesis && a.sim == b.sim;
}

Scenario parse_scenario(std::string_view text) {
  const Json doc = json_io::parse_text(text);
  const Field root(doc, "");
  Scenario s;
  if (const auto f = root.find("name")) s.name = f->string();

  const Field graph = root.at("graph");
  const long long n = graph.at("agents").integer();
  if (n < 1) graph.at("agents").fail("at least one agent is required");
  s.agent_count = static_cast<std::size_t>(n);
  s.directed = graph.at("directed").boolean();
  const Field edges = graph.at("edges");
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const Field e = edges.at(k);
    if (e.size() != 2) e.fail("an edge is a [source, sink] pair");
    const AgentIndex a = agent_number(e.at(0), s.agent_count);
    const AgentIndex b = agent_number(e.at(1), s.agent_count);
    if (a == b) e.fail("self-loops are not allowed");
    s.edges.push_back({a, b});
  }

  const Field agents = root.at("agents");
  if (agents.size() != s.agent_count) {
    agents.fail("expected " + std::to_string(s.agent_count) + " agents, got " +
                std::to_string(agents.size()));
  }
  std::vector<Eigen::Index> output_dims;
  for (std::size_t i = 0; i < s.agent_count; ++i) {
    s.agents.push_back(parse_agent(agents.at(i)));
    output_dims.push_back(s.agents.back().c.rows());
  }

  const Field exos = root.at("exosystems");
  if (exos.size() != s.agent_count) {
    exos.fail("expected one exosystem per agent (" + std::to_string(s.agent_count) + ")");
  }
  for (std::size_t i = 0; i < s.agent_count; ++i) {
    const Field e = exos.at(i);
    const Field fs = e.at("S");
    Exosystem x;
    x.s = fs.matrix();
    const Eigen::Index q = s.agents[i].p.cols();
    expect_shape(fs, x.s, q, q);
    const Field fw = e.at("w0");
    x.w0 = fw.vector();
    if (x.w0.size() != q) fw.fail("w0 must have " + std::to_string(q) + " entries");
    s.exosystems.push_back(std::move(x));
  }

  const Field cost = root.at("cost");
  const auto targets = cost.find("targets");
  const auto blocks = cost.find("blocks");
  if (targets.has_value() == blocks.has_value()) {
    cost.fail("give exactly one of \"targets\" or \"blocks\"");
  }
  if (targets) {
    if (targets->size() != s.agent_count) targets->fail("expected one target per agent");
    TargetCost t;
    for (std::size_t i = 0; i < s.agent_count; ++i) {
      const Field fr = targets->at(i);
      t.targets.push_back(fr.vector());
      if (t.targets.back().size() != output_dims[i]) {
        fr.fail("target must have " + std::to_string(output_dims[i]) + " entries");
      }
    }
    s.cost = std::move(t);
  } else {
    if (blocks->size() != s.agent_count) blocks->fail("expected one cost block per agent");
    ExplicitCost c;
    for (std::size_t i = 0; i < s.agent_count; ++i) {
      c.blocks.push_back(parse_cost_block(blocks->at(i), output_dims[i], s.agent_count, output_dims));
    }
    s.cost = std::move(c);
  }

  if (const auto f = root.find("strategy")) {
    try {
      s.strategy = parse_strategy(f->string());
    } catch (const DomainError&) {
      f->fail("strategy must be \"digraph\" or \"general\"");
    }
  }
  if (const auto f = root.find("synthesis")) {
    if (const auto o = f->find("observer")) {
      if (const auto x = o->find("q")) s.synthesis.observer.q = x->number();
      if (const auto x = o->find("r")) s.synthesis.observer.r = x->number();
    }
    if (const auto o = f->find("stabilizer")) {
      if (const auto x = o->find("q_state")) s.synthesis.stabilizer.q_state = x->number();
      if (const auto x = o->find("q_internal")) s.synthesis.stabilizer.q_internal = x->number();
      if (const auto x = o->find("r")) s.synthesis.stabilizer.r = x->number();
    }
  }
  if (const auto f = root.find("sim")) {
    if (const auto x = f->find("dt")) s.sim.dt = x->number();
    if (const auto x = f->find("t_end")) s.sim.t_end = x->number();
    if (const auto x = f->find("record_stride")) {
      s.sim.record_stride = static_cast<int>(x->integer());
      if (s.sim.record_stride < 1) x->fail("record_stride must be at least 1");
    }
    if (const auto x = f->find("tol")) s.sim.tol = x->number();
  }

  // Semantic checks owned by the domain constructors (R_ii > 0, neighbor sets).
  try {
    (void)game_of(s);
  } catch (const std::invalid_argument& e) {
    cost.fail(e.what());
  } catch (const std::domain_error& e) {
    cost.fail(e.what());
  }
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  try {
    return parse_scenario(read_file(path));
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

std::string serialize_scenario(const Scenario& s) {
  Json edges = Json::array();
  for (const Edge& e : s.edges) edges.push_back(Json::array({e.source + 1, e.sink + 1}));
  Json agents = Json::array();
  for (const AgentSpec& a : s.agents) agents.push_back(agent_to_json(a));
  Json exos = Json::array();
  for (const Exosystem& e : s.exosystems) {
    exos.push_back(Json{{"S", json_io::matrix_to_json(e.s)}, {"w0", json_io::vector_to_json(e.w0)}});
  }
  const Json doc{
      {"name", s.name},
      {"graph", Json{{"agents", s.agent_count}, {"directed", s.directed}, {"edges", edges}}},
      {"agents", agents},
      {"exosystems", exos},
      {"cost", cost_to_json(s)},
      {"strategy", std::string(to_string(s.strategy))},
      {"synthesis",
       Json{{"observer", Json{{"q", s.synthesis.observer.q}, {"r", s.synthesis.observer.r}}},
            {"stabilizer", Json{{"q_state", s.synthesis.stabilizer.q_state},
                                {"q_internal", s.synthesis.stabilizer.q_internal},
                                {"r", s.synthesis.stabilizer.r}}}}},
      {"sim", Json{{"dt", s.sim.dt},
                   {"t_end", s.sim.t_end},
                   {"record_stride", s.sim.record_stride},
                   {"tol", s.sim.tol}}},
  };
  return json_io::dump(doc);
}

std::string scenario_hash(const Scenario& s) {
  const std::string text = serialize_scenario(s);
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (EVP_Digest(text.data(), text.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("scenario_hash: SHA-256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int k = 0; k < len; ++k) {
    out.push_back(kHex[digest[k] >> 4]);
    out.push_back(kHex[digest[k] & 0xf]);
  }
  return out;
}

CommGraph graph_of(const Scenario& s) { return CommGraph(s.agent_count, s.directed, s.edges); }

NetworkGame game_of(const Scenario& s) {
  const CommGraph graph = graph_of(s);
  if (const auto* t = std::get_if<TargetCost>(&s.cost)) return cost_from_targets(t->targets, graph);
  return NetworkGame(graph, std::get<ExplicitCost>(s.cost).blocks);
}

std::vector<AgentPlant> plants_of(const Scenario& s) {
  std::vector<AgentPlant> out;
  for (const AgentSpec& a : s.agents) {
    AgentPlant p(a.a, a.b, a.c, a.p);
    if (a.perturbation) {
      p.set_perturbation(a.perturbation->da, a.perturbation->db, a.perturbation->dc,
                         a.perturbation->dp);
    }
    out.push_back(std::move(p));
  }
  return out;
}

bool has_perturbation(const Scenario& s) {
  for (const AgentSpec& a : s.agents) {
    if (a.perturbation) return true;
  }
  return false;
}

std::vector<Vector> initial_plant_states(const Scenario& s) {
  std::vector<Vector> out;
  for (const AgentSpec& a : s.agents) out.push_back(a.x0);
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::ios_base::failure(path.string() + ": cannot open file");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::vector<Controller> synthesize_controllers(const Scenario& s, const NetworkGame& game,
                                               const std::vector<AgentPlant>& plants,
                                               StrategyKind kind) {
  std::vector<Controller> out;
  for (AgentIndex i = 0; i < s.agent_count; ++i) {
    try {
      if (kind == StrategyKind::kDigraph) {
        out.emplace_back(build_strategy_digraph(plants[i], game.cost(i), s.exosystems[i], s.synthesis));
      } else {
        out.emplace_back(build_strategy_general(plants[i], game.cost(i), s.exosystems[i], s.synthesis));
      }
    } catch (const SynthesisError& e) {
      throw SynthesisError("agent " + std::to_string(i + 1) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace netgame
