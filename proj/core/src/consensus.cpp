#include "crowdsense/consensus.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>

#include "crowdsense/errors.hpp"

namespace crowdsense {

namespace {

void check_step(const Vector& x, std::size_t dim, std::size_t agent,
                const std::string& name) {
  if (static_cast<std::size_t>(x.size()) != dim || !x.allFinite()) {
    throw SolverError("agent " + std::to_string(agent) + " (" + name +
                      "): local step returned an invalid vector");
  }
}

void x_update(const std::vector<LocalObjective>& objectives,
              std::vector<AgentState>& agents, const std::vector<Vector>& z_of,
              std::size_t dim, double mu) {
  for (std::size_t i = 0; i < agents.size(); ++i) {
    Vector x;
    try {
      x = objectives[i].step(agents[i].y, z_of[i], mu);
    } catch (const SolverError&) {
      throw;
    } catch (const std::exception& e) {
      throw SolverError("agent " + std::to_string(i) + " (" + objectives[i].name +
                        "): " + e.what());
    }
    check_step(x, dim, i, objectives[i].name);
    agents[i].x = std::move(x);
  }
}

// (1/|S|) sum_{j in S} (x_j + y_j / mu), accumulated in index order.
Vector average_over(const std::vector<AgentState>& agents,
                    const std::vector<std::size_t>& members, std::size_t dim,
                    double mu) {
  Vector acc = Vector::Zero(static_cast<Eigen::Index>(dim));
  for (std::size_t j : members) acc += agents[j].x + agents[j].y / mu;
  return acc / static_cast<double>(members.size());
}

std::vector<AgentState> initial_agents(std::size_t n, std::size_t dim,
                                       const ConsensusConfig& cfg) {
  const auto d = static_cast<Eigen::Index>(dim);
  const Vector start = cfg.initial ? *cfg.initial : Vector::Zero(d);
  if (start.size() != d) throw DimensionError("initial point has the wrong dimension");
  return std::vector<AgentState>(n, AgentState{start, Vector::Zero(d)});
}

void check_inputs(const std::vector<LocalObjective>& objectives, std::size_t dim,
                  const ConsensusConfig& cfg) {
  if (objectives.empty()) throw ValidationError("consensus needs at least one agent");
  if (dim == 0) throw ValidationError("consensus variable dimension must be positive");
  for (const auto& o : objectives) {
    if (!o.step) throw ValidationError("objective '" + o.name + "' has no step");
  }
  cfg.validate();
}

}  // namespace

LocalObjective quadratic_objective(const Vector& a, double w) {
  if (!(w > 0.0)) throw ValidationError("quadratic weight must be positive");
  LocalObjective f;
  f.name = "quadratic";
  f.evaluate = [a, w](const Vector& x) { return w * (x - a).squaredNorm(); };
  f.step = [a, w](const Vector& y, const Vector& z, double mu) -> Vector {
    if (z.size() != a.size()) throw DimensionError("quadratic objective dimension mismatch");
    return (2.0 * w * a + mu * z - y) / (2.0 * w + mu);
  };
  return f;
}

LocalObjective least_squares_objective(const Matrix& a, const Vector& b) {
  if (a.rows() != b.size()) throw DimensionError("least squares: A and b disagree");
  LocalObjective f;
  f.name = "least-squares";
  const Matrix gram = a.transpose() * a;
  const Vector atb = a.transpose() * b;
  f.evaluate = [a, b](const Vector& x) { return 0.5 * (a * x - b).squaredNorm(); };
  // Factorization of A^T A + mu I, refreshed if mu changes.
  auto cache = std::make_shared<std::pair<double, Eigen::LLT<Matrix>>>(0.0, Eigen::LLT<Matrix>());
  f.step = [gram, atb, cache](const Vector& y, const Vector& z, double mu) -> Vector {
    if (z.size() != gram.rows()) throw DimensionError("least squares dimension mismatch");
    if (cache->first != mu) {
      Matrix sys = gram;
      sys.diagonal().array() += mu;
      cache->second.compute(sys);
      cache->first = mu;
    }
    return cache->second.solve(atb - y + mu * z);
  };
  return f;
}

LocalObjective l1_objective(double lambda) {
  if (!(lambda >= 0.0)) throw ValidationError("l1 weight must be nonnegative");
  LocalObjective f;
  f.name = "l1";
  f.evaluate = [lambda](const Vector& x) { return lambda * x.cwiseAbs().sum(); };
  f.step = [lambda](const Vector& y, const Vector& z, double mu) -> Vector {
    const Vector v = z - y / mu;
    return v.unaryExpr([t = lambda / mu](double e) { return shrink(e, t); });
  };
  return f;
}

// ---------------------------------------------------------------------------

Topology::Topology(std::size_t agents, const std::vector<Edge>& edges)
    : agents_(agents), neighbors_(agents) {
  if (agents == 0) throw ValidationError("topology needs at least one agent");
  for (auto [i, j] : edges) {
    if (i >= agents || j >= agents) {
      throw ValidationError("edge (" + std::to_string(i) + ", " + std::to_string(j) +
                            ") references an agent outside [0, " +
                            std::to_string(agents) + ")");
    }
    if (i == j) continue;
    edges_.insert({std::min(i, j), std::max(i, j)});
  }
  for (std::size_t i = 0; i < agents; ++i) neighbors_[i].push_back(i);
  for (auto [i, j] : edges_) {
    neighbors_[i].push_back(j);
    neighbors_[j].push_back(i);
  }
  for (auto& n : neighbors_) std::sort(n.begin(), n.end());
}

Topology Topology::complete(std::size_t agents) {
  std::vector<Edge> e;
  for (std::size_t i = 0; i < agents; ++i) {
    for (std::size_t j = i + 1; j < agents; ++j) e.emplace_back(i, j);
  }
  return Topology(agents, e);
}

Topology Topology::ring(std::size_t agents) {
  std::vector<Edge> e;
  if (agents > 1) {
    for (std::size_t i = 0; i < agents; ++i) e.emplace_back(i, (i + 1) % agents);
  }
  return Topology(agents, e);
}

Topology Topology::empty(std::size_t agents) { return Topology(agents, {}); }

const std::vector<std::size_t>& Topology::neighbors(std::size_t i) const {
  if (i >= agents_) throw ValidationError("agent index out of range");
  return neighbors_[i];
}

std::vector<std::vector<std::size_t>> Topology::components() const {
  std::vector<std::size_t> parent(agents_);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  };
  for (auto [i, j] : edges_) parent[find(i)] = find(j);
  std::vector<std::vector<std::size_t>> groups;
  std::vector<std::ptrdiff_t> slot(agents_, -1);
  for (std::size_t v = 0; v < agents_; ++v) {
    const auto r = find(v);
    if (slot[r] < 0) {
      slot[r] = static_cast<std::ptrdiff_t>(groups.size());
      groups.emplace_back();
    }
    groups[static_cast<std::size_t>(slot[r])].push_back(v);
  }
  return groups;
}

// ---------------------------------------------------------------------------

void ConsensusConfig::validate() const {
  if (!(mu > 0.0)) throw ValidationError("mu must be positive");
  if (max_rounds < 1) throw ValidationError("max_rounds must be positive");
  if (!(tol >= 0.0)) throw ValidationError("tol must be nonnegative");
}

Residuals residuals(const std::vector<AgentState>& states, const Vector& z_prev,
                    const Vector& z_curr, double mu) {
  Residuals r;
  for (const auto& s : states) r.primal = std::max(r.primal, (s.x - z_curr).norm());
  r.dual = mu * (z_curr - z_prev).norm();
  return r;
}

Residuals residuals(const std::vector<AgentState>& states,
                    const std::vector<Vector>& z_prev,
                    const std::vector<Vector>& z_curr, double mu) {
  if (z_prev.size() != states.size() || z_curr.size() != states.size()) {
    throw DimensionError("per-agent residuals need one z per agent");
  }
  Residuals r;
  for (std::size_t i = 0; i < states.size(); ++i) {
    r.primal = std::max(r.primal, (states[i].x - z_curr[i]).norm());
    r.dual = std::max(r.dual, (z_curr[i] - z_prev[i]).norm());
  }
  r.dual *= mu;
  return r;
}

ConsensusResult admm_central(const std::vector<LocalObjective>& objectives,
                             std::size_t dim, const ConsensusConfig& cfg) {
  check_inputs(objectives, dim, cfg);
  const std::size_t n = objectives.size();
  const double mu = cfg.mu;

  ConsensusResult out;
  out.agents = initial_agents(n, dim, cfg);
  std::vector<Vector> z(1, out.agents.front().x);
  std::vector<std::size_t> everyone(n);
  std::iota(everyone.begin(), everyone.end(), std::size_t{0});
  std::vector<Vector> previous_duals(n);

  for (int k = 1; k <= cfg.max_rounds; ++k) {
    x_update(objectives, out.agents, std::vector<Vector>(n, z[0]), dim, mu);

    const Vector z_prev = z[0];
    z[0] = average_over(out.agents, everyone, dim, mu);

    for (std::size_t i = 0; i < n; ++i) {
      previous_duals[i] = out.agents[i].y;
      out.agents[i].y = out.agents[i].y + mu * (out.agents[i].x - z[0]);
    }

    const Residuals r = residuals(out.agents, z_prev, z[0], mu);
    out.primal_residual_history.push_back(r.primal);
    out.dual_residual_history.push_back(r.dual);
    out.rounds = k;
    if (cfg.observer) cfg.observer(RoundSnapshot{k, &out.agents, &previous_duals, &z});
    if (r.primal <= cfg.tol && r.dual <= cfg.tol) {
      out.converged = true;
      break;
    }
  }
  out.z = z[0];
  return out;
}

ConsensusResult admm_decentralized(const std::vector<LocalObjective>& objectives,
                                   const Topology& topology, std::size_t dim,
                                   const ConsensusConfig& cfg) {
  check_inputs(objectives, dim, cfg);
  const std::size_t n = objectives.size();
  if (topology.agent_count() != n) {
    throw DimensionError("topology has " + std::to_string(topology.agent_count()) +
                         " agents but " + std::to_string(n) + " objectives were given");
  }
  const double mu = cfg.mu;

  ConsensusResult out;
  out.agents = initial_agents(n, dim, cfg);
  std::vector<Vector> z(n, out.agents.front().x);
  std::vector<Vector> previous_duals(n);

  for (int k = 1; k <= cfg.max_rounds; ++k) {
    x_update(objectives, out.agents, z, dim, mu);

    const std::vector<Vector> z_prev = z;
    for (std::size_t i = 0; i < n; ++i) {
      z[i] = average_over(out.agents, topology.neighbors(i), dim, mu);
    }

    for (std::size_t i = 0; i < n; ++i) {
      previous_duals[i] = out.agents[i].y;
      out.agents[i].y = out.agents[i].y + mu * (out.agents[i].x - z[i]);
    }

    const Residuals r = residuals(out.agents, z_prev, z, mu);
    out.primal_residual_history.push_back(r.primal);
    out.dual_residual_history.push_back(r.dual);
    out.rounds = k;
    if (cfg.observer) cfg.observer(RoundSnapshot{k, &out.agents, &previous_duals, &z});
    if (r.primal <= cfg.tol && r.dual <= cfg.tol) {
      out.converged = true;
      break;
    }
  }
  out.z = z.front();
  out.local_z = std::move(z);
  return out;
}

double max_deviation(const std::vector<Vector>& local_z, const Vector& target) {
  double worst = 0.0;
  for (const auto& z : local_z) worst = std::max(worst, (z - target).norm());
  return worst;
}

}  // namespace crowdsense
