#pragma once

// Global-consensus ADMM over N agents minimizing sum_i f_i(x).
//
// Each synchronous round:
//   x_i <- argmin_x f_i(x) + y_i^T (x - z) + mu/2 |x - z|^2
//   z   <- mean_j (x_j + y_j / mu)                (fusion center)
//   y_i <- y_i + mu (x_i - z)
//
// The decentralized variant keeps one z_i per agent and averages only over
// the one-hop neighborhood N_i, which always contains i itself.

#include <functional>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "crowdsense/matrix.hpp"

namespace crowdsense {

struct LocalObjective {
  std::string name;
  std::function<double(const Vector&)> evaluate;
  // argmin_x f(x) + y^T (x - z) + mu/2 |x - z|^2
  std::function<Vector(const Vector& y, const Vector& z, double mu)> step;
};

// f(x) = w |x - a|^2, w > 0.
LocalObjective quadratic_objective(const Vector& a, double w = 1.0);
// f(x) = 1/2 |A x - b|^2.
LocalObjective least_squares_objective(const Matrix& a, const Vector& b);
// f(x) = lambda |x|_1.
LocalObjective l1_objective(double lambda);

class Topology {
 public:
  using Edge = std::pair<std::size_t, std::size_t>;

  // Edges are stored with the smaller index first. Self-loops are dropped;
  // out-of-range indices throw ValidationError.
  Topology(std::size_t agents, const std::vector<Edge>& edges);

  static Topology complete(std::size_t agents);
  static Topology ring(std::size_t agents);
  static Topology empty(std::size_t agents);

  std::size_t agent_count() const noexcept { return agents_; }
  const std::set<Edge>& edges() const noexcept { return edges_; }
  // Sorted, includes i.
  const std::vector<std::size_t>& neighbors(std::size_t i) const;

  // Connected components as sorted agent lists, ordered by smallest member.
  std::vector<std::vector<std::size_t>> components() const;

 private:
  std::size_t agents_;
  std::set<Edge> edges_;
  std::vector<std::vector<std::size_t>> neighbors_;
};

struct AgentState {
  Vector x;
  Vector y;
};

// Per-round view handed to ConsensusConfig::observer after the dual update.
struct RoundSnapshot {
  int round = 0;
  const std::vector<AgentState>* agents = nullptr;
  const std::vector<Vector>* previous_duals = nullptr;
  // One entry for the central variant, one per agent when decentralized.
  const std::vector<Vector>* z = nullptr;
};

struct ConsensusConfig {
  double mu = 1.0;
  int max_rounds = 1000;
  double tol = 1e-8;
  // Starting point for every x_i and z; zeros when unset. Duals start at 0.
  std::optional<Vector> initial;
  std::function<void(const RoundSnapshot&)> observer;

  void validate() const;
};

struct ConsensusResult {
  Vector z;                      // central estimate (decentralized: agent 0's z)
  std::vector<Vector> local_z;   // decentralized only
  std::vector<AgentState> agents;
  int rounds = 0;
  std::vector<double> primal_residual_history;
  std::vector<double> dual_residual_history;
  bool converged = false;
};

struct Residuals {
  double primal = 0.0;
  double dual = 0.0;
};

// primal = max_i |x_i - z|, dual = mu |z_curr - z_prev|.
Residuals residuals(const std::vector<AgentState>& states, const Vector& z_prev,
                    const Vector& z_curr, double mu);
// Per-agent form: primal = max_i |x_i - z_i|, dual = mu max_i |z_i - z_i_prev|.
Residuals residuals(const std::vector<AgentState>& states,
                    const std::vector<Vector>& z_prev,
                    const std::vector<Vector>& z_curr, double mu);

ConsensusResult admm_central(const std::vector<LocalObjective>& objectives,
                             std::size_t dim, const ConsensusConfig& cfg);

ConsensusResult admm_decentralized(const std::vector<LocalObjective>& objectives,
                                   const Topology& topology, std::size_t dim,
                                   const ConsensusConfig& cfg);

// max_i |z_i - target|
double max_deviation(const std::vector<Vector>& local_z, const Vector& target);

}  // namespace crowdsense
