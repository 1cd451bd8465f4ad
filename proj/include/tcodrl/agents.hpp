#pragma once

#include <cstdint>
#include <deque>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "tcodrl/domain.hpp"
#include "tcodrl/env.hpp"
#include "tcodrl/nn.hpp"

namespace tcodrl {

/// Picks the oracle that serves the pending request.
class Selector {
 public:
  virtual ~Selector() = default;
  virtual std::string name() const = 0;
  virtual OracleId select(const EnvState& state) = 0;
  /// Called after every step with the state the decision was made in.
  virtual void feedback(const EnvState& /*state*/, OracleId /*action*/, const StepOutcome& /*outcome*/) {}
};

/// Index of the largest entry; the lowest index wins ties.
Eigen::Index argmax(const Eigen::VectorXd& v);

struct Transition {
  Eigen::VectorXd state;
  std::size_t action = 0;
  double reward = 0;
  Eigen::VectorXd next_state;
  bool terminal = false;
};

/// Fixed-capacity FIFO experience buffer; the oldest transition is evicted first.
class ReplayMemory {
 public:
  explicit ReplayMemory(std::size_t capacity);

  void push(Transition t);
  std::size_t size() const noexcept { return buffer_.size(); }
  std::size_t capacity() const noexcept { return capacity_; }
  /// 0 is the oldest stored transition.
  const Transition& at(std::size_t i) const { return buffer_.at(i); }
  /// `n` distinct indices drawn uniformly.
  std::vector<std::size_t> sample_indices(std::size_t n, Rng& rng) const;

 private:
  std::size_t capacity_;
  std::deque<Transition> buffer_;
};

/// Deep Q-learning agent with experience replay and a periodically synced
/// target network.
class DqnAgent {
 public:
  using Net = nn::Mlp<double>;

  DqnAgent(std::size_t state_dim, std::size_t action_count, const DqnParams& params, std::uint64_t seed);

  /// Epsilon-greedy choice.
  OracleId act(const Eigen::VectorXd& state);
  OracleId greedy(const Eigen::VectorXd& state) const;

  void store_transition(Transition t);

  /// Learns from one minibatch when memory holds at least a minibatch and
  /// `t` is a multiple of the learning frequency. Returns true when it learned.
  bool learn_step(std::size_t t);

  /// r + gamma * max_a' Q_target(s', a'), or r for terminal transitions.
  double target_value(const Transition& t) const;

  double epsilon() const noexcept { return epsilon_; }
  void set_epsilon(double e) noexcept { epsilon_ = e; }
  std::size_t learn_steps() const noexcept { return learn_steps_; }
  const ReplayMemory& memory() const noexcept { return memory_; }
  const Net& eval_net() const noexcept { return eval_; }
  const Net& target_net() const noexcept { return target_; }
  /// Replaces both networks (e.g. from a checkpoint).
  void load(const Net& net);
  const DqnParams& params() const noexcept { return params_; }
  double last_loss() const noexcept { return last_loss_; }

 private:
  DqnParams params_;
  Net eval_;
  Net target_;
  ReplayMemory memory_;
  Rng rng_;
  double epsilon_;
  std::size_t learn_steps_ = 0;
  double last_loss_ = 0;
};

/// Environment-facing adapter around a DqnAgent. A frozen selector acts
/// greedily and never learns.
class DqnSelector : public Selector {
 public:
  explicit DqnSelector(DqnAgent& agent, bool frozen = false) : agent_(agent), frozen_(frozen) {}
  std::string name() const override { return "tco-drl"; }
  OracleId select(const EnvState& state) override;
  void feedback(const EnvState& state, OracleId action, const StepOutcome& outcome) override;

 private:
  DqnAgent& agent_;
  bool frozen_;
  std::size_t t_ = 0;
};

/// Assigns requests in a fixed cyclic order.
class RoundRobinSelector : public Selector {
 public:
  std::string name() const override { return "round-robin"; }
  OracleId select(const EnvState& state) override;

 private:
  std::size_t next_ = 0;
};

/// Beta posteriors over per-oracle success plus observed mean cost.
struct BlorState {
  std::vector<double> alpha;  // successes + 1
  std::vector<double> beta;   // failures + 1
  std::vector<double> mean_cost;
  std::vector<std::uint64_t> observations;

  explicit BlorState(std::size_t oracle_count = 0)
      : alpha(oracle_count, 1.0), beta(oracle_count, 1.0), mean_cost(oracle_count, 0.0),
        observations(oracle_count, 0) {}
  double posterior_mean(OracleId j) const { return alpha.at(j) / (alpha.at(j) + beta.at(j)); }
};

void blor_update(BlorState& state, OracleId oid, bool success, double cost);

/// Thompson sampling on success posteriors, scored by sample / cost, after a
/// Round-Robin warmup that populates every posterior.
class BlorSelector : public Selector {
 public:
  BlorSelector(std::size_t oracle_count, std::size_t warmup_passes, std::uint64_t seed);
  std::string name() const override { return "blor"; }
  OracleId select(const EnvState& state) override;
  void feedback(const EnvState& state, OracleId action, const StepOutcome& outcome) override;
  const BlorState& posterior() const noexcept { return state_; }
  BlorState& posterior() noexcept { return state_; }

 private:
  BlorState state_;
  std::size_t warmup_;
  std::size_t selections_ = 0;
  Rng rng_;
};

/// Oracles whose predicted reward for the pending request is positive.
std::vector<OracleId> psg_predict_positive(const EnvState& state, const RewardWeights& w);

/// Semi-greedy: a uniform pick among the q cheapest oracles with positive
/// predicted reward; the globally cheapest oracle when none qualifies.
class PsgSelector : public Selector {
 public:
  PsgSelector(std::size_t q, RewardWeights weights, std::uint64_t seed);
  std::string name() const override { return "psg"; }
  OracleId select(const EnvState& state) override;
  std::size_t fallbacks() const noexcept { return fallbacks_; }

 private:
  std::size_t q_;
  RewardWeights weights_;
  Rng rng_;
  std::size_t fallbacks_ = 0;
};

}  // namespace tcodrl
