#include "tcodrl/agents.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace tcodrl {

Eigen::Index argmax(const Eigen::VectorXd& v) {
  if (v.size() == 0) throw Error("argmax of an empty vector");
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i) {
    if (v(i) > v(best)) best = i;
  }
  return best;
}

// ---------------------------------------------------------------------------
// replay memory

ReplayMemory::ReplayMemory(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw Error("replay capacity must be positive");
}

void ReplayMemory::push(Transition t) {
  if (buffer_.size() == capacity_) buffer_.pop_front();
  buffer_.push_back(std::move(t));
}

std::vector<std::size_t> ReplayMemory::sample_indices(std::size_t n, Rng& rng) const {
  n = std::min(n, buffer_.size());
  // partial Fisher-Yates over [0, size)
  std::vector<std::size_t> idx(buffer_.size());
  std::iota(idx.begin(), idx.end(), 0);
  for (std::size_t i = 0; i < n; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, idx.size() - 1);
    std::swap(idx[i], idx[pick(rng)]);
  }
  idx.resize(n);
  return idx;
}

// ---------------------------------------------------------------------------
// DQN

namespace {
std::vector<Eigen::Index> layer_sizes(std::size_t in, std::size_t out, const std::vector<int>& hidden) {
  std::vector<Eigen::Index> sizes{static_cast<Eigen::Index>(in)};
  for (int h : hidden) sizes.push_back(h);
  sizes.push_back(static_cast<Eigen::Index>(out));
  return sizes;
}
}  // namespace

DqnAgent::DqnAgent(std::size_t state_dim, std::size_t action_count, const DqnParams& params, std::uint64_t seed)
    : params_(params), memory_(params.replay_capacity), rng_(derive_seed(seed, 0xd0)),
      epsilon_(params.epsilon_start) {
  Rng init(derive_seed(seed, 0x1a));
  eval_ = Net::random(layer_sizes(state_dim, action_count, params.hidden), init);
  target_ = eval_;
}

OracleId DqnAgent::greedy(const Eigen::VectorXd& state) const {
  return static_cast<OracleId>(argmax(eval_.forward(state)));
}

OracleId DqnAgent::act(const Eigen::VectorXd& state) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  if (u(rng_) < epsilon_) {
    std::uniform_int_distribution<Eigen::Index> pick(0, eval_.output_size() - 1);
    return static_cast<OracleId>(pick(rng_));
  }
  return greedy(state);
}

void DqnAgent::store_transition(Transition t) { memory_.push(std::move(t)); }

double DqnAgent::target_value(const Transition& t) const {
  if (t.terminal) return t.reward;
  return t.reward + params_.gamma * target_.forward(t.next_state).maxCoeff();
}

bool DqnAgent::learn_step(std::size_t t) {
  if (memory_.size() < params_.minibatch || t % params_.learn_every != 0) return false;

  const auto batch = memory_.sample_indices(params_.minibatch, rng_);
  auto grad = eval_.zero_gradient();
  double loss = 0.0;
  for (std::size_t i : batch) {
    const auto& tr = memory_.at(i);
    const double target = target_value(tr);
    const double q = eval_.forward(tr.state)(static_cast<Eigen::Index>(tr.action));
    const double td = target - q;
    loss += 0.5 * td * td;
    grad += eval_.backward(tr.state, static_cast<Eigen::Index>(tr.action), td);
  }
  const double scale = 1.0 / static_cast<double>(batch.size());
  grad *= scale;
  loss *= scale;
  if (!std::isfinite(loss) || !grad.all_finite()) {
    std::ostringstream msg;
    msg << "non-finite loss at learn-step " << learn_steps_ << " (loss=" << loss << ", epsilon=" << epsilon_
        << ", memory=" << memory_.size() << ")";
    throw Error(msg.str());
  }
  eval_.apply_update(grad, params_.learning_rate);
  last_loss_ = loss;

  epsilon_ = std::max(params_.epsilon_floor, epsilon_ * params_.epsilon_decay);
  ++learn_steps_;
  if (learn_steps_ % params_.target_sync == 0) target_ = eval_;
  return true;
}

void DqnAgent::load(const Net& net) {
  if (net.sizes() != eval_.sizes()) throw Error("network architecture does not match the agent");
  eval_ = net;
  target_ = net;
}

OracleId DqnSelector::select(const EnvState& state) {
  return frozen_ ? agent_.greedy(state.vector) : agent_.act(state.vector);
}

void DqnSelector::feedback(const EnvState& state, OracleId action, const StepOutcome& outcome) {
  if (frozen_) return;
  agent_.store_transition({state.vector, action, outcome.reward, outcome.next_state.vector, outcome.done});
  agent_.learn_step(t_++);
}

// ---------------------------------------------------------------------------
// baselines

OracleId RoundRobinSelector::select(const EnvState& state) {
  const OracleId j = next_ % state.oracle_count();
  ++next_;
  return j;
}

void blor_update(BlorState& s, OracleId oid, bool success, double cost) {
  if (oid >= s.alpha.size()) throw std::out_of_range("unknown oracle id " + std::to_string(oid));
  if (success) s.alpha[oid] += 1.0;
  else s.beta[oid] += 1.0;
  ++s.observations[oid];
  s.mean_cost[oid] += (cost - s.mean_cost[oid]) / static_cast<double>(s.observations[oid]);
}

BlorSelector::BlorSelector(std::size_t oracle_count, std::size_t warmup_passes, std::uint64_t seed)
    : state_(oracle_count), warmup_(warmup_passes * oracle_count), rng_(derive_seed(seed, 0xb1)) {}

OracleId BlorSelector::select(const EnvState& state) {
  const std::size_t m = state.oracle_count();
  if (selections_ < warmup_) return static_cast<OracleId>(selections_++ % m);
  ++selections_;
  OracleId best = 0;
  double best_score = -1.0;
  for (OracleId j = 0; j < m; ++j) {
    std::gamma_distribution<double> ga(state_.alpha[j], 1.0);
    std::gamma_distribution<double> gb(state_.beta[j], 1.0);
    const double x = ga(rng_);
    const double y = gb(rng_);
    const double sample = x / (x + y);
    const double cost = state_.observations[j] ? state_.mean_cost[j] : state.oracles[j].cost;
    const double score = sample / cost;
    if (score > best_score) {
      best_score = score;
      best = j;
    }
  }
  return best;
}

void BlorSelector::feedback(const EnvState&, OracleId, const StepOutcome& outcome) {
  blor_update(state_, outcome.record.oid, outcome.record.success, outcome.record.cost);
}

std::vector<OracleId> psg_predict_positive(const EnvState& state, const RewardWeights& w) {
  std::vector<OracleId> out;
  for (OracleId j = 0; j < state.oracle_count(); ++j) {
    const auto& o = state.oracles[j];
    ServiceRecord predicted;
    predicted.exe_time = state.complexity / o.performance;
    predicted.response_time = predicted.exe_time + o.wait;
    predicted.cost = o.cost;
    predicted.service_matched = o.service_class == state.service_class;
    if (compute_reward(predicted, o.reputation, w) > 0.0) out.push_back(j);
  }
  return out;
}

PsgSelector::PsgSelector(std::size_t q, RewardWeights weights, std::uint64_t seed)
    : q_(q), weights_(weights), rng_(derive_seed(seed, 0x95)) {
  if (q == 0) throw Error("PSG top-list size must be >= 1");
}

OracleId PsgSelector::select(const EnvState& state) {
  auto candidates = psg_predict_positive(state, weights_);
  const auto by_cost = [&](OracleId a, OracleId b) {
    const double ca = state.oracles[a].cost;
    const double cb = state.oracles[b].cost;
    return ca != cb ? ca < cb : a < b;
  };
  if (candidates.empty()) {
    ++fallbacks_;
    std::vector<OracleId> all(state.oracle_count());
    std::iota(all.begin(), all.end(), OracleId{0});
    return *std::min_element(all.begin(), all.end(), by_cost);
  }
  std::sort(candidates.begin(), candidates.end(), by_cost);
  const std::size_t top = std::min(q_, candidates.size());
  std::uniform_int_distribution<std::size_t> pick(0, top - 1);
  return candidates[pick(rng_)];
}

}  // namespace tcodrl
