#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "tcodrl/domain.hpp"
#include "tcodrl/trust.hpp"

namespace tcodrl {

using Rng = std::mt19937_64;

/// Outcome of one request served by one oracle.
struct ServiceRecord {
  std::uint64_t rid = 0;
  OracleId oid = 0;            // oracle that served the request
  OracleId requested_oid = 0;  // oracle the selector asked for
  int window = 1;
  ServiceClassId service_class = 0;
  double arrival_ts = 0;
  double start_ts = 0;
  double finish_ts = 0;
  double exe_time = 0;
  double response_time = 0;  // finish - arrival
  BehaviorLevel behavior = BehaviorLevel::Safe;
  bool verified = true;
  bool success = true;
  double cost = 0;
  bool service_matched = false;
  bool redirected = false;
  double reputation = 0;  // oracle reputation at dispatch time
  double reward = 0;      // learning signal returned by step()
};

/// Per-oracle FIFO queues: the time each oracle becomes free.
class OracleQueues {
 public:
  explicit OracleQueues(std::size_t oracle_count) : free_at_(oracle_count, 0.0) {}
  double free_at(OracleId j) const { return free_at_.at(j); }
  double wait(OracleId j, double now) const;
  void occupy(OracleId j, double until) { free_at_.at(j) = until; }
  std::size_t size() const noexcept { return free_at_.size(); }

 private:
  std::vector<double> free_at_;
};

struct OracleFeatures {
  double reputation = 0;
  double cost = 0;
  double wait = 0;  // seconds until the oracle's queue drains
  double performance = 0;
  ServiceClassId service_class = 0;
  bool trusted = true;
};

/// What a selector sees before a decision: the pending request plus every oracle.
struct EnvState {
  double clock = 0;
  double complexity = 0;
  double ddl = 0;
  ServiceClassId service_class = 0;
  bool terminal = false;
  std::vector<OracleFeatures> oracles;
  Eigen::VectorXd vector;  // encoded features, see encode_state

  std::size_t oracle_count() const noexcept { return oracles.size(); }
};

/// Feature-vector length for a roster: (2 + C) + 6 * M.
std::size_t state_size(std::size_t oracle_count, std::size_t class_count) noexcept;

/// Fills state.vector from the structured fields. Layout:
/// [complexity/6000, ddl/10, one-hot(class, C)] then for every oracle
/// [clip(reputation, -5, 5)/5, min-max cost, min(wait/ddl, 2), performance/1000,
///  class-match flag, trusted flag].
void encode_state(EnvState& state, std::size_t class_count);

struct StepOutcome {
  double reward = 0;
  EnvState next_state;
  ServiceRecord record;
  bool done = false;
  bool window_closed = false;
};

std::vector<DataRequest> generate_requests(const ScenarioConfig& cfg, Rng& rng);

BehaviorLevel draw_behavior(const BehaviorDistribution& dist, Rng& rng);

/// Behavior exhibited by an oracle for one request; with probability `noise`
/// the draw is replaced by a uniform pick over the four levels.
BehaviorLevel sample_behavior(const OracleProfile& profile, int window, double reputation, double threshold,
                              double noise, const BehaviorModel& model, Rng& rng);

/// Serves `req` on oracle `oid` behind its FIFO queue. Throws std::out_of_range
/// for an unknown oracle.
ServiceRecord dispatch(const DataRequest& req, std::span<const OracleProfile> roster, OracleId oid,
                       BehaviorLevel behavior, OracleQueues& queues, const BehaviorModel& model, Rng& rng);

/// (1 + theta * e^(lambda - cost)) * exeT/responseT + reputation - mu * penalty.
double compute_reward(const ServiceRecord& rec, double reputation, const RewardWeights& w);

/// Discrete-event simulation of the oracle community for one episode.
class Environment {
 public:
  Environment(ScenarioConfig cfg, std::uint64_t seed);

  bool done() const noexcept { return cursor_ >= requests_.size(); }
  /// Throws Error when no request is pending.
  EnvState observe() const;
  /// Throws std::out_of_range for an action outside [0, M).
  StepOutcome step(OracleId action);

  const ScenarioConfig& config() const noexcept { return cfg_; }
  const std::vector<DataRequest>& requests() const noexcept { return requests_; }
  const std::vector<ServiceRecord>& records() const noexcept { return records_; }
  const std::vector<TrustTraceRow>& trust_trace() const noexcept { return trust_trace_; }
  const TrustEngine& trust() const noexcept { return trust_; }
  const OracleQueues& queues() const noexcept { return queues_; }
  std::size_t steps() const noexcept { return cursor_; }
  double clock() const noexcept { return clock_; }

  /// Final reputations after every closed window (rows: windows, cols: oracles).
  Eigen::MatrixXd reputation_trace() const;

 private:
  EnvState build_state(bool terminal) const;
  OracleId enforce(OracleId action, ServiceClassId wanted) const;

  ScenarioConfig cfg_;
  std::vector<DataRequest> requests_;
  Rng behavior_rng_;
  Rng verify_rng_;
  TrustEngine trust_;
  OracleQueues queues_;
  std::vector<ServiceRecord> records_;
  std::vector<TrustTraceRow> trust_trace_;
  std::size_t cursor_ = 0;
  double clock_ = 0;
};

void write_records_csv(std::ostream& out, std::span<const ServiceRecord> records,
                       std::span<const OracleProfile> roster);

}  // namespace tcodrl
