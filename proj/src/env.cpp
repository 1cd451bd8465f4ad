#include "tcodrl/env.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <ostream>
#include <stdexcept>

#include "tcodrl/attacks.hpp"
#include "tcodrl/csv.hpp"

namespace tcodrl {

double OracleQueues::wait(OracleId j, double now) const { return std::max(0.0, free_at(j) - now); }

std::size_t state_size(std::size_t oracle_count, std::size_t class_count) noexcept {
  return 2 + class_count + 6 * oracle_count;
}

void encode_state(EnvState& s, std::size_t class_count) {
  const std::size_t m = s.oracles.size();
  s.vector = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(state_size(m, class_count)));
  auto& v = s.vector;
  if (!s.terminal) {
    v(0) = s.complexity / 6000.0;
    v(1) = s.ddl / 10.0;
    if (s.service_class >= 0 && static_cast<std::size_t>(s.service_class) < class_count) {
      v(2 + s.service_class) = 1.0;
    }
  }
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& o : s.oracles) {
    lo = std::min(lo, o.cost);
    hi = std::max(hi, o.cost);
  }
  const double span = hi - lo;
  const double ddl = s.ddl > 0 ? s.ddl : 1.0;
  Eigen::Index at = static_cast<Eigen::Index>(2 + class_count);
  for (const auto& o : s.oracles) {
    v(at + 0) = std::clamp(o.reputation, -5.0, 5.0) / 5.0;
    v(at + 1) = span > 0 ? (o.cost - lo) / span : 0.0;
    v(at + 2) = std::min(o.wait / ddl, 2.0);
    v(at + 3) = o.performance / 1000.0;
    v(at + 4) = (!s.terminal && o.service_class == s.service_class) ? 1.0 : 0.0;
    v(at + 5) = o.trusted ? 1.0 : 0.0;
    at += 6;
  }
}

std::vector<DataRequest> generate_requests(const ScenarioConfig& cfg, Rng& rng) {
  const auto& q = cfg.requests;
  if (!(q.arrival_rate > 0)) throw Error("arrival rate must be positive");
  std::exponential_distribution<double> gap(q.arrival_rate);
  std::normal_distribution<double> complexity(q.complexity_mean, q.complexity_stddev);
  std::uniform_int_distribution<int> klass(0, static_cast<int>(cfg.class_count()) - 1);

  std::vector<DataRequest> out(q.count);
  double t = 0.0;
  for (std::size_t i = 0; i < q.count; ++i) {
    t += gap(rng);
    auto& r = out[i];
    r.rid = i;
    r.arrival_ts = t;
    r.ddl = q.ddl;
    r.complexity = std::max(1.0, complexity(rng));
    r.service_class = klass(rng);
  }
  return out;
}

BehaviorLevel draw_behavior(const BehaviorDistribution& dist, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double x = u(rng);
  double acc = 0.0;
  std::size_t last = 0;
  for (std::size_t i = 0; i < kBehaviorLevels; ++i) {
    if (dist[i] <= 0.0) continue;
    acc += dist[i];
    last = i;
    if (x < acc) return static_cast<BehaviorLevel>(i);
  }
  return static_cast<BehaviorLevel>(last);
}

BehaviorLevel sample_behavior(const OracleProfile& profile, int window, double reputation, double threshold,
                              double noise, const BehaviorModel& model, Rng& rng) {
  // Two draws every time so the stream does not depend on the noise branch.
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double coin = u(rng);
  const auto uniform_pick = static_cast<BehaviorLevel>(
      std::min<std::size_t>(kBehaviorLevels - 1, static_cast<std::size_t>(u(rng) * kBehaviorLevels)));
  const auto dist = resolve_distribution(profile, window, reputation, threshold, model);
  const auto regular = draw_behavior(dist, rng);
  return coin < noise ? uniform_pick : regular;
}

ServiceRecord dispatch(const DataRequest& req, std::span<const OracleProfile> roster, OracleId oid,
                       BehaviorLevel behavior, OracleQueues& queues, const BehaviorModel& model, Rng& rng) {
  if (oid >= roster.size() || oid >= queues.size()) {
    throw std::out_of_range("unknown oracle id " + std::to_string(oid));
  }
  const auto& o = roster[oid];
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double coin = u(rng);

  ServiceRecord rec;
  rec.rid = req.rid;
  rec.oid = oid;
  rec.requested_oid = oid;
  rec.service_class = req.service_class;
  rec.arrival_ts = req.arrival_ts;
  rec.start_ts = std::max(req.arrival_ts, queues.free_at(oid));
  rec.exe_time = req.complexity / o.performance;
  if (behavior == BehaviorLevel::MinorHarm) rec.exe_time *= model.minor_delay_factor;
  rec.finish_ts = rec.start_ts + rec.exe_time;
  rec.response_time = rec.finish_ts - rec.arrival_ts;
  rec.behavior = behavior;
  switch (behavior) {
    case BehaviorLevel::Safe:
    case BehaviorLevel::MinorHarm: rec.verified = true; break;
    case BehaviorLevel::ModerateHarm: rec.verified = coin >= model.moderate_failure_prob; break;
    case BehaviorLevel::SevereHarm: rec.verified = false; break;
  }
  rec.success = request_success(rec.response_time, req.ddl, rec.verified) == 1;
  rec.cost = o.cost;
  rec.service_matched = o.service_class == req.service_class;
  queues.occupy(oid, rec.finish_ts);
  return rec;
}

double compute_reward(const ServiceRecord& rec, double reputation, const RewardWeights& w) {
  const double ratio = rec.response_time > 0 ? rec.exe_time / rec.response_time : 1.0;
  const double penalty = rec.service_matched ? 0.0 : 1.0;
  return (1.0 + w.theta * std::exp(w.lambda - rec.cost)) * ratio + reputation - w.mu * penalty;
}

namespace {
std::vector<double> stakes_of(const ScenarioConfig& cfg) {
  std::vector<double> s;
  for (const auto& o : cfg.oracles) s.push_back(o.stake);
  return s;
}
}  // namespace

Environment::Environment(ScenarioConfig cfg, std::uint64_t seed)
    : cfg_(std::move(cfg)),
      behavior_rng_(derive_seed(seed, 2)),
      verify_rng_(derive_seed(seed, 3)),
      trust_(cfg_.trust, cfg_.window, cfg_.requests.ddl, stakes_of(cfg_)),
      queues_(cfg_.oracle_count()) {
  if (cfg_.oracles.empty()) throw Error("scenario has no oracles");
  Rng request_rng(derive_seed(seed, 1));
  requests_ = generate_requests(cfg_, request_rng);
  clock_ = requests_.front().arrival_ts;
}

EnvState Environment::build_state(bool terminal) const {
  EnvState s;
  s.terminal = terminal;
  s.clock = clock_;
  if (!terminal) {
    const auto& req = requests_[cursor_];
    s.complexity = req.complexity;
    s.ddl = req.ddl;
    s.service_class = req.service_class;
  } else {
    s.ddl = cfg_.requests.ddl;
    s.service_class = -1;
  }
  s.oracles.reserve(cfg_.oracle_count());
  for (OracleId j = 0; j < cfg_.oracle_count(); ++j) {
    const auto& o = cfg_.oracles[j];
    OracleFeatures f;
    f.reputation = trust_.reputation(j);
    f.cost = o.cost;
    f.wait = queues_.wait(j, clock_);
    f.performance = o.performance;
    f.service_class = o.service_class;
    f.trusted = trust_.trusted(j);
    s.oracles.push_back(f);
  }
  encode_state(s, cfg_.class_count());
  return s;
}

EnvState Environment::observe() const {
  if (done()) throw Error("observe called with no pending request");
  return build_state(false);
}

OracleId Environment::enforce(OracleId action, ServiceClassId wanted) const {
  if (!cfg_.enforce_threshold || trust_.trusted(action)) return action;
  // Highest-reputation trusted oracle of the requested class, then of any class.
  for (bool same_class : {true, false}) {
    std::optional<OracleId> best;
    for (OracleId j = 0; j < cfg_.oracle_count(); ++j) {
      if (!trust_.trusted(j)) continue;
      if (same_class && cfg_.oracles[j].service_class != wanted) continue;
      if (!best || trust_.reputation(j) > trust_.reputation(*best)) best = j;
    }
    if (best) return *best;
  }
  return action;  // nobody is trusted; nothing to redirect to
}

StepOutcome Environment::step(OracleId action) {
  if (done()) throw Error("step called after the last request");
  if (action >= cfg_.oracle_count()) {
    throw std::out_of_range("action " + std::to_string(action) + " outside [0, " +
                            std::to_string(cfg_.oracle_count()) + ")");
  }
  const auto& req = requests_[cursor_];
  const OracleId served = enforce(action, req.service_class);
  const int window = trust_.current_window();
  const double reputation = trust_.reputation(served);

  const auto behavior = sample_behavior(cfg_.oracles[served], window, reputation, cfg_.trust.threshold,
                                        cfg_.noise, cfg_.behavior, behavior_rng_);
  auto rec = dispatch(req, cfg_.oracles, served, behavior, queues_, cfg_.behavior, verify_rng_);
  rec.requested_oid = action;
  rec.redirected = served != action;
  rec.window = window;
  rec.reputation = reputation;
  rec.reward = compute_reward(rec, reputation, cfg_.reward);
  if (rec.redirected) rec.reward -= cfg_.reward.mu;

  trust_.record(served, rec.finish_ts - rec.start_ts, rec.success, behavior);
  records_.push_back(rec);
  ++cursor_;

  StepOutcome out;
  out.record = rec;
  out.reward = rec.reward;
  out.done = done();
  if (cursor_ % cfg_.window.requests_per_window == 0 || out.done) {
    auto rows = trust_.close_window();
    trust_trace_.insert(trust_trace_.end(), rows.begin(), rows.end());
    out.window_closed = true;
  }
  if (!out.done) clock_ = requests_[cursor_].arrival_ts;
  out.next_state = build_state(out.done);
  return out;
}

Eigen::MatrixXd Environment::reputation_trace() const {
  const auto m = static_cast<Eigen::Index>(cfg_.oracle_count());
  const auto windows = static_cast<Eigen::Index>(trust_trace_.size()) / std::max<Eigen::Index>(m, 1);
  Eigen::MatrixXd out(windows, m);
  for (const auto& row : trust_trace_) out(row.window - 1, static_cast<Eigen::Index>(row.oid)) = row.reputation;
  return out;
}

void write_records_csv(std::ostream& out, std::span<const ServiceRecord> records,
                       std::span<const OracleProfile> roster) {
  out << "rid,oid,requested_oid,window,service_class,oracle_class,arrival_ts,start_ts,finish_ts,"
         "exe_time,response_time,behavior,verified,success,cost,service_matched,redirected,"
         "reputation,reward\n";
  for (const auto& r : records) {
    const std::string klass = r.oid < roster.size() ? to_string(roster[r.oid].behavior_class) : "";
    out << r.rid << ',' << r.oid << ',' << r.requested_oid << ',' << r.window << ',' << r.service_class << ','
        << klass << ',' << csv::format(r.arrival_ts) << ',' << csv::format(r.start_ts) << ','
        << csv::format(r.finish_ts) << ',' << csv::format(r.exe_time) << ',' << csv::format(r.response_time)
        << ',' << to_string(r.behavior) << ',' << int(r.verified) << ',' << int(r.success) << ','
        << csv::format(r.cost) << ',' << int(r.service_matched) << ',' << int(r.redirected) << ','
        << csv::format(r.reputation) << ',' << csv::format(r.reward) << '\n';
  }
}

}  // namespace tcodrl
