#include "tcodrl/experiment.hpp"

#include <algorithm>
#include <fstream>
#include <future>
#include <numeric>

#include "tcodrl/csv.hpp"

namespace tcodrl {

std::string to_string(AgentKind k) {
  switch (k) {
    case AgentKind::TcoDrl: return "tco-drl";
    case AgentKind::TcoDrlOnline: return "tco-drl-online";
    case AgentKind::RoundRobin: return "round-robin";
    case AgentKind::Blor: return "blor";
    case AgentKind::Psg: return "psg";
  }
  return "unknown";
}

std::vector<AgentKind> parse_agents(const std::string& name) {
  if (name == "all") {
    return {AgentKind::TcoDrl, AgentKind::TcoDrlOnline, AgentKind::RoundRobin, AgentKind::Blor, AgentKind::Psg};
  }
  for (auto k : {AgentKind::TcoDrl, AgentKind::TcoDrlOnline, AgentKind::RoundRobin, AgentKind::Blor,
                 AgentKind::Psg}) {
    if (to_string(k) == name) return {k};
  }
  throw Error("unknown agent '" + name + "'");
}

EpisodeResult run_episode(const ScenarioConfig& cfg, std::uint64_t seed, Selector& selector) {
  Environment env(cfg, seed);
  while (!env.done()) {
    const auto state = env.observe();
    const auto action = selector.select(state);
    const auto outcome = env.step(action);
    selector.feedback(state, action, outcome);
  }
  EpisodeResult r;
  r.records = env.records();
  r.trust = env.trust_trace();
  r.report = aggregate(r.records, cfg.oracles, env.reputation_trace(), selector.name());
  return r;
}

std::unique_ptr<DqnAgent> make_dqn(const ScenarioConfig& cfg, std::uint64_t seed) {
  return std::make_unique<DqnAgent>(state_size(cfg.oracle_count(), cfg.class_count()), cfg.oracle_count(),
                                    cfg.dqn, derive_seed(seed, 0xa9));
}

std::vector<double> train_dqn(DqnAgent& agent, const ScenarioConfig& cfg, std::uint64_t seed,
                              std::size_t episodes) {
  std::vector<double> means;
  DqnSelector learner(agent);
  for (std::size_t e = 0; e < episodes; ++e) {
    const auto result = run_episode(cfg, derive_seed(seed, 0x7000 + e), learner);
    means.push_back(result.report.convergence.back() / static_cast<double>(result.records.size()));
  }
  return means;
}

EpisodeResult run_agent(const ScenarioConfig& cfg, AgentKind kind, std::uint64_t seed) {
  switch (kind) {
    case AgentKind::TcoDrl: {
      auto agent = make_dqn(cfg, seed);
      train_dqn(*agent, cfg, seed, cfg.dqn.pretrain_episodes);
      DqnSelector frozen(*agent, true);
      auto r = run_episode(cfg, seed, frozen);
      r.report.agent = to_string(kind);
      return r;
    }
    case AgentKind::TcoDrlOnline: {
      auto agent = make_dqn(cfg, seed);
      DqnSelector online(*agent);
      auto r = run_episode(cfg, seed, online);
      r.report.agent = to_string(kind);
      return r;
    }
    case AgentKind::RoundRobin: {
      RoundRobinSelector s;
      return run_episode(cfg, seed, s);
    }
    case AgentKind::Blor: {
      BlorSelector s(cfg.oracle_count(), cfg.baselines.blor_warmup_passes, derive_seed(seed, 0xb0));
      return run_episode(cfg, seed, s);
    }
    case AgentKind::Psg: {
      PsgSelector s(cfg.baselines.psg_q, cfg.reward, derive_seed(seed, 0x50));
      return run_episode(cfg, seed, s);
    }
  }
  throw Error("unknown agent kind");
}

void export_episode(const EpisodeResult& r, const ScenarioConfig& cfg, const std::filesystem::path& dir) {
  export_report(r.report, dir);
  {
    std::ofstream out(dir / "records.csv", std::ios::binary);
    if (!out) throw Error("cannot write " + (dir / "records.csv").string());
    write_records_csv(out, r.records, cfg.oracles);
  }
  std::ofstream out(dir / "trust.csv", std::ios::binary);
  if (!out) throw Error("cannot write " + (dir / "trust.csv").string());
  write_trust_trace_csv(out, r.trust);
}

// ---------------------------------------------------------------------------
// sweeps

namespace {

struct Job {
  double x;
  AgentKind agent;
  ScenarioConfig cfg;
};

std::vector<SweepPoint> run_jobs(const std::vector<Job>& jobs, std::uint64_t seed, unsigned workers) {
  std::vector<SweepPoint> out(jobs.size());
  workers = std::max(1u, workers);
  std::size_t next = 0;
  while (next < jobs.size()) {
    std::vector<std::future<void>> running;
    for (unsigned w = 0; w < workers && next < jobs.size(); ++w, ++next) {
      running.push_back(std::async(std::launch::async, [&, i = next] {
        out[i].x = jobs[i].x;
        out[i].agent = jobs[i].agent;
        out[i].report = run_agent(jobs[i].cfg, jobs[i].agent, seed).report;
      }));
    }
    for (auto& f : running) f.get();
  }
  return out;
}

}  // namespace

std::vector<SweepPoint> sweep_noise(const ScenarioConfig& cfg, std::uint64_t seed, const std::vector<double>& grid,
                                    const std::vector<AgentKind>& agents, unsigned jobs) {
  std::vector<Job> todo;
  for (double noise : grid) {
    if (noise < 0 || noise > 1) throw Error("noise fraction must lie in [0, 1]");
    auto c = cfg;
    c.noise = noise;
    for (auto a : agents) todo.push_back({noise, a, c});
  }
  return run_jobs(todo, seed, jobs);
}

ScenarioConfig with_malicious(const ScenarioConfig& cfg, std::size_t count, std::uint64_t seed) {
  auto c = cfg;
  std::vector<OracleId> honest;
  std::size_t malicious = 0;
  for (const auto& o : c.oracles) {
    if (o.behavior_class == BehaviorClass::Malicious) ++malicious;
    else honest.push_back(o.oid);
  }
  if (count < malicious) throw Error("roster already has more than " + std::to_string(count) + " malicious oracles");
  if (count - malicious > honest.size()) throw Error("not enough oracles to convert");
  Rng rng(derive_seed(seed, 0x3a1));
  std::shuffle(honest.begin(), honest.end(), rng);
  for (std::size_t i = 0; i < count - malicious; ++i) c.oracles[honest[i]].behavior_class = BehaviorClass::Malicious;
  return c;
}

std::vector<SweepPoint> sweep_malicious(const ScenarioConfig& cfg, std::uint64_t seed,
                                        const std::vector<std::size_t>& counts,
                                        const std::vector<AgentKind>& agents, unsigned jobs) {
  std::vector<Job> todo;
  for (auto n : counts) {
    const auto c = with_malicious(cfg, n, seed);
    for (auto a : agents) todo.push_back({static_cast<double>(n), a, c});
  }
  return run_jobs(todo, seed, jobs);
}

void write_sweep_csv(const std::filesystem::path& file, const std::string& x_name,
                     const std::vector<SweepPoint>& points) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw Error("cannot write " + file.string());
  out << x_name
      << ",agent,match_rate,average_cost,average_response_time,success_rate,trusted,benign,malicious,"
         "trusted_fraction,benign_fraction,malicious_fraction\n";
  for (const auto& p : points) {
    const auto& r = p.report;
    out << csv::format(p.x) << ',' << to_string(p.agent) << ',' << csv::format(r.match_rate) << ','
        << csv::format(r.average_cost) << ',' << csv::format(r.average_response_time) << ','
        << csv::format(r.success_rate) << ',' << r.count(BehaviorClass::Trusted) << ','
        << r.count(BehaviorClass::Benign) << ',' << r.count(BehaviorClass::Malicious) << ','
        << csv::format(r.fraction(BehaviorClass::Trusted)) << ',' << csv::format(r.fraction(BehaviorClass::Benign))
        << ',' << csv::format(r.fraction(BehaviorClass::Malicious)) << '\n';
  }
}

// ---------------------------------------------------------------------------
// attacks

std::string to_string(AttackKind k) {
  switch (k) {
    case AttackKind::Me: return "me";
    case AttackKind::Ooa: return "ooa";
    case AttackKind::Osa: return "osa";
  }
  return "unknown";
}

std::vector<AttackKind> parse_attacks(const std::string& name) {
  if (name == "all") return {AttackKind::Me, AttackKind::Ooa, AttackKind::Osa};
  for (auto k : {AttackKind::Me, AttackKind::Ooa, AttackKind::Osa}) {
    if (to_string(k) == name) return {k};
  }
  throw Error("unknown attack '" + name + "'");
}

OracleId default_attacker(const ScenarioConfig& cfg) {
  for (const auto& o : cfg.oracles) {
    if (!std::holds_alternative<NoAttack>(o.attack)) return o.oid;
  }
  return cfg.oracles.back().oid;
}

ScenarioConfig with_attack(const ScenarioConfig& cfg, AttackKind kind, OracleId attacker, WindowMode mode) {
  if (attacker >= cfg.oracle_count()) throw Error("attacker " + std::to_string(attacker) + " is not in the roster");
  auto c = cfg;
  c.enforce_threshold = true;
  c.window.mode = mode;
  auto& policy = c.oracles[attacker].attack;
  switch (kind) {
    case AttackKind::Me:
      if (!std::holds_alternative<MeAttack>(policy)) policy = MeAttack{};
      break;
    case AttackKind::Ooa:
      if (!std::holds_alternative<OnOffAttack>(policy)) policy = OnOffAttack{};
      break;
    case AttackKind::Osa:
      if (!std::holds_alternative<OpportunisticAttack>(policy)) policy = OpportunisticAttack{};
      break;
  }
  return c;
}

int attack_window(const OracleProfile& attacker) {
  struct {
    int operator()(const NoAttack&) const { return 0; }
    int operator()(const MeAttack& a) const { return a.start_window; }
    int operator()(const OnOffAttack& a) const { return a.on_windows + 1; }
    int operator()(const OpportunisticAttack& a) const { return a.start_window; }
  } v;
  return std::visit(v, attacker.attack);
}

int recovery_windows(const Eigen::MatrixXd& reputation, OracleId oid, int burst_window, double threshold) {
  const auto col = static_cast<Eigen::Index>(oid);
  for (Eigen::Index k = burst_window; k < reputation.rows(); ++k) {  // row k is window k+1
    if (is_trusted(reputation(k, col), threshold)) return static_cast<int>(k + 1) - burst_window;
  }
  return static_cast<int>(reputation.rows()) - burst_window + 1;
}

// ---------------------------------------------------------------------------
// window-length table

WindowTable window_table(const ScenarioConfig& cfg, std::uint64_t seed, int max_length, int windows) {
  if (max_length < 1 || windows < 1) throw Error("window table needs positive lengths and window counts");
  auto c = cfg;
  c.requests.count = static_cast<std::size_t>(windows) * c.window.requests_per_window;
  c.enforce_threshold = false;
  RoundRobinSelector rr;
  const auto run = run_episode(c, seed, rr);

  WindowTable t;
  const auto m = static_cast<Eigen::Index>(c.oracle_count());
  t.bases = Eigen::MatrixXd(windows, m);
  for (const auto& row : run.trust) t.bases(row.window - 1, static_cast<Eigen::Index>(row.oid)) = row.base;
  t.final_reputation = Eigen::MatrixXd(max_length, m);
  for (int w = 1; w <= max_length; ++w) {
    t.lengths.push_back(w);
    t.final_reputation.row(w - 1) = filter_reputations(t.bases, w, c.trust.chi).row(windows - 1);
  }
  return t;
}

double unit_base_reputation(int length, double chi, int windows) {
  Eigen::MatrixXd ones = Eigen::MatrixXd::Ones(windows, 1);
  return filter_reputations(ones, length, chi)(windows - 1, 0);
}

}  // namespace tcodrl
