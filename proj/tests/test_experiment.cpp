#include <doctest.h>

#include "tcodrl/experiment.hpp"

using namespace tcodrl;

namespace {

ScenarioConfig acceptance() { return load_scenario(TCODRL_SCENARIO_DIR "/acceptance.json"); }

std::size_t malicious_in(const ScenarioConfig& cfg) {
  std::size_t n = 0;
  for (const auto& o : cfg.oracles) n += o.behavior_class == BehaviorClass::Malicious;
  return n;
}

}  // namespace

TEST_CASE("agent names") {
  CHECK(parse_agents("all").size() == 5);
  CHECK(parse_agents("psg") == std::vector<AgentKind>{AgentKind::Psg});
  for (auto k : parse_agents("all")) CHECK(parse_agents(to_string(k)) == std::vector<AgentKind>{k});
  CHECK_THROWS_AS(parse_agents("random"), Error);
  CHECK(parse_attacks("all").size() == 3);
  CHECK_THROWS_AS(parse_attacks("sybil"), Error);
}

TEST_CASE("malicious conversion is seeded and only adds attackers") {
  const auto cfg = acceptance();
  REQUIRE(malicious_in(cfg) == 3);
  const auto a = with_malicious(cfg, 7, 99);
  CHECK(malicious_in(a) == 7);
  CHECK(a == with_malicious(cfg, 7, 99));
  for (OracleId j = 0; j < cfg.oracle_count(); ++j) {
    if (cfg.oracles[j].behavior_class == BehaviorClass::Malicious) {
      CHECK(a.oracles[j].behavior_class == BehaviorClass::Malicious);
    }
    CHECK(a.oracles[j].cost == cfg.oracles[j].cost);
  }
  CHECK(with_malicious(cfg, 3, 1) == cfg);
  CHECK_THROWS_AS(with_malicious(cfg, 2, 1), Error);
  CHECK_THROWS_AS(with_malicious(cfg, 16, 1), Error);
}

TEST_CASE("parallel sweeps match serial sweeps") {
  auto cfg = acceptance();
  cfg.requests.count = 600;
  const std::vector<AgentKind> agents{AgentKind::RoundRobin, AgentKind::Blor, AgentKind::Psg};
  const auto serial = sweep_noise(cfg, 5, {0.0, 0.3}, agents, 1);
  const auto parallel = sweep_noise(cfg, 5, {0.0, 0.3}, agents, 3);
  REQUIRE(serial.size() == 6);
  REQUIRE(parallel.size() == 6);
  for (std::size_t i = 0; i < serial.size(); ++i) {
    CHECK(serial[i].x == parallel[i].x);
    CHECK(serial[i].agent == parallel[i].agent);
    CHECK(serial[i].report == parallel[i].report);
  }
  CHECK(serial[0].x == 0.0);
  CHECK(serial[1].agent == AgentKind::Blor);
  CHECK(serial[3].x == 0.3);
  CHECK_THROWS_AS(sweep_noise(cfg, 5, {1.5}, agents), Error);
}

TEST_CASE("nine malicious oracles: the trained agent avoids them better than round robin") {
  const auto points = sweep_malicious(acceptance(), 7, {9}, {AgentKind::TcoDrl, AgentKind::RoundRobin}, 1);
  REQUIRE(points.size() == 2);
  const auto drl = points[0].report.count(BehaviorClass::Malicious);
  const auto rr = points[1].report.count(BehaviorClass::Malicious);
  CHECK(rr == 3600);
  CHECK(drl < rr);
}

TEST_CASE("attack scenario helpers") {
  const auto base = load_scenario(TCODRL_SCENARIO_DIR "/attack.json");
  CHECK(default_attacker(base) == 5);
  const auto osa = with_attack(base, AttackKind::Osa, 2, WindowMode::Standard);
  CHECK(osa.enforce_threshold);
  CHECK(osa.window.mode == WindowMode::Standard);
  CHECK(std::holds_alternative<OpportunisticAttack>(osa.oracles[2].attack));
  CHECK(attack_window(osa.oracles[2]) == 3);
  // a configured policy of the same kind is kept
  CHECK(with_attack(base, AttackKind::Me, 5).oracles[5].attack == base.oracles[5].attack);
  CHECK_THROWS_AS(with_attack(base, AttackKind::Me, 6), Error);
}

TEST_CASE("window table replays one base sequence") {
  const auto cfg = load_scenario(TCODRL_SCENARIO_DIR "/window_table.json");
  const auto t = window_table(cfg, cfg.seed, 10, 100);
  CHECK(t.lengths == std::vector<int>{1, 2, 3, 4, 5, 6, 7, 8, 9, 10});
  CHECK(t.bases.rows() == 100);
  CHECK(t.bases.cols() == 5);
  CHECK(t.final_reputation.rows() == 10);
  for (int w = 1; w <= 10; ++w) {
    const Eigen::RowVectorXd expected = filter_reputations(t.bases, w, cfg.trust.chi).row(99);
    CHECK(t.final_reputation.row(w - 1) == expected);
  }
  // the attacker turns honest after its last cycle; only long windows still carry its history
  for (int w = 5; w < 10; ++w) {
    for (Eigen::Index j = 1; j < 5; ++j) CHECK(t.final_reputation(w, 0) < t.final_reputation(w, j));
  }
  CHECK(t.final_reputation.row(4).cwiseAbs().maxCoeff() < 10);
  CHECK(unit_base_reputation(5, 0.6, 100) == doctest::Approx(2.2101).epsilon(1e-4));
}
