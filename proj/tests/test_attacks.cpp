#include <doctest.h>

#include <cmath>

#include "tcodrl/attacks.hpp"
#include "tcodrl/env.hpp"
#include "tcodrl/experiment.hpp"

using namespace tcodrl;

namespace {

ScenarioConfig attack_scenario() { return load_scenario(TCODRL_SCENARIO_DIR "/attack.json"); }

Eigen::MatrixXd round_robin_trace(const ScenarioConfig& cfg, std::uint64_t seed) {
  RoundRobinSelector rr;
  return run_episode(cfg, seed, rr).report.reputation_trace;
}

}  // namespace

TEST_CASE("ME distribution ignores the requester and the reputation") {
  const BehaviorModel model;
  OracleProfile p;
  p.attack = MeAttack{1, 0};
  const auto a = resolve_distribution(p, 4, 0.9, -1.5, model);
  const auto b = resolve_distribution(p, 4, -30.0, -1.5, model);
  CHECK(a == b);
  CHECK(a == me_distribution(model));
  CHECK(resolve_distribution(p, 4, 0.9, -1.5, model) == model.me);
}

TEST_CASE("ME draws are severe-heavy") {
  const BehaviorModel model;
  Rng rng(31);
  int severe = 0;
  for (int i = 0; i < 10000; ++i) severe += draw_behavior(me_distribution(model), rng) == BehaviorLevel::SevereHarm;
  CHECK(std::abs(severe - 4000) <= 150);
}

TEST_CASE("ME respects its start window and duration") {
  OracleProfile p;
  p.attack = MeAttack{3, 2};
  CHECK_FALSE(attack_active(p, 2, 0, -1.5));
  CHECK(attack_active(p, 3, 0, -1.5));
  CHECK(attack_active(p, 4, 0, -1.5));
  CHECK_FALSE(attack_active(p, 5, 0, -1.5));
  const BehaviorModel model;
  CHECK(resolve_distribution(p, 2, 0, -1.5, model) == model.trusted);
}

TEST_CASE("one ME window drops a safe oracle below the threshold") {
  const auto cfg = with_attack(attack_scenario(), AttackKind::Me, 5, WindowMode::Improved);
  const auto trace = round_robin_trace(cfg, 3);
  CHECK(trace(1, 5) >= cfg.trust.threshold);
  CHECK(trace(2, 5) < cfg.trust.threshold);
}

TEST_CASE("on-off phases") {
  const OnOffAttack forever{2, 1, 0};
  const bool expected[] = {true, true, false, true, true, false};
  for (int w = 1; w <= 6; ++w) CHECK(ooa_is_on(w, forever) == expected[w - 1]);
  const OnOffAttack once{2, 1, 1};
  for (int w = 4; w <= 12; ++w) CHECK(ooa_is_on(w, once));
  CHECK_FALSE(ooa_is_on(3, once));
  const BehaviorModel model;
  CHECK(ooa_distribution(3, once, model) == model.me);
  CHECK(ooa_distribution(2, once, model) == model.trusted);
}

TEST_CASE("on-off burst at window 3 crosses the threshold") {
  const auto cfg = with_attack(attack_scenario(), AttackKind::Ooa, 5, WindowMode::Improved);
  CHECK(attack_window(cfg.oracles[5]) == 3);
  const auto trace = round_robin_trace(cfg, 3);
  CHECK(trace(1, 5) >= cfg.trust.threshold);
  CHECK(trace(2, 5) < cfg.trust.threshold);
}

TEST_CASE("improved window extends on-off recovery at least threefold") {
  const auto base = attack_scenario();
  for (std::uint64_t seed : {1, 2, 3}) {
    const auto improved = with_attack(base, AttackKind::Ooa, 5, WindowMode::Improved);
    const auto standard = with_attack(base, AttackKind::Ooa, 5, WindowMode::Standard);
    const int slow = recovery_windows(round_robin_trace(improved, seed), 5, 3, base.trust.threshold);
    const int fast = recovery_windows(round_robin_trace(standard, seed), 5, 3, base.trust.threshold);
    CAPTURE(seed);
    CHECK(fast >= 1);
    CHECK(slow >= 3 * fast);
  }
}

TEST_CASE("recovery is counted from the burst window") {
  Eigen::MatrixXd rep(6, 1);
  rep << 0.5, 0.5, -40, -10, -1.5, 0.2;
  CHECK(recovery_windows(rep, 0, 3, -1.5) == 2);
  rep(4, 0) = -2;
  rep(5, 0) = -2;
  CHECK(recovery_windows(rep, 0, 3, -1.5) == 4);  // never recovered: horizon - burst + 1
}

TEST_CASE("opportunistic attacker behaves near the threshold") {
  const BehaviorModel model;
  const OpportunisticAttack policy{3, 0.5};
  CHECK(osa_distribution(-1.5 + 0.1, -1.5, policy, model) == model.trusted);
  const auto stealth = osa_distribution(5.0, -1.5, policy, model);
  CHECK(stealth[3] == doctest::Approx(model.osa_stealth_severe));
  double sum = 0;
  for (double p : stealth) sum += p;
  CHECK(sum == doctest::Approx(1.0));
  CHECK(stealth[1] == model.malicious[1]);
  CHECK(stealth[2] == model.malicious[2]);
  CHECK(stealth[0] == doctest::Approx(model.malicious[0] + model.malicious[3] - model.osa_stealth_severe));
}

TEST_CASE("opportunistic attacker stays below a trusted oracle") {
  const auto cfg = with_attack(attack_scenario(), AttackKind::Osa, 5, WindowMode::Improved);
  const auto trace = round_robin_trace(cfg, 3);
  REQUIRE(trace.rows() == 50);
  for (Eigen::Index k = 2; k < 50; ++k) {
    CAPTURE(k + 1);
    CHECK(trace(k, 5) < trace(k, 0));
  }
}
