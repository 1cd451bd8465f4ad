#include <doctest.h>

#include <cmath>
#include <sstream>

#include "tcodrl/env.hpp"

using namespace tcodrl;

namespace {

ScenarioConfig small_config(std::size_t requests = 40) {
  ScenarioConfig cfg;
  cfg.service_classes = {{0, "a"}, {1, "b"}};
  for (OracleId j = 0; j < 4; ++j) {
    OracleProfile o;
    o.oid = j;
    o.cost = 0.2 + 0.2 * static_cast<double>(j);
    o.service_class = static_cast<ServiceClassId>(j % 2);
    cfg.oracles.push_back(o);
  }
  cfg.oracles[3].behavior_class = BehaviorClass::Malicious;
  cfg.requests.count = requests;
  cfg.requests.arrival_rate = 0.5;
  cfg.window.requests_per_window = 10;
  return cfg;
}

std::array<int, 4> histogram(const OracleProfile& p, double noise, const BehaviorModel& model, int draws,
                             std::uint64_t seed) {
  Rng rng(seed);
  std::array<int, 4> h{};
  for (int i = 0; i < draws; ++i) ++h[static_cast<std::size_t>(sample_behavior(p, 5, 0.5, -1.5, noise, model, rng))];
  return h;
}

DataRequest request(double arrival, double complexity = 6000.0) {
  DataRequest r;
  r.arrival_ts = arrival;
  r.complexity = complexity;
  r.ddl = 10.0;
  return r;
}

}  // namespace

TEST_CASE("request streams are reproducible") {
  const auto cfg = validate_scenario(nlohmann::json::object());
  Rng a(42);
  Rng b(42);
  CHECK(generate_requests(cfg, a) == generate_requests(cfg, b));
}

TEST_CASE("request complexity has the configured mean") {
  const auto cfg = validate_scenario(nlohmann::json::object());
  Rng rng(derive_seed(7, 1));
  const auto reqs = generate_requests(cfg, rng);
  REQUIRE(reqs.size() == 6000);
  double sum = 0;
  double last = 0;
  for (const auto& r : reqs) {
    sum += r.complexity;
    CHECK(r.arrival_ts > last);
    last = r.arrival_ts;
  }
  CHECK(std::abs(sum / 6000.0 - 6000.0) <= 3 * 500.0 / std::sqrt(6000.0));
}

TEST_CASE("zero arrival rate is rejected") {
  auto cfg = small_config();
  cfg.requests.arrival_rate = 0.0;
  Rng rng(1);
  CHECK_THROWS_WITH_AS(generate_requests(cfg, rng), doctest::Contains("arrival rate must be positive"), Error);
}

TEST_CASE("trusted oracles never cause severe harm without noise") {
  OracleProfile p;
  const auto h = histogram(p, 0.0, BehaviorModel{}, 10000, 3);
  CHECK(h[3] == 0);
  CHECK(h[2] == 0);
}

TEST_CASE("full noise is uniform over harm levels") {
  OracleProfile p;
  p.behavior_class = BehaviorClass::Malicious;
  const auto h = histogram(p, 1.0, BehaviorModel{}, 10000, 4);
  for (int c : h) CHECK(std::abs(c - 2500) <= 150);
}

TEST_CASE("malicious-with-everyone draws from the harm-heavy distribution") {
  OracleProfile p;
  p.behavior_class = BehaviorClass::Malicious;
  p.attack = MeAttack{1, 0};
  const BehaviorModel model;
  const auto h = histogram(p, 0.0, model, 10000, 5);
  for (std::size_t i = 0; i < 4; ++i) {
    const double mean = 10000 * model.me[i];
    const double sd = std::sqrt(10000 * model.me[i] * (1 - model.me[i]));
    CHECK(std::abs(h[i] - mean) <= 3 * sd);
  }
}

TEST_CASE("dispatch timing") {
  std::vector<OracleProfile> roster(2);
  roster[1].oid = 1;
  OracleQueues q(2);
  Rng rng(1);
  const BehaviorModel model;
  const auto first = dispatch(request(0.0), roster, 0, BehaviorLevel::Safe, q, model, rng);
  CHECK(first.exe_time == doctest::Approx(6.0));
  CHECK(first.start_ts == 0.0);
  CHECK(first.success);
  const auto second = dispatch(request(1.0), roster, 0, BehaviorLevel::Safe, q, model, rng);
  CHECK(second.start_ts == first.finish_ts);
  CHECK(second.response_time == doctest::Approx(11.0));
  CHECK_FALSE(second.success);  // deadline missed although verified
  CHECK(second.verified);
  CHECK(q.wait(0, 2.0) == doctest::Approx(10.0));
  CHECK(q.wait(1, 2.0) == 0.0);
  CHECK_THROWS_AS(dispatch(request(0.0), roster, 2, BehaviorLevel::Safe, q, model, rng), std::out_of_range);
}

TEST_CASE("verification follows the harm level") {
  std::vector<OracleProfile> roster(1);
  const BehaviorModel model;
  Rng rng(8);
  int moderate_verified = 0;
  for (int i = 0; i < 2000; ++i) {
    OracleQueues q(1);
    const auto severe = dispatch(request(0.0), roster, 0, BehaviorLevel::SevereHarm, q, model, rng);
    CHECK_FALSE(severe.verified);
    CHECK_FALSE(severe.success);
    OracleQueues q2(1);
    moderate_verified += dispatch(request(0.0), roster, 0, BehaviorLevel::ModerateHarm, q2, model, rng).verified;
  }
  // binomial(2000, 0.3), 3 sigma
  CHECK(std::abs(moderate_verified - 600) <= 62);
  OracleQueues q(1);
  const auto minor = dispatch(request(0.0), roster, 0, BehaviorLevel::MinorHarm, q, model, rng);
  CHECK(minor.exe_time == doctest::Approx(9.0));
  CHECK(minor.verified);
}

TEST_CASE("reward function") {
  const RewardWeights w;
  ServiceRecord rec;
  rec.cost = 1.5;
  rec.exe_time = 6.0;
  rec.response_time = 6.0;
  rec.service_matched = true;
  CHECK(compute_reward(rec, 0.5, w) == doctest::Approx(4.0));
  rec.service_matched = false;
  CHECK(compute_reward(rec, 0.5, w) == doctest::Approx(0.0));
  rec.service_matched = true;
  rec.response_time = 12.0;
  CHECK(compute_reward(rec, 0.5, w) == doctest::Approx(2.25));
}

TEST_CASE("state vector layout") {
  const auto cfg = validate_scenario(nlohmann::json::object());
  CHECK(state_size(15, 3) == 95);
  Environment env(cfg, 9);
  const auto s = env.observe();
  CHECK(s.vector.size() == 95);
  CHECK(s.vector == env.observe().vector);
  const double ones = s.vector.segment(2, 3).sum();
  CHECK(ones == 1.0);
  for (OracleId j = 0; j < 15; ++j) {
    CHECK(s.oracles[j].reputation == env.trust().reputation(j));
    CHECK(s.vector(5 + 6 * static_cast<Eigen::Index>(j)) == doctest::Approx(0.5 / 5.0));
  }
}

TEST_CASE("state tracks reputations after a window closes") {
  auto cfg = small_config();
  Environment env(cfg, 3);
  for (int i = 0; i < 10; ++i) env.step(static_cast<OracleId>(i % 4));
  const auto s = env.observe();
  for (OracleId j = 0; j < 4; ++j) {
    CHECK(s.oracles[j].reputation == env.trust().reputation(j));
    CHECK(s.vector(4 + 6 * static_cast<Eigen::Index>(j)) ==
          doctest::Approx(std::clamp(env.trust().reputation(j), -5.0, 5.0) / 5.0));
  }
}

TEST_CASE("episodes are deterministic") {
  const auto cfg = validate_scenario(nlohmann::json::object());
  auto run = [&] {
    Environment env(cfg, 77);
    double total = 0;
    std::size_t t = 0;
    while (!env.done()) total += env.step(t++ % 15).reward;
    std::ostringstream out;
    write_records_csv(out, env.records(), cfg.oracles);
    return std::make_pair(total, out.str());
  };
  const auto a = run();
  const auto b = run();
  CHECK(a.first == b.first);
  CHECK(a.second == b.second);
}

TEST_CASE("window boundaries recompute every oracle once") {
  auto cfg = small_config(35);
  Environment env(cfg, 5);
  int closes = 0;
  while (!env.done()) {
    const auto before = env.trust_trace().size();
    const auto out = env.step(0);
    if (out.window_closed) {
      ++closes;
      CHECK(env.trust_trace().size() - before == 4);
    } else {
      CHECK(env.trust_trace().size() == before);
    }
  }
  CHECK(closes == 4);  // three full windows and the partial tail
  CHECK(env.reputation_trace().rows() == 4);
  CHECK_THROWS_AS(env.observe(), Error);
  CHECK_THROWS_AS(env.step(0), Error);
}

TEST_CASE("actions outside the roster are rejected") {
  Environment env(small_config(), 1);
  CHECK_THROWS_AS(env.step(4), std::out_of_range);
}

TEST_CASE("threshold enforcement redirects and penalizes") {
  auto cfg = small_config(60);
  cfg.enforce_threshold = true;
  cfg.behavior.malicious = {0.0, 0.0, 0.0, 1.0};
  Environment env(cfg, 12);
  std::size_t redirected = 0;
  while (!env.done()) {
    const auto wanted = env.observe().service_class;
    const bool untrusted = !env.trust().trusted(3);
    const auto out = env.step(3);
    const auto& rec = out.record;
    if (untrusted) {
      ++redirected;
      CHECK(rec.redirected);
      CHECK(rec.requested_oid == 3);
      CHECK(rec.oid != 3);
      CHECK(env.trust().reputation(rec.oid) >= cfg.trust.threshold);
      // best trusted oracle of the requested class
      CHECK(cfg.oracles[rec.oid].service_class == wanted);
      CHECK(out.reward == doctest::Approx(compute_reward(rec, rec.reputation, cfg.reward) - cfg.reward.mu));
    } else {
      CHECK_FALSE(rec.redirected);
      CHECK(rec.oid == 3);
    }
  }
  CHECK(redirected == 50);
}

TEST_CASE("enforcement is off by default") {
  auto cfg = small_config(30);
  cfg.behavior.malicious = {0.0, 0.0, 0.0, 1.0};
  Environment env(cfg, 12);
  while (!env.done()) CHECK(env.step(3).record.oid == 3);
}
