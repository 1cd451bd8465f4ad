#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "tcodrl/domain.hpp"

using namespace tcodrl;
using nlohmann::json;

TEST_CASE("table weights are accepted") {
  const auto cfg = validate_scenario(json{{"trust", {{"omega", 0.2}, {"phi", 0.4}, {"psi", 0.4}}}});
  CHECK(cfg.trust.omega == 0.2);
  CHECK(cfg.trust.phi == 0.4);
}

TEST_CASE("reliability weights must sum to one") {
  try {
    validate_scenario(json{{"trust", {{"omega", 0.5}, {"phi", 0.5}, {"psi", 0.5}}}});
    FAIL("accepted invalid weights");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("reliability weights must sum to 1") != std::string::npos);
    CHECK(e.path() == "trust");
  }
}

TEST_CASE("empty document yields the documented defaults") {
  const auto cfg = validate_scenario(json::object());
  CHECK(cfg.oracle_count() == 15);
  CHECK(cfg.class_count() == 3);
  CHECK(cfg.requests.count == 6000);
  CHECK(cfg.requests.ddl == 10.0);
  CHECK(cfg.dqn.gamma == 0.9);
  CHECK(cfg.dqn.learning_rate == 0.01);
  CHECK(cfg.dqn.replay_capacity == 800);
  CHECK(cfg.dqn.minibatch == 30);
  CHECK(cfg.window.length == 5);
  CHECK(cfg.window.initial_reputation == 0.5);
  CHECK(cfg.trust.threshold == -1.5);
  CHECK(cfg.reward.theta == 2.5);
  CHECK(cfg.reward.lambda == 1.5);
  CHECK(cfg.reward.mu == 4.0);
  CHECK(cfg == validate_scenario(json::object()));

  std::size_t per_class[3] = {};
  std::size_t malicious = 0;
  for (const auto& o : cfg.oracles) {
    ++per_class[o.service_class];
    malicious += o.behavior_class == BehaviorClass::Malicious;
  }
  CHECK(per_class[0] == 5);
  CHECK(per_class[1] == 5);
  CHECK(per_class[2] == 5);
  CHECK(malicious == 3);
}

TEST_CASE("validation errors name the field") {
  auto path_of = [](const json& doc) {
    try {
      validate_scenario(doc);
    } catch (const ValidationError& e) {
      return e.path();
    }
    return std::string("<accepted>");
  };
  CHECK(path_of(json{{"requests", {{"arrival_rate", 0.0}}}}) == "requests.arrival_rate");
  CHECK(path_of(json{{"bogus", 1}}) == "bogus");
  CHECK(path_of(json{{"window", {{"lenght", 5}}}}) == "window.lenght");
  CHECK(path_of(json{{"behavior", {{"trusted", {0.5, 0.5, 0.5, 0.0}}}}}) == "behavior.trusted");
  CHECK(path_of(json{{"oracles", {{{"oid", 3}}}}}) == "oracles[0].oid");
}

TEST_CASE("arrival rate must be positive") {
  CHECK_THROWS_WITH_AS(validate_scenario(json{{"requests", {{"arrival_rate", 0.0}}}}),
                       doctest::Contains("arrival rate must be positive"), ValidationError);
}

TEST_CASE("scenario json round trip") {
  auto cfg = validate_scenario(json{{"roster", {{"per_class", 4}, {"malicious", 2}, {"benign", 1}}}});
  cfg.oracles[1].attack = OnOffAttack{3, 2, 0};
  cfg.oracles[2].attack = OpportunisticAttack{4, 0.25};
  cfg.oracles[3].attack = MeAttack{5, 2};
  cfg.window.mode = WindowMode::Standard;
  cfg.noise = 0.3;
  cfg.dqn.hidden = {32, 16, 8};
  const auto again = validate_scenario(to_json(cfg));
  CHECK(again == cfg);

  const auto dir = std::filesystem::temp_directory_path() / "tcodrl_domain_test";
  std::filesystem::create_directories(dir);
  save_scenario(cfg, dir / "s.json");
  CHECK(load_scenario(dir / "s.json") == cfg);
  std::filesystem::remove_all(dir);
}

TEST_CASE("unreadable scenario files are errors") {
  CHECK_THROWS_AS(load_scenario("/nonexistent/scenario.json"), Error);
  const auto file = std::filesystem::temp_directory_path() / "tcodrl_bad.json";
  std::ofstream(file) << "{ not json";
  CHECK_THROWS_WITH_AS(load_scenario(file), doctest::Contains("not valid JSON"), Error);
  std::filesystem::remove(file);
}

TEST_CASE("generated roster is reproducible") {
  const auto a = generate_roster(3, 5, 3, 3, 11);
  const auto b = generate_roster(3, 5, 3, 3, 11);
  CHECK(a == b);
  for (const auto& o : a) {
    CHECK(o.cost >= 0.1);
    CHECK(o.cost <= 1.0);
    CHECK(o.performance >= 200.0);
    if (o.behavior_class == BehaviorClass::Trusted) CHECK(o.cost >= 0.55);
  }
  CHECK_THROWS_AS(generate_roster(3, 2, 4, 3, 1), ValidationError);
}

TEST_CASE("derived seeds are distinct streams") {
  CHECK(derive_seed(1, 1) != derive_seed(1, 2));
  CHECK(derive_seed(1, 1) != derive_seed(2, 1));
  CHECK(derive_seed(5, 9) == derive_seed(5, 9));
}
