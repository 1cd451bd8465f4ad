#include "tcodrl/domain.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

namespace tcodrl {

using nlohmann::json;

std::string to_string(BehaviorClass c) {
  switch (c) {
    case BehaviorClass::Trusted: return "trusted";
    case BehaviorClass::Benign: return "benign";
    case BehaviorClass::Malicious: return "malicious";
  }
  return "unknown";
}

std::string to_string(BehaviorLevel b) {
  switch (b) {
    case BehaviorLevel::Safe: return "safe";
    case BehaviorLevel::MinorHarm: return "minor";
    case BehaviorLevel::ModerateHarm: return "moderate";
    case BehaviorLevel::SevereHarm: return "severe";
  }
  return "unknown";
}

BehaviorClass behavior_class_from_string(const std::string& s, const std::string& path) {
  if (s == "trusted") return BehaviorClass::Trusted;
  if (s == "benign") return BehaviorClass::Benign;
  if (s == "malicious") return BehaviorClass::Malicious;
  throw ValidationError(path, "unknown behavior class '" + s + "'");
}

std::string attack_name(const AttackPolicy& p) {
  struct {
    std::string operator()(const NoAttack&) const { return "none"; }
    std::string operator()(const MeAttack&) const { return "me"; }
    std::string operator()(const OnOffAttack&) const { return "ooa"; }
    std::string operator()(const OpportunisticAttack&) const { return "osa"; }
  } v;
  return std::visit(v, p);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::vector<OracleProfile> generate_roster(std::size_t classes, std::size_t per_class,
                                           std::size_t malicious, std::size_t benign,
                                           std::uint64_t seed) {
  const std::size_t total = classes * per_class;
  if (malicious + benign > total) {
    throw ValidationError("roster", "malicious + benign exceeds the number of oracles");
  }
  std::mt19937_64 rng(derive_seed(seed, 0x70));

  // Spread the non-trusted oracles round-robin over the classes so every class
  // keeps a trusted majority whenever that is possible.
  std::vector<BehaviorClass> behavior(total, BehaviorClass::Trusted);
  std::vector<std::vector<std::size_t>> slots(classes);
  for (std::size_t c = 0; c < classes; ++c) {
    for (std::size_t k = 0; k < per_class; ++k) slots[c].push_back(c * per_class + k);
    std::shuffle(slots[c].begin(), slots[c].end(), rng);
  }
  std::size_t cursor = 0;
  auto assign = [&](std::size_t n, BehaviorClass b) {
    for (std::size_t placed = 0; placed < n; ++cursor) {
      auto& pool = slots[cursor % classes];
      if (pool.empty()) continue;
      behavior[pool.back()] = b;
      pool.pop_back();
      ++placed;
    }
  };
  assign(malicious, BehaviorClass::Malicious);
  assign(benign, BehaviorClass::Benign);

  std::uniform_real_distribution<double> any_cost(0.1, 1.0);
  std::uniform_real_distribution<double> upper_cost(0.55, 1.0);
  std::normal_distribution<double> perf(1000.0, 150.0);

  std::vector<OracleProfile> roster(total);
  for (std::size_t j = 0; j < total; ++j) {
    auto& o = roster[j];
    o.oid = j;
    o.service_class = static_cast<ServiceClassId>(j / per_class);
    o.behavior_class = behavior[j];
    o.cost = behavior[j] == BehaviorClass::Trusted ? upper_cost(rng) : any_cost(rng);
    o.performance = std::max(200.0, perf(rng));
    o.stake = 100.0;
  }
  return roster;
}

namespace {

/// Typed field access over one JSON object, tracking the field path and
/// rejecting unknown keys.
class ObjectReader {
 public:
  ObjectReader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_null() && !obj_.is_object()) throw ValidationError(path_, "expected an object");
  }

  std::string at(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  bool has(const std::string& key) const {
    return obj_.is_object() && obj_.contains(key);
  }

  const json& raw(const std::string& key) const {
    seen_.insert(key);
    return obj_.at(key);
  }

  double number(const std::string& key, double fallback) const {
    if (!has(key)) return fallback;
    const auto& v = raw(key);
    if (!v.is_number()) throw ValidationError(at(key), "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ValidationError(at(key), "must be finite");
    return d;
  }

  std::size_t count(const std::string& key, std::size_t fallback) const {
    if (!has(key)) return fallback;
    const auto& v = raw(key);
    if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
      throw ValidationError(at(key), "expected a non-negative integer");
    }
    return v.get<std::size_t>();
  }

  int integer(const std::string& key, int fallback) const {
    if (!has(key)) return fallback;
    const auto& v = raw(key);
    if (!v.is_number_integer()) throw ValidationError(at(key), "expected an integer");
    return v.get<int>();
  }

  std::uint64_t u64(const std::string& key, std::uint64_t fallback) const {
    if (!has(key)) return fallback;
    const auto& v = raw(key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
      throw ValidationError(at(key), "expected an unsigned integer");
    }
    return v.get<std::uint64_t>();
  }

  bool boolean(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const auto& v = raw(key);
    if (!v.is_boolean()) throw ValidationError(at(key), "expected a boolean");
    return v.get<bool>();
  }

  std::string string(const std::string& key, const std::string& fallback) const {
    if (!has(key)) return fallback;
    const auto& v = raw(key);
    if (!v.is_string()) throw ValidationError(at(key), "expected a string");
    return v.get<std::string>();
  }

  BehaviorDistribution distribution(const std::string& key, const BehaviorDistribution& fallback) const {
    if (!has(key)) return fallback;
    const auto& v = raw(key);
    if (!v.is_array() || v.size() != kBehaviorLevels) {
      throw ValidationError(at(key), "expected an array of 4 probabilities");
    }
    BehaviorDistribution d{};
    double sum = 0.0;
    for (std::size_t i = 0; i < kBehaviorLevels; ++i) {
      if (!v[i].is_number()) throw ValidationError(at(key), "expected numbers");
      d[i] = v[i].get<double>();
      if (!(d[i] >= 0.0)) throw ValidationError(at(key), "probabilities must be non-negative");
      sum += d[i];
    }
    if (std::abs(sum - 1.0) > 1e-9) throw ValidationError(at(key), "probabilities must sum to 1");
    return d;
  }

  /// Call once every field has been read.
  void finish() const {
    if (!obj_.is_object()) return;
    for (const auto& [key, _] : obj_.items()) {
      if (!seen_.count(key)) throw ValidationError(at(key), "unknown field");
    }
  }

 private:
  const json& obj_;
  std::string path_;
  mutable std::set<std::string> seen_;
};

const json& child(const ObjectReader& r, const std::string& key) {
  static const json kNull;
  return r.has(key) ? r.raw(key) : kNull;
}

AttackPolicy read_attack(const json& raw, const std::string& path) {
  if (raw.is_null()) return NoAttack{};
  ObjectReader r(raw, path);
  const auto kind = r.string("kind", "none");
  AttackPolicy out;
  if (kind == "none") {
    out = NoAttack{};
  } else if (kind == "me") {
    MeAttack a;
    a.start_window = r.integer("start_window", a.start_window);
    a.duration = r.integer("duration", a.duration);
    if (a.start_window < 1) throw ValidationError(r.at("start_window"), "must be >= 1");
    if (a.duration < 0) throw ValidationError(r.at("duration"), "must be >= 0");
    out = a;
  } else if (kind == "ooa") {
    OnOffAttack a;
    a.on_windows = r.integer("on_windows", a.on_windows);
    a.off_windows = r.integer("off_windows", a.off_windows);
    a.cycles = r.integer("cycles", a.cycles);
    if (a.on_windows < 1) throw ValidationError(r.at("on_windows"), "must be >= 1");
    if (a.off_windows < 1) throw ValidationError(r.at("off_windows"), "must be >= 1");
    if (a.cycles < 0) throw ValidationError(r.at("cycles"), "must be >= 0");
    out = a;
  } else if (kind == "osa") {
    OpportunisticAttack a;
    a.start_window = r.integer("start_window", a.start_window);
    a.trigger_margin = r.number("trigger_margin", a.trigger_margin);
    if (a.start_window < 1) throw ValidationError(r.at("start_window"), "must be >= 1");
    if (a.trigger_margin < 0) throw ValidationError(r.at("trigger_margin"), "must be >= 0");
    out = a;
  } else {
    throw ValidationError(r.at("kind"), "unknown attack policy '" + kind + "'");
  }
  r.finish();
  return out;
}

json attack_to_json(const AttackPolicy& p) {
  struct {
    json operator()(const NoAttack&) const { return {{"kind", "none"}}; }
    json operator()(const MeAttack& a) const {
      return {{"kind", "me"}, {"start_window", a.start_window}, {"duration", a.duration}};
    }
    json operator()(const OnOffAttack& a) const {
      return {{"kind", "ooa"},
              {"on_windows", a.on_windows},
              {"off_windows", a.off_windows},
              {"cycles", a.cycles}};
    }
    json operator()(const OpportunisticAttack& a) const {
      return {{"kind", "osa"}, {"start_window", a.start_window}, {"trigger_margin", a.trigger_margin}};
    }
  } v;
  return std::visit(v, p);
}

std::vector<ServiceClass> default_classes() {
  return {{0, "high update frequency"}, {1, "high data accuracy"}, {2, "low latency"}};
}

}  // namespace

ScenarioConfig validate_scenario(const json& raw) {
  ScenarioConfig cfg;
  ObjectReader top(raw, "");

  cfg.seed = top.u64("seed", cfg.seed);
  cfg.noise = top.number("noise", cfg.noise);
  if (cfg.noise < 0.0 || cfg.noise > 1.0) throw ValidationError("noise", "must lie in [0, 1]");
  cfg.enforce_threshold = top.boolean("enforce_threshold", cfg.enforce_threshold);

  // service classes
  if (top.has("service_classes")) {
    const auto& arr = top.raw("service_classes");
    if (!arr.is_array() || arr.empty()) {
      throw ValidationError("service_classes", "expected a non-empty array");
    }
    std::set<ServiceClassId> ids;
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string path = "service_classes[" + std::to_string(i) + "]";
      ObjectReader r(arr[i], path);
      ServiceClass sc;
      sc.id = r.integer("id", static_cast<int>(i));
      sc.description = r.string("description", "");
      r.finish();
      if (sc.id < 0) throw ValidationError(r.at("id"), "must be >= 0");
      if (!ids.insert(sc.id).second) throw ValidationError(r.at("id"), "duplicate service class id");
      cfg.service_classes.push_back(sc);
    }
    // ids double as dense indices into one-hot encodings
    for (std::size_t i = 0; i < cfg.service_classes.size(); ++i) {
      if (!ids.count(static_cast<ServiceClassId>(i))) {
        throw ValidationError("service_classes", "ids must be 0..C-1");
      }
    }
    std::sort(cfg.service_classes.begin(), cfg.service_classes.end(),
              [](const auto& a, const auto& b) { return a.id < b.id; });
  } else {
    cfg.service_classes = default_classes();
  }
  const auto class_known = [&](ServiceClassId id) {
    return id >= 0 && static_cast<std::size_t>(id) < cfg.service_classes.size();
  };

  // requests
  {
    ObjectReader r(child(top, "requests"), "requests");
    auto& q = cfg.requests;
    q.count = r.count("count", q.count);
    q.arrival_rate = r.number("arrival_rate", q.arrival_rate);
    q.complexity_mean = r.number("complexity_mean", q.complexity_mean);
    q.complexity_stddev = r.number("complexity_stddev", q.complexity_stddev);
    q.ddl = r.number("ddl", q.ddl);
    r.finish();
    if (q.count == 0) throw ValidationError(r.at("count"), "must be positive");
    if (!(q.arrival_rate > 0)) throw ValidationError(r.at("arrival_rate"), "arrival rate must be positive");
    if (!(q.complexity_mean > 0)) throw ValidationError(r.at("complexity_mean"), "must be positive");
    if (q.complexity_stddev < 0) throw ValidationError(r.at("complexity_stddev"), "must be >= 0");
    if (!(q.ddl > 0)) throw ValidationError(r.at("ddl"), "must be positive");
  }

  // window
  {
    ObjectReader r(child(top, "window"), "window");
    auto& w = cfg.window;
    w.length = r.integer("length", w.length);
    w.requests_per_window = r.count("requests_per_window", w.requests_per_window);
    w.initial_reputation = r.number("initial_reputation", w.initial_reputation);
    const auto mode = r.string("mode", "improved");
    r.finish();
    if (w.length < 1) throw ValidationError(r.at("length"), "window length must be >= 1");
    if (w.requests_per_window < 1) throw ValidationError(r.at("requests_per_window"), "must be >= 1");
    if (mode == "improved") w.mode = WindowMode::Improved;
    else if (mode == "standard") w.mode = WindowMode::Standard;
    else throw ValidationError(r.at("mode"), "expected 'improved' or 'standard'");
  }

  // trust weights
  {
    ObjectReader r(child(top, "trust"), "trust");
    auto& t = cfg.trust;
    t.omega = r.number("omega", t.omega);
    t.phi = r.number("phi", t.phi);
    t.psi = r.number("psi", t.psi);
    t.xi = r.number("xi", t.xi);
    t.zeta = r.number("zeta", t.zeta);
    t.delta = r.number("delta", t.delta);
    t.chi = r.number("chi", t.chi);
    t.threshold = r.number("threshold", t.threshold);
    if (r.has("harm_scores")) {
      const auto& h = r.raw("harm_scores");
      if (!h.is_array() || h.size() != kBehaviorLevels) {
        throw ValidationError(r.at("harm_scores"), "expected 4 numbers");
      }
      for (std::size_t i = 0; i < kBehaviorLevels; ++i) {
        if (!h[i].is_number()) throw ValidationError(r.at("harm_scores"), "expected 4 numbers");
        t.harm[i] = h[i].get<double>();
      }
    }
    r.finish();
    if (std::abs(t.omega + t.phi + t.psi - 1.0) > 1e-9) {
      throw ValidationError("trust", "reliability weights must sum to 1");
    }
    if (std::abs(t.xi + t.zeta + t.delta - 1.0) > 1e-9) {
      throw ValidationError("trust", "base reputation weights must sum to 1");
    }
    if (!(t.chi > 0)) throw ValidationError(r.at("chi"), "must be positive");
    if (!std::is_sorted(t.harm.begin(), t.harm.end())) {
      throw ValidationError(r.at("harm_scores"), "harm scores must be non-decreasing");
    }
  }

  // reward
  {
    ObjectReader r(child(top, "reward"), "reward");
    cfg.reward.theta = r.number("theta", cfg.reward.theta);
    cfg.reward.lambda = r.number("lambda", cfg.reward.lambda);
    cfg.reward.mu = r.number("mu", cfg.reward.mu);
    r.finish();
  }

  // dqn
  {
    ObjectReader r(child(top, "dqn"), "dqn");
    auto& d = cfg.dqn;
    d.replay_capacity = r.count("replay_capacity", d.replay_capacity);
    d.minibatch = r.count("minibatch", d.minibatch);
    d.learning_rate = r.number("learning_rate", d.learning_rate);
    d.gamma = r.number("gamma", d.gamma);
    d.epsilon_start = r.number("epsilon_start", d.epsilon_start);
    d.epsilon_decay = r.number("epsilon_decay", d.epsilon_decay);
    d.epsilon_floor = r.number("epsilon_floor", d.epsilon_floor);
    d.learn_every = r.count("learn_every", d.learn_every);
    d.target_sync = r.count("target_sync", d.target_sync);
    d.pretrain_episodes = r.count("pretrain_episodes", d.pretrain_episodes);
    if (r.has("hidden")) {
      const auto& h = r.raw("hidden");
      if (!h.is_array() || h.empty()) throw ValidationError(r.at("hidden"), "expected a non-empty array");
      d.hidden.clear();
      for (const auto& v : h) {
        if (!v.is_number_integer() || v.get<int>() < 1) {
          throw ValidationError(r.at("hidden"), "layer widths must be positive integers");
        }
        d.hidden.push_back(v.get<int>());
      }
    }
    r.finish();
    if (d.replay_capacity < 1) throw ValidationError(r.at("replay_capacity"), "must be >= 1");
    if (d.minibatch < 1 || d.minibatch > d.replay_capacity) {
      throw ValidationError(r.at("minibatch"), "must lie in [1, replay_capacity]");
    }
    if (d.gamma < 0 || d.gamma > 1) throw ValidationError(r.at("gamma"), "must lie in [0, 1]");
    if (d.learning_rate < 0) throw ValidationError(r.at("learning_rate"), "must be >= 0");
    if (d.epsilon_floor < 0 || d.epsilon_floor > d.epsilon_start || d.epsilon_start > 1) {
      throw ValidationError(r.at("epsilon_start"), "need 0 <= epsilon_floor <= epsilon_start <= 1");
    }
    if (d.epsilon_decay <= 0 || d.epsilon_decay > 1) {
      throw ValidationError(r.at("epsilon_decay"), "must lie in (0, 1]");
    }
    if (d.learn_every < 1) throw ValidationError(r.at("learn_every"), "must be >= 1");
    if (d.target_sync < 1) throw ValidationError(r.at("target_sync"), "must be >= 1");
  }

  // behavior model
  {
    ObjectReader r(child(top, "behavior"), "behavior");
    auto& b = cfg.behavior;
    b.trusted = r.distribution("trusted", b.trusted);
    b.benign = r.distribution("benign", b.benign);
    b.malicious = r.distribution("malicious", b.malicious);
    b.me = r.distribution("me", b.me);
    b.osa_stealth_severe = r.number("osa_stealth_severe", b.osa_stealth_severe);
    b.minor_delay_factor = r.number("minor_delay_factor", b.minor_delay_factor);
    b.moderate_failure_prob = r.number("moderate_failure_prob", b.moderate_failure_prob);
    r.finish();
    if (b.osa_stealth_severe < 0 || b.osa_stealth_severe > 1) {
      throw ValidationError(r.at("osa_stealth_severe"), "must lie in [0, 1]");
    }
    if (b.minor_delay_factor < 1) throw ValidationError(r.at("minor_delay_factor"), "must be >= 1");
    if (b.moderate_failure_prob < 0 || b.moderate_failure_prob > 1) {
      throw ValidationError(r.at("moderate_failure_prob"), "must lie in [0, 1]");
    }
  }

  // baselines
  {
    ObjectReader r(child(top, "baselines"), "baselines");
    cfg.baselines.psg_q = r.count("psg_q", cfg.baselines.psg_q);
    cfg.baselines.blor_warmup_passes = r.count("blor_warmup_passes", cfg.baselines.blor_warmup_passes);
    r.finish();
    if (cfg.baselines.psg_q < 1) throw ValidationError(r.at("psg_q"), "must be >= 1");
  }

  // oracles: explicit list, or a generated roster
  if (top.has("oracles")) {
    const auto& arr = top.raw("oracles");
    if (!arr.is_array() || arr.empty()) throw ValidationError("oracles", "expected a non-empty array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string path = "oracles[" + std::to_string(i) + "]";
      ObjectReader r(arr[i], path);
      OracleProfile o;
      o.oid = i;
      if (r.has("oid") && r.count("oid", i) != i) {
        throw ValidationError(r.at("oid"), "oids must equal the roster position");
      }
      o.cost = r.number("cost", o.cost);
      o.performance = r.number("performance", o.performance);
      o.service_class = r.integer("service_class", o.service_class);
      o.stake = r.number("stake", o.stake);
      o.behavior_class = behavior_class_from_string(r.string("behavior_class", "trusted"), r.at("behavior_class"));
      o.attack = read_attack(r.has("attack") ? r.raw("attack") : json(), r.at("attack"));
      r.finish();
      if (!(o.cost > 0)) throw ValidationError(r.at("cost"), "cost must be positive");
      if (!(o.performance > 0)) throw ValidationError(r.at("performance"), "performance must be positive");
      if (o.stake < 0) throw ValidationError(r.at("stake"), "stake must be >= 0");
      if (!class_known(o.service_class)) {
        throw ValidationError(r.at("service_class"), "unknown service class " + std::to_string(o.service_class));
      }
      cfg.oracles.push_back(o);
    }
    if (top.has("roster")) throw ValidationError("roster", "cannot be combined with an explicit oracle list");
  } else {
    ObjectReader r(child(top, "roster"), "roster");
    const auto per_class = r.count("per_class", 5);
    const auto malicious = r.count("malicious", 3);
    const auto benign = r.count("benign", 3);
    const auto seed = r.u64("seed", cfg.seed);
    r.finish();
    if (per_class < 1) throw ValidationError(r.at("per_class"), "must be >= 1");
    cfg.oracles = generate_roster(cfg.service_classes.size(), per_class, malicious, benign, seed);
  }

  top.finish();
  return cfg;
}

json to_json(const ScenarioConfig& cfg) {
  json j;
  j["seed"] = cfg.seed;
  j["noise"] = cfg.noise;
  j["enforce_threshold"] = cfg.enforce_threshold;

  j["service_classes"] = json::array();
  for (const auto& sc : cfg.service_classes) {
    j["service_classes"].push_back({{"id", sc.id}, {"description", sc.description}});
  }

  const auto& q = cfg.requests;
  j["requests"] = {{"count", q.count},
                   {"arrival_rate", q.arrival_rate},
                   {"complexity_mean", q.complexity_mean},
                   {"complexity_stddev", q.complexity_stddev},
                   {"ddl", q.ddl}};

  const auto& w = cfg.window;
  j["window"] = {{"length", w.length},
                 {"requests_per_window", w.requests_per_window},
                 {"initial_reputation", w.initial_reputation},
                 {"mode", w.mode == WindowMode::Improved ? "improved" : "standard"}};

  const auto& t = cfg.trust;
  j["trust"] = {{"omega", t.omega}, {"phi", t.phi},   {"psi", t.psi},
                {"xi", t.xi},       {"zeta", t.zeta}, {"delta", t.delta},
                {"chi", t.chi},     {"harm_scores", t.harm}, {"threshold", t.threshold}};

  j["reward"] = {{"theta", cfg.reward.theta}, {"lambda", cfg.reward.lambda}, {"mu", cfg.reward.mu}};

  const auto& d = cfg.dqn;
  j["dqn"] = {{"replay_capacity", d.replay_capacity},
              {"minibatch", d.minibatch},
              {"learning_rate", d.learning_rate},
              {"gamma", d.gamma},
              {"epsilon_start", d.epsilon_start},
              {"epsilon_decay", d.epsilon_decay},
              {"epsilon_floor", d.epsilon_floor},
              {"learn_every", d.learn_every},
              {"target_sync", d.target_sync},
              {"hidden", d.hidden},
              {"pretrain_episodes", d.pretrain_episodes}};

  const auto& b = cfg.behavior;
  j["behavior"] = {{"trusted", b.trusted},
                   {"benign", b.benign},
                   {"malicious", b.malicious},
                   {"me", b.me},
                   {"osa_stealth_severe", b.osa_stealth_severe},
                   {"minor_delay_factor", b.minor_delay_factor},
                   {"moderate_failure_prob", b.moderate_failure_prob}};

  j["baselines"] = {{"psg_q", cfg.baselines.psg_q},
                    {"blor_warmup_passes", cfg.baselines.blor_warmup_passes}};

  j["oracles"] = json::array();
  for (const auto& o : cfg.oracles) {
    j["oracles"].push_back({{"oid", o.oid},
                            {"cost", o.cost},
                            {"performance", o.performance},
                            {"service_class", o.service_class},
                            {"stake", o.stake},
                            {"behavior_class", to_string(o.behavior_class)},
                            {"attack", attack_to_json(o.attack)}});
  }
  return j;
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open scenario file " + path.string());
  json raw;
  try {
    in >> raw;
  } catch (const json::parse_error& e) {
    throw Error("scenario file " + path.string() + " is not valid JSON: " + e.what());
  }
  return validate_scenario(raw);
}

void save_scenario(const ScenarioConfig& cfg, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write scenario file " + path.string());
  out << to_json(cfg).dump(2) << '\n';
}

}  // namespace tcodrl
