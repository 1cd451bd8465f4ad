#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace tcodrl {

using OracleId = std::size_t;
using ServiceClassId = int;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Scenario validation failure; the message starts with the offending field path.
class ValidationError : public Error {
 public:
  ValidationError(std::string path, const std::string& what)
      : Error(path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

enum class BehaviorClass { Trusted, Benign, Malicious };

/// Harm levels, ordered from harmless to most harmful.
enum class BehaviorLevel : int { Safe = 0, MinorHarm = 1, ModerateHarm = 2, SevereHarm = 3 };
inline constexpr std::size_t kBehaviorLevels = 4;

/// Probability mass over the four harm levels, indexed by BehaviorLevel.
using BehaviorDistribution = std::array<double, kBehaviorLevels>;

std::string to_string(BehaviorClass c);
std::string to_string(BehaviorLevel b);
BehaviorClass behavior_class_from_string(const std::string& s, const std::string& path);

struct ServiceClass {
  ServiceClassId id = 0;
  std::string description;
  bool operator==(const ServiceClass&) const = default;
};

struct DataRequest {
  std::uint64_t rid = 0;
  double arrival_ts = 0.0;  // seconds
  double ddl = 0.0;         // relative deadline, seconds
  double complexity = 0.0;  // work units
  ServiceClassId service_class = 0;
  bool operator==(const DataRequest&) const = default;
};

// Attack policies. Windows are 1-based, counted from the start of the run.

struct NoAttack {
  bool operator==(const NoAttack&) const = default;
};

/// Malicious-with-everyone: harmful towards every requester from `start_window` on.
/// `duration` is the number of attack windows; 0 means the attack never stops.
struct MeAttack {
  int start_window = 3;
  int duration = 0;
  bool operator==(const MeAttack&) const = default;
};

/// On-off: honest for `on_windows`, malicious for `off_windows`, repeated
/// `cycles` times (0 repeats forever). Honest afterwards.
struct OnOffAttack {
  int on_windows = 2;
  int off_windows = 1;
  int cycles = 1;
  bool operator==(const OnOffAttack&) const = default;
};

/// Opportunistic service: from `start_window` on, behaves well only while its
/// reputation is within `trigger_margin` of the trust threshold.
struct OpportunisticAttack {
  int start_window = 3;
  double trigger_margin = 0.5;
  bool operator==(const OpportunisticAttack&) const = default;
};

using AttackPolicy = std::variant<NoAttack, MeAttack, OnOffAttack, OpportunisticAttack>;

std::string attack_name(const AttackPolicy& p);

struct OracleProfile {
  OracleId oid = 0;
  double cost = 0.5;           // currency units per request
  double performance = 1000.;  // work units per second
  ServiceClassId service_class = 0;
  double stake = 100.0;  // tokens
  BehaviorClass behavior_class = BehaviorClass::Trusted;
  AttackPolicy attack = NoAttack{};
  bool operator==(const OracleProfile&) const = default;
};

struct RequestModel {
  std::size_t count = 6000;
  double arrival_rate = 2.0;  // requests per second
  double complexity_mean = 6000.0;
  double complexity_stddev = 500.0;
  double ddl = 10.0;
  bool operator==(const RequestModel&) const = default;
};

enum class WindowMode { Improved, Standard };

struct WindowPolicy {
  int length = 5;
  std::size_t requests_per_window = 120;
  double initial_reputation = 0.5;
  WindowMode mode = WindowMode::Improved;
  bool operator==(const WindowPolicy&) const = default;
};

/// Weights of the reputation model: reliability (omega, phi, psi), base
/// reputation (xi, zeta, delta), time factor (chi), harm scores and threshold.
struct TrustWeights {
  double omega = 0.2;
  double phi = 0.4;
  double psi = 0.4;
  double xi = 0.4;
  double zeta = 0.4;
  double delta = 0.2;
  double chi = 0.6;
  std::array<double, kBehaviorLevels> harm{0.0, 1.0, 5.0, 100.0};
  double threshold = -1.5;
  bool operator==(const TrustWeights&) const = default;
};

struct RewardWeights {
  double theta = 2.5;
  double lambda = 1.5;
  double mu = 4.0;
  bool operator==(const RewardWeights&) const = default;
};

struct DqnParams {
  std::size_t replay_capacity = 800;
  std::size_t minibatch = 30;
  double learning_rate = 0.01;
  double gamma = 0.9;
  double epsilon_start = 1.0;
  double epsilon_decay = 0.995;
  double epsilon_floor = 0.01;
  std::size_t learn_every = 4;    // f
  std::size_t target_sync = 100;  // eta, in learn-steps
  std::vector<int> hidden{64, 64};
  std::size_t pretrain_episodes = 8;
  bool operator==(const DqnParams&) const = default;
};

struct BehaviorModel {
  BehaviorDistribution trusted{0.95, 0.05, 0.0, 0.0};
  BehaviorDistribution benign{0.85, 0.12, 0.03, 0.0};
  BehaviorDistribution malicious{0.55, 0.20, 0.15, 0.10};
  BehaviorDistribution me{0.10, 0.20, 0.30, 0.40};
  double osa_stealth_severe = 0.02;
  double minor_delay_factor = 1.5;
  double moderate_failure_prob = 0.7;
  bool operator==(const BehaviorModel&) const = default;
};

struct BaselineParams {
  std::size_t psg_q = 3;
  std::size_t blor_warmup_passes = 1;
  bool operator==(const BaselineParams&) const = default;
};

struct ScenarioConfig {
  std::vector<ServiceClass> service_classes;
  std::vector<OracleProfile> oracles;
  RequestModel requests;
  WindowPolicy window;
  TrustWeights trust;
  RewardWeights reward;
  DqnParams dqn;
  BehaviorModel behavior;
  BaselineParams baselines;
  double noise = 0.0;
  bool enforce_threshold = false;
  std::uint64_t seed = 42;

  std::size_t oracle_count() const noexcept { return oracles.size(); }
  std::size_t class_count() const noexcept { return service_classes.size(); }
  bool operator==(const ScenarioConfig&) const = default;
};

/// Roster used when a scenario document carries no explicit oracle list:
/// `per_class` oracles for each service class, `malicious` and `benign` of them
/// spread over the classes, the rest trusted. Costs ~ U(0.1, 1.0) with trusted
/// oracles drawn from the upper half; performance ~ N(1000, 150) clipped at 200.
std::vector<OracleProfile> generate_roster(std::size_t classes, std::size_t per_class,
                                           std::size_t malicious, std::size_t benign,
                                           std::uint64_t seed);

ScenarioConfig validate_scenario(const nlohmann::json& raw);
nlohmann::json to_json(const ScenarioConfig& cfg);

ScenarioConfig load_scenario(const std::filesystem::path& path);
void save_scenario(const ScenarioConfig& cfg, const std::filesystem::path& path);

/// SplitMix64 finalizer; used to derive independent RNG streams from one seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

}  // namespace tcodrl
