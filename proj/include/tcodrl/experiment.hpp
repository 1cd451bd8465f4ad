#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "tcodrl/agents.hpp"
#include "tcodrl/domain.hpp"
#include "tcodrl/env.hpp"
#include "tcodrl/metrics.hpp"

namespace tcodrl {

/// `TcoDrl` pretrains on independent request streams and is evaluated frozen;
/// `TcoDrlOnline` learns from scratch during the evaluated episode.
enum class AgentKind { TcoDrl, TcoDrlOnline, RoundRobin, Blor, Psg };

std::string to_string(AgentKind k);
/// Accepts tco-drl, tco-drl-online, round-robin, blor, psg and all.
std::vector<AgentKind> parse_agents(const std::string& name);

struct EpisodeResult {
  std::vector<ServiceRecord> records;
  std::vector<TrustTraceRow> trust;
  RunReport report;
};

EpisodeResult run_episode(const ScenarioConfig& cfg, std::uint64_t seed, Selector& selector);

std::unique_ptr<DqnAgent> make_dqn(const ScenarioConfig& cfg, std::uint64_t seed);

/// Trains `agent` online over `episodes` request streams that are independent
/// of the evaluation stream for `seed`. Returns the per-episode mean reward.
std::vector<double> train_dqn(DqnAgent& agent, const ScenarioConfig& cfg, std::uint64_t seed,
                              std::size_t episodes);

/// One evaluated episode of `kind` on `cfg` with request stream `seed`.
EpisodeResult run_agent(const ScenarioConfig& cfg, AgentKind kind, std::uint64_t seed);

/// Writes the report files plus records.csv and trust.csv into `dir`.
void export_episode(const EpisodeResult& r, const ScenarioConfig& cfg, const std::filesystem::path& dir);

// --- sweeps ----------------------------------------------------------------

struct SweepPoint {
  double x = 0;  // noise fraction or malicious count
  AgentKind agent = AgentKind::RoundRobin;
  RunReport report;
};

/// Repeats `run_agent` for every grid point and agent. Independent points run on
/// up to `jobs` threads; results come back in grid-major, agent-minor order.
std::vector<SweepPoint> sweep_noise(const ScenarioConfig& cfg, std::uint64_t seed, const std::vector<double>& grid,
                                    const std::vector<AgentKind>& agents, unsigned jobs = 1);

/// Roster with `count` malicious oracles: converts benign/trusted oracles in a
/// seeded random order until the malicious count is reached.
ScenarioConfig with_malicious(const ScenarioConfig& cfg, std::size_t count, std::uint64_t seed);

std::vector<SweepPoint> sweep_malicious(const ScenarioConfig& cfg, std::uint64_t seed,
                                        const std::vector<std::size_t>& counts,
                                        const std::vector<AgentKind>& agents, unsigned jobs = 1);

void write_sweep_csv(const std::filesystem::path& file, const std::string& x_name,
                     const std::vector<SweepPoint>& points);

// --- attacks ---------------------------------------------------------------

enum class AttackKind { Me, Ooa, Osa };
std::string to_string(AttackKind k);
std::vector<AttackKind> parse_attacks(const std::string& name);

/// Scenario copy where `attacker` runs attack `kind` (keeping parameters already
/// configured for that kind) and threshold enforcement is on.
ScenarioConfig with_attack(const ScenarioConfig& cfg, AttackKind kind, OracleId attacker,
                           WindowMode mode = WindowMode::Improved);

/// First oracle carrying an attack policy, else the last oracle.
OracleId default_attacker(const ScenarioConfig& cfg);

/// First window of the attack phase, per the attacker's policy.
int attack_window(const OracleProfile& attacker);

/// Windows after `burst_window` until reputation first climbs back to the
/// threshold; `horizon - burst_window + 1` when it never does within the trace.
int recovery_windows(const Eigen::MatrixXd& reputation, OracleId oid, int burst_window, double threshold);

// --- window-length table ---------------------------------------------------

struct WindowTable {
  std::vector<int> lengths;
  Eigen::MatrixXd final_reputation;  // lengths x oracles, after `windows` closes
  Eigen::MatrixXd bases;             // windows x oracles, shared by every length
};

/// Runs the scenario with Round-Robin dispatch for `windows` windows, then
/// replays the identical base-reputation sequence through windows of length 1..max_length.
WindowTable window_table(const ScenarioConfig& cfg, std::uint64_t seed, int max_length = 10, int windows = 100);

/// R after `windows` closes of a constant unit base with window length `length`.
double unit_base_reputation(int length, double chi, int windows);

}  // namespace tcodrl
