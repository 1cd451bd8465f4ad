#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "tcodrl/domain.hpp"

namespace tcodrl {

using BehaviorCounts = std::array<std::uint64_t, kBehaviorLevels>;

/// Activity of one oracle inside the current window.
struct OracleWindowStats {
  std::uint64_t responses = 0;
  std::uint64_t successes = 0;
  double total_response_time = 0.0;  // sum of (finish - start), seconds
  BehaviorCounts behavior{};
  double stake = 0.0;
};

/// Per-oracle accumulators for one reputation window.
struct WindowStats {
  std::vector<OracleWindowStats> oracles;

  WindowStats() = default;
  explicit WindowStats(std::size_t oracle_count) : oracles(oracle_count) {}

  std::size_t size() const noexcept { return oracles.size(); }
  const OracleWindowStats& at(OracleId j) const;

  void record(OracleId j, double response_time, bool success, BehaviorLevel behavior);
  void reset();
};

// Scoring functions. All throw std::out_of_range for an unknown oracle id.

double relative_response_frequency(const WindowStats& stats, OracleId j);
int request_success(double response_time, double ddl, bool verified) noexcept;
double success_rate(const WindowStats& stats, OracleId j);
/// Mean service time of oracle j; `ddl` when it served nothing this window.
double average_response_time(const WindowStats& stats, OracleId j, double ddl);
/// Throws Error when `ort` is not positive.
double reliability_score(double orf, double osr, double ort, double ddl, const TrustWeights& w);
double behavior_score(const BehaviorCounts& counts, const TrustWeights& w) noexcept;
double token_score(std::span<const double> stakes, OracleId j);
double base_reputation(double reliability, double behavior, double token, const TrustWeights& w) noexcept;
/// tanh(chi / age); throws Error for age < 1.
double time_factor(int age, double chi);
bool is_trusted(double reputation, double threshold) noexcept;

/// Fixed-length history of per-window values for one oracle.
///
/// Improved mode stores the composite reputation R_k of every closed window, so
/// the newest base value is blended with past composites:
///   R_k = tanh(chi) * base_k + sum_{a=2..min(k,W)} tanh(chi/a) * R_{k-a+1}.
/// Standard mode stores the independent base values instead:
///   R_k = sum_{a=1..min(k,W)} tanh(chi/a) * base_{k-a+1}.
class ReputationWindow {
 public:
  explicit ReputationWindow(int length, WindowMode mode = WindowMode::Improved);

  /// Closes window k = index() + 1 and returns its final reputation.
  double close(double base, double chi);

  int length() const noexcept { return length_; }
  int index() const noexcept { return index_; }
  WindowMode mode() const noexcept { return mode_; }
  /// Stored values, oldest first. At most length() entries.
  std::vector<double> stored() const;

 private:
  // newest-relative access: back(1) is the latest stored value
  double back(int age) const;

  int length_;
  WindowMode mode_;
  int index_ = 0;
  std::vector<double> ring_;
  std::size_t head_ = 0;  // slot of the next write
  std::size_t filled_ = 0;
};

/// Every sub-score produced for one oracle at one window close.
struct TrustTraceRow {
  int window = 0;
  OracleId oid = 0;
  std::uint64_t responses = 0;
  double orf = 0;
  double osr = 0;
  double ort = 0;
  double reliability = 0;
  double behavior = 0;
  double token = 0;
  double base = 0;
  double reputation = 0;
};

/// Single-owner reputation state machine for one simulation run.
class TrustEngine {
 public:
  TrustEngine(const TrustWeights& weights, const WindowPolicy& policy, double ddl,
              std::vector<double> stakes);

  void record(OracleId j, double service_time, bool success, BehaviorLevel behavior);

  /// Scores the current window, updates every oracle's reputation exactly once
  /// and starts a new window.
  std::vector<TrustTraceRow> close_window();

  double reputation(OracleId j) const { return reputations_.at(j); }
  const std::vector<double>& reputations() const noexcept { return reputations_; }
  bool trusted(OracleId j) const { return is_trusted(reputation(j), weights_.threshold); }

  /// Number of windows closed so far.
  int closed_windows() const noexcept { return closed_; }
  /// 1-based index of the window currently accumulating.
  int current_window() const noexcept { return closed_ + 1; }

  const WindowStats& stats() const noexcept { return stats_; }
  const TrustWeights& weights() const noexcept { return weights_; }
  std::size_t size() const noexcept { return reputations_.size(); }

 private:
  TrustWeights weights_;
  double ddl_;
  std::vector<double> stakes_;
  WindowStats stats_;
  std::vector<ReputationWindow> windows_;
  std::vector<double> reputations_;
  int closed_ = 0;
};

/// Reputation trace CSV: header then one row per (window, oracle).
void write_trust_trace_csv(std::ostream& out, std::span<const TrustTraceRow> rows);

/// Reputation of every oracle after `windows` closes of a fixed base sequence
/// (rows: windows, cols: oracles). Used by the window-length experiment.
Eigen::MatrixXd filter_reputations(const Eigen::MatrixXd& bases, int length, double chi,
                                   WindowMode mode = WindowMode::Improved);

}  // namespace tcodrl
