#include "tcodrl/trust.hpp"

#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "tcodrl/csv.hpp"

namespace tcodrl {

const OracleWindowStats& WindowStats::at(OracleId j) const {
  if (j >= oracles.size()) throw std::out_of_range("unknown oracle id " + std::to_string(j));
  return oracles[j];
}

void WindowStats::record(OracleId j, double response_time, bool success, BehaviorLevel behavior) {
  if (j >= oracles.size()) throw std::out_of_range("unknown oracle id " + std::to_string(j));
  auto& s = oracles[j];
  ++s.responses;
  if (success) ++s.successes;
  s.total_response_time += response_time;
  ++s.behavior[static_cast<std::size_t>(behavior)];
}

void WindowStats::reset() {
  for (auto& s : oracles) {
    const double stake = s.stake;
    s = OracleWindowStats{};
    s.stake = stake;
  }
}

double relative_response_frequency(const WindowStats& stats, OracleId j) {
  const auto& mine = stats.at(j);
  std::uint64_t total = 0;
  for (const auto& s : stats.oracles) total += s.responses;
  if (total == 0) return 0.0;
  return static_cast<double>(mine.responses) * static_cast<double>(stats.size()) /
         static_cast<double>(total);
}

int request_success(double response_time, double ddl, bool verified) noexcept {
  return (response_time <= ddl && verified) ? 1 : 0;
}

double success_rate(const WindowStats& stats, OracleId j) {
  const auto& s = stats.at(j);
  if (s.responses == 0) return 0.0;
  return static_cast<double>(s.successes) / static_cast<double>(s.responses);
}

double average_response_time(const WindowStats& stats, OracleId j, double ddl) {
  const auto& s = stats.at(j);
  if (s.responses == 0) return ddl;
  return s.total_response_time / static_cast<double>(s.responses);
}

double reliability_score(double orf, double osr, double ort, double ddl, const TrustWeights& w) {
  if (!(ort > 0.0)) throw Error("average response time must be positive");
  return w.omega * orf + w.phi * osr + w.psi * (ddl / ort);
}

double behavior_score(const BehaviorCounts& counts, const TrustWeights& w) noexcept {
  double score = 0.0;
  for (std::size_t i = 0; i < kBehaviorLevels; ++i) {
    score += w.harm[i] * static_cast<double>(counts[i]);
  }
  return score;
}

double token_score(std::span<const double> stakes, OracleId j) {
  if (j >= stakes.size()) throw std::out_of_range("unknown oracle id " + std::to_string(j));
  const double total = std::accumulate(stakes.begin(), stakes.end(), 0.0);
  if (total <= 0.0) return 0.0;
  return stakes[j] * static_cast<double>(stakes.size()) / total;
}

double base_reputation(double reliability, double behavior, double token, const TrustWeights& w) noexcept {
  return w.xi * reliability - w.zeta * behavior + w.delta * token;
}

double time_factor(int age, double chi) {
  if (age < 1) throw Error("time factor age must be >= 1");
  return std::tanh(chi / static_cast<double>(age));
}

bool is_trusted(double reputation, double threshold) noexcept { return reputation >= threshold; }

ReputationWindow::ReputationWindow(int length, WindowMode mode)
    : length_(length), mode_(mode), ring_(static_cast<std::size_t>(std::max(length, 1)), 0.0) {
  if (length < 1) throw Error("window length must be >= 1");
}

double ReputationWindow::back(int age) const {
  const std::size_t n = ring_.size();
  return ring_[(head_ + n - static_cast<std::size_t>(age)) % n];
}

double ReputationWindow::close(double base, double chi) {
  ++index_;
  double r = time_factor(1, chi) * base;
  const int history = std::min(static_cast<int>(filled_), length_ - 1);
  for (int a = 2; a <= history + 1; ++a) {
    r += time_factor(a, chi) * back(a - 1);
  }
  ring_[head_] = mode_ == WindowMode::Improved ? r : base;
  head_ = (head_ + 1) % ring_.size();
  filled_ = std::min(filled_ + 1, ring_.size());
  return r;
}

std::vector<double> ReputationWindow::stored() const {
  std::vector<double> out;
  for (int age = static_cast<int>(filled_); age >= 1; --age) out.push_back(back(age));
  return out;
}

TrustEngine::TrustEngine(const TrustWeights& weights, const WindowPolicy& policy, double ddl,
                         std::vector<double> stakes)
    : weights_(weights),
      ddl_(ddl),
      stakes_(std::move(stakes)),
      stats_(stakes_.size()),
      windows_(stakes_.size(), ReputationWindow(policy.length, policy.mode)),
      reputations_(stakes_.size(), policy.initial_reputation) {
  for (std::size_t j = 0; j < stakes_.size(); ++j) stats_.oracles[j].stake = stakes_[j];
}

void TrustEngine::record(OracleId j, double service_time, bool success, BehaviorLevel behavior) {
  stats_.record(j, service_time, success, behavior);
}

std::vector<TrustTraceRow> TrustEngine::close_window() {
  ++closed_;
  std::vector<double> snapshot(stats_.size());
  for (std::size_t j = 0; j < stats_.size(); ++j) snapshot[j] = stats_.oracles[j].stake;

  std::vector<TrustTraceRow> rows;
  rows.reserve(stats_.size());
  for (OracleId j = 0; j < stats_.size(); ++j) {
    TrustTraceRow row;
    row.window = closed_;
    row.oid = j;
    row.responses = stats_.oracles[j].responses;
    row.orf = relative_response_frequency(stats_, j);
    row.osr = success_rate(stats_, j);
    row.ort = average_response_time(stats_, j, ddl_);
    row.reliability = reliability_score(row.orf, row.osr, row.ort, ddl_, weights_);
    row.behavior = behavior_score(stats_.oracles[j].behavior, weights_);
    row.token = token_score(snapshot, j);
    row.base = base_reputation(row.reliability, row.behavior, row.token, weights_);
    row.reputation = windows_[j].close(row.base, weights_.chi);
    reputations_[j] = row.reputation;
    rows.push_back(row);
  }
  stats_.reset();
  return rows;
}

void write_trust_trace_csv(std::ostream& out, std::span<const TrustTraceRow> rows) {
  out << "window,oid,responses,orf,osr,ort,reliability,behavior,token,base,reputation\n";
  for (const auto& r : rows) {
    out << r.window << ',' << r.oid << ',' << r.responses << ',' << csv::format(r.orf) << ','
        << csv::format(r.osr) << ',' << csv::format(r.ort) << ',' << csv::format(r.reliability) << ','
        << csv::format(r.behavior) << ',' << csv::format(r.token) << ',' << csv::format(r.base) << ','
        << csv::format(r.reputation) << '\n';
  }
}

Eigen::MatrixXd filter_reputations(const Eigen::MatrixXd& bases, int length, double chi, WindowMode mode) {
  Eigen::MatrixXd out(bases.rows(), bases.cols());
  for (Eigen::Index j = 0; j < bases.cols(); ++j) {
    ReputationWindow w(length, mode);
    for (Eigen::Index k = 0; k < bases.rows(); ++k) out(k, j) = w.close(bases(k, j), chi);
  }
  return out;
}

}  // namespace tcodrl
