#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "tcodrl/domain.hpp"
#include "tcodrl/env.hpp"

namespace tcodrl {

/// Figure-level statistics of one run. Class arrays are indexed by BehaviorClass.
struct RunReport {
  std::string agent;
  std::uint64_t requests = 0;
  double match_rate = 0;
  std::array<std::uint64_t, 3> class_counts{};
  std::array<double, 3> class_fractions{};
  double average_cost = 0;
  double average_response_time = 0;  // finish - arrival
  double success_rate = 0;
  std::uint64_t redirected = 0;
  Eigen::MatrixXd reputation_trace;  // windows x oracles
  Eigen::MatrixXd selection_counts;  // windows x oracles
  std::vector<double> convergence;   // cumulative reward after each step

  std::uint64_t count(BehaviorClass c) const { return class_counts[static_cast<std::size_t>(c)]; }
  double fraction(BehaviorClass c) const { return class_fractions[static_cast<std::size_t>(c)]; }
  /// Per-window share of requests served by each oracle.
  Eigen::MatrixXd selection_probability() const;

  bool operator==(const RunReport& o) const;
};

/// Pure aggregation of a complete service log. Throws Error on an empty log.
RunReport aggregate(std::span<const ServiceRecord> records, std::span<const OracleProfile> roster,
                    const Eigen::MatrixXd& reputation_trace, std::string agent = {});

/// Writes summary.json, reputation.csv, selection.csv and convergence.csv.
void export_report(const RunReport& report, const std::filesystem::path& dir);
RunReport import_report(const std::filesystem::path& dir);

/// Writes a matrix as CSV with a leading 1-based `window` column and one
/// column per oracle (o0, o1, ...).
void write_window_matrix_csv(const std::filesystem::path& file, const Eigen::MatrixXd& m);
Eigen::MatrixXd read_window_matrix_csv(const std::filesystem::path& file);

}  // namespace tcodrl
