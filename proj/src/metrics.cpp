#include "tcodrl/metrics.hpp"

#include <fstream>

#include <json.hpp>

#include "tcodrl/csv.hpp"

namespace tcodrl {

using nlohmann::json;

namespace {

bool same_matrix(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() && a == b;
}

std::ofstream open_out(const std::filesystem::path& file) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw Error("cannot write " + file.string());
  return out;
}

std::ifstream open_in(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error("cannot read " + file.string());
  return in;
}

constexpr std::array<BehaviorClass, 3> kClasses{BehaviorClass::Trusted, BehaviorClass::Benign,
                                                BehaviorClass::Malicious};

}  // namespace

Eigen::MatrixXd RunReport::selection_probability() const {
  Eigen::MatrixXd p = selection_counts;
  for (Eigen::Index k = 0; k < p.rows(); ++k) {
    const double total = p.row(k).sum();
    if (total > 0) p.row(k) /= total;
  }
  return p;
}

bool RunReport::operator==(const RunReport& o) const {
  return agent == o.agent && requests == o.requests && match_rate == o.match_rate &&
         class_counts == o.class_counts && class_fractions == o.class_fractions &&
         average_cost == o.average_cost && average_response_time == o.average_response_time &&
         success_rate == o.success_rate && redirected == o.redirected &&
         same_matrix(reputation_trace, o.reputation_trace) && same_matrix(selection_counts, o.selection_counts) &&
         convergence == o.convergence;
}

RunReport aggregate(std::span<const ServiceRecord> records, std::span<const OracleProfile> roster,
                    const Eigen::MatrixXd& reputation_trace, std::string agent) {
  if (records.empty()) throw Error("cannot aggregate an empty service log");
  RunReport r;
  r.agent = std::move(agent);
  r.requests = records.size();
  r.reputation_trace = reputation_trace;

  int windows = static_cast<int>(reputation_trace.rows());
  for (const auto& rec : records) windows = std::max(windows, rec.window);
  r.selection_counts = Eigen::MatrixXd::Zero(windows, static_cast<Eigen::Index>(roster.size()));

  std::uint64_t matched = 0;
  std::uint64_t successes = 0;
  double cost = 0;
  double response = 0;
  double cumulative = 0;
  r.convergence.reserve(records.size());
  for (const auto& rec : records) {
    if (rec.oid >= roster.size()) throw Error("service record names unknown oracle " + std::to_string(rec.oid));
    matched += rec.service_matched;
    successes += rec.success;
    r.redirected += rec.redirected;
    cost += rec.cost;
    response += rec.response_time;
    ++r.class_counts[static_cast<std::size_t>(roster[rec.oid].behavior_class)];
    r.selection_counts(rec.window - 1, static_cast<Eigen::Index>(rec.oid)) += 1.0;
    cumulative += rec.reward;
    r.convergence.push_back(cumulative);
  }
  const double n = static_cast<double>(records.size());
  r.match_rate = static_cast<double>(matched) / n;
  r.success_rate = static_cast<double>(successes) / n;
  r.average_cost = cost / n;
  r.average_response_time = response / n;
  for (std::size_t c = 0; c < 3; ++c) r.class_fractions[c] = static_cast<double>(r.class_counts[c]) / n;
  return r;
}

void write_window_matrix_csv(const std::filesystem::path& file, const Eigen::MatrixXd& m) {
  auto out = open_out(file);
  out << "window";
  for (Eigen::Index j = 0; j < m.cols(); ++j) out << ",o" << j;
  out << '\n';
  for (Eigen::Index k = 0; k < m.rows(); ++k) {
    out << (k + 1);
    for (Eigen::Index j = 0; j < m.cols(); ++j) out << ',' << csv::format(m(k, j));
    out << '\n';
  }
}

Eigen::MatrixXd read_window_matrix_csv(const std::filesystem::path& file) {
  auto in = open_in(file);
  std::string line;
  if (!std::getline(in, line)) throw Error(file.string() + ": missing header");
  const auto cols = static_cast<Eigen::Index>(csv::split(line).size()) - 1;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = csv::split(line);
    if (static_cast<Eigen::Index>(cells.size()) != cols + 1) throw Error(file.string() + ": ragged row");
    std::vector<double> row;
    for (std::size_t i = 1; i < cells.size(); ++i) row.push_back(csv::parse_double(cells[i]));
    rows.push_back(std::move(row));
  }
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), cols);
  for (std::size_t k = 0; k < rows.size(); ++k) {
    for (Eigen::Index j = 0; j < cols; ++j) m(static_cast<Eigen::Index>(k), j) = rows[k][static_cast<std::size_t>(j)];
  }
  return m;
}

void export_report(const RunReport& r, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error("cannot create " + dir.string() + ": " + ec.message());

  json s;
  s["agent"] = r.agent;
  s["requests"] = r.requests;
  s["match_rate"] = r.match_rate;
  s["success_rate"] = r.success_rate;
  s["average_cost"] = r.average_cost;
  s["average_response_time"] = r.average_response_time;
  s["redirected"] = r.redirected;
  for (auto c : kClasses) {
    const auto i = static_cast<std::size_t>(c);
    s["assignments"][to_string(c)] = {{"count", r.class_counts[i]}, {"fraction", r.class_fractions[i]}};
  }
  s["windows"] = r.reputation_trace.rows();
  s["oracles"] = r.reputation_trace.cols();
  {
    auto out = open_out(dir / "summary.json");
    out << s.dump(2) << '\n';
  }
  write_window_matrix_csv(dir / "reputation.csv", r.reputation_trace);
  write_window_matrix_csv(dir / "selection.csv", r.selection_counts);
  {
    auto out = open_out(dir / "convergence.csv");
    out << "step,cumulative_reward\n";
    for (std::size_t i = 0; i < r.convergence.size(); ++i) {
      out << (i + 1) << ',' << csv::format(r.convergence[i]) << '\n';
    }
  }
}

RunReport import_report(const std::filesystem::path& dir) {
  RunReport r;
  json s;
  {
    auto in = open_in(dir / "summary.json");
    try {
      in >> s;
    } catch (const json::exception& e) {
      throw Error((dir / "summary.json").string() + ": " + e.what());
    }
  }
  try {
    r.agent = s.at("agent").get<std::string>();
    r.requests = s.at("requests").get<std::uint64_t>();
    r.match_rate = s.at("match_rate").get<double>();
    r.success_rate = s.at("success_rate").get<double>();
    r.average_cost = s.at("average_cost").get<double>();
    r.average_response_time = s.at("average_response_time").get<double>();
    r.redirected = s.at("redirected").get<std::uint64_t>();
    for (auto c : kClasses) {
      const auto i = static_cast<std::size_t>(c);
      const auto& a = s.at("assignments").at(to_string(c));
      r.class_counts[i] = a.at("count").get<std::uint64_t>();
      r.class_fractions[i] = a.at("fraction").get<double>();
    }
  } catch (const json::exception& e) {
    throw Error((dir / "summary.json").string() + ": " + e.what());
  }
  r.reputation_trace = read_window_matrix_csv(dir / "reputation.csv");
  r.selection_counts = read_window_matrix_csv(dir / "selection.csv");
  auto in = open_in(dir / "convergence.csv");
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = csv::split(line);
    if (cells.size() != 2) throw Error((dir / "convergence.csv").string() + ": malformed row");
    r.convergence.push_back(csv::parse_double(cells[1]));
  }
  return r;
}

}  // namespace tcodrl
