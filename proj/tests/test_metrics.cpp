#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "tcodrl/csv.hpp"
#include "tcodrl/experiment.hpp"
#include "tcodrl/metrics.hpp"

using namespace tcodrl;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("tcodrl_metrics_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

RunReport round_robin_report(std::uint64_t seed) {
  const auto cfg = validate_scenario(nlohmann::json::object());
  RoundRobinSelector rr;
  return run_episode(cfg, seed, rr).report;
}

}  // namespace

TEST_CASE("aggregation by hand") {
  std::vector<OracleProfile> roster(3);
  roster[1].behavior_class = BehaviorClass::Benign;
  roster[2].behavior_class = BehaviorClass::Malicious;
  std::vector<ServiceRecord> log(4);
  const double cost[] = {0.2, 0.4, 0.6, 0.8};
  const OracleId oid[] = {0, 2, 2, 1};
  for (std::size_t i = 0; i < 4; ++i) {
    log[i].oid = oid[i];
    log[i].cost = cost[i];
    log[i].response_time = 6.0 + static_cast<double>(i);
    log[i].service_matched = true;
    log[i].success = i != 1;
    log[i].window = i < 2 ? 1 : 2;
    log[i].reward = 1.0;
  }
  const Eigen::MatrixXd rep = Eigen::MatrixXd::Zero(2, 3);
  const auto r = aggregate(log, roster, rep, "x");
  CHECK(r.match_rate == 1.0);
  CHECK(r.average_cost == doctest::Approx(0.5));
  CHECK(r.average_response_time == doctest::Approx(7.5));
  CHECK(r.success_rate == doctest::Approx(0.75));
  CHECK(r.count(BehaviorClass::Malicious) == 2);
  CHECK(r.fraction(BehaviorClass::Trusted) == doctest::Approx(0.25));
  CHECK(r.selection_counts(0, 0) == 1);
  CHECK(r.selection_counts(0, 2) == 1);
  CHECK(r.selection_counts(1, 2) == 1);
  CHECK(r.selection_probability()(1, 1) == doctest::Approx(0.5));
  CHECK(r.convergence == std::vector<double>{1, 2, 3, 4});

  log[3].service_matched = false;
  CHECK(aggregate(log, roster, rep).match_rate == doctest::Approx(0.75));
  CHECK_THROWS_AS(aggregate(std::vector<ServiceRecord>{}, roster, rep), Error);
}

TEST_CASE("round robin gives malicious oracles their head-count share") {
  const auto r = round_robin_report(3);
  CHECK(r.fraction(BehaviorClass::Malicious) == doctest::Approx(0.2).epsilon(0.05));
  CHECK(std::abs(r.match_rate - 1.0 / 3.0) < 0.03);
}

TEST_CASE("export and import round trip") {
  const auto r = round_robin_report(4);
  const auto dir = scratch("roundtrip");
  export_report(r, dir);
  CHECK(import_report(dir) == r);

  std::ifstream in(dir / "reputation.csv");
  std::string line;
  std::size_t rows = 0;
  std::getline(in, line);
  CHECK(csv::split(line).size() == 16);
  while (std::getline(in, line)) {
    CHECK(csv::split(line).size() == 16);
    ++rows;
  }
  CHECK(rows == 50);
  fs::remove_all(dir);
}

TEST_CASE("exports are byte-identical") {
  const auto r = round_robin_report(5);
  const auto a = scratch("a");
  const auto b = scratch("b");
  export_report(r, a);
  export_report(round_robin_report(5), b);
  for (const char* f : {"summary.json", "reputation.csv", "selection.csv", "convergence.csv"}) {
    CAPTURE(f);
    CHECK(slurp(a / f) == slurp(b / f));
  }
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("window matrices survive csv") {
  Eigen::MatrixXd m(2, 3);
  m << 0.1, -2.5e-17, 3, 1.0 / 3.0, 1e300, -0.0;
  const auto dir = scratch("matrix");
  fs::create_directories(dir);
  write_window_matrix_csv(dir / "m.csv", m);
  CHECK(read_window_matrix_csv(dir / "m.csv") == m);
  CHECK(slurp(dir / "m.csv").rfind("window,o0,o1,o2\n1,", 0) == 0);
  fs::remove_all(dir);
}
