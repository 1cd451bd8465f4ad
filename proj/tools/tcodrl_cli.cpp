// tcodrl: experiment driver for the oracle-selection simulator.
//
//   tcodrl run             --scenario s.json --out dir [--seed n] [--agent all]
//   tcodrl sweep-noise     ... [--grid 0,0.1,0.2,0.3,0.4,0.5] [--jobs n]
//   tcodrl sweep-malicious ... [--counts 3,4,5,6,7,8,9] [--jobs n]
//   tcodrl attack          ... [--attack all] [--attacker id]
//   tcodrl window-table    ... [--max-length 10] [--windows 100]
//   tcodrl train           ... --checkpoint net.txt [--episodes n]
//   tcodrl evaluate        ... --checkpoint net.txt
//
// Exit status: 0 success, 1 usage error, 2 runtime error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "tcodrl/csv.hpp"
#include "tcodrl/experiment.hpp"

namespace fs = std::filesystem;
using namespace tcodrl;

namespace {

struct Common {
  std::string scenario;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::string agent = "all";
};

struct Loaded {
  ScenarioConfig cfg;
  std::uint64_t seed;
  fs::path out;
};

Loaded prepare(const Common& c, const std::string& subcommand) {
  Loaded l;
  l.cfg = load_scenario(c.scenario);
  l.seed = c.seed.value_or(l.cfg.seed);
  if (!c.out.empty()) {
    l.out = c.out;
  } else if (const char* root = std::getenv("TCODRL_OUT"); root && *root) {
    l.out = fs::path(root) / subcommand;
  } else {
    l.out = fs::path("tcodrl-out") / subcommand;
  }
  std::error_code ec;
  fs::create_directories(l.out, ec);
  if (ec) throw Error("cannot create " + l.out.string() + ": " + ec.message());
  return l;
}

std::string point_dir(double x) { return csv::format(x); }

void export_sweep(const fs::path& out, const std::string& prefix, const std::string& x_name,
                  const std::vector<SweepPoint>& points) {
  for (const auto& p : points) export_report(p.report, out / (prefix + point_dir(p.x)) / to_string(p.agent));
  write_sweep_csv(out / ("sweep_" + x_name + ".csv"), x_name, points);
}

int cmd_run(const Common& c) {
  auto l = prepare(c, "run");
  std::vector<SweepPoint> rows;
  for (auto kind : parse_agents(c.agent)) {
    auto result = run_agent(l.cfg, kind, l.seed);
    export_episode(result, l.cfg, l.out / to_string(kind));
    rows.push_back({l.cfg.noise, kind, std::move(result.report)});
    std::cout << to_string(kind) << ": malicious " << csv::format(rows.back().report.fraction(BehaviorClass::Malicious))
              << " trusted " << csv::format(rows.back().report.fraction(BehaviorClass::Trusted)) << " cost "
              << csv::format(rows.back().report.average_cost) << " match " << csv::format(rows.back().report.match_rate)
              << '\n';
  }
  write_sweep_csv(l.out / "comparison.csv", "noise", rows);
  return 0;
}

int cmd_sweep_noise(const Common& c, const std::vector<double>& grid, unsigned jobs) {
  auto l = prepare(c, "sweep-noise");
  export_sweep(l.out, "noise_", "noise", sweep_noise(l.cfg, l.seed, grid, parse_agents(c.agent), jobs));
  return 0;
}

int cmd_sweep_malicious(const Common& c, const std::vector<std::size_t>& counts, unsigned jobs) {
  auto l = prepare(c, "sweep-malicious");
  export_sweep(l.out, "malicious_", "malicious", sweep_malicious(l.cfg, l.seed, counts, parse_agents(c.agent), jobs));
  return 0;
}

int cmd_attack(const Common& c, const std::string& attacks, std::optional<OracleId> attacker_opt) {
  auto l = prepare(c, "attack");
  const OracleId attacker = attacker_opt.value_or(default_attacker(l.cfg));
  std::ofstream summary(l.out / "attack_summary.csv", std::ios::binary);
  if (!summary) throw Error("cannot write " + (l.out / "attack_summary.csv").string());
  summary << "attack,window_mode,agent,attacker,attack_window,recovery_windows,min_reputation,attacker_assignments\n";
  for (auto kind : parse_attacks(attacks)) {
    for (auto mode : {WindowMode::Improved, WindowMode::Standard}) {
      const auto cfg = with_attack(l.cfg, kind, attacker, mode);
      const std::string mode_name = mode == WindowMode::Improved ? "improved" : "standard";
      const int burst = attack_window(cfg.oracles[attacker]);
      for (auto agent : parse_agents(c.agent)) {
        const auto result = run_agent(cfg, agent, l.seed);
        export_episode(result, cfg, l.out / to_string(kind) / mode_name / to_string(agent));
        const auto& rep = result.report.reputation_trace;
        const auto col = static_cast<Eigen::Index>(attacker);
        summary << to_string(kind) << ',' << mode_name << ',' << to_string(agent) << ',' << attacker << ','
                << burst << ',' << recovery_windows(rep, attacker, burst, cfg.trust.threshold) << ','
                << csv::format(rep.col(col).minCoeff()) << ',' << result.report.selection_counts.col(col).sum()
                << '\n';
      }
    }
  }
  return 0;
}

int cmd_window_table(const Common& c, int max_length, int windows) {
  auto l = prepare(c, "window-table");
  const auto t = window_table(l.cfg, l.seed, max_length, windows);
  std::ofstream out(l.out / "window_table.csv", std::ios::binary);
  if (!out) throw Error("cannot write " + (l.out / "window_table.csv").string());
  out << "length";
  for (Eigen::Index j = 0; j < t.final_reputation.cols(); ++j) out << ",o" << j;
  out << ",unit_base\n";
  for (std::size_t i = 0; i < t.lengths.size(); ++i) {
    out << t.lengths[i];
    for (Eigen::Index j = 0; j < t.final_reputation.cols(); ++j) {
      out << ',' << csv::format(t.final_reputation(static_cast<Eigen::Index>(i), j));
    }
    out << ',' << csv::format(unit_base_reputation(t.lengths[i], l.cfg.trust.chi, windows)) << '\n';
  }
  write_window_matrix_csv(l.out / "bases.csv", t.bases);
  return 0;
}

int cmd_train(const Common& c, const std::string& checkpoint, std::optional<std::size_t> episodes) {
  auto l = prepare(c, "train");
  auto agent = make_dqn(l.cfg, l.seed);
  const auto means = train_dqn(*agent, l.cfg, l.seed, episodes.value_or(l.cfg.dqn.pretrain_episodes));
  nn::save_weights(agent->eval_net(), fs::path(checkpoint));
  std::ofstream out(l.out / "training.csv", std::ios::binary);
  if (!out) throw Error("cannot write " + (l.out / "training.csv").string());
  out << "episode,mean_reward\n";
  for (std::size_t e = 0; e < means.size(); ++e) out << (e + 1) << ',' << csv::format(means[e]) << '\n';
  return 0;
}

int cmd_evaluate(const Common& c, const std::string& checkpoint) {
  auto l = prepare(c, "evaluate");
  auto agent = make_dqn(l.cfg, l.seed);
  agent->load(nn::load_weights<double>(fs::path(checkpoint), agent->eval_net().sizes()));
  DqnSelector frozen(*agent, true);
  auto result = run_episode(l.cfg, l.seed, frozen);
  export_episode(result, l.cfg, l.out / "tco-drl");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Trust-aware oracle selection simulator"};
  app.require_subcommand(1);

  Common common;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--scenario", common.scenario, "scenario JSON")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", common.out, "output directory (default: $TCODRL_OUT/<subcommand>)");
    sub->add_option("--seed", common.seed, "request-stream seed (default: scenario seed)");
    sub->add_option("--agent", common.agent, "tco-drl|tco-drl-online|round-robin|blor|psg|all")
        ->check(CLI::IsMember({"tco-drl", "tco-drl-online", "round-robin", "blor", "psg", "all"}));
  };

  auto* run = app.add_subcommand("run", "one episode per agent");
  add_common(run);

  std::vector<double> grid{0.0, 0.1, 0.2, 0.3, 0.4, 0.5};
  std::vector<std::size_t> counts{3, 4, 5, 6, 7, 8, 9};
  unsigned jobs = 1;
  auto* noise = app.add_subcommand("sweep-noise", "repeat the run across noise fractions");
  add_common(noise);
  noise->add_option("--grid", grid, "noise fractions")->delimiter(',')->check(CLI::Range(0.0, 1.0));
  noise->add_option("--jobs", jobs, "parallel workers")->check(CLI::PositiveNumber);

  auto* malicious = app.add_subcommand("sweep-malicious", "repeat the run across malicious counts");
  add_common(malicious);
  malicious->add_option("--counts", counts, "malicious oracle counts")->delimiter(',');
  malicious->add_option("--jobs", jobs, "parallel workers")->check(CLI::PositiveNumber);

  std::string attacks = "all";
  std::optional<OracleId> attacker;
  auto* attack = app.add_subcommand("attack", "ME/OOA/OSA traces with threshold enforcement");
  add_common(attack);
  attack->add_option("--attack", attacks, "me|ooa|osa|all")->check(CLI::IsMember({"me", "ooa", "osa", "all"}));
  attack->add_option("--attacker", attacker, "attacking oracle id");

  int max_length = 10;
  int windows = 100;
  auto* table = app.add_subcommand("window-table", "final reputation for window lengths 1..N");
  add_common(table);
  table->add_option("--max-length", max_length)->check(CLI::Range(1, 64));
  table->add_option("--windows", windows)->check(CLI::PositiveNumber);

  std::string checkpoint;
  std::optional<std::size_t> episodes;
  auto* train = app.add_subcommand("train", "train a DQN and write a checkpoint");
  add_common(train);
  train->add_option("--checkpoint", checkpoint, "checkpoint path")->required();
  train->add_option("--episodes", episodes, "training episodes (default: scenario pretrain_episodes)");

  auto* evaluate = app.add_subcommand("evaluate", "frozen greedy episode from a checkpoint");
  add_common(evaluate);
  evaluate->add_option("--checkpoint", checkpoint, "checkpoint path")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*run) return cmd_run(common);
    if (*noise) return cmd_sweep_noise(common, grid, jobs);
    if (*malicious) return cmd_sweep_malicious(common, counts, jobs);
    if (*attack) return cmd_attack(common, attacks, attacker);
    if (*table) return cmd_window_table(common, max_length, windows);
    if (*train) return cmd_train(common, checkpoint, episodes);
    if (*evaluate) return cmd_evaluate(common, checkpoint);
  } catch (const std::exception& e) {
    std::cerr << "tcodrl: error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
