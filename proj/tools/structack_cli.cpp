// structack_cli.cpp — command-line front end.
//
// Subcommands:
//   attack    build a single perturbation plan and emit it as JSON
//   run       execute a full experiment config (any mode)
//   notice    critical-rate sweep for the configured attacks
//   quantile  degree/distance quantile injection grids
//
// Exit codes: 0 success, 1 configuration error, 2 partial cell failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "structack/experiment.hpp"
#include "structack/noticeability.hpp"

namespace {

namespace fs = std::filesystem;
using namespace structack;

struct DatasetFlags {
  std::string name = "dataset";
  std::string edges, features, labels;
  bool lcc = false;

  void attach(CLI::App* app, bool required) {
    app->add_option("--dataset-name", name, "Dataset name used in reports");
    auto* e = app->add_option("--edges", edges, "Edge list file (u v per line)");
    if (required) e->required();
    app->add_option("--features", features, "Feature matrix file (one row per node)");
    app->add_option("--labels", labels, "Label file (one integer per line)");
    app->add_flag("--lcc", lcc, "Restrict to the largest connected component");
  }

  DatasetConfig config() const { return {name, edges, features, labels, lcc}; }
};

void apply_overrides(ExperimentConfig& config, const DatasetFlags& dataset,
                     const std::vector<std::string>& attacks, const std::vector<double>& rates,
                     const std::vector<std::uint64_t>& seeds, const std::string& out_dir,
                     int workers) {
  if (!dataset.edges.empty()) config.datasets = {dataset.config()};
  if (!attacks.empty()) config.attacks = attacks;
  if (!rates.empty()) config.rates = rates;
  if (!seeds.empty()) {
    config.split_seeds = seeds;
    config.init_seeds = seeds;
  }
  if (!out_dir.empty()) config.output_dir = out_dir;
  if (workers > 0) config.workers = workers;
}

int write_outputs(const ExperimentConfig& config, const ExperimentReport& report) {
  if (!config.output_dir.empty()) {
    fs::create_directories(config.output_dir);
    std::ofstream csv(fs::path(config.output_dir) / "report.csv");
    emit_report_csv(report, csv);
    std::ofstream json(fs::path(config.output_dir) / "report.json");
    emit_report_json(report, json);
  } else {
    emit_report_csv(report, std::cout);
  }

  if (config.mode == ExperimentMode::QuantileDegree && !config.output_dir.empty()) {
    for (const DatasetConfig& d : config.datasets) {
      const Matrix grid = degree_quantile_grid(report, d.name);
      std::ofstream out(fs::path(config.output_dir) / ("quantile_degree_" + d.name + ".csv"));
      for (int i = 0; i < 10; ++i) {
        for (int j = 0; j < 10; ++j) {
          char buf[32];
          std::snprintf(buf, sizeof buf, "%.4f", grid(i, j));
          out << (j ? "," : "") << buf;
        }
        out << '\n';
      }
    }
  }
  if (config.mode == ExperimentMode::QuantileDistance && !config.output_dir.empty()) {
    for (const DatasetConfig& d : config.datasets) {
      const std::vector<double> profile = distance_quantile_profile(report, d.name);
      std::ofstream out(fs::path(config.output_dir) / ("quantile_distance_" + d.name + ".csv"));
      for (std::size_t t = 0; t < profile.size(); ++t) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.4f", profile[t]);
        out << (t ? "," : "") << buf;
      }
      out << '\n';
    }
  }
  if (config.mode == ExperimentMode::Noticeability) {
    std::ostream* out = &std::cout;
    std::ofstream file;
    if (!config.output_dir.empty()) {
      file.open(fs::path(config.output_dir) / "critical_rates.csv");
      out = &file;
    }
    *out << "dataset,attack,critical_rate\n";
    for (const auto& [dataset, attack, rate] : critical_rates_from_report(report)) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.4f", rate);
      *out << dataset << ',' << attack << ',' << buf << '\n';
    }
  }
  return report.any_failed() ? 2 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Structure-based adversarial edge-injection attacks on graph node classification"};
  app.require_subcommand(1);

  // ---- attack ----
  auto* attack_cmd = app.add_subcommand("attack", "Emit a single attack plan as JSON");
  DatasetFlags attack_dataset;
  attack_dataset.attach(attack_cmd, /*required=*/true);
  std::string attack_name = "DG*Katz";
  double attack_rate = 0.05;
  std::uint64_t attack_seed = 1;
  std::string attack_out;
  StructackOptions attack_options;
  attack_cmd->add_option("--attack", attack_name,
                         "Random, DICE or <centrality>*<similarity> (e.g. PR*Katz)");
  attack_cmd->add_option("--rate", attack_rate, "Perturbation rate r; budget k = floor(r*m)");
  attack_cmd->add_option("--seed", attack_seed, "Seed for the randomized pieces");
  attack_cmd->add_option("--out", attack_out, "Output file (stdout if omitted)");
  attack_cmd->add_option("--katz-alpha", attack_options.katz_alpha, "Katz attenuation factor");
  attack_cmd->add_option("--katz-iterations", attack_options.katz_iterations,
                         "Katz series truncation");
  attack_cmd->add_flag("--katz-spectral-rescale", attack_options.katz_spectral_rescale,
                       "Rescale alpha by the spectral radius so the series converges");

  // ---- shared config-driven flags ----
  auto add_config_flags = [](CLI::App* cmd, std::string& config_path, DatasetFlags& dataset,
                             std::vector<std::string>& attacks, std::vector<double>& rates,
                             std::vector<std::uint64_t>& seeds, std::string& out_dir,
                             int& workers) {
    cmd->add_option("--config", config_path, "Experiment config JSON");
    dataset.attach(cmd, /*required=*/false);
    cmd->add_option("--attack", attacks, "Attack name (repeatable), overrides config");
    cmd->add_option("--rate", rates, "Perturbation rate (repeatable), overrides config");
    cmd->add_option("--seeds", seeds, "Seed list, overrides split and init seeds");
    cmd->add_option("--out", out_dir, "Output directory");
    cmd->add_option("--workers", workers, "Worker threads (0 = hardware)");
  };

  auto* run_cmd = app.add_subcommand("run", "Run a full experiment");
  std::string run_config_path, run_out, run_mode;
  DatasetFlags run_dataset;
  std::vector<std::string> run_attacks;
  std::vector<double> run_rates;
  std::vector<std::uint64_t> run_seeds;
  int run_workers = 0;
  add_config_flags(run_cmd, run_config_path, run_dataset, run_attacks, run_rates, run_seeds,
                   run_out, run_workers);
  run_cmd->add_option("--mode", run_mode,
                      "effectiveness | efficiency | noticeability | quantile-degree | "
                      "quantile-distance");

  auto* notice_cmd = app.add_subcommand("notice", "Critical perturbation rate sweep");
  std::string notice_config_path, notice_out;
  DatasetFlags notice_dataset;
  std::vector<std::string> notice_attacks;
  std::vector<double> notice_rates;
  std::vector<std::uint64_t> notice_seeds;
  int notice_workers = 0;
  add_config_flags(notice_cmd, notice_config_path, notice_dataset, notice_attacks, notice_rates,
                   notice_seeds, notice_out, notice_workers);

  auto* quantile_cmd = app.add_subcommand("quantile", "Degree/distance quantile grids");
  std::string quantile_config_path, quantile_out, quantile_kind = "degree";
  DatasetFlags quantile_dataset;
  std::vector<std::string> quantile_attacks;
  std::vector<double> quantile_rates;
  std::vector<std::uint64_t> quantile_seeds;
  int quantile_workers = 0;
  add_config_flags(quantile_cmd, quantile_config_path, quantile_dataset, quantile_attacks,
                   quantile_rates, quantile_seeds, quantile_out, quantile_workers);
  quantile_cmd->add_option("--grid", quantile_kind, "degree or distance");

  CLI11_PARSE(app, argc, argv);

  try {
    if (attack_cmd->parsed()) {
      const Graph g = load_configured_dataset(attack_dataset.config());
      const AttackPlan plan = build_attack(g, attack_name, attack_rate, attack_seed,
                                           attack_options);
      const nlohmann::json j = plan;
      if (attack_out.empty()) {
        std::cout << j.dump(2) << '\n';
      } else {
        std::ofstream out(attack_out);
        if (!out) throw std::invalid_argument("cannot open output: " + attack_out);
        out << j.dump(2) << '\n';
      }
      return 0;
    }

    ExperimentConfig config;
    std::string config_path, mode_override, out_dir;
    DatasetFlags* dataset = nullptr;
    std::vector<std::string>* attacks = nullptr;
    std::vector<double>* rates = nullptr;
    std::vector<std::uint64_t>* seeds = nullptr;
    int workers = 0;
    if (run_cmd->parsed()) {
      config_path = run_config_path;
      mode_override = run_mode;
      dataset = &run_dataset;
      attacks = &run_attacks;
      rates = &run_rates;
      seeds = &run_seeds;
      out_dir = run_out;
      workers = run_workers;
    } else if (notice_cmd->parsed()) {
      config_path = notice_config_path;
      mode_override = "noticeability";
      dataset = &notice_dataset;
      attacks = &notice_attacks;
      rates = &notice_rates;
      seeds = &notice_seeds;
      out_dir = notice_out;
      workers = notice_workers;
    } else {
      config_path = quantile_config_path;
      mode_override = quantile_kind == "distance" ? "quantile-distance" : "quantile-degree";
      dataset = &quantile_dataset;
      attacks = &quantile_attacks;
      rates = &quantile_rates;
      seeds = &quantile_seeds;
      out_dir = quantile_out;
      workers = quantile_workers;
    }

    if (!config_path.empty()) config = config_from_json_file(config_path);
    if (config_path.empty() && dataset->edges.empty())
      throw std::invalid_argument("either --config or --edges is required");
    if (!mode_override.empty()) config.mode = parse_mode(mode_override);
    apply_overrides(config, *dataset, *attacks, *rates, *seeds, out_dir, workers);

    const ExperimentReport report = run_experiment(config);
    const int code = write_outputs(config, report);
    if (code != 0)
      std::cerr << "warning: " << code << " — some cells failed; see the error column\n";
    return code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
