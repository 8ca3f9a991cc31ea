// experiment.hpp — configuration-driven experiment runner: attack
// effectiveness (victim retraining), efficiency (plan construction time),
// unnoticeability sweeps, and the degree/distance quantile grids.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <string>
#include <tuple>
#include <vector>

#include "structack/attack.hpp"
#include "structack/graph.hpp"
#include "structack/matrix.hpp"
#include "structack/victim.hpp"

namespace structack {

enum class ExperimentMode {
  Effectiveness,
  Efficiency,
  Noticeability,
  QuantileDegree,
  QuantileDistance,
};

std::string_view mode_name(ExperimentMode mode);
ExperimentMode parse_mode(std::string_view name);

struct DatasetConfig {
  std::string name;
  std::string edges;
  std::string features;  // optional
  std::string labels;    // optional
  bool extract_lcc = false;
};

struct ExperimentConfig {
  ExperimentMode mode = ExperimentMode::Effectiveness;
  std::vector<DatasetConfig> datasets;
  // "Random", "DICE", or "<centrality>*<similarity>" (e.g. "DG*Katz");
  // clean rows are always produced.
  std::vector<std::string> attacks;
  std::vector<double> rates{0.05};
  std::vector<std::uint64_t> split_seeds{1, 2, 3, 4, 5};
  std::vector<std::uint64_t> init_seeds{1, 2, 3, 4, 5};
  TrainConfig victim;
  StructackOptions structack_options;
  double alpha = 0.05;
  // Empty = the default rate grid.
  std::vector<double> notice_rates;
  double train_fraction = 0.1;
  double val_fraction = 0.1;
  std::string output_dir;
  int workers = 0;  // 0 = hardware concurrency
  bool write_plans = false;
};

ExperimentConfig config_from_json_file(const std::string& path);
ExperimentConfig config_from_json(std::istream& in);
void write_config_json(const ExperimentConfig& config, std::ostream& out);

// Throws on missing files, empty seed lists or bad fractions.
void validate_config(const ExperimentConfig& config);

struct ReportRow {
  std::string dataset;
  std::string attack;
  double rate = 0.0;
  std::uint64_t split_seed = 0;
  std::uint64_t init_seed = 0;
  double accuracy = std::numeric_limits<double>::quiet_NaN();
  double wall_time_ms = std::numeric_limits<double>::quiet_NaN();
  double peak_mem_mb = std::numeric_limits<double>::quiet_NaN();
  double ks_degree_stat = std::numeric_limits<double>::quiet_NaN();
  double ks_degree_p = std::numeric_limits<double>::quiet_NaN();
  double ks_cc_stat = std::numeric_limits<double>::quiet_NaN();
  double ks_cc_p = std::numeric_limits<double>::quiet_NaN();
  int unnoticeable = -1;  // -1 = not applicable
  std::string error;      // non-empty marks a failed cell
};

struct ExperimentReport {
  std::vector<ReportRow> rows;
  bool any_failed() const;
};

// Executes the (dataset × attack × rate × seeds) cross product for the
// configured mode. Cell failures are recorded and the run continues.
// Deterministic given the config, apart from timing/memory columns.
ExperimentReport run_experiment(const ExperimentConfig& config);

// Dispatches an attack by name with the plan seed derived from the split
// seed and the attack name.
AttackPlan build_attack(const Graph& g, const std::string& name, double rate,
                        std::uint64_t split_seed, const StructackOptions& options);

// Stable column order; floats at 4 decimals; blank for not-applicable.
void emit_report_csv(const ExperimentReport& report, std::ostream& out);
// Full-precision values; round-trips through report_from_json.
void emit_report_json(const ExperimentReport& report, std::ostream& out);
ExperimentReport report_from_json(std::istream& in);

// Mean accuracy per decile pair over seeds, assembled from quantile rows.
Matrix degree_quantile_grid(const ExperimentReport& report, const std::string& dataset);
std::vector<double> distance_quantile_profile(const ExperimentReport& report,
                                              const std::string& dataset);

// Largest unnoticeable rate per (dataset, attack) from noticeability rows.
std::vector<std::tuple<std::string, std::string, double>> critical_rates_from_report(
    const ExperimentReport& report);

// Best-effort resident-set high-water mark, in megabytes (0 if unknown).
double peak_memory_mb();

// Loads (and optionally LCC-extracts) the dataset behind a config entry.
Graph load_configured_dataset(const DatasetConfig& dataset);

}  // namespace structack
