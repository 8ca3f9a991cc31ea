#include "structack/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <nlohmann/json.hpp>

#include "structack/noticeability.hpp"
#include "structack/rng.hpp"

namespace structack {

namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::string format_double(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", value);
  return buf;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (const char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

struct Job {
  std::function<std::vector<ReportRow>()> run;
};

std::vector<ReportRow> run_jobs(std::vector<Job> jobs, int workers) {
  std::vector<std::vector<ReportRow>> slots(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < jobs.size();) slots[i] = jobs[i].run();
  };
  const int count = std::max(1, std::min<int>(workers, static_cast<int>(jobs.size())));
  if (count == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(count);
    for (int t = 0; t < count; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  std::vector<ReportRow> rows;
  for (auto& slot : slots) rows.insert(rows.end(), slot.begin(), slot.end());
  return rows;
}

Matrix prepare_propagated(const Graph& g, const TrainConfig& victim) {
  const Matrix inputs =
      victim.row_normalize_features ? row_normalize(g.features()) : g.features();
  const NormalizedOperator op = normalized_adjacency(g, NormalizationVariant::WithSelfLoops);
  return propagate(op, inputs, victim.depth);
}

double test_accuracy(const VictimParams& params, const Matrix& propagated,
                     const std::vector<int>& y, std::span<const NodeId> mask) {
  const Prediction prediction = predict_on_propagated(params, propagated);
  int hits = 0;
  for (const NodeId u : mask)
    if (prediction.predicted[u] == y[u]) ++hits;
  return static_cast<double>(hits) / mask.size();
}

void write_plan_file(const ExperimentConfig& config, const std::string& dataset,
                     const AttackPlan& plan, std::uint64_t split_seed) {
  if (!config.write_plans || config.output_dir.empty()) return;
  const fs::path dir = fs::path(config.output_dir) / "plans";
  fs::create_directories(dir);
  std::string name = dataset + "_" + plan.attack_name + "_r" + format_double(plan.rate) + "_s" +
                     std::to_string(split_seed) + ".json";
  for (char& c : name)
    if (c == '*' || c == '(' || c == ')' || c == ',') c = '-';
  std::ofstream out(dir / name);
  nlohmann::json j = plan;
  out << j.dump(2) << '\n';
}

// One effectiveness job: fixed (dataset, attack, rate, split seed), one
// row per weight initialization.
std::vector<ReportRow> effectiveness_job(const ExperimentConfig& config, const Graph& clean,
                                         const std::string& dataset, const std::string& attack,
                                         double rate, std::uint64_t split_seed) {
  std::vector<ReportRow> rows;
  ReportRow base;
  base.dataset = dataset;
  base.attack = attack;
  base.rate = rate;
  base.split_seed = split_seed;
  try {
    const auto start = Clock::now();
    Graph graph = clean;
    if (attack != "Clean") {
      const AttackPlan plan =
          build_attack(clean, attack, rate, split_seed, config.structack_options);
      write_plan_file(config, dataset, plan, split_seed);
      graph = apply_plan(clean, plan);
    }
    const Matrix propagated = prepare_propagated(graph, config.victim);
    const Split split =
        random_split(graph.node_count(), config.train_fraction, config.val_fraction, split_seed);
    for (const std::uint64_t init_seed : config.init_seeds) {
      ReportRow row = base;
      row.init_seed = init_seed;
      const VictimParams params =
          train_on_propagated(propagated, graph.labels(), split, config.victim, init_seed);
      row.accuracy = test_accuracy(params, propagated, graph.labels(), split.test);
      row.wall_time_ms = elapsed_ms(start);
      row.peak_mem_mb = peak_memory_mb();
      rows.push_back(std::move(row));
    }
  } catch (const std::exception& e) {
    base.error = e.what();
    rows.assign(1, base);
  }
  return rows;
}

std::vector<ReportRow> efficiency_job(const ExperimentConfig& config, const Graph& clean,
                                      const std::string& dataset, const std::string& attack,
                                      double rate) {
  ReportRow row;
  row.dataset = dataset;
  row.attack = attack;
  row.rate = rate;
  row.split_seed = config.split_seeds.front();
  try {
    const auto start = Clock::now();
    const AttackPlan plan =
        build_attack(clean, attack, rate, config.split_seeds.front(), config.structack_options);
    row.wall_time_ms = elapsed_ms(start);
    row.peak_mem_mb = peak_memory_mb();
    write_plan_file(config, dataset, plan, config.split_seeds.front());
  } catch (const std::exception& e) {
    row.error = e.what();
  }
  return {row};
}

std::vector<ReportRow> noticeability_job(const ExperimentConfig& config, const Graph& clean,
                                         const std::string& dataset, const std::string& attack) {
  std::vector<ReportRow> rows;
  const std::uint64_t seed = config.split_seeds.front();
  std::span<const double> rates = config.notice_rates.empty()
                                      ? default_rate_grid()
                                      : std::span<const double>(config.notice_rates);
  try {
    const CriticalRateResult result = critical_rate(
        clean,
        [&](double rate) {
          return apply_plan(clean,
                            build_attack(clean, attack, rate, seed, config.structack_options));
        },
        rates, config.alpha);
    for (std::size_t i = 0; i < result.rates.size(); ++i) {
      ReportRow row;
      row.dataset = dataset;
      row.attack = attack;
      row.rate = result.rates[i];
      row.split_seed = seed;
      row.ks_degree_stat = result.verdicts[i].degree.statistic;
      row.ks_degree_p = result.verdicts[i].degree.p_value;
      row.ks_cc_stat = result.verdicts[i].clustering.statistic;
      row.ks_cc_p = result.verdicts[i].clustering.p_value;
      row.unnoticeable = result.verdicts[i].unnoticeable ? 1 : 0;
      row.peak_mem_mb = peak_memory_mb();
      rows.push_back(std::move(row));
    }
  } catch (const std::exception& e) {
    ReportRow row;
    row.dataset = dataset;
    row.attack = attack;
    row.split_seed = seed;
    row.error = e.what();
    rows.assign(1, row);
  }
  return rows;
}

std::vector<ReportRow> quantile_job(const ExperimentConfig& config, const Graph& clean,
                                    const std::string& dataset, const std::string& attack_name,
                                    double rate, std::uint64_t seed,
                                    const std::function<AttackPlan()>& make_plan) {
  ReportRow row;
  row.dataset = dataset;
  row.attack = attack_name;
  row.rate = rate;
  row.split_seed = seed;
  row.init_seed = seed;
  try {
    const auto start = Clock::now();
    const Graph graph = apply_plan(clean, make_plan());
    const Matrix propagated = prepare_propagated(graph, config.victim);
    const Split split =
        random_split(graph.node_count(), config.train_fraction, config.val_fraction, seed);
    const VictimParams params =
        train_on_propagated(propagated, graph.labels(), split, config.victim, seed);
    row.accuracy = test_accuracy(params, propagated, graph.labels(), split.test);
    row.wall_time_ms = elapsed_ms(start);
    row.peak_mem_mb = peak_memory_mb();
  } catch (const std::exception& e) {
    row.error = e.what();
  }
  return {row};
}

}  // namespace

std::string_view mode_name(ExperimentMode mode) {
  switch (mode) {
    case ExperimentMode::Effectiveness: return "effectiveness";
    case ExperimentMode::Efficiency: return "efficiency";
    case ExperimentMode::Noticeability: return "noticeability";
    case ExperimentMode::QuantileDegree: return "quantile-degree";
    case ExperimentMode::QuantileDistance: return "quantile-distance";
  }
  return "?";
}

ExperimentMode parse_mode(std::string_view name) {
  if (name == "effectiveness") return ExperimentMode::Effectiveness;
  if (name == "efficiency") return ExperimentMode::Efficiency;
  if (name == "noticeability") return ExperimentMode::Noticeability;
  if (name == "quantile-degree") return ExperimentMode::QuantileDegree;
  if (name == "quantile-distance") return ExperimentMode::QuantileDistance;
  throw std::invalid_argument("unknown mode: " + std::string(name));
}

AttackPlan build_attack(const Graph& g, const std::string& name, double rate,
                        std::uint64_t split_seed, const StructackOptions& options) {
  const std::uint64_t seed = mix_seed(split_seed, name);
  if (name == "Random" || name == "random") return random_attack(g, rate, seed);
  if (name == "DICE" || name == "dice") return dice_attack(g, rate, seed);
  const auto star = name.find('*');
  if (star == std::string::npos)
    throw std::invalid_argument("unknown attack: " + name +
                                " (expected Random, DICE or <centrality>*<similarity>)");
  const CentralityMeasure centrality = parse_centrality(name.substr(0, star));
  const SimilarityMeasure similarity = parse_similarity(name.substr(star + 1));
  return structack_attack(g, centrality, similarity, rate, seed, options);
}

Graph load_configured_dataset(const DatasetConfig& dataset) {
  Graph g = load_dataset(dataset.edges, dataset.features, dataset.labels);
  if (dataset.extract_lcc) g = extract_lcc(g);
  return g;
}

void validate_config(const ExperimentConfig& config) {
  if (config.datasets.empty()) throw std::invalid_argument("config: no datasets");
  for (const DatasetConfig& d : config.datasets) {
    if (!fs::exists(d.edges)) throw std::invalid_argument("config: missing edge file " + d.edges);
    if (!d.features.empty() && !fs::exists(d.features))
      throw std::invalid_argument("config: missing feature file " + d.features);
    if (!d.labels.empty() && !fs::exists(d.labels))
      throw std::invalid_argument("config: missing label file " + d.labels);
  }
  if (config.split_seeds.empty() || config.init_seeds.empty())
    throw std::invalid_argument("config: seed lists must be non-empty");
  if (config.rates.empty()) throw std::invalid_argument("config: rates must be non-empty");
  if (config.train_fraction <= 0 || config.val_fraction < 0 ||
      config.train_fraction + config.val_fraction >= 1.0)
    throw std::invalid_argument("config: bad split fractions");
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
  validate_config(config);
  std::vector<Job> jobs;
  std::vector<Graph> graphs;
  graphs.reserve(config.datasets.size());
  for (const DatasetConfig& d : config.datasets) graphs.push_back(load_configured_dataset(d));

  const double rate0 = config.rates.front();
  for (std::size_t di = 0; di < config.datasets.size(); ++di) {
    const Graph& clean = graphs[di];
    const std::string dataset = config.datasets[di].name;
    switch (config.mode) {
      case ExperimentMode::Effectiveness: {
        for (const std::uint64_t split_seed : config.split_seeds)
          jobs.push_back({[&, dataset, split_seed] {
            return effectiveness_job(config, clean, dataset, "Clean", 0.0, split_seed);
          }});
        for (const std::string& attack : config.attacks)
          for (const double rate : config.rates)
            for (const std::uint64_t split_seed : config.split_seeds)
              jobs.push_back({[&, dataset, attack, rate, split_seed] {
                return effectiveness_job(config, clean, dataset, attack, rate, split_seed);
              }});
        break;
      }
      case ExperimentMode::Efficiency: {
        for (const std::string& attack : config.attacks)
          for (const double rate : config.rates)
            jobs.push_back({[&, dataset, attack, rate] {
              return efficiency_job(config, clean, dataset, attack, rate);
            }});
        break;
      }
      case ExperimentMode::Noticeability: {
        for (const std::string& attack : config.attacks)
          jobs.push_back({[&, dataset, attack] {
            return noticeability_job(config, clean, dataset, attack);
          }});
        break;
      }
      case ExperimentMode::QuantileDegree: {
        for (int i = 0; i < 10; ++i)
          for (int j = 0; j < 10; ++j)
            for (const std::uint64_t seed : config.split_seeds) {
              const std::string name =
                  "degree-quantile(" + std::to_string(i) + "," + std::to_string(j) + ")";
              jobs.push_back({[&, dataset, name, i, j, seed] {
                return quantile_job(config, clean, dataset, name, rate0, seed, [&, i, j, seed] {
                  return degree_quantile_injection(clean, i, j, rate0, mix_seed(seed, name));
                });
              }});
            }
        break;
      }
      case ExperimentMode::QuantileDistance: {
        for (int trial = 1; trial <= 10; ++trial)
          for (const std::uint64_t seed : config.split_seeds) {
            const std::string name = "distance-quantile(" + std::to_string(trial) + ")";
            jobs.push_back({[&, dataset, name, trial, seed] {
              return quantile_job(config, clean, dataset, name, rate0, seed, [&, trial, seed] {
                return distance_quantile_injection(clean, trial, rate0, mix_seed(seed, name));
              });
            }});
          }
        break;
      }
    }
  }

  // Efficiency timings are only comparable when cells run alone.
  const int workers = config.mode == ExperimentMode::Efficiency
                          ? 1
                          : (config.workers > 0
                                 ? config.workers
                                 : std::max(1u, std::thread::hardware_concurrency()));
  ExperimentReport report;
  report.rows = run_jobs(std::move(jobs), workers);
  return report;
}

bool ExperimentReport::any_failed() const {
  return std::any_of(rows.begin(), rows.end(),
                     [](const ReportRow& r) { return !r.error.empty(); });
}

void emit_report_csv(const ExperimentReport& report, std::ostream& out) {
  out << "dataset,attack,rate,split_seed,init_seed,accuracy,wall_time_ms,peak_mem_mb,"
         "ks_degree_stat,ks_degree_p,ks_cc_stat,ks_cc_p,unnoticeable,error\n";
  auto cell = [](double v) { return std::isnan(v) ? std::string() : format_double(v); };
  for (const ReportRow& r : report.rows) {
    out << csv_escape(r.dataset) << ',' << csv_escape(r.attack) << ',' << format_double(r.rate)
        << ',' << r.split_seed << ',' << r.init_seed << ',' << cell(r.accuracy) << ','
        << cell(r.wall_time_ms) << ',' << cell(r.peak_mem_mb) << ',' << cell(r.ks_degree_stat)
        << ',' << cell(r.ks_degree_p) << ',' << cell(r.ks_cc_stat) << ',' << cell(r.ks_cc_p)
        << ',' << (r.unnoticeable < 0 ? std::string() : std::to_string(r.unnoticeable)) << ','
        << csv_escape(r.error) << '\n';
  }
}

namespace {

void put_optional(nlohmann::json& j, const char* key, double value) {
  if (!std::isnan(value)) j[key] = value;
}

double get_optional(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) return std::numeric_limits<double>::quiet_NaN();
  return j.at(key).get<double>();
}

}  // namespace

void emit_report_json(const ExperimentReport& report, std::ostream& out) {
  nlohmann::json rows = nlohmann::json::array();
  for (const ReportRow& r : report.rows) {
    nlohmann::json j{{"dataset", r.dataset}, {"attack", r.attack},          {"rate", r.rate},
                     {"split_seed", r.split_seed}, {"init_seed", r.init_seed}};
    put_optional(j, "accuracy", r.accuracy);
    put_optional(j, "wall_time_ms", r.wall_time_ms);
    put_optional(j, "peak_mem_mb", r.peak_mem_mb);
    put_optional(j, "ks_degree_stat", r.ks_degree_stat);
    put_optional(j, "ks_degree_p", r.ks_degree_p);
    put_optional(j, "ks_cc_stat", r.ks_cc_stat);
    put_optional(j, "ks_cc_p", r.ks_cc_p);
    if (r.unnoticeable >= 0) j["unnoticeable"] = r.unnoticeable;
    if (!r.error.empty()) j["error"] = r.error;
    rows.push_back(std::move(j));
  }
  out << rows.dump(2) << '\n';
}

ExperimentReport report_from_json(std::istream& in) {
  nlohmann::json rows;
  in >> rows;
  ExperimentReport report;
  for (const auto& j : rows) {
    ReportRow r;
    r.dataset = j.at("dataset").get<std::string>();
    r.attack = j.at("attack").get<std::string>();
    r.rate = j.at("rate").get<double>();
    r.split_seed = j.at("split_seed").get<std::uint64_t>();
    r.init_seed = j.at("init_seed").get<std::uint64_t>();
    r.accuracy = get_optional(j, "accuracy");
    r.wall_time_ms = get_optional(j, "wall_time_ms");
    r.peak_mem_mb = get_optional(j, "peak_mem_mb");
    r.ks_degree_stat = get_optional(j, "ks_degree_stat");
    r.ks_degree_p = get_optional(j, "ks_degree_p");
    r.ks_cc_stat = get_optional(j, "ks_cc_stat");
    r.ks_cc_p = get_optional(j, "ks_cc_p");
    r.unnoticeable = j.value("unnoticeable", -1);
    r.error = j.value("error", std::string());
    report.rows.push_back(std::move(r));
  }
  return report;
}

Matrix degree_quantile_grid(const ExperimentReport& report, const std::string& dataset) {
  Matrix sums(10, 10, 0.0), counts(10, 10, 0.0);
  for (const ReportRow& r : report.rows) {
    if (r.dataset != dataset || !r.error.empty() || std::isnan(r.accuracy)) continue;
    int i, j;
    if (std::sscanf(r.attack.c_str(), "degree-quantile(%d,%d)", &i, &j) != 2) continue;
    sums(i, j) += r.accuracy;
    counts(i, j) += 1.0;
  }
  Matrix grid(10, 10, std::numeric_limits<double>::quiet_NaN());
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 10; ++j)
      if (counts(i, j) > 0) grid(i, j) = sums(i, j) / counts(i, j);
  return grid;
}

std::vector<double> distance_quantile_profile(const ExperimentReport& report,
                                              const std::string& dataset) {
  std::vector<double> sums(10, 0.0), counts(10, 0.0);
  for (const ReportRow& r : report.rows) {
    if (r.dataset != dataset || !r.error.empty() || std::isnan(r.accuracy)) continue;
    int trial;
    if (std::sscanf(r.attack.c_str(), "distance-quantile(%d)", &trial) != 1) continue;
    sums[trial - 1] += r.accuracy;
    counts[trial - 1] += 1.0;
  }
  std::vector<double> profile(10, std::numeric_limits<double>::quiet_NaN());
  for (int t = 0; t < 10; ++t)
    if (counts[t] > 0) profile[t] = sums[t] / counts[t];
  return profile;
}

std::vector<std::tuple<std::string, std::string, double>> critical_rates_from_report(
    const ExperimentReport& report) {
  std::vector<std::tuple<std::string, std::string, double>> out;
  for (const ReportRow& r : report.rows) {
    if (r.unnoticeable < 0) continue;
    auto it = std::find_if(out.begin(), out.end(), [&](const auto& entry) {
      return std::get<0>(entry) == r.dataset && std::get<1>(entry) == r.attack;
    });
    if (it == out.end()) {
      out.emplace_back(r.dataset, r.attack, r.unnoticeable == 1 ? r.rate : 0.0);
    } else if (r.unnoticeable == 1) {
      std::get<2>(*it) = std::max(std::get<2>(*it), r.rate);
    }
  }
  return out;
}

double peak_memory_mb() {
  std::ifstream status("/proc/self/status");
  std::string line;
  while (std::getline(status, line)) {
    if (line.rfind("VmHWM:", 0) == 0) {
      std::istringstream fields(line.substr(6));
      double kb;
      if (fields >> kb) return kb / 1024.0;
    }
  }
  return 0.0;
}

namespace {

nlohmann::json dataset_to_json(const DatasetConfig& d) {
  nlohmann::json j{{"name", d.name}, {"edges", d.edges}};
  if (!d.features.empty()) j["features"] = d.features;
  if (!d.labels.empty()) j["labels"] = d.labels;
  if (d.extract_lcc) j["extract_lcc"] = true;
  return j;
}

DatasetConfig dataset_from_json(const nlohmann::json& j) {
  DatasetConfig d;
  d.name = j.at("name").get<std::string>();
  d.edges = j.at("edges").get<std::string>();
  d.features = j.value("features", std::string());
  d.labels = j.value("labels", std::string());
  d.extract_lcc = j.value("extract_lcc", false);
  return d;
}

}  // namespace

ExperimentConfig config_from_json(std::istream& in) {
  nlohmann::json j;
  in >> j;
  ExperimentConfig config;
  config.mode = parse_mode(j.value("mode", std::string("effectiveness")));
  for (const auto& d : j.at("datasets")) config.datasets.push_back(dataset_from_json(d));
  config.attacks = j.value("attacks", std::vector<std::string>{});
  if (j.contains("rates")) config.rates = j.at("rates").get<std::vector<double>>();
  if (j.contains("split_seeds"))
    config.split_seeds = j.at("split_seeds").get<std::vector<std::uint64_t>>();
  if (j.contains("init_seeds"))
    config.init_seeds = j.at("init_seeds").get<std::vector<std::uint64_t>>();
  if (j.contains("victim")) {
    const auto& v = j.at("victim");
    config.victim.depth = v.value("depth", config.victim.depth);
    config.victim.learning_rate = v.value("learning_rate", config.victim.learning_rate);
    config.victim.weight_decay = v.value("weight_decay", config.victim.weight_decay);
    config.victim.epochs = v.value("epochs", config.victim.epochs);
    config.victim.patience = v.value("patience", config.victim.patience);
    config.victim.row_normalize_features =
        v.value("row_normalize_features", config.victim.row_normalize_features);
  }
  if (j.contains("katz")) {
    const auto& k = j.at("katz");
    config.structack_options.katz_alpha = k.value("alpha", config.structack_options.katz_alpha);
    config.structack_options.katz_iterations =
        k.value("iterations", config.structack_options.katz_iterations);
    config.structack_options.katz_spectral_rescale =
        k.value("spectral_rescale", config.structack_options.katz_spectral_rescale);
  }
  config.alpha = j.value("alpha", config.alpha);
  if (j.contains("notice_rates"))
    config.notice_rates = j.at("notice_rates").get<std::vector<double>>();
  config.train_fraction = j.value("train_fraction", config.train_fraction);
  config.val_fraction = j.value("val_fraction", config.val_fraction);
  config.output_dir = j.value("output_dir", std::string());
  config.workers = j.value("workers", 0);
  config.write_plans = j.value("write_plans", false);
  return config;
}

ExperimentConfig config_from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config: " + path);
  return config_from_json(in);
}

void write_config_json(const ExperimentConfig& config, std::ostream& out) {
  nlohmann::json j;
  j["mode"] = std::string(mode_name(config.mode));
  j["datasets"] = nlohmann::json::array();
  for (const DatasetConfig& d : config.datasets) j["datasets"].push_back(dataset_to_json(d));
  j["attacks"] = config.attacks;
  j["rates"] = config.rates;
  j["split_seeds"] = config.split_seeds;
  j["init_seeds"] = config.init_seeds;
  j["victim"] = {{"depth", config.victim.depth},
                 {"learning_rate", config.victim.learning_rate},
                 {"weight_decay", config.victim.weight_decay},
                 {"epochs", config.victim.epochs},
                 {"patience", config.victim.patience},
                 {"row_normalize_features", config.victim.row_normalize_features}};
  j["katz"] = {{"alpha", config.structack_options.katz_alpha},
               {"iterations", config.structack_options.katz_iterations},
               {"spectral_rescale", config.structack_options.katz_spectral_rescale}};
  j["alpha"] = config.alpha;
  if (!config.notice_rates.empty()) j["notice_rates"] = config.notice_rates;
  j["train_fraction"] = config.train_fraction;
  j["val_fraction"] = config.val_fraction;
  if (!config.output_dir.empty()) j["output_dir"] = config.output_dir;
  if (config.workers > 0) j["workers"] = config.workers;
  if (config.write_plans) j["write_plans"] = true;
  out << j.dump(2) << '\n';
}

}  // namespace structack
