#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "uavplan/active_planner.hpp"
#include "uavplan/environment.hpp"
#include "uavplan/oracle.hpp"
#include "uavplan/ql_baseline.hpp"
#include "uavplan/world_model.hpp"

namespace uavplan {

struct ExperimentConfig {
  std::uint64_t seed = 2024;
  int training_pool_size = 50;
  int testing_pool_size = 100;  // the training pool is its prefix
  double mean_users = 5.0;
  int training_examples = 5000;
  int hotspots_per_example = 5;
  std::vector<int> test_sizes{5, 10, 20, 30, 40, 50};
  int seeds_per_size = 20;
  std::optional<Point2> depot_m;  // defaults to the area center
  ChannelParams channel;
  MissionConfig mission;
  ObjectiveWeights weights;
  NoiseConfig noise;
  PlannerConfig planner;
  QTrainConfig ql;
  std::filesystem::path output_dir = "out";
  int workers = 1;

  void validate() const;
  Point2 depot() const;
};

ExperimentConfig load_config(const std::filesystem::path& path);
nlohmann::json config_to_json(const ExperimentConfig& cfg);
ExperimentConfig config_from_json(const nlohmann::json& j);

enum class Method { oracle, ain, mql };
const char* method_name(Method m);

struct MetricsRecord {
  Method method = Method::oracle;
  int test_size = 0;
  int instance_index = 0;
  std::uint64_t instance_seed = 0;
  double total_sum_rate_bps = 0.0;
  double completion_time_s = 0.0;
  double tour_length_m = 0.0;
  double similarity_to_oracle = 0.0;
  int num_visited = 0;
  int num_hotspots = 0;
  double wall_clock_s = 0.0;  // kept out of metrics.csv so it stays reproducible
};

/// Tour length / speed + dwell per visited hotspot.
double completion_time(const Tour& t, const MissionConfig& mission);

/// Sum of R_n over visited hotspots.
double mission_sum_rate(const Tour& t, const Instance& inst);

/// 1 - levenshtein / max(len).
double word_similarity(const Word& a, const Word& b);

struct TestCase {
  int size = 0;
  int index = 0;
  Instance instance;
};

struct Pools {
  std::vector<Hotspot> training;
  std::vector<Hotspot> testing;
};

/// Per-instance outcome of the three methods.
struct Evaluation {
  TestCase test;
  Tour oracle;
  PlanResult ain;
  Word mql;
  Tour mql_tour;
  std::vector<MetricsRecord> records;
};

// Pure stage computations.
Pools generate_pools(const ExperimentConfig& cfg);
std::vector<Instance> training_instances(const ExperimentConfig& cfg, const Pools& pools);
std::vector<TestCase> test_cases(const ExperimentConfig& cfg, const Pools& pools);
std::vector<Tour> solve_all(const std::vector<Instance>& instances, const ObjectiveWeights& w,
                            int workers);
Evaluation evaluate_case(const TestCase& tc, const WorldModel& wm, const QTable& q,
                         const ExperimentConfig& cfg);
std::vector<Evaluation> evaluate_all(const std::vector<TestCase>& cases, const WorldModel& wm,
                                     const QTable& q, const ExperimentConfig& cfg);

/// CSV with a versioned header; byte-identical for identical records.
std::string metrics_csv(const std::vector<MetricsRecord>& records);
std::vector<MetricsRecord> parse_metrics_csv(const std::string& text);

struct SummaryRow {
  int test_size = 0;
  Method method = Method::oracle;
  int count = 0;
  double mean_sum_rate = 0.0, ci_sum_rate = 0.0;
  double mean_completion_time = 0.0, ci_completion_time = 0.0;
  double mean_similarity = 0.0, ci_similarity = 0.0;
  double mean_tour_length = 0.0;
};

/// Per (test size, method) means and 95% normal-approximation half-widths.
std::vector<SummaryRow> summarize(const std::vector<MetricsRecord>& records);
std::string summary_csv(const std::vector<SummaryRow>& rows);

/// Artifact-backed pipeline rooted at cfg.output_dir. Each ensure_* loads
/// its artifact when present and computes and writes it otherwise.
class Pipeline {
 public:
  explicit Pipeline(ExperimentConfig cfg);

  const ExperimentConfig& config() const { return cfg_; }
  std::filesystem::path path(const std::string& name) const { return cfg_.output_dir / name; }

  Pools ensure_pools();
  std::vector<Instance> ensure_training_instances();
  std::vector<TestCase> ensure_test_cases();
  std::vector<Tour> ensure_oracle_tours();
  WorldModel ensure_world_model();
  QTable ensure_qtable();
  std::vector<MetricsRecord> ensure_metrics();
  /// Writes summary.csv and trajectory polylines from evaluation.json.
  std::vector<SummaryRow> report();
  /// Every stage in order, then report().
  std::vector<MetricsRecord> run();

 private:
  ExperimentConfig cfg_;
};

std::vector<SummaryRow> write_report(const std::filesystem::path& metrics_csv_path,
                                     const std::filesystem::path& evaluation_json_path,
                                     const std::filesystem::path& out_dir);

}  // namespace uavplan
