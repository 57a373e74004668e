#include "uavplan/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "uavplan/errors.hpp"
#include "uavplan/levenshtein.hpp"
#include "uavplan/random.hpp"
#include "uavplan/serialization.hpp"

namespace uavplan {

namespace fs = std::filesystem;

namespace {

constexpr const char* kMetricsHeader = "# uavplan-metrics v1";
constexpr const char* kMetricsColumns =
    "method,test_size,instance_index,instance_seed,total_sum_rate_bps,completion_time_s,"
    "tour_length_m,similarity_to_oracle,num_visited,num_hotspots";

std::string fmt_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

double elapsed_s(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

/// Runs fn(i) for i in [0, n) on up to `workers` threads.
template <typename Fn>
void parallel_for(std::size_t n, int workers, Fn fn) {
  const std::size_t k = std::clamp<std::size_t>(workers > 0 ? workers : 1, 1, std::max<std::size_t>(n, 1));
  if (k == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < k; ++t)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mu);
          if (!error) error = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

Method parse_method(const std::string& s) {
  if (s == "oracle") return Method::oracle;
  if (s == "ain") return Method::ain;
  if (s == "mql") return Method::mql;
  throw ConfigError("metrics: unknown method '" + s + "'");
}

}  // namespace

const char* method_name(Method m) {
  switch (m) {
    case Method::oracle: return "oracle";
    case Method::ain: return "ain";
    case Method::mql: return "mql";
  }
  return "oracle";
}

void ExperimentConfig::validate() const {
  if (training_pool_size < 1 || testing_pool_size < training_pool_size)
    throw ConfigError("config: need 1 <= training_pool_size <= testing_pool_size");
  if (training_examples < 1) throw ConfigError("config: training_examples must be >= 1");
  if (hotspots_per_example < 1 || hotspots_per_example > training_pool_size)
    throw ConfigError("config: hotspots_per_example must lie in [1, training_pool_size]");
  if (seeds_per_size < 0) throw ConfigError("config: seeds_per_size must be >= 0");
  for (int s : test_sizes)
    if (s < 1 || s > testing_pool_size) throw ConfigError("config: test size out of range");
  if (!(mean_users > 0.0)) throw ConfigError("config: mean_users must be positive");
  if (planner.num_words < 1) throw ConfigError("config: planner.num_words must be >= 1");
  channel.validate();
  mission.validate();
  weights.validate();
  ql.validate();
}

Point2 ExperimentConfig::depot() const {
  return depot_m.value_or(Point2(mission.area_side_m / 2.0, mission.area_side_m / 2.0));
}

nlohmann::json config_to_json(const ExperimentConfig& c) {
  json j{{"seed", c.seed},
         {"training_pool_size", c.training_pool_size},
         {"testing_pool_size", c.testing_pool_size},
         {"mean_users", c.mean_users},
         {"training_examples", c.training_examples},
         {"hotspots_per_example", c.hotspots_per_example},
         {"test_sizes", c.test_sizes},
         {"seeds_per_size", c.seeds_per_size},
         {"channel", c.channel},
         {"mission", c.mission},
         {"weights", c.weights},
         {"noise", c.noise},
         {"planner", c.planner},
         {"ql", c.ql},
         {"output_dir", c.output_dir.string()},
         {"workers", c.workers}};
  if (c.depot_m) j["depot_m"] = {c.depot_m->x(), c.depot_m->y()};
  return j;
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
  ExperimentConfig c;
  try {
    c.seed = j.value("seed", c.seed);
    c.training_pool_size = j.value("training_pool_size", c.training_pool_size);
    c.testing_pool_size = j.value("testing_pool_size", c.testing_pool_size);
    c.mean_users = j.value("mean_users", c.mean_users);
    c.training_examples = j.value("training_examples", c.training_examples);
    c.hotspots_per_example = j.value("hotspots_per_example", c.hotspots_per_example);
    c.test_sizes = j.value("test_sizes", c.test_sizes);
    c.seeds_per_size = j.value("seeds_per_size", c.seeds_per_size);
    if (j.contains("depot_m")) c.depot_m = Point2(j["depot_m"].at(0).get<double>(), j["depot_m"].at(1).get<double>());
    c.channel = j.value("channel", c.channel);
    c.mission = j.value("mission", c.mission);
    c.weights = j.value("weights", c.weights);
    c.noise = j.value("noise", c.noise);
    c.planner = j.value("planner", c.planner);
    c.ql = j.value("ql", c.ql);
    // The baseline's reward shaping mirrors the experiment's objective weights.
    if (!j.contains("ql") || !j["ql"].contains("weights")) c.ql.weights = c.weights;
    if (!j.contains("planner") || !j["planner"].contains("weights")) c.planner.weights = c.weights;
    c.output_dir = j.value("output_dir", c.output_dir.string());
    c.workers = j.value("workers", c.workers);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const fs::path& path) { return config_from_json(read_json(path)); }

double completion_time(const Tour& t, const MissionConfig& mission) {
  if (t.order.empty()) return 0.0;
  return t.total_cost_m / mission.uav_speed_m_per_s +
         mission.dwell_time_s * static_cast<double>(t.order.size());
}

double mission_sum_rate(const Tour& t, const Instance& inst) {
  // Summed in id order so that equal visited sets give bit-identical totals.
  std::vector<LetterId> ids = t.order;
  std::sort(ids.begin(), ids.end());
  double total = 0.0;
  for (auto id : ids) {
    const Hotspot* h = inst.find(id);
    if (h == nullptr) throw ConsistencyError("mission_sum_rate: unknown hotspot");
    total += h->profit_bps;
  }
  return total;
}

double word_similarity(const Word& a, const Word& b) {
  return similarity_ratio<LetterId>(a.letters, b.letters);
}

Pools generate_pools(const ExperimentConfig& cfg) {
  const std::uint64_t pool_seed = derive_seed(cfg.seed, {0});
  Pools p;
  p.training = sample_pool(pool_seed, cfg.training_pool_size, cfg.mean_users, cfg.mission, cfg.channel);
  p.testing = sample_pool(pool_seed, cfg.testing_pool_size, cfg.mean_users, cfg.mission, cfg.channel);
  return p;
}

std::vector<Instance> training_instances(const ExperimentConfig& cfg, const Pools& pools) {
  std::vector<Instance> out;
  out.reserve(cfg.training_examples);
  for (int m = 0; m < cfg.training_examples; ++m)
    out.push_back(sample_instance(derive_seed(cfg.seed, {1, static_cast<std::uint64_t>(m)}),
                                  pools.training, cfg.hotspots_per_example, cfg.depot(),
                                  cfg.channel, cfg.mission));
  return out;
}

std::vector<TestCase> test_cases(const ExperimentConfig& cfg, const Pools& pools) {
  std::vector<TestCase> out;
  for (int size : cfg.test_sizes)
    for (int k = 0; k < cfg.seeds_per_size; ++k) {
      const auto seed = derive_seed(
          cfg.seed, {2, static_cast<std::uint64_t>(size), static_cast<std::uint64_t>(k)});
      out.push_back({size, k,
                     sample_instance(seed, pools.testing, size, cfg.depot(), cfg.channel,
                                     cfg.mission)});
    }
  return out;
}

std::vector<Tour> solve_all(const std::vector<Instance>& instances, const ObjectiveWeights& w,
                            int workers) {
  std::vector<Tour> tours(instances.size());
  parallel_for(instances.size(), workers, [&](std::size_t i) { tours[i] = solve(instances[i], w); });
  return tours;
}

Evaluation evaluate_case(const TestCase& tc, const WorldModel& wm, const QTable& q,
                         const ExperimentConfig& cfg) {
  Evaluation ev;
  ev.test = tc;
  const Instance& inst = tc.instance;

  auto record = [&](Method m, const Tour& t, const Word& oracle_word, double secs) {
    MetricsRecord r;
    r.method = m;
    r.test_size = tc.size;
    r.instance_index = tc.index;
    r.instance_seed = inst.seed;
    r.total_sum_rate_bps = mission_sum_rate(t, inst);
    r.completion_time_s = completion_time(t, inst.mission);
    r.tour_length_m = t.total_cost_m;
    r.similarity_to_oracle = word_similarity(Word{t.order}, oracle_word);
    r.num_visited = static_cast<int>(t.order.size());
    r.num_hotspots = static_cast<int>(inst.hotspots.size());
    r.wall_clock_s = secs;
    return r;
  };

  auto t0 = std::chrono::steady_clock::now();
  ev.oracle = solve(inst, cfg.weights);
  const double oracle_s = elapsed_s(t0);
  const Word oracle_word{ev.oracle.order};

  PlannerConfig pc = cfg.planner;
  pc.seed = derive_seed(cfg.planner.seed, {4, inst.seed});
  t0 = std::chrono::steady_clock::now();
  ev.ain = plan_mission(inst, wm, pc);
  const double ain_s = elapsed_s(t0);

  t0 = std::chrono::steady_clock::now();
  ev.mql = construct_word(q, ev.ain.reference, inst, derive_seed(cfg.seed, {5, inst.seed}));
  ev.mql_tour = make_tour(ev.mql.letters, inst, cfg.weights);
  const double mql_s = elapsed_s(t0);

  ev.records.push_back(record(Method::oracle, ev.oracle, oracle_word, oracle_s));
  ev.records.push_back(record(Method::ain, ev.ain.tour, oracle_word, ain_s));
  ev.records.push_back(record(Method::mql, ev.mql_tour, oracle_word, mql_s));
  return ev;
}

std::vector<Evaluation> evaluate_all(const std::vector<TestCase>& cases, const WorldModel& wm,
                                     const QTable& q, const ExperimentConfig& cfg) {
  std::vector<Evaluation> out(cases.size());
  parallel_for(cases.size(), cfg.workers,
               [&](std::size_t i) { out[i] = evaluate_case(cases[i], wm, q, cfg); });
  return out;
}

std::string metrics_csv(const std::vector<MetricsRecord>& records) {
  std::ostringstream os;
  os << kMetricsHeader << "\n" << kMetricsColumns << "\n";
  for (const auto& r : records)
    os << method_name(r.method) << ',' << r.test_size << ',' << r.instance_index << ','
       << r.instance_seed << ',' << fmt_double(r.total_sum_rate_bps) << ','
       << fmt_double(r.completion_time_s) << ',' << fmt_double(r.tour_length_m) << ','
       << fmt_double(r.similarity_to_oracle) << ',' << r.num_visited << ',' << r.num_hotspots
       << "\n";
  return os.str();
}

std::vector<MetricsRecord> parse_metrics_csv(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  std::vector<MetricsRecord> out;
  if (!std::getline(is, line) || line != kMetricsHeader)
    throw ConfigError("metrics: missing or unsupported header");
  if (!std::getline(is, line) || line != kMetricsColumns)
    throw ConfigError("metrics: unexpected column layout");
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) f.push_back(cell);
    if (f.size() != 10) throw ConfigError("metrics: malformed row '" + line + "'");
    MetricsRecord r;
    try {
      r.method = parse_method(f[0]);
      r.test_size = std::stoi(f[1]);
      r.instance_index = std::stoi(f[2]);
      r.instance_seed = std::stoull(f[3]);
      r.total_sum_rate_bps = std::stod(f[4]);
      r.completion_time_s = std::stod(f[5]);
      r.tour_length_m = std::stod(f[6]);
      r.similarity_to_oracle = std::stod(f[7]);
      r.num_visited = std::stoi(f[8]);
      r.num_hotspots = std::stoi(f[9]);
    } catch (const std::logic_error&) {
      throw ConfigError("metrics: malformed row '" + line + "'");
    }
    out.push_back(r);
  }
  return out;
}

std::vector<SummaryRow> summarize(const std::vector<MetricsRecord>& records) {
  std::map<std::pair<int, int>, std::vector<const MetricsRecord*>> groups;
  for (const auto& r : records) groups[{r.test_size, static_cast<int>(r.method)}].push_back(&r);
  auto mean_ci = [](const std::vector<double>& v) {
    const double n = static_cast<double>(v.size());
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= n;
    if (v.size() < 2) return std::pair{mean, 0.0};
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return std::pair{mean, 1.96 * std::sqrt(ss / (n - 1.0)) / std::sqrt(n)};
  };
  std::vector<SummaryRow> rows;
  for (const auto& [key, group] : groups) {
    SummaryRow s;
    s.test_size = key.first;
    s.method = static_cast<Method>(key.second);
    s.count = static_cast<int>(group.size());
    std::vector<double> rate, time, sim, len;
    for (const auto* r : group) {
      rate.push_back(r->total_sum_rate_bps);
      time.push_back(r->completion_time_s);
      sim.push_back(r->similarity_to_oracle);
      len.push_back(r->tour_length_m);
    }
    std::tie(s.mean_sum_rate, s.ci_sum_rate) = mean_ci(rate);
    std::tie(s.mean_completion_time, s.ci_completion_time) = mean_ci(time);
    std::tie(s.mean_similarity, s.ci_similarity) = mean_ci(sim);
    s.mean_tour_length = mean_ci(len).first;
    rows.push_back(s);
  }
  return rows;
}

std::string summary_csv(const std::vector<SummaryRow>& rows) {
  std::ostringstream os;
  os << "# uavplan-summary v1\n"
     << "test_size,method,count,mean_sum_rate_bps,ci95_sum_rate_bps,mean_completion_time_s,"
        "ci95_completion_time_s,mean_similarity,ci95_similarity,mean_tour_length_m\n";
  for (const auto& s : rows)
    os << s.test_size << ',' << method_name(s.method) << ',' << s.count << ','
       << fmt_double(s.mean_sum_rate) << ',' << fmt_double(s.ci_sum_rate) << ','
       << fmt_double(s.mean_completion_time) << ',' << fmt_double(s.ci_completion_time) << ','
       << fmt_double(s.mean_similarity) << ',' << fmt_double(s.ci_similarity) << ','
       << fmt_double(s.mean_tour_length) << "\n";
  return os.str();
}

namespace {

std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Config fields that do not influence any artifact.
json artifact_config(const ExperimentConfig& cfg) {
  json j = config_to_json(cfg);
  j.erase("output_dir");
  j.erase("workers");
  return j;
}

json polyline(const Instance& inst, const std::vector<LetterId>& order) {
  json pts = json::array();
  pts.push_back({inst.depot_m.x(), inst.depot_m.y()});
  for (auto id : order) {
    const Hotspot* h = inst.find(id);
    pts.push_back({h->center_m.x(), h->center_m.y()});
  }
  pts.push_back({inst.depot_m.x(), inst.depot_m.y()});
  return pts;
}

}  // namespace

Pipeline::Pipeline(ExperimentConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.validate();
  fs::create_directories(cfg_.output_dir);
  const auto cfg_path = path("config.json");
  const json mine = artifact_config(cfg_);
  if (fs::exists(cfg_path)) {
    if (read_json(cfg_path) != mine)
      throw ConfigError(cfg_.output_dir.string() +
                        " holds artifacts of a different configuration");
  } else {
    write_json_atomic(cfg_path, mine);
  }
}

Pools Pipeline::ensure_pools() {
  const auto train = path("pool_train.json");
  const auto test = path("pool_test.json");
  if (fs::exists(train) && fs::exists(test))
    return {read_json(train).at("hotspots").get<std::vector<Hotspot>>(),
            read_json(test).at("hotspots").get<std::vector<Hotspot>>()};
  Pools p = generate_pools(cfg_);
  auto doc = [&](const std::vector<Hotspot>& hs) {
    return json{{"format", "uavplan-pool/1"},
                {"seed", derive_seed(cfg_.seed, {0})},
                {"mean_users", cfg_.mean_users},
                {"channel", cfg_.channel},
                {"mission", cfg_.mission},
                {"hotspots", hs}};
  };
  write_json_atomic(train, doc(p.training));
  write_json_atomic(test, doc(p.testing));
  return p;
}

std::vector<Instance> Pipeline::ensure_training_instances() {
  const auto p = path("training_instances.json");
  if (fs::exists(p)) return read_json(p).at("instances").get<std::vector<Instance>>();
  auto inst = training_instances(cfg_, ensure_pools());
  write_json_atomic(p, json{{"format", "uavplan-instances/1"}, {"instances", inst}});
  return inst;
}

std::vector<TestCase> Pipeline::ensure_test_cases() {
  const auto p = path("test_instances.json");
  if (fs::exists(p)) {
    std::vector<TestCase> out;
    const json doc = read_json(p);
    for (const auto& c : doc.at("cases"))
      out.push_back({c.at("size").get<int>(), c.at("index").get<int>(), c.at("instance").get<Instance>()});
    return out;
  }
  auto cases = test_cases(cfg_, ensure_pools());
  json arr = json::array();
  for (const auto& c : cases) arr.push_back({{"size", c.size}, {"index", c.index}, {"instance", c.instance}});
  write_json_atomic(p, json{{"format", "uavplan-test-cases/1"}, {"cases", arr}});
  return cases;
}

std::vector<Tour> Pipeline::ensure_oracle_tours() {
  const auto p = path("oracle_tours.json");
  if (fs::exists(p)) return read_json(p).at("tours").get<std::vector<Tour>>();
  auto tours = solve_all(ensure_training_instances(), cfg_.weights, cfg_.workers);
  write_json_atomic(p, json{{"format", "uavplan-tours/1"}, {"weights", cfg_.weights}, {"tours", tours}});
  return tours;
}

WorldModel Pipeline::ensure_world_model() {
  const auto p = path("world_model.json");
  if (fs::exists(p)) return read_json(p).get<WorldModel>();
  WorldModel wm = learn(ensure_oracle_tours(), ensure_pools().training, cfg_.mission, cfg_.noise);
  write_json_atomic(p, wm);
  return wm;
}

QTable Pipeline::ensure_qtable() {
  const auto p = path("qtable.json");
  if (fs::exists(p)) return read_json(p).get<QTable>();
  QTable q = train_q(ensure_training_instances(), ensure_oracle_tours(), cfg_.ql,
                     derive_seed(cfg_.seed, {3}));
  write_json_atomic(p, q);
  return q;
}

std::vector<MetricsRecord> Pipeline::ensure_metrics() {
  const auto p = path("metrics.csv");
  if (fs::exists(p) && fs::exists(path("evaluation.json"))) return parse_metrics_csv(read_text(p));
  const auto cases = ensure_test_cases();
  const WorldModel wm = ensure_world_model();
  const QTable q = ensure_qtable();
  const auto evals = evaluate_all(cases, wm, q, cfg_);

  std::vector<MetricsRecord> records;
  json eval_doc = json::array();
  std::ostringstream timings;
  timings << "method,test_size,instance_index,wall_clock_s\n";
  for (const auto& ev : evals) {
    records.insert(records.end(), ev.records.begin(), ev.records.end());
    for (const auto& r : ev.records)
      timings << method_name(r.method) << ',' << r.test_size << ',' << r.instance_index << ','
              << fmt_double(r.wall_clock_s) << "\n";
    const Instance& inst = ev.test.instance;
    eval_doc.push_back({{"size", ev.test.size},
                        {"index", ev.test.index},
                        {"seed", inst.seed},
                        {"oracle", {{"word", ev.oracle.order}, {"polyline", polyline(inst, ev.oracle.order)}}},
                        {"ain", {{"word", ev.ain.final_word}, {"polyline", polyline(inst, ev.ain.final_word.letters)}}},
                        {"mql", {{"word", ev.mql}, {"polyline", polyline(inst, ev.mql.letters)}}}});
    write_json_atomic(path("traces") / ("plan_" + std::to_string(ev.test.size) + "_" +
                                        std::to_string(ev.test.index) + ".json"),
                      json(ev.ain));
  }
  write_json_atomic(path("evaluation.json"), json{{"format", "uavplan-evaluation/1"}, {"cases", eval_doc}});
  write_text_atomic(path("timings.csv"), timings.str());
  write_text_atomic(p, metrics_csv(records));
  return records;
}

std::vector<SummaryRow> write_report(const fs::path& metrics_csv_path,
                                     const fs::path& evaluation_json_path, const fs::path& out_dir) {
  const auto records = parse_metrics_csv(read_text(metrics_csv_path));
  if (records.empty()) throw ConfigError("report: no metrics rows");
  const auto rows = summarize(records);
  write_text_atomic(out_dir / "summary.csv", summary_csv(rows));
  if (fs::exists(evaluation_json_path)) {
    const json doc = read_json(evaluation_json_path);
    for (const auto& c : doc.at("cases")) {
      for (const char* m : {"oracle", "ain", "mql"}) {
        std::ostringstream os;
        os << "x_m,y_m\n";
        for (const auto& pt : c.at(m).at("polyline"))
          os << fmt_double(pt[0].get<double>()) << ',' << fmt_double(pt[1].get<double>()) << "\n";
        write_text_atomic(out_dir / "trajectories" /
                              (std::to_string(c.at("size").get<int>()) + "_" +
                               std::to_string(c.at("index").get<int>()) + "_" + m + ".csv"),
                          os.str());
      }
    }
  }
  return rows;
}

std::vector<SummaryRow> Pipeline::report() {
  ensure_metrics();
  return write_report(path("metrics.csv"), path("evaluation.json"), cfg_.output_dir);
}

std::vector<MetricsRecord> Pipeline::run() {
  ensure_pools();
  ensure_training_instances();
  ensure_test_cases();
  ensure_oracle_tours();
  ensure_world_model();
  ensure_qtable();
  auto records = ensure_metrics();
  report();
  return records;
}

}  // namespace uavplan
