// Command-line front end for the experiment pipeline.
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "uavplan/errors.hpp"
#include "uavplan/harness.hpp"
#include "uavplan/serialization.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

void print_summary(const std::vector<uavplan::SummaryRow>& rows) {
  std::printf("%6s %-7s %5s %14s %12s %10s\n", "size", "method", "n", "sum_rate_bps",
              "time_s", "similarity");
  for (const auto& r : rows)
    std::printf("%6d %-7s %5d %14.6g %12.4f %10.4f\n", r.test_size, uavplan::method_name(r.method),
                r.count, r.mean_sum_rate, r.mean_completion_time, r.mean_similarity);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Self-supervised UAV path planning: oracle, world model, active-inference planner"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  app.add_option("-c,--config", config_path, "experiment config (JSON); defaults apply when omitted");
  app.add_option("-o,--out", out_dir, "output directory (overrides config)");
  app.add_option("-s,--seed", seed, "master seed (overrides config)");
  app.add_option("-j,--workers", workers, "worker threads (overrides config)");

  auto* gen_pool = app.add_subcommand("gen-pool", "sample training and testing hotspot pools");
  auto* gen_inst = app.add_subcommand("gen-instances", "sample training and test instances");
  auto* solve_oracle = app.add_subcommand("solve-oracle", "solve training instances with the oracle");
  auto* train_world = app.add_subcommand("train-world", "learn the world model from oracle tours");
  auto* train_ql = app.add_subcommand("train-ql", "train the modified Q-learning baseline");
  auto* plan = app.add_subcommand("plan", "plan one instance with the active-inference planner");
  std::string plan_instance, plan_model, plan_output;
  plan->add_option("--instance", plan_instance, "instance JSON")->required();
  plan->add_option("--model", plan_model, "world model JSON (default: <out>/world_model.json)");
  plan->add_option("--trace", plan_output, "write the plan trace here (default: stdout)");
  auto* eval = app.add_subcommand("eval", "run oracle, planner and baseline on the test instances");
  auto* report = app.add_subcommand("report", "summarize metrics and export trajectories");
  auto* run = app.add_subcommand("run", "every stage, then the report");

  CLI11_PARSE(app, argc, argv);

  try {
    uavplan::ExperimentConfig cfg;
    if (!config_path.empty()) cfg = uavplan::load_config(config_path);
    if (out_dir) cfg.output_dir = *out_dir;
    if (seed) cfg.seed = *seed;
    if (workers) cfg.workers = *workers;

    if (*plan) {
      const auto inst = uavplan::read_json(plan_instance).get<uavplan::Instance>();
      const auto model_path = plan_model.empty() ? cfg.output_dir / "world_model.json"
                                                 : std::filesystem::path(plan_model);
      const auto wm = uavplan::read_json(model_path).get<uavplan::WorldModel>();
      uavplan::PlannerConfig pc = cfg.planner;
      pc.weights = cfg.weights;
      const auto result = uavplan::plan_mission(inst, wm, pc);
      const uavplan::json trace = result;
      if (plan_output.empty())
        std::cout << trace.dump(1) << "\n";
      else
        uavplan::write_json_atomic(plan_output, trace);
      return 0;
    }

    uavplan::Pipeline pipeline(cfg);
    if (*gen_pool) {
      const auto pools = pipeline.ensure_pools();
      std::printf("pools: %zu training, %zu testing hotspots\n", pools.training.size(),
                  pools.testing.size());
    } else if (*gen_inst) {
      const auto train = pipeline.ensure_training_instances();
      const auto test = pipeline.ensure_test_cases();
      std::printf("instances: %zu training, %zu test\n", train.size(), test.size());
    } else if (*solve_oracle) {
      std::printf("oracle tours: %zu\n", pipeline.ensure_oracle_tours().size());
    } else if (*train_world) {
      const auto wm = pipeline.ensure_world_model();
      std::printf("world model: %zu letters, %zu distinct words, max row defect %.3g\n",
                  wm.vocabulary.size(), wm.words.size(), wm.global_transition.max_row_defect());
    } else if (*train_ql) {
      const auto q = pipeline.ensure_qtable();
      std::printf("q-table: %zu letters, %d episodes\n", q.vocabulary.size(), q.config.episodes);
    } else if (*eval) {
      std::printf("metrics rows: %zu\n", pipeline.ensure_metrics().size());
    } else if (*report) {
      print_summary(pipeline.report());
    } else if (*run) {
      pipeline.run();
      print_summary(pipeline.report());
    }
  } catch (const uavplan::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const uavplan::NumericError& e) {
    std::fprintf(stderr, "numeric error: %s\n", e.what());
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
