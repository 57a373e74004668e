// Acceptance suite: one PASS/FAIL line per criterion. Exit status is
// nonzero when any gating criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "support/oracles.hpp"
#include "uavplan/active_planner.hpp"
#include "uavplan/gaussian.hpp"
#include "uavplan/harness.hpp"
#include "uavplan/oracle.hpp"
#include "uavplan/random.hpp"
#include "uavplan/serialization.hpp"
#include "uavplan/world_model.hpp"

using namespace uavplan;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int failures = 0;

void report(const char* id, bool pass, const std::string& what, const std::string& detail,
            bool gating = true) {
  std::printf("%s  %-3s %s: %s%s\n", pass ? "PASS" : "FAIL", id, what.c_str(), detail.c_str(),
              gating ? "" : " [non-gating]");
  std::fflush(stdout);
  if (!pass && gating) ++failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const ObjectiveWeights kWeights{0.9, 0.1, ObjectiveScaling::raw};

template <typename T>
void shuffle(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[uniform_index(rng, i)]);
}

void oracle_quality() {
  const auto t0 = Clock::now();
  const MissionConfig mission;
  const ChannelParams chan;
  const Point2 depot(1000, 1000);
  int exact = 0;
  double gap_sum = 0.0;
  const int n = 200;
  for (int k = 0; k < n; ++k) {
    const auto seed = derive_seed(1001, {static_cast<std::uint64_t>(k)});
    const auto pool = sample_pool(derive_seed(seed, {0}), 50, 5.0, mission, chan);
    const auto inst = sample_instance(derive_seed(seed, {1}), pool, 7, depot, chan, mission);
    const double got = solve(inst, kWeights).objective;
    const double best = brute_force(inst, kWeights).objective;
    const double gap = std::abs(got - best) / std::max(1.0, std::abs(best));
    exact += gap <= 1e-9;
    gap_sum += gap;
  }
  const double secs = seconds_since(t0);
  const double rate = static_cast<double>(exact) / n;
  const double mean_gap = gap_sum / n;
  report("1", rate >= 0.90 && mean_gap <= 0.02 && secs < 30.0, "oracle quality",
         fmt("%d/%d exact (%.1f%%, need >= 90%%), mean relative gap %.3g (need <= 0.02), %.2f s "
             "(need < 30 s)",
             exact, n, 100.0 * rate, mean_gap, secs));
}

void world_model_correctness() {
  const auto t0 = Clock::now();
  ExperimentConfig cfg;  // M = 5000 five-hotspot examples, 50-hotspot pool
  const Pools pools = generate_pools(cfg);
  const auto instances = training_instances(cfg, pools);
  const auto tours = solve_all(instances, cfg.weights, 1);
  const WorldModel wm = learn(tours, pools.training, cfg.mission, cfg.noise);

  auto shuffled_a = tours, shuffled_b = tours;
  Rng ra(derive_seed(5, {1})), rb(derive_seed(5, {2}));
  shuffle(shuffled_a, ra);
  shuffle(shuffled_b, rb);
  const std::string ja = json(learn(shuffled_a, pools.training, cfg.mission, cfg.noise)).dump();
  const std::string jb = json(learn(shuffled_b, pools.training, cfg.mission, cfg.noise)).dump();
  const std::string j0 = json(wm).dump();
  const double secs = seconds_since(t0);

  const double defect = wm.global_transition.max_row_defect();
  std::size_t active = 0;
  for (bool a : wm.global_transition.active) active += a;
  const bool same = ja == jb && ja == j0;
  report("2", defect <= 1e-9 && same && secs < 120.0, "world-model correctness",
         fmt("M=%zu, %zu active rows, max |row sum - 1| = %.3g (need <= 1e-9), shuffled runs %s, "
             "%.2f s (need < 120 s)",
             tours.size(), active, defect, same ? "identical" : "DIFFER", secs));
}

void bhattacharyya_oracle() {
  Rng rng(derive_seed(3003, {}));
  double worst = 0.0, worst_identical = 0.0;
  const int n = 50;
  for (int k = 0; k < n; ++k) {
    auto draw = [&] {
      const double sxx = 0.2 + 3.0 * uniform01(rng), syy = 0.2 + 3.0 * uniform01(rng);
      const double rho = 1.8 * uniform01(rng) - 0.9;
      return oracles::Gauss2{3.0 * uniform01(rng) - 1.5, 3.0 * uniform01(rng) - 1.5, sxx,
                             rho * std::sqrt(sxx * syy), syy};
    };
    const auto a = draw(), b = draw();
    auto belief = [](const oracles::Gauss2& g) {
      GaussianBelief out;
      out.mean << g.mx, g.my;
      out.covariance << g.sxx, g.sxy, g.sxy, g.syy;
      return out;
    };
    const double closed = expected_surprise(belief(a), belief(b));
    worst = std::max(worst, std::abs(closed - oracles::bhattacharyya_quadrature(a, b)));
    worst_identical = std::max(worst_identical, expected_surprise(belief(a), belief(a)));
  }
  report("3", worst <= 1e-6 && worst_identical < 1e-12, "Bhattacharyya oracle",
         fmt("%d pairs, max |closed form - quadrature| = %.3g (need <= 1e-6), identical case max "
             "%.3g (need < 1e-12)",
             n, worst, worst_identical));
}

void edit_distance_oracle() {
  Rng rng(derive_seed(4004, {}));
  int agree = 0;
  const int n = 1000;
  for (int k = 0; k < n; ++k) {
    Word a, b;
    a.letters.resize(uniform_index(rng, 31));
    b.letters.resize(uniform_index(rng, 31));
    for (auto& x : a.letters) x = 1 + static_cast<LetterId>(uniform_index(rng, 12));
    for (auto& x : b.letters) x = 1 + static_cast<LetterId>(uniform_index(rng, 12));
    agree += levenshtein(a, b) == oracles::edit_distance_table(a.letters, b.letters);
  }
  report("4", agree == n, "edit-distance oracle", fmt("%d/%d agree (need 100%%)", agree, n));
}

void cheapest_insertion_degeneration() {
  Rng rng(derive_seed(5005, {}));
  const MissionConfig mission;
  int agree = 0, ties = 0;
  const int n = 100;
  for (int k = 0; k < n; ++k) {
    const int letters = 1 + static_cast<int>(uniform_index(rng, 15));
    PlanningContext ctx;
    ctx.mission = mission;
    ctx.depot_m = Point2(mission.area_side_m * uniform01(rng), mission.area_side_m * uniform01(rng));
    std::vector<LetterId> ids;
    for (int i = 1; i <= letters + 1; ++i) {
      ctx.letters[i] = {Point2(mission.area_side_m * uniform01(rng),
                               mission.area_side_m * uniform01(rng)),
                        0.0};
      ids.push_back(i);
    }
    shuffle(ids, rng);
    const LetterId novel = ids.back();
    ids.pop_back();
    ctx.process_cov = 1e-12 * Eigen::Matrix2d::Identity();
    ctx.measurement_cov = 0.25 * ctx.process_cov;

    const ReferenceGraph ref{Word{ids}};
    InsertionStep step;
    insert_best(ref, novel, ctx, &step);

    // Direct minimal added detour over the closed tour's edges.
    std::vector<LetterId> closed{kDepot};
    closed.insert(closed.end(), ids.begin(), ids.end());
    closed.push_back(kDepot);
    const Point2 x = ctx.letters.at(novel).center_m;
    auto at = [&](LetterId id) { return id == kDepot ? ctx.depot_m : ctx.letters.at(id).center_m; };
    std::vector<double> detours;
    for (std::size_t e = 0; e + 1 < closed.size(); ++e) {
      const Point2 u = at(closed[e]), v = at(closed[e + 1]);
      detours.push_back((u - x).norm() + (x - v).norm() - (u - v).norm());
    }
    const double best = *std::min_element(detours.begin(), detours.end());
    // A one-letter reference has two edges forming the same triangle, so
    // the minimum is shared; any edge attaining it is the same choice.
    int minimal = 0;
    for (double d : detours) minimal += d <= best + 1e-9 * std::max(1.0, best);
    ties += minimal > 1;
    const double chosen = detours[step.candidates[step.winner].edge_index];
    agree += chosen <= best + 1e-9 * std::max(1.0, best);
  }
  report("5", agree == n, "cheapest-insertion degeneration",
         fmt("%d/%d cases pick a minimal-detour edge (need 100%%); %d cases with tied minima",
             agree, n, ties));
}

struct PipelineOutcome {
  std::vector<MetricsRecord> metrics;
  fs::path dir;
  double seconds = 0.0;
};

PipelineOutcome run_pipeline(const fs::path& dir, int workers) {
  fs::remove_all(dir);
  ExperimentConfig cfg;
  cfg.seeds_per_size = 30;
  cfg.output_dir = dir;
  cfg.workers = workers;
  const auto t0 = Clock::now();
  PipelineOutcome out;
  out.metrics = Pipeline(cfg).run();
  out.seconds = seconds_since(t0);
  out.dir = dir;
  return out;
}

void experiment_criteria(const PipelineOutcome& run) {
  // (size, index) -> method -> record
  std::map<std::pair<int, int>, std::map<Method, MetricsRecord>> by_case;
  for (const auto& r : run.metrics) by_case[{r.test_size, r.instance_index}][r.method] = r;

  int checked = 0, equal = 0, uncovered = 0;
  std::map<int, int> sizes;
  for (const auto& [key, m] : by_case) {
    const auto& ain = m.at(Method::ain);
    const auto& orc = m.at(Method::oracle);
    if (ain.num_visited != ain.num_hotspots) {
      ++uncovered;
      continue;
    }
    ++checked;
    ++sizes[key.first];
    equal += ain.total_sum_rate_bps == orc.total_sum_rate_bps;
  }
  report("6", checked >= 120 && equal == checked && sizes.size() == 6, "sum-rate reproduction",
         fmt("%d/%d full-coverage instances over %zu sizes match the oracle exactly (need all, "
             ">= 120 instances); %d without full coverage",
             equal, checked, sizes.size(), uncovered));

  double t_or = 0, t_ain = 0, t_mql = 0, s_ain = 0, s_mql = 0;
  int n20 = 0;
  for (const auto& [key, m] : by_case) {
    if (key.first != 20) continue;
    ++n20;
    t_or += m.at(Method::oracle).completion_time_s;
    t_ain += m.at(Method::ain).completion_time_s;
    t_mql += m.at(Method::mql).completion_time_s;
    s_ain += m.at(Method::ain).similarity_to_oracle;
    s_mql += m.at(Method::mql).similarity_to_oracle;
  }
  t_or /= n20;
  t_ain /= n20;
  t_mql /= n20;
  s_ain /= n20;
  s_mql /= n20;
  const double ratio = t_ain / t_or;
  report("7", n20 >= 30 && t_or <= t_ain && t_ain < t_mql && run.seconds < 600.0,
         "completion-time ordering",
         fmt("%d twenty-hotspot instances, mean completion oracle %.1f s <= AIn %.1f s < MQL %.1f "
             "s; pipeline %.1f s (need < 600 s)",
             n20, t_or, t_ain, t_mql, run.seconds));
  report("7b", ratio <= 1.25, "completion-time ratio target",
         fmt("AIn / oracle = %.3f (target <= 1.25)", ratio), false);
  report("8", n20 >= 30 && s_ain > s_mql, "similarity ordering",
         fmt("mean similarity to the oracle word AIn %.4f > MQL %.4f over %d instances", s_ain,
             s_mql, n20));
}

}  // namespace

int main() {
  const fs::path root = fs::temp_directory_path() / "uavplan_acceptance";
  try {
    oracle_quality();
    world_model_correctness();
    bhattacharyya_oracle();
    edit_distance_oracle();
    cheapest_insertion_degeneration();

    const auto first = run_pipeline(root / "run_a", 1);
    experiment_criteria(first);

    const auto second = run_pipeline(root / "run_b", 2);
    const std::string a = slurp(first.dir / "metrics.csv");
    const std::string b = slurp(second.dir / "metrics.csv");
    report("9", !a.empty() && a == b, "determinism audit",
           fmt("metrics.csv of two fresh runs (1 and 2 workers): %zu bytes, %s", a.size(),
               a == b ? "byte-identical" : "DIFFER"));
  } catch (const std::exception& e) {
    std::printf("FAIL  acceptance aborted: %s\n", e.what());
    ++failures;
  }
  fs::remove_all(root);
  std::printf("%s: %d gating criteria failed\n", failures == 0 ? "ACCEPTED" : "REJECTED", failures);
  return failures == 0 ? 0 : 1;
}
