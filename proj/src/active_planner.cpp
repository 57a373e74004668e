#include "uavplan/active_planner.hpp"

#include <algorithm>
#include <limits>

#include "uavplan/errors.hpp"
#include "uavplan/levenshtein.hpp"
#include "uavplan/random.hpp"

namespace uavplan {

const Point2& PlanningContext::position(LetterId node) const {
  if (node == kDepot) return depot_m;
  auto it = letters.find(node);
  if (it == letters.end()) throw ConsistencyError("planner: unknown letter " + std::to_string(node));
  return it->second.center_m;
}

double PlanningContext::profit(LetterId node) const {
  if (node == kDepot) return 0.0;
  auto it = letters.find(node);
  if (it == letters.end()) throw ConsistencyError("planner: unknown letter " + std::to_string(node));
  return it->second.expected_profit_bps;
}

PlanningContext make_context(const WorldModel& wm, const Instance& inst) {
  PlanningContext ctx;
  ctx.depot_m = inst.depot_m;
  ctx.mission = inst.mission;
  ctx.process_cov = wm.process_cov;
  ctx.measurement_cov = wm.measurement_cov;
  for (const auto& h : inst.hotspots) {
    LetterInfo info{h.center_m, h.profit_bps};
    if (wm.vocabulary.contains(h.id)) info.expected_profit_bps = wm.stats(h.id).mean_profit_bps;
    ctx.letters[h.id] = info;
  }
  return ctx;
}

std::vector<Edge> ReferenceGraph::edges() const {
  if (word.empty()) return {{kDepot, kDepot}};
  std::vector<Edge> out;
  out.reserve(word.size() + 1);
  LetterId prev = kDepot;
  for (auto id : word.letters) {
    out.emplace_back(prev, id);
    prev = id;
  }
  out.emplace_back(prev, kDepot);
  return out;
}

LetterClasses classify_letters(std::span<const LetterId> test_ids, const WorldModel& wm) {
  LetterClasses c;
  for (auto id : test_ids) (wm.vocabulary.contains(id) ? c.normal : c.novel).push_back(id);
  std::sort(c.normal.begin(), c.normal.end());
  std::sort(c.novel.begin(), c.novel.end());
  return c;
}

namespace {

/// Index drawn proportionally to nonnegative weights; -1 when all are zero.
int sample_weighted(std::span<const double> weights, Rng& rng) {
  double total = 0.0;
  for (double w : weights) total += w;
  if (!(total > 0.0)) return -1;
  const double u = uniform01(rng) * total;
  double acc = 0.0;
  int last_positive = -1;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    acc += weights[i];
    last_positive = static_cast<int>(i);
    if (u < acc) return last_positive;
  }
  return last_positive;
}

}  // namespace

std::vector<Word> generate_words(const WorldModel& wm, std::span<const LetterId> normal_in, int n,
                                 std::uint64_t rng_seed) {
  if (n < 1) throw ConfigError("generate_words: n must be >= 1");
  std::vector<LetterId> normal(normal_in.begin(), normal_in.end());
  std::sort(normal.begin(), normal.end());
  if (normal.empty()) return {};
  for (auto id : normal)
    if (!wm.vocabulary.contains(id))
      throw ConsistencyError("generate_words: letter " + std::to_string(id) + " is novel");

  std::vector<double> start_w, occ_w;
  for (auto id : normal) {
    start_w.push_back(wm.stats(id).start_count);
    occ_w.push_back(wm.stats(id).occurrences);
  }
  const auto& pi = wm.global_transition;

  std::vector<Word> out;
  out.reserve(n);
  Rng rng(derive_seed(rng_seed, {0x776f7264ULL}));
  for (int k = 0; k < n; ++k) {
    Word w;
    std::vector<bool> used(normal.size(), false);
    int cur = sample_weighted(start_w, rng);
    if (cur < 0) cur = sample_weighted(occ_w, rng);
    used[cur] = true;
    w.letters.push_back(normal[cur]);
    for (std::size_t step = 1; step < normal.size(); ++step) {
      const std::size_t row = wm.vocabulary.at(normal[cur]);
      std::vector<double> succ(normal.size(), 0.0);
      if (pi.row_active(row))
        for (std::size_t j = 0; j < normal.size(); ++j)
          if (!used[j]) succ[j] = pi.probs(row, wm.vocabulary.at(normal[j]));
      int next = sample_weighted(succ, rng);
      if (next < 0) {
        double best = std::numeric_limits<double>::infinity();
        const Point2& here = wm.stats(normal[cur]).center_m;
        for (std::size_t j = 0; j < normal.size(); ++j) {
          if (used[j]) continue;
          const double d = edge_cost(here, wm.stats(normal[j]).center_m);
          if (d < best) {
            best = d;
            next = static_cast<int>(j);
          }
        }
      }
      used[next] = true;
      cur = next;
      w.letters.push_back(normal[cur]);
    }
    out.push_back(std::move(w));
  }
  return out;
}

std::size_t levenshtein(const Word& a, const Word& b) {
  return uavplan::levenshtein<LetterId>(a.letters, b.letters);
}

ReferenceChoice select_reference(std::span<const Word> candidates, const WorldModel& wm) {
  if (candidates.empty()) throw ConfigError("select_reference: no candidates");
  ReferenceChoice best{0, std::numeric_limits<std::size_t>::max()};
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    std::size_t d = std::numeric_limits<std::size_t>::max();
    for (const auto& e : wm.words) d = std::min(d, levenshtein(candidates[i], e.word));
    if (d < best.distance) best = {i, d};
  }
  if (best.distance == std::numeric_limits<std::size_t>::max()) best.distance = 0;
  return best;
}

namespace {

double word_length(const Word& w, const PlanningContext& ctx) {
  double total = 0.0;
  for (const auto& [u, v] : ReferenceGraph{w}.edges()) total += edge_cost(ctx.position(u), ctx.position(v));
  return total;
}

}  // namespace

std::vector<PlanCandidate> enumerate_insertions(const ReferenceGraph& ref, LetterId novel,
                                                const PlanningContext& ctx,
                                                std::size_t first_edge) {
  if (ref.word.contains(novel))
    throw ConsistencyError("enumerate_insertions: letter " + std::to_string(novel) +
                           " already in the graph");
  const auto edges = ref.edges();
  std::vector<PlanCandidate> out;
  for (std::size_t e = first_edge; e < edges.size(); ++e) {
    PlanCandidate c;
    c.removed_edge = edges[e];
    c.inserted = novel;
    c.edge_index = e;
    c.candidate_word = ref.word;
    // Edge e runs from position e-1 (or the depot) to position e.
    c.candidate_word.letters.insert(c.candidate_word.letters.begin() + e, novel);
    c.tour_length_m = word_length(c.candidate_word, ctx);
    out.push_back(std::move(c));
  }
  return out;
}

GaussianBelief kalman_predict(const GaussianBelief& b, LetterId from, LetterId to,
                              const PlanningContext& ctx) {
  const double leg = edge_cost(ctx.position(from), ctx.position(to));
  const double dwell = to == kDepot ? 0.0 : ctx.mission.dwell_time_s;
  const Eigen::Vector2d control(ctx.profit(to), leg / ctx.mission.uav_speed_m_per_s + dwell);
  return kalman_time_update(b, control, ctx.process_cov);
}

GaussianBelief rollout(const Word& word, const PlanningContext& ctx, const GaussianBelief& b0) {
  if (word.empty()) return b0;
  GaussianBelief b = b0;
  for (const auto& [u, v] : ReferenceGraph{word}.edges()) b = kalman_predict(b, u, v, ctx);
  return b;
}

double expected_surprise(const GaussianBelief& ref_belief, const GaussianBelief& cand_obs) {
  return bhattacharyya_distance(ref_belief, cand_obs);
}

GaussianBelief insertion_target(const ReferenceGraph& ref, LetterId novel,
                                const PlanningContext& ctx) {
  GaussianBelief target = rollout(ref.word, ctx);
  const std::size_t extra_steps = ref.word.empty() ? 2 : 1;
  target.mean += Eigen::Vector2d(ctx.profit(novel), ctx.mission.dwell_time_s);
  target.covariance += static_cast<double>(extra_steps) * ctx.process_cov;
  return target;
}

ReferenceGraph insert_best(const ReferenceGraph& ref, LetterId novel, const PlanningContext& ctx,
                           InsertionStep* trace, std::size_t first_edge) {
  auto candidates = enumerate_insertions(ref, novel, ctx, first_edge);
  if (candidates.empty()) throw ConsistencyError("insert_best: no admissible edge");
  const GaussianBelief target = insertion_target(ref, novel, ctx);
  std::size_t best = 0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    auto& c = candidates[i];
    c.predicted_obs = observe(rollout(c.candidate_word, ctx), ctx.measurement_cov);
    c.surprise = expected_surprise(target, c.predicted_obs);
    if (i == 0) continue;
    const auto& b = candidates[best];
    const bool better =
        c.surprise < b.surprise ||
        (c.surprise == b.surprise &&
         (c.tour_length_m < b.tour_length_m ||
          (c.tour_length_m == b.tour_length_m && c.candidate_word < b.candidate_word)));
    if (better) best = i;
  }
  ReferenceGraph next{candidates[best].candidate_word};
  if (trace != nullptr) {
    trace->inserted = novel;
    trace->winner = best;
    trace->candidates = std::move(candidates);
  }
  return next;
}

namespace {

std::size_t pick_next(const ReferenceGraph& g, const std::vector<LetterId>& pending,
                      const PlanningContext& ctx, InsertionOrder order) {
  if (order == InsertionOrder::as_given) return 0;
  Point2 centroid = ctx.depot_m;
  for (auto id : g.word.letters) centroid += ctx.position(id);
  centroid /= static_cast<double>(g.word.size() + 1);
  std::size_t best = 0;
  for (std::size_t i = 1; i < pending.size(); ++i) {
    const double di = edge_cost(centroid, ctx.position(pending[i]));
    const double db = edge_cost(centroid, ctx.position(pending[best]));
    const bool better = order == InsertionOrder::nearest_to_centroid ? di < db : di > db;
    if (better || (di == db && pending[i] < pending[best])) best = i;
  }
  return best;
}

}  // namespace

ReferenceGraph insert_all(ReferenceGraph graph, std::vector<LetterId> pending,
                          const PlanningContext& ctx, InsertionOrder order,
                          std::vector<InsertionStep>* trace, std::size_t first_edge) {
  while (!pending.empty()) {
    const std::size_t k = pick_next(graph, pending, ctx, order);
    const LetterId letter = pending[k];
    pending.erase(pending.begin() + k);
    InsertionStep step;
    graph = insert_best(graph, letter, ctx, &step, first_edge);
    if (trace != nullptr) trace->push_back(std::move(step));
  }
  return graph;
}

PlanResult plan_mission(const Instance& test, const WorldModel& wm, const PlannerConfig& cfg) {
  if (test.hotspots.empty()) throw ConfigError("plan_mission: empty test instance");
  const PlanningContext ctx = make_context(wm, test);
  PlanResult r;
  const auto ids = test.ids();
  r.classes = classify_letters(ids, wm);
  if (!r.classes.normal.empty()) {
    r.generated = generate_words(wm, r.classes.normal, cfg.num_words, cfg.seed);
    r.reference_choice = select_reference(r.generated, wm);
    r.reference = r.generated[r.reference_choice.index];
  }
  const ReferenceGraph final_graph = insert_all(ReferenceGraph{r.reference}, r.classes.novel, ctx,
                                                cfg.insertion_order, &r.steps);
  r.final_word = final_graph.word;
  r.tour = make_tour(r.final_word.letters, test, cfg.weights);
  return r;
}

PlanResult online_replan(const Word& current, std::size_t visited_prefix,
                         std::span<const Hotspot> emergent, const Instance& mission_instance,
                         const WorldModel& wm, const PlannerConfig& cfg) {
  if (visited_prefix > current.size())
    throw ConfigError("online_replan: visited prefix exceeds the current word");
  Instance extended = mission_instance;
  for (const auto& h : emergent) {
    if (extended.find(h.id) != nullptr)
      throw ConsistencyError("online_replan: emergent letter " + std::to_string(h.id) +
                             " already in the mission");
    extended.hotspots.push_back(h);
  }
  std::sort(extended.hotspots.begin(), extended.hotspots.end(),
            [](const Hotspot& a, const Hotspot& b) { return a.id < b.id; });
  const PlanningContext ctx = make_context(wm, extended);

  PlanResult r;
  std::vector<LetterId> pending;
  for (const auto& h : emergent) pending.push_back(h.id);
  std::sort(pending.begin(), pending.end());
  r.classes = classify_letters(pending, wm);
  r.reference = current;
  // With k letters served the UAV has traversed edges 0..k-1.
  const ReferenceGraph g = insert_all(ReferenceGraph{current}, pending, ctx, cfg.insertion_order,
                                      &r.steps, visited_prefix);
  r.final_word = g.word;
  r.tour = make_tour(r.final_word.letters, extended, cfg.weights);
  return r;
}

}  // namespace uavplan
