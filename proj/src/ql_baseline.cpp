#include "uavplan/ql_baseline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "uavplan/active_planner.hpp"
#include "uavplan/errors.hpp"
#include "uavplan/random.hpp"

namespace uavplan {

namespace {

ObjectiveWeights normalized(ObjectiveWeights w) {
  w.scaling = ObjectiveScaling::normalized;
  return w;
}

/// Cost normalizer: nearest-neighbor tour length; profit normalizer: sum of
/// profits. Same as the oracle's normalized scaling.
struct Normalizers {
  double cost = 1.0;
  double profit = 1.0;
};

Normalizers normalizers(const Instance& inst) {
  const Tour nn = nearest_neighbor_construct(inst, normalized({}));
  Normalizers n;
  if (nn.total_cost_m > 0.0) n.cost = nn.total_cost_m;
  if (inst.total_profit() > 0.0) n.profit = inst.total_profit();
  return n;
}

double reward(const Normalizers& n, double leg_m, double profit, const ObjectiveWeights& w) {
  return -w.weight_alpha * leg_m / n.cost + w.weight_beta * profit / n.profit;
}

}  // namespace

void QTrainConfig::validate() const {
  if (!(learning_rate > 0.0 && learning_rate <= 1.0)) throw ConfigError("ql: learning_rate in (0,1]");
  if (!(discount >= 0.0 && discount <= 1.0)) throw ConfigError("ql: discount in [0,1]");
  if (!(epsilon_start >= 0.0 && epsilon_start <= 1.0 && epsilon_end >= 0.0 && epsilon_end <= 1.0))
    throw ConfigError("ql: epsilon in [0,1]");
  if (episodes < 0) throw ConfigError("ql: episodes must be >= 0");
  if (!(temperature >= 0.0)) throw ConfigError("ql: temperature must be >= 0");
  weights.validate();
}

std::optional<Eigen::Index> QTable::row_of(LetterId state) const {
  if (state == kDepot) return 0;
  auto i = vocabulary.index_of(state);
  if (!i) return std::nullopt;
  return static_cast<Eigen::Index>(*i) + 1;
}

std::optional<Eigen::Index> QTable::col_of(LetterId action) const {
  auto i = vocabulary.index_of(action);
  if (!i) return std::nullopt;
  return static_cast<Eigen::Index>(*i);
}

double step_reward(const Instance& inst, const Point2& from, const Hotspot& to,
                   const ObjectiveWeights& w) {
  return reward(normalizers(inst), edge_cost(from, to.center_m), to.profit_bps, w);
}

QTable train_q(std::span<const Instance> instances, std::span<const Tour> oracle_tours,
               const QTrainConfig& cfg, std::uint64_t rng_seed) {
  cfg.validate();
  if (instances.empty() || instances.size() != oracle_tours.size())
    throw TrainingError("train_q: need one oracle tour per training instance");

  std::vector<LetterId> ids;
  for (const auto& inst : instances)
    for (const auto& h : inst.hotspots) ids.push_back(h.id);
  QTable q;
  q.vocabulary = Vocabulary(std::move(ids));
  const auto n = static_cast<Eigen::Index>(q.vocabulary.size());
  q.values = Eigen::MatrixXd::Zero(n + 1, n);
  q.visits = Eigen::MatrixXd::Zero(n + 1, n);
  q.config = cfg;
  q.seed = rng_seed;
  q.fingerprint = demonstration_fingerprint(oracle_tours);

  const ObjectiveWeights wn = normalized(cfg.weights);
  std::vector<Normalizers> norms;
  std::vector<double> oracle_obj;
  for (std::size_t m = 0; m < instances.size(); ++m) {
    norms.push_back(normalizers(instances[m]));
    oracle_obj.push_back(objective(oracle_tours[m], wn, instances[m]));
  }

  Rng rng(derive_seed(rng_seed, {0x71746162ULL}));
  for (int ep = 0; ep < cfg.episodes; ++ep) {
    const double frac = cfg.episodes > 1 ? static_cast<double>(ep) / (cfg.episodes - 1) : 0.0;
    const double eps = cfg.epsilon_start + (cfg.epsilon_end - cfg.epsilon_start) * frac;
    const std::size_t m = uniform_index(rng, instances.size());
    const Instance& inst = instances[m];
    const std::size_t k = inst.hotspots.size();

    std::vector<bool> used(k, false);
    std::vector<LetterId> order;
    LetterId cur = kDepot;
    Point2 here = inst.depot_m;
    for (std::size_t step = 0; step < k; ++step) {
      const Eigen::Index row = *q.row_of(cur);
      std::size_t pick = k;
      if (uniform01(rng) < eps) {
        std::size_t r = uniform_index(rng, k - step);
        for (std::size_t j = 0; j < k; ++j)
          if (!used[j] && r-- == 0) {
            pick = j;
            break;
          }
      } else {
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < k; ++j) {
          if (used[j]) continue;
          const double v = q.values(row, *q.col_of(inst.hotspots[j].id));
          if (v > best) {
            best = v;
            pick = j;
          }
        }
      }
      const Hotspot& h = inst.hotspots[pick];
      used[pick] = true;
      order.push_back(h.id);
      double r = reward(norms[m], edge_cost(here, h.center_m), h.profit_bps, cfg.weights);
      double target;
      const bool terminal = step + 1 == k;
      if (terminal) {
        r += reward(norms[m], edge_cost(h.center_m, inst.depot_m), 0.0, cfg.weights);
        const double realized = objective(make_tour(order, inst, wn), wn, inst);
        if (realized <= oracle_obj[m] + cfg.bonus_tolerance * std::abs(oracle_obj[m]))
          r += cfg.terminal_bonus;
        target = r;
      } else {
        const Eigen::Index next_row = *q.row_of(h.id);
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < k; ++j)
          if (!used[j]) best = std::max(best, q.values(next_row, *q.col_of(inst.hotspots[j].id)));
        target = r + cfg.discount * best;
      }
      const Eigen::Index col = *q.col_of(h.id);
      q.values(row, col) += cfg.learning_rate * (target - q.values(row, col));
      q.visits(row, col) += 1.0;
      cur = h.id;
      here = h.center_m;
    }
  }
  return q;
}

namespace {

double logit_with(const QTable& q, const Instance& test, const Normalizers& nz, LetterId cur,
                  LetterId next) {
  const auto row = q.row_of(cur);
  const auto col = q.col_of(next);
  if (row && col && q.visits(*row, *col) > 0.0) return q.values(*row, *col);
  const Hotspot* to = test.find(next);
  if (to == nullptr) throw ConsistencyError("q_logit: letter not in the test instance");
  const Point2 from = cur == kDepot ? test.depot_m : test.find(cur)->center_m;
  return reward(nz, edge_cost(from, to->center_m), to->profit_bps, q.config.weights);
}

}  // namespace

double q_logit(const QTable& q, const Instance& test, LetterId cur, LetterId next) {
  return logit_with(q, test, normalizers(test), cur, next);
}

Word construct_word(const QTable& q, const Word& reference, const Instance& test,
                    std::uint64_t rng_seed) {
  if (test.hotspots.empty()) throw ConfigError("construct_word: no test letters");
  std::set<Edge> ref_edges;
  if (!reference.empty()) {
    LetterId prev = kDepot;
    for (auto id : reference.letters) {
      ref_edges.emplace(prev, id);
      prev = id;
    }
  }
  const double temp = q.config.temperature;
  const Normalizers nz = normalizers(test);
  Rng rng(derive_seed(rng_seed, {0x6d716c77ULL}));
  const auto ids = test.ids();
  std::vector<bool> used(ids.size(), false);
  Word w;
  LetterId cur = kDepot;
  for (std::size_t step = 0; step < ids.size(); ++step) {
    std::vector<double> logits(ids.size(), -std::numeric_limits<double>::infinity());
    double max_logit = -std::numeric_limits<double>::infinity();
    std::size_t argmax = ids.size();
    for (std::size_t j = 0; j < ids.size(); ++j) {
      if (used[j]) continue;
      double l = logit_with(q, test, nz, cur, ids[j]);
      if (ref_edges.contains({cur, ids[j]})) l += q.config.reference_bias;
      logits[j] = l;
      if (l > max_logit) {
        max_logit = l;
        argmax = j;
      }
    }
    std::size_t pick = argmax;
    if (temp > 0.0) {
      std::vector<double> p(ids.size(), 0.0);
      double total = 0.0;
      for (std::size_t j = 0; j < ids.size(); ++j) {
        if (used[j]) continue;
        p[j] = std::exp((logits[j] - max_logit) / temp);
        total += p[j];
      }
      const double u = uniform01(rng) * total;
      double acc = 0.0;
      for (std::size_t j = 0; j < ids.size(); ++j) {
        if (used[j]) continue;
        acc += p[j];
        pick = j;
        if (u < acc) break;
      }
    }
    used[pick] = true;
    cur = ids[pick];
    w.letters.push_back(cur);
  }
  return w;
}

}  // namespace uavplan
