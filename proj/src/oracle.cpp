#include "uavplan/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "uavplan/errors.hpp"

namespace uavplan {

namespace {

constexpr double kCostTol = 1e-9;  // meters

bool objectives_tie(double a, double b) {
  return std::abs(a - b) <= 1e-9 * std::max({1.0, std::abs(a), std::abs(b)});
}

struct Scale {
  double cost = 1.0;
  double profit = 1.0;
};

double nn_cost(const Instance& inst) {
  std::vector<bool> used(inst.hotspots.size(), false);
  Point2 here = inst.depot_m;
  double total = 0.0;
  for (std::size_t step = 0; step < inst.hotspots.size(); ++step) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < inst.hotspots.size(); ++i) {
      if (used[i]) continue;
      const double d = edge_cost(here, inst.hotspots[i].center_m);
      if (d < best_d) {
        best_d = d;
        best = i;
      }
    }
    used[best] = true;
    total += best_d;
    here = inst.hotspots[best].center_m;
  }
  return total + edge_cost(here, inst.depot_m);
}

Scale scale_for(const Instance& inst, const ObjectiveWeights& w) {
  if (w.scaling == ObjectiveScaling::raw) return {};
  Scale s;
  const double c = nn_cost(inst);
  const double p = inst.total_profit();
  s.cost = c > 0.0 ? c : 1.0;
  s.profit = p > 0.0 ? p : 1.0;
  return s;
}

double weighted(double cost, double profit, const ObjectiveWeights& w, const Scale& s) {
  return w.weight_alpha * (cost / s.cost) - w.weight_beta * (profit / s.profit);
}

Tour evaluate(std::vector<LetterId> order, const Instance& inst, const ObjectiveWeights& w,
              const Scale& s) {
  Tour t;
  t.total_cost_m = tour_cost(order, inst);
  for (auto id : order) t.total_profit_bps += inst.find(id)->profit_bps;
  t.objective = weighted(t.total_cost_m, t.total_profit_bps, w, s);
  t.order = std::move(order);
  t.instance_seed = inst.seed;
  return t;
}

/// A cycle and its reversal cost the same; keep the lexicographically
/// smaller direction.
void canonicalize_direction(Tour& t, const Instance& inst, const ObjectiveWeights& w,
                            const Scale& s) {
  std::vector<LetterId> rev(t.order.rbegin(), t.order.rend());
  if (rev < t.order) t = evaluate(std::move(rev), inst, w, s);
}

std::vector<Point2> centers_of(std::span<const LetterId> order, const Instance& inst) {
  std::vector<Point2> pts;
  pts.reserve(order.size() + 2);
  pts.push_back(inst.depot_m);
  for (auto id : order) pts.push_back(inst.find(id)->center_m);
  pts.push_back(inst.depot_m);
  return pts;
}

Tour two_opt_scaled(const Tour& start, const ObjectiveWeights& w, const Instance& inst,
                    const Scale& s) {
  Tour t = evaluate(start.order, inst, w, s);
  if (w.weight_alpha <= 0.0 || t.order.size() < 2) return t;
  const std::size_t n = t.order.size();
  for (;;) {
    // Path positions: pts[0] = depot, pts[k+1] = order[k], pts[n+1] = depot.
    const auto pts = centers_of(t.order, inst);
    double best_delta = -kCostTol;
    std::vector<LetterId> best_order;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        // Reverse order[i..j]: edges (i, i+1) and (j+1, j+2) in pts indices.
        const double delta = edge_cost(pts[i], pts[j + 1]) + edge_cost(pts[i + 1], pts[j + 2]) -
                             edge_cost(pts[i], pts[i + 1]) - edge_cost(pts[j + 1], pts[j + 2]);
        if (delta < best_delta - kCostTol) {
          best_delta = delta;
          best_order = t.order;
          std::reverse(best_order.begin() + i, best_order.begin() + j + 1);
        } else if (delta <= best_delta + kCostTol && !best_order.empty()) {
          auto cand = t.order;
          std::reverse(cand.begin() + i, cand.begin() + j + 1);
          if (cand < best_order) {
            best_delta = std::min(best_delta, delta);
            best_order = std::move(cand);
          }
        }
      }
    }
    if (best_order.empty()) break;
    t = evaluate(std::move(best_order), inst, w, s);
  }
  canonicalize_direction(t, inst, w, s);
  return t;
}

}  // namespace

void ObjectiveWeights::validate() const {
  if (weight_alpha < 0.0 || weight_alpha > 1.0 || weight_beta < 0.0 || weight_beta > 1.0)
    throw ConfigError("objective weights must lie in [0,1]");
  if (std::abs(weight_alpha + weight_beta - 1.0) > 1e-12)
    throw ConfigError("objective weights must sum to 1");
}

bool Tour::visits(LetterId id) const {
  return std::find(order.begin(), order.end(), id) != order.end();
}

bool tour_preferred(const Tour& a, const Tour& b) {
  if (!objectives_tie(a.objective, b.objective)) return a.objective < b.objective;
  return a.order < b.order;
}

double tour_cost(std::span<const LetterId> order, const Instance& inst) {
  Point2 here = inst.depot_m;
  double total = 0.0;
  std::vector<LetterId> seen;
  seen.reserve(order.size());
  for (auto id : order) {
    const Hotspot* h = inst.find(id);
    if (h == nullptr) throw ConsistencyError("tour references unknown hotspot " + std::to_string(id));
    if (std::find(seen.begin(), seen.end(), id) != seen.end())
      throw ConsistencyError("tour repeats hotspot " + std::to_string(id));
    seen.push_back(id);
    total += edge_cost(here, h->center_m);
    here = h->center_m;
  }
  return total + edge_cost(here, inst.depot_m);
}

double objective(const Tour& t, const ObjectiveWeights& w, const Instance& inst) {
  if (t.order.empty()) return 0.0;
  const double cost = tour_cost(t.order, inst);
  double profit = 0.0;
  for (auto id : t.order) profit += inst.find(id)->profit_bps;
  return weighted(cost, profit, w, scale_for(inst, w));
}

Tour make_tour(std::vector<LetterId> order, const Instance& inst, const ObjectiveWeights& w) {
  return evaluate(std::move(order), inst, w, scale_for(inst, w));
}

namespace {

std::vector<LetterId> greedy_from(const Instance& inst, std::vector<bool> used, Point2 here,
                                  std::vector<LetterId> order) {
  while (order.size() < inst.hotspots.size()) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    // Hotspots are sorted by id, so strict < keeps the lower id on ties.
    for (std::size_t i = 0; i < inst.hotspots.size(); ++i) {
      if (used[i]) continue;
      const double d = edge_cost(here, inst.hotspots[i].center_m);
      if (d < best_d) {
        best_d = d;
        best = i;
      }
    }
    used[best] = true;
    order.push_back(inst.hotspots[best].id);
    here = inst.hotspots[best].center_m;
  }
  return order;
}

}  // namespace

Tour nearest_neighbor_construct(const Instance& inst, const ObjectiveWeights& w) {
  return make_tour(greedy_from(inst, std::vector<bool>(inst.hotspots.size(), false), inst.depot_m, {}),
                   inst, w);
}

Tour nearest_neighbor_from(const Instance& inst, LetterId first, const ObjectiveWeights& w) {
  std::vector<bool> used(inst.hotspots.size(), false);
  std::size_t k = 0;
  while (k < inst.hotspots.size() && inst.hotspots[k].id != first) ++k;
  if (k == inst.hotspots.size())
    throw ConsistencyError("nearest_neighbor_from: unknown hotspot " + std::to_string(first));
  used[k] = true;
  return make_tour(greedy_from(inst, std::move(used), inst.hotspots[k].center_m, {first}), inst, w);
}

Tour two_opt(const Tour& t, const ObjectiveWeights& w, const Instance& inst) {
  return two_opt_scaled(t, w, inst, scale_for(inst, w));
}

Tour selection_pass(const Tour& start, const ObjectiveWeights& w, const Instance& inst) {
  const Scale s = scale_for(inst, w);
  Tour t = two_opt_scaled(start, w, inst, s);
  for (;;) {
    Tour best = t;
    bool improved = false;
    for (std::size_t k = 0; k < t.order.size(); ++k) {
      auto order = t.order;
      order.erase(order.begin() + k);
      Tour cand = evaluate(std::move(order), inst, w, s);
      if (cand.objective < t.objective && !objectives_tie(cand.objective, t.objective) &&
          tour_preferred(cand, best)) {
        best = std::move(cand);
        improved = true;
      }
    }
    if (!improved) break;
    t = two_opt_scaled(best, w, inst, s);
  }
  return t;
}

Tour solve(const Instance& inst, const ObjectiveWeights& w, const SolveOptions& opts) {
  w.validate();
  if (inst.hotspots.empty()) return make_tour({}, inst, w);
  Tour best = selection_pass(nearest_neighbor_construct(inst, w), w, inst);
  if (opts.multi_start) {
    for (const auto& h : inst.hotspots) {
      Tour t = selection_pass(nearest_neighbor_from(inst, h.id, w), w, inst);
      if (tour_preferred(t, best)) best = std::move(t);
    }
  }
  return best;
}

Tour brute_force(const Instance& inst, const ObjectiveWeights& w) {
  const std::size_t n = inst.hotspots.size();
  if (n > kBruteForceLimit)
    throw ConfigError("brute_force refuses instances with more than " +
                      std::to_string(kBruteForceLimit) + " hotspots");
  const Scale s = scale_for(inst, w);
  const auto ids = inst.ids();
  Tour best = evaluate({}, inst, w, s);
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    std::vector<LetterId> subset;
    for (std::size_t i = 0; i < n; ++i)
      if (mask & (1u << i)) subset.push_back(ids[i]);
    do {
      Tour cand = evaluate(subset, inst, w, s);
      if (tour_preferred(cand, best)) best = std::move(cand);
    } while (std::next_permutation(subset.begin(), subset.end()));
  }
  return best;
}

}  // namespace uavplan
