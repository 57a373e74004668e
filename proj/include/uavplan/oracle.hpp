#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "uavplan/environment.hpp"

namespace uavplan {

/// How cost (m) and profit (bit/s) are brought to a common scale before
/// weighting.
enum class ObjectiveScaling {
  raw,         ///< alpha * meters - beta * bit/s
  normalized,  ///< cost / nearest-neighbor tour cost, profit / sum of profits
};

struct ObjectiveWeights {
  double weight_alpha = 0.9;
  double weight_beta = 0.1;
  ObjectiveScaling scaling = ObjectiveScaling::raw;

  /// Both weights in [0,1] summing to one.
  void validate() const;
};

/// A depot-anchored closed tour. The depot is implicit at both ends of
/// `order`; visited vertices are exactly the members of `order`.
struct Tour {
  std::vector<LetterId> order;
  double total_cost_m = 0.0;
  double total_profit_bps = 0.0;
  double objective = 0.0;
  std::uint64_t instance_seed = 0;

  std::size_t size() const { return order.size(); }
  bool visits(LetterId id) const;
};

/// Depot -> order[0] -> ... -> order.back() -> depot length. Throws
/// ConsistencyError on unknown or repeated ids.
double tour_cost(std::span<const LetterId> order, const Instance& inst);

double objective(const Tour& t, const ObjectiveWeights& w, const Instance& inst);

/// Builds a Tour from an ordering and fills cost, profit and objective.
Tour make_tour(std::vector<LetterId> order, const Instance& inst, const ObjectiveWeights& w);

Tour nearest_neighbor_construct(const Instance& inst, const ObjectiveWeights& w = {});
/// Nearest-neighbor tour whose first stop is forced to `first`.
Tour nearest_neighbor_from(const Instance& inst, LetterId first, const ObjectiveWeights& w = {});
Tour two_opt(const Tour& t, const ObjectiveWeights& w, const Instance& inst);
Tour selection_pass(const Tour& t, const ObjectiveWeights& w, const Instance& inst);

struct SolveOptions {
  /// Also run 2-opt + selection from every forced-first-stop construction
  /// and keep the best tour.
  bool multi_start = true;
};

/// Nearest-neighbor construction, best-improvement 2-opt, then the
/// selection pass. Deterministic.
Tour solve(const Instance& inst, const ObjectiveWeights& w, const SolveOptions& opts = {});

/// Exhaustive optimum over all subsets and orderings. Refuses more than
/// kBruteForceLimit hotspots.
Tour brute_force(const Instance& inst, const ObjectiveWeights& w);
inline constexpr std::size_t kBruteForceLimit = 10;

/// Returns true when `a` should be preferred over `b`: lower objective, with
/// near-equal objectives resolved by the lexicographically smaller order.
bool tour_preferred(const Tour& a, const Tour& b);

}  // namespace uavplan
