#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "uavplan/environment.hpp"
#include "uavplan/gaussian.hpp"
#include "uavplan/oracle.hpp"
#include "uavplan/world_model.hpp"

namespace uavplan {

/// Node id of the depot in reference graphs. Letter ids start at 1.
inline constexpr LetterId kDepot = 0;

using Edge = std::pair<LetterId, LetterId>;

/// What the planner knows about each letter of the current mission.
struct LetterInfo {
  Point2 center_m = Point2::Zero();
  double expected_profit_bps = 0.0;
};

/// Everything a rollout needs: letter geometry and expected profits, the
/// depot, the mission kinematics and the noise of the dynamic models.
struct PlanningContext {
  std::map<LetterId, LetterInfo> letters;
  Point2 depot_m = Point2::Zero();
  MissionConfig mission;
  Eigen::Matrix2d process_cov = Eigen::Matrix2d::Zero();
  Eigen::Matrix2d measurement_cov = Eigen::Matrix2d::Zero();

  const Point2& position(LetterId node) const;
  double profit(LetterId node) const;
};

/// Normal letters take their expected profit from the world model; novel
/// letters take it from the instance.
PlanningContext make_context(const WorldModel& wm, const Instance& inst);

/// The current closed tour depot -> word -> depot.
struct ReferenceGraph {
  Word word;

  /// Closed-tour edges including both depot legs: word.size() + 1 edges, or
  /// a single depot self-loop for the empty word.
  std::vector<Edge> edges() const;
};

struct PlanCandidate {
  Word candidate_word;
  Edge removed_edge{kDepot, kDepot};
  LetterId inserted = 0;
  std::size_t edge_index = 0;
  double tour_length_m = 0.0;
  GaussianBelief predicted_obs;
  double surprise = 0.0;
};

struct LetterClasses {
  std::vector<LetterId> normal;
  std::vector<LetterId> novel;
};

enum class InsertionOrder {
  nearest_to_centroid,
  farthest_from_centroid,
  as_given,
};

struct PlannerConfig {
  int num_words = 10;
  std::uint64_t seed = 0;
  InsertionOrder insertion_order = InsertionOrder::nearest_to_centroid;
  ObjectiveWeights weights;
};

struct InsertionStep {
  LetterId inserted = 0;
  std::vector<PlanCandidate> candidates;
  std::size_t winner = 0;
};

struct ReferenceChoice {
  std::size_t index = 0;
  std::size_t distance = 0;
};

struct PlanResult {
  LetterClasses classes;
  std::vector<Word> generated;
  ReferenceChoice reference_choice;
  Word reference;
  Word final_word;
  Tour tour;
  std::vector<InsertionStep> steps;
};

LetterClasses classify_letters(std::span<const LetterId> test_ids, const WorldModel& wm);

/// Samples n words over exactly the normal letters from the global
/// transition matrix. Start letters follow training start frequencies;
/// rows without mass on the remaining letters fall back to the nearest
/// remaining letter.
std::vector<Word> generate_words(const WorldModel& wm, std::span<const LetterId> normal, int n,
                                 std::uint64_t rng_seed);

std::size_t levenshtein(const Word& a, const Word& b);

/// Candidate minimizing its distance to the closest dictionary word; ties
/// keep the earlier candidate.
ReferenceChoice select_reference(std::span<const Word> candidates, const WorldModel& wm);

/// One candidate per edge of the reference tour at or after `first_edge`.
std::vector<PlanCandidate> enumerate_insertions(const ReferenceGraph& ref, LetterId novel,
                                                const PlanningContext& ctx,
                                                std::size_t first_edge = 0);

/// Time update for the leg from -> to: mean gains (profit(to), leg/v + dwell)
/// and the covariance gains Q. The return leg to the depot has no profit or dwell.
GaussianBelief kalman_predict(const GaussianBelief& b, LetterId from, LetterId to,
                              const PlanningContext& ctx);

/// Folds kalman_predict along depot -> word -> depot.
GaussianBelief rollout(const Word& word, const PlanningContext& ctx,
                       const GaussianBelief& b0 = GaussianBelief::zero());

double expected_surprise(const GaussianBelief& ref_belief, const GaussianBelief& cand_obs);

/// Belief the candidates are compared against: the reference rollout plus
/// the novel letter's own profit and dwell, with one extra process step.
GaussianBelief insertion_target(const ReferenceGraph& ref, LetterId novel,
                                const PlanningContext& ctx);

/// Scores every insertion and returns the least surprising one.
ReferenceGraph insert_best(const ReferenceGraph& ref, LetterId novel, const PlanningContext& ctx,
                           InsertionStep* trace = nullptr, std::size_t first_edge = 0);

/// Inserts letters one at a time in the configured order.
ReferenceGraph insert_all(ReferenceGraph graph, std::vector<LetterId> pending,
                          const PlanningContext& ctx, InsertionOrder order,
                          std::vector<InsertionStep>* trace, std::size_t first_edge = 0);

PlanResult plan_mission(const Instance& test, const WorldModel& wm, const PlannerConfig& cfg);

/// Resumes insertion on a winning graph mid-mission. The first
/// `visited_prefix` letters are already served, so edges up to the UAV's
/// current letter stay fixed.
PlanResult online_replan(const Word& current, std::size_t visited_prefix,
                         std::span<const Hotspot> emergent, const Instance& mission_instance,
                         const WorldModel& wm, const PlannerConfig& cfg);

}  // namespace uavplan
