#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>

#include <Eigen/Core>

#include "uavplan/environment.hpp"
#include "uavplan/oracle.hpp"
#include "uavplan/world_model.hpp"

namespace uavplan {

struct QTrainConfig {
  double learning_rate = 0.1;
  double discount = 0.95;
  double epsilon_start = 1.0;
  double epsilon_end = 0.05;
  int episodes = 20000;
  ObjectiveWeights weights;
  double terminal_bonus = 1.0;
  double bonus_tolerance = 0.05;  // relative objective gap to the oracle tour
  double temperature = 0.2;       // softmax temperature of construct_word
  double reference_bias = 0.2;    // logit bonus for edges of the reference word

  void validate() const;
};

/// Tabular Q over (depot-start or current letter) x (next letter). Row 0
/// is the depot start state; row i + 1 and column i belong to
/// vocabulary.id_at(i).
struct QTable {
  Vocabulary vocabulary;
  Eigen::MatrixXd values;
  Eigen::MatrixXd visits;
  QTrainConfig config;
  std::string fingerprint;
  std::uint64_t seed = 0;

  /// Row index of a state; kDepot maps to row 0.
  std::optional<Eigen::Index> row_of(LetterId state) const;
  std::optional<Eigen::Index> col_of(LetterId action) const;
};

/// Per-step reward: -alpha * leg / nn_cost + beta * profit / total_profit.
/// Returned values use the same normalizers as the oracle's normalized mode.
double step_reward(const Instance& inst, const Point2& from, const Hotspot& to,
                   const ObjectiveWeights& w);

/// Episodic Q-learning on the oracle's training instances; the terminal
/// bonus is paid when the realized tour's normalized objective lies within
/// bonus_tolerance of the oracle tour's.
QTable train_q(std::span<const Instance> instances, std::span<const Tour> oracle_tours,
               const QTrainConfig& cfg, std::uint64_t rng_seed);

/// Logit used for the move cur -> next: the learned Q when the pair was
/// visited in training, otherwise the one-step reward as a pseudo-Q.
double q_logit(const QTable& q, const Instance& test, LetterId cur, LetterId next);

/// Samples a full word over the test letters from softmax(Q / temperature),
/// adding reference_bias to moves that follow the reference word.
Word construct_word(const QTable& q, const Word& reference, const Instance& test,
                    std::uint64_t rng_seed);

}  // namespace uavplan
