#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "uavplan/environment.hpp"
#include "uavplan/oracle.hpp"

namespace uavplan {

/// A letter paired with its outgoing edge.
struct GeneralizedLetter {
  LetterId start = 0;
  LetterId edge_to = 0;

  friend bool operator==(const GeneralizedLetter&, const GeneralizedLetter&) = default;
};

/// A visitation order over hotspot letters. The depot is not a letter.
struct Word {
  std::vector<LetterId> letters;

  std::size_t size() const { return letters.size(); }
  bool empty() const { return letters.empty(); }
  bool contains(LetterId id) const;
  /// The chained generalized letters; the terminal letter has no outgoing edge.
  std::vector<GeneralizedLetter> generalized_letters() const;
  std::optional<LetterId> terminal() const;

  friend bool operator==(const Word&, const Word&) = default;
  friend auto operator<=>(const Word& a, const Word& b) { return a.letters <=> b.letters; }
};

/// Sorted letter ids with an id -> row/column index lookup.
class Vocabulary {
 public:
  Vocabulary() = default;
  explicit Vocabulary(std::vector<LetterId> ids);

  std::size_t size() const { return ids_.size(); }
  const std::vector<LetterId>& ids() const { return ids_; }
  bool contains(LetterId id) const { return index_of(id).has_value(); }
  std::optional<std::size_t> index_of(LetterId id) const;
  /// Throws ConsistencyError for letters outside the vocabulary.
  std::size_t at(LetterId id) const;
  LetterId id_at(std::size_t index) const { return ids_[index]; }

  friend bool operator==(const Vocabulary&, const Vocabulary&) = default;

 private:
  std::vector<LetterId> ids_;
};

/// Row-stochastic on active rows; rows with no observed successor are
/// flagged inactive and left at zero.
struct TransitionMatrix {
  Eigen::MatrixXd probs;
  std::vector<bool> active;

  bool row_active(std::size_t i) const { return active[i]; }
  /// Largest |row sum - 1| over active rows.
  double max_row_defect() const;
};

struct LetterStats {
  LetterId id = 0;
  Point2 center_m = Point2::Zero();
  double mean_profit_bps = 0.0;
  double profit_variance = 0.0;
  int occurrences = 0;
  int start_count = 0;  // words beginning with this letter (with multiplicity)
};

struct WordEntry {
  Word word;
  int count = 0;
};

/// Process/measurement noise of the planner's dynamic models. Defaults are
/// relative to the training-set mean profit and mean leg time.
struct NoiseConfig {
  double relative_process_std = 0.02;
  double measurement_to_process_ratio = 0.25;
  std::optional<Eigen::Matrix2d> process_cov_override;
  std::optional<Eigen::Matrix2d> measurement_cov_override;
};

struct WorldModel {
  Vocabulary vocabulary;
  std::vector<LetterStats> letters;  // aligned with vocabulary
  std::vector<WordEntry> words;      // sorted by word, deduplicated
  TransitionMatrix global_transition;
  double mean_letter_profit_bps = 0.0;
  double mean_leg_time_s = 0.0;
  Eigen::Matrix2d process_cov = Eigen::Matrix2d::Zero();
  Eigen::Matrix2d measurement_cov = Eigen::Matrix2d::Zero();
  NoiseConfig noise;
  std::size_t num_demonstrations = 0;
  std::size_t skipped_demonstrations = 0;  // tours with fewer than two vertices
  std::string fingerprint;

  const LetterStats& stats(LetterId id) const { return letters[vocabulary.at(id)]; }
  std::size_t total_word_count() const;
};

/// Throws TrainingError for tours with fewer than two vertices.
Word word_from_tour(const Tour& t);

/// a_ij = 1 iff edge (i -> j) occurs in the word.
Eigen::MatrixXd adjacency(const Word& w, const Vocabulary& vocab);

/// Out-degree matrix D_ii = sum_j a_ij.
Eigen::DiagonalMatrix<double, Eigen::Dynamic> degree(const Word& w, const Vocabulary& vocab);

/// D^+ A with the pseudo-inverse on zero-degree rows.
TransitionMatrix word_transition(const Word& w, const Vocabulary& vocab);

/// Pools transition counts (weighted by multiplicity) and row-normalizes.
TransitionMatrix merge_global(std::span<const WordEntry> words, const Vocabulary& vocab);

/// Builds the dictionary, global transition matrix, letter statistics and
/// noise covariances from oracle demonstrations. The result does not depend
/// on the order of `demos`.
WorldModel learn(std::span<const Tour> demos, std::span<const Hotspot> pool,
                 const MissionConfig& mission, const NoiseConfig& noise = {});

/// FNV-1a over the sorted instance seeds of the demonstrations.
std::string demonstration_fingerprint(std::span<const Tour> demos);

}  // namespace uavplan
