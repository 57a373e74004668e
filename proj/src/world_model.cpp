#include "uavplan/world_model.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <numeric>

#include "uavplan/errors.hpp"

namespace uavplan {

namespace {

/// Sum of values in sorted order so the result does not depend on input order.
double ordered_sum(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

}  // namespace

bool Word::contains(LetterId id) const {
  return std::find(letters.begin(), letters.end(), id) != letters.end();
}

std::vector<GeneralizedLetter> Word::generalized_letters() const {
  std::vector<GeneralizedLetter> out;
  for (std::size_t k = 0; k + 1 < letters.size(); ++k) out.push_back({letters[k], letters[k + 1]});
  return out;
}

std::optional<LetterId> Word::terminal() const {
  if (letters.empty()) return std::nullopt;
  return letters.back();
}

Vocabulary::Vocabulary(std::vector<LetterId> ids) : ids_(std::move(ids)) {
  std::sort(ids_.begin(), ids_.end());
  ids_.erase(std::unique(ids_.begin(), ids_.end()), ids_.end());
}

std::optional<std::size_t> Vocabulary::index_of(LetterId id) const {
  auto it = std::lower_bound(ids_.begin(), ids_.end(), id);
  if (it == ids_.end() || *it != id) return std::nullopt;
  return static_cast<std::size_t>(it - ids_.begin());
}

std::size_t Vocabulary::at(LetterId id) const {
  auto idx = index_of(id);
  if (!idx) throw ConsistencyError("letter " + std::to_string(id) + " is not in the vocabulary");
  return *idx;
}

double TransitionMatrix::max_row_defect() const {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < probs.rows(); ++i)
    if (active[i]) worst = std::max(worst, std::abs(probs.row(i).sum() - 1.0));
  return worst;
}

std::size_t WorldModel::total_word_count() const {
  std::size_t n = 0;
  for (const auto& e : words) n += static_cast<std::size_t>(e.count);
  return n;
}

Word word_from_tour(const Tour& t) {
  if (t.order.size() < 2) throw TrainingError("word_from_tour: a word needs at least two letters");
  return Word{t.order};
}

Eigen::MatrixXd adjacency(const Word& w, const Vocabulary& vocab) {
  const auto n = static_cast<Eigen::Index>(vocab.size());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (const auto& gl : w.generalized_letters()) a(vocab.at(gl.start), vocab.at(gl.edge_to)) = 1.0;
  return a;
}

Eigen::DiagonalMatrix<double, Eigen::Dynamic> degree(const Word& w, const Vocabulary& vocab) {
  return Eigen::DiagonalMatrix<double, Eigen::Dynamic>(adjacency(w, vocab).rowwise().sum());
}

namespace {

TransitionMatrix normalize_rows(Eigen::MatrixXd counts) {
  TransitionMatrix t;
  t.active.assign(counts.rows(), false);
  const Eigen::VectorXd deg = counts.rowwise().sum();
  // D^+ with zero rows left at zero.
  const Eigen::VectorXd inv = deg.unaryExpr([](double d) { return d > 0.0 ? 1.0 / d : 0.0; });
  t.probs = inv.asDiagonal() * counts;
  for (Eigen::Index i = 0; i < deg.size(); ++i) t.active[i] = deg[i] > 0.0;
  return t;
}

}  // namespace

TransitionMatrix word_transition(const Word& w, const Vocabulary& vocab) {
  return normalize_rows(adjacency(w, vocab));
}

TransitionMatrix merge_global(std::span<const WordEntry> words, const Vocabulary& vocab) {
  const auto n = static_cast<Eigen::Index>(vocab.size());
  Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(n, n);
  for (const auto& e : words) counts += static_cast<double>(e.count) * adjacency(e.word, vocab);
  return normalize_rows(std::move(counts));
}

std::string demonstration_fingerprint(std::span<const Tour> demos) {
  std::vector<std::uint64_t> seeds;
  for (const auto& t : demos) seeds.push_back(t.instance_seed);
  std::sort(seeds.begin(), seeds.end());
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (auto s : seeds) {
    for (int b = 0; b < 8; ++b) {
      h ^= (s >> (8 * b)) & 0xffu;
      h *= 0x100000001b3ULL;
    }
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

WorldModel learn(std::span<const Tour> demos, std::span<const Hotspot> pool,
                 const MissionConfig& mission, const NoiseConfig& noise) {
  if (demos.empty()) throw TrainingError("learn: empty demonstration set");
  mission.validate();

  std::map<LetterId, const Hotspot*> by_id;
  for (const auto& h : pool) by_id[h.id] = &h;

  WorldModel wm;
  wm.num_demonstrations = demos.size();
  wm.noise = noise;
  wm.fingerprint = demonstration_fingerprint(demos);

  std::map<Word, int> word_counts;
  std::vector<double> leg_lengths;  // per tour: cost / legs
  std::vector<double> leg_counts;
  for (const auto& t : demos) {
    if (t.order.size() < 2) {
      ++wm.skipped_demonstrations;
      continue;
    }
    for (auto id : t.order)
      if (!by_id.contains(id))
        throw ConsistencyError("learn: demonstration uses letter " + std::to_string(id) +
                               " outside the pool");
    ++word_counts[word_from_tour(t)];
    leg_lengths.push_back(t.total_cost_m);
    leg_counts.push_back(static_cast<double>(t.order.size() + 1));
  }
  if (word_counts.empty()) throw TrainingError("learn: no demonstration visits two hotspots");

  std::vector<LetterId> ids;
  for (const auto& [w, c] : word_counts) ids.insert(ids.end(), w.letters.begin(), w.letters.end());
  wm.vocabulary = Vocabulary(std::move(ids));

  for (const auto& [w, c] : word_counts) wm.words.push_back({w, c});

  // Per-letter statistics with occurrence multiplicity.
  std::vector<std::vector<double>> samples(wm.vocabulary.size());
  std::vector<int> starts(wm.vocabulary.size(), 0);
  for (const auto& e : wm.words) {
    starts[wm.vocabulary.at(e.word.letters.front())] += e.count;
    for (auto id : e.word.letters)
      samples[wm.vocabulary.at(id)].insert(samples[wm.vocabulary.at(id)].end(), e.count,
                                           by_id.at(id)->profit_bps);
  }
  std::vector<double> letter_means;
  for (std::size_t i = 0; i < wm.vocabulary.size(); ++i) {
    const LetterId id = wm.vocabulary.id_at(i);
    LetterStats s;
    s.id = id;
    s.center_m = by_id.at(id)->center_m;
    s.occurrences = static_cast<int>(samples[i].size());
    s.start_count = starts[i];
    s.mean_profit_bps = ordered_sum(samples[i]) / s.occurrences;
    std::vector<double> sq;
    for (double x : samples[i]) sq.push_back((x - s.mean_profit_bps) * (x - s.mean_profit_bps));
    s.profit_variance = ordered_sum(std::move(sq)) / s.occurrences;
    wm.letters.push_back(s);
    letter_means.insert(letter_means.end(), samples[i].begin(), samples[i].end());
  }

  wm.global_transition = merge_global(wm.words, wm.vocabulary);

  const double n_occ = static_cast<double>(letter_means.size());
  wm.mean_letter_profit_bps = ordered_sum(std::move(letter_means)) / n_occ;
  const double mean_leg_m = ordered_sum(leg_lengths) / ordered_sum(leg_counts);
  wm.mean_leg_time_s = mean_leg_m / mission.uav_speed_m_per_s + mission.dwell_time_s;

  const double rs = noise.relative_process_std;
  Eigen::Matrix2d q = Eigen::Vector2d(std::pow(rs * wm.mean_letter_profit_bps, 2),
                                      std::pow(rs * wm.mean_leg_time_s, 2))
                          .asDiagonal();
  wm.process_cov = noise.process_cov_override.value_or(q);
  wm.measurement_cov = noise.measurement_cov_override.value_or(
      noise.measurement_to_process_ratio * wm.process_cov);
  return wm;
}

}  // namespace uavplan
