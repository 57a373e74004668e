#include "uavplan/serialization.hpp"

#include <fstream>
#include <sstream>

#include "uavplan/errors.hpp"

namespace uavplan {

namespace {

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j, Eigen::Index cols_if_empty = 0) {
  const auto rows = static_cast<Eigen::Index>(j.size());
  const Eigen::Index cols = rows > 0 ? static_cast<Eigen::Index>(j[0].size()) : cols_if_empty;
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    if (static_cast<Eigen::Index>(j[i].size()) != cols) throw ConfigError("ragged matrix in JSON");
    for (Eigen::Index k = 0; k < cols; ++k) m(i, k) = j[i][k].get<double>();
  }
  return m;
}

json point_to_json(const Point2& p) { return json::array({p.x(), p.y()}); }
Point2 point_from_json(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

const char* scaling_name(ObjectiveScaling s) {
  return s == ObjectiveScaling::raw ? "raw" : "normalized";
}

const char* order_name(InsertionOrder o) {
  switch (o) {
    case InsertionOrder::nearest_to_centroid: return "nearest_to_centroid";
    case InsertionOrder::farthest_from_centroid: return "farthest_from_centroid";
    case InsertionOrder::as_given: return "as_given";
  }
  return "nearest_to_centroid";
}

}  // namespace

void to_json(json& j, const ChannelParams& c) {
  j = json{{"carrier_frequency_hz", c.carrier_frequency_hz},
           {"path_loss_exponent", c.path_loss_exponent},
           {"mu_los_db", c.mu_los_db},
           {"mu_nlos_db", c.mu_nlos_db},
           {"noise_power_dbm", c.noise_power_dbm},
           {"rb_bandwidth_hz", c.rb_bandwidth_hz},
           {"user_tx_power_w", c.user_tx_power_w},
           {"los_sigmoid_a", c.los_sigmoid_a},
           {"los_sigmoid_b", c.los_sigmoid_b}};
}

void from_json(const json& j, ChannelParams& c) {
  ChannelParams d;
  c.carrier_frequency_hz = j.value("carrier_frequency_hz", d.carrier_frequency_hz);
  c.path_loss_exponent = j.value("path_loss_exponent", d.path_loss_exponent);
  c.mu_los_db = j.value("mu_los_db", d.mu_los_db);
  c.mu_nlos_db = j.value("mu_nlos_db", d.mu_nlos_db);
  c.noise_power_dbm = j.value("noise_power_dbm", d.noise_power_dbm);
  c.rb_bandwidth_hz = j.value("rb_bandwidth_hz", d.rb_bandwidth_hz);
  c.user_tx_power_w = j.value("user_tx_power_w", d.user_tx_power_w);
  c.los_sigmoid_a = j.value("los_sigmoid_a", d.los_sigmoid_a);
  c.los_sigmoid_b = j.value("los_sigmoid_b", d.los_sigmoid_b);
}

void to_json(json& j, const MissionConfig& m) {
  j = json{{"uav_altitude_m", m.uav_altitude_m},
           {"uav_speed_m_per_s", m.uav_speed_m_per_s},
           {"dwell_time_s", m.dwell_time_s},
           {"time_slot_s", m.time_slot_s},
           {"area_side_m", m.area_side_m}};
}

void from_json(const json& j, MissionConfig& m) {
  MissionConfig d;
  m.uav_altitude_m = j.value("uav_altitude_m", d.uav_altitude_m);
  m.uav_speed_m_per_s = j.value("uav_speed_m_per_s", d.uav_speed_m_per_s);
  m.dwell_time_s = j.value("dwell_time_s", d.dwell_time_s);
  m.time_slot_s = j.value("time_slot_s", d.time_slot_s);
  m.area_side_m = j.value("area_side_m", d.area_side_m);
}

void to_json(json& j, const Hotspot& h) {
  j = json{{"id", h.id},
           {"center_m", point_to_json(h.center_m)},
           {"num_users", h.num_users},
           {"profit_bps", h.profit_bps}};
}

void from_json(const json& j, Hotspot& h) {
  h.id = j.at("id").get<LetterId>();
  h.center_m = point_from_json(j.at("center_m"));
  h.num_users = j.at("num_users").get<int>();
  h.profit_bps = j.at("profit_bps").get<double>();
}

void to_json(json& j, const Instance& inst) {
  j = json{{"seed", inst.seed},
           {"depot_m", point_to_json(inst.depot_m)},
           {"channel", inst.channel},
           {"mission", inst.mission},
           {"hotspots", inst.hotspots}};
}

void from_json(const json& j, Instance& inst) {
  inst.seed = j.at("seed").get<std::uint64_t>();
  inst.depot_m = point_from_json(j.at("depot_m"));
  inst.channel = j.value("channel", ChannelParams{});
  inst.mission = j.value("mission", MissionConfig{});
  inst.hotspots = j.at("hotspots").get<std::vector<Hotspot>>();
  std::sort(inst.hotspots.begin(), inst.hotspots.end(),
            [](const Hotspot& a, const Hotspot& b) { return a.id < b.id; });
  for (std::size_t i = 1; i < inst.hotspots.size(); ++i)
    if (inst.hotspots[i].id == inst.hotspots[i - 1].id)
      throw ConfigError("instance: duplicate hotspot id " + std::to_string(inst.hotspots[i].id));
}

void to_json(json& j, const ObjectiveWeights& w) {
  j = json{{"weight_alpha", w.weight_alpha},
           {"weight_beta", w.weight_beta},
           {"scaling", scaling_name(w.scaling)}};
}

void from_json(const json& j, ObjectiveWeights& w) {
  ObjectiveWeights d;
  w.weight_alpha = j.value("weight_alpha", d.weight_alpha);
  w.weight_beta = j.value("weight_beta", d.weight_beta);
  const std::string s = j.value("scaling", std::string("raw"));
  if (s == "raw") w.scaling = ObjectiveScaling::raw;
  else if (s == "normalized") w.scaling = ObjectiveScaling::normalized;
  else throw ConfigError("unknown objective scaling '" + s + "'");
}

void to_json(json& j, const Tour& t) {
  j = json{{"order", t.order},
           {"total_cost_m", t.total_cost_m},
           {"total_profit_bps", t.total_profit_bps},
           {"objective", t.objective},
           {"instance_seed", t.instance_seed}};
}

void from_json(const json& j, Tour& t) {
  t.order = j.at("order").get<std::vector<LetterId>>();
  t.total_cost_m = j.at("total_cost_m").get<double>();
  t.total_profit_bps = j.at("total_profit_bps").get<double>();
  t.objective = j.at("objective").get<double>();
  t.instance_seed = j.value("instance_seed", std::uint64_t{0});
}

void to_json(json& j, const Word& w) { j = w.letters; }
void from_json(const json& j, Word& w) { w.letters = j.get<std::vector<LetterId>>(); }

void to_json(json& j, const NoiseConfig& n) {
  j = json{{"relative_process_std", n.relative_process_std},
           {"measurement_to_process_ratio", n.measurement_to_process_ratio}};
  if (n.process_cov_override) j["process_cov"] = matrix_to_json(*n.process_cov_override);
  if (n.measurement_cov_override) j["measurement_cov"] = matrix_to_json(*n.measurement_cov_override);
}

void from_json(const json& j, NoiseConfig& n) {
  NoiseConfig d;
  n.relative_process_std = j.value("relative_process_std", d.relative_process_std);
  n.measurement_to_process_ratio =
      j.value("measurement_to_process_ratio", d.measurement_to_process_ratio);
  n.process_cov_override.reset();
  n.measurement_cov_override.reset();
  if (j.contains("process_cov")) n.process_cov_override = Eigen::Matrix2d(matrix_from_json(j["process_cov"]));
  if (j.contains("measurement_cov"))
    n.measurement_cov_override = Eigen::Matrix2d(matrix_from_json(j["measurement_cov"]));
}

void to_json(json& j, const WorldModel& wm) {
  json letters = json::array();
  for (const auto& s : wm.letters)
    letters.push_back({{"id", s.id},
                       {"center_m", point_to_json(s.center_m)},
                       {"mean_profit_bps", s.mean_profit_bps},
                       {"profit_variance", s.profit_variance},
                       {"occurrences", s.occurrences},
                       {"start_count", s.start_count}});
  json words = json::array();
  for (const auto& e : wm.words) words.push_back({{"letters", e.word}, {"count", e.count}});
  std::vector<int> active(wm.global_transition.active.begin(), wm.global_transition.active.end());
  j = json{{"format", "uavplan-world-model/1"},
           {"vocabulary", wm.vocabulary.ids()},
           {"letters", letters},
           {"words", words},
           {"transition", matrix_to_json(wm.global_transition.probs)},
           {"active_rows", active},
           {"mean_letter_profit_bps", wm.mean_letter_profit_bps},
           {"mean_leg_time_s", wm.mean_leg_time_s},
           {"process_cov", matrix_to_json(wm.process_cov)},
           {"measurement_cov", matrix_to_json(wm.measurement_cov)},
           {"noise", wm.noise},
           {"num_demonstrations", wm.num_demonstrations},
           {"skipped_demonstrations", wm.skipped_demonstrations},
           {"fingerprint", wm.fingerprint}};
}

void from_json(const json& j, WorldModel& wm) {
  wm.vocabulary = Vocabulary(j.at("vocabulary").get<std::vector<LetterId>>());
  wm.letters.clear();
  for (const auto& l : j.at("letters")) {
    LetterStats s;
    s.id = l.at("id").get<LetterId>();
    s.center_m = point_from_json(l.at("center_m"));
    s.mean_profit_bps = l.at("mean_profit_bps").get<double>();
    s.profit_variance = l.at("profit_variance").get<double>();
    s.occurrences = l.at("occurrences").get<int>();
    s.start_count = l.at("start_count").get<int>();
    wm.letters.push_back(s);
  }
  if (wm.letters.size() != wm.vocabulary.size())
    throw ConfigError("world model: letter statistics do not match the vocabulary");
  wm.words.clear();
  for (const auto& w : j.at("words"))
    wm.words.push_back({w.at("letters").get<Word>(), w.at("count").get<int>()});
  const auto n = static_cast<Eigen::Index>(wm.vocabulary.size());
  wm.global_transition.probs = matrix_from_json(j.at("transition"), n);
  const auto active = j.at("active_rows").get<std::vector<int>>();
  wm.global_transition.active.assign(active.begin(), active.end());
  wm.mean_letter_profit_bps = j.at("mean_letter_profit_bps").get<double>();
  wm.mean_leg_time_s = j.at("mean_leg_time_s").get<double>();
  wm.process_cov = matrix_from_json(j.at("process_cov"));
  wm.measurement_cov = matrix_from_json(j.at("measurement_cov"));
  wm.noise = j.at("noise").get<NoiseConfig>();
  wm.num_demonstrations = j.at("num_demonstrations").get<std::size_t>();
  wm.skipped_demonstrations = j.at("skipped_demonstrations").get<std::size_t>();
  wm.fingerprint = j.at("fingerprint").get<std::string>();
}

void to_json(json& j, const QTrainConfig& c) {
  j = json{{"learning_rate", c.learning_rate},   {"discount", c.discount},
           {"epsilon_start", c.epsilon_start},   {"epsilon_end", c.epsilon_end},
           {"episodes", c.episodes},             {"weights", c.weights},
           {"terminal_bonus", c.terminal_bonus}, {"bonus_tolerance", c.bonus_tolerance},
           {"temperature", c.temperature},       {"reference_bias", c.reference_bias}};
}

void from_json(const json& j, QTrainConfig& c) {
  QTrainConfig d;
  c.learning_rate = j.value("learning_rate", d.learning_rate);
  c.discount = j.value("discount", d.discount);
  c.epsilon_start = j.value("epsilon_start", d.epsilon_start);
  c.epsilon_end = j.value("epsilon_end", d.epsilon_end);
  c.episodes = j.value("episodes", d.episodes);
  c.weights = j.value("weights", d.weights);
  c.terminal_bonus = j.value("terminal_bonus", d.terminal_bonus);
  c.bonus_tolerance = j.value("bonus_tolerance", d.bonus_tolerance);
  c.temperature = j.value("temperature", d.temperature);
  c.reference_bias = j.value("reference_bias", d.reference_bias);
}

void to_json(json& j, const QTable& q) {
  j = json{{"format", "uavplan-qtable/1"},
           {"vocabulary", q.vocabulary.ids()},
           {"values", matrix_to_json(q.values)},
           {"visits", matrix_to_json(q.visits)},
           {"config", q.config},
           {"fingerprint", q.fingerprint},
           {"seed", q.seed}};
}

void from_json(const json& j, QTable& q) {
  q.vocabulary = Vocabulary(j.at("vocabulary").get<std::vector<LetterId>>());
  const auto n = static_cast<Eigen::Index>(q.vocabulary.size());
  q.values = matrix_from_json(j.at("values"), n);
  q.visits = matrix_from_json(j.at("visits"), n);
  if (q.values.rows() != n + 1 || q.values.cols() != n || q.visits.rows() != n + 1 ||
      q.visits.cols() != n)
    throw ConfigError("qtable: matrix shape does not match the vocabulary");
  q.config = j.at("config").get<QTrainConfig>();
  q.fingerprint = j.at("fingerprint").get<std::string>();
  q.seed = j.at("seed").get<std::uint64_t>();
}

void to_json(json& j, const PlannerConfig& c) {
  j = json{{"num_words", c.num_words},
           {"seed", c.seed},
           {"insertion_order", order_name(c.insertion_order)},
           {"weights", c.weights}};
}

void from_json(const json& j, PlannerConfig& c) {
  PlannerConfig d;
  c.num_words = j.value("num_words", d.num_words);
  c.seed = j.value("seed", d.seed);
  c.weights = j.value("weights", d.weights);
  const std::string o = j.value("insertion_order", std::string(order_name(d.insertion_order)));
  if (o == "nearest_to_centroid") c.insertion_order = InsertionOrder::nearest_to_centroid;
  else if (o == "farthest_from_centroid") c.insertion_order = InsertionOrder::farthest_from_centroid;
  else if (o == "as_given") c.insertion_order = InsertionOrder::as_given;
  else throw ConfigError("unknown insertion order '" + o + "'");
}

void to_json(json& j, const GaussianBelief& b) {
  j = json{{"mean", {b.mean.x(), b.mean.y()}}, {"covariance", matrix_to_json(b.covariance)}};
}

void to_json(json& j, const PlanResult& r) {
  json steps = json::array();
  for (const auto& s : r.steps) {
    json cands = json::array();
    for (const auto& c : s.candidates)
      cands.push_back({{"removed_edge", {c.removed_edge.first, c.removed_edge.second}},
                       {"edge_index", c.edge_index},
                       {"candidate_word", c.candidate_word},
                       {"tour_length_m", c.tour_length_m},
                       {"predicted_obs", c.predicted_obs},
                       {"surprise", c.surprise}});
    steps.push_back({{"inserted", s.inserted}, {"winner", s.winner}, {"candidates", cands}});
  }
  j = json{{"normal_letters", r.classes.normal},
           {"novel_letters", r.classes.novel},
           {"generated_words", r.generated},
           {"reference_index", r.reference_choice.index},
           {"reference_distance", r.reference_choice.distance},
           {"reference_word", r.reference},
           {"steps", steps},
           {"final_word", r.final_word},
           {"tour", r.tour}};
}

void write_text_atomic(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write " + tmp.string());
    out << text;
    if (!out) throw ConfigError("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

void write_json_atomic(const std::filesystem::path& path, const json& j) {
  write_text_atomic(path, j.dump(1) + "\n");
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

}  // namespace uavplan
