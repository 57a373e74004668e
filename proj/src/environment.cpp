#include "uavplan/environment.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "uavplan/errors.hpp"
#include "uavplan/random.hpp"

namespace uavplan {

namespace {

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

}  // namespace

void ChannelParams::validate() const {
  if (!(carrier_frequency_hz > 0.0) || !(rb_bandwidth_hz > 0.0) || !(user_tx_power_w > 0.0))
    throw ConfigError("channel: frequency, bandwidth and transmit power must be positive");
  if (!(path_loss_exponent > 0.0)) throw ConfigError("channel: path loss exponent must be positive");
  if (mu_los_db > mu_nlos_db) throw ConfigError("channel: mu_los_db must not exceed mu_nlos_db");
  if (!std::isfinite(noise_power_dbm)) throw ConfigError("channel: noise power must be finite");
}

double ChannelParams::noise_power_w() const { return std::pow(10.0, (noise_power_dbm - 30.0) / 10.0); }

void MissionConfig::validate() const {
  if (!(uav_altitude_m > 0.0)) throw ConfigError("mission: altitude must be positive");
  if (!(uav_speed_m_per_s > 0.0)) throw ConfigError("mission: speed must be positive");
  if (!(dwell_time_s >= 0.0)) throw ConfigError("mission: dwell time must be nonnegative");
  if (!(time_slot_s > 0.0)) throw ConfigError("mission: time slot must be positive");
  if (!(area_side_m > 0.0)) throw ConfigError("mission: area side must be positive");
}

const Hotspot* Instance::find(LetterId id) const {
  auto it = std::lower_bound(hotspots.begin(), hotspots.end(), id,
                             [](const Hotspot& h, LetterId v) { return h.id < v; });
  return (it != hotspots.end() && it->id == id) ? &*it : nullptr;
}

std::vector<LetterId> Instance::ids() const {
  std::vector<LetterId> out;
  out.reserve(hotspots.size());
  for (const auto& h : hotspots) out.push_back(h.id);
  return out;
}

double Instance::total_profit() const {
  double s = 0.0;
  for (const auto& h : hotspots) s += h.profit_bps;
  return s;
}

double los_probability(double horizontal_dist_m, double altitude_m, const ChannelParams& chan) {
  const double theta_deg = std::atan2(altitude_m, horizontal_dist_m) * 180.0 / std::numbers::pi;
  const double a = chan.los_sigmoid_a;
  const double b = chan.los_sigmoid_b;
  return 1.0 / (1.0 + a * std::exp(-b * (theta_deg - a)));
}

double channel_gain(double dist_3d_m, double los_prob, const ChannelParams& chan) {
  if (!(dist_3d_m > 0.0)) throw NumericError("channel_gain: distance must be positive");
  const double k0 = std::pow(4.0 * std::numbers::pi * chan.carrier_frequency_hz / kSpeedOfLight, 2);
  const double excess =
      los_prob * db_to_linear(chan.mu_los_db) + (1.0 - los_prob) * db_to_linear(chan.mu_nlos_db);
  return 1.0 / (k0 * std::pow(dist_3d_m, chan.path_loss_exponent) * excess);
}

double hotspot_sum_rate(const Hotspot& h, const Point3& uav_pos, const ChannelParams& chan) {
  if (h.num_users <= 0) return 0.0;
  const double horizontal = (uav_pos.head<2>() - h.center_m).norm();
  const double altitude = uav_pos.z();
  const double dist = std::hypot(horizontal, altitude);
  const double gain = channel_gain(dist, los_probability(horizontal, altitude, chan), chan);
  const double per_user =
      chan.rb_bandwidth_hz * std::log2(1.0 + chan.user_tx_power_w * gain / chan.noise_power_w());
  return per_user * h.num_users;
}

int sample_positive_poisson(double mean, double u) {
  // Inverse CDF of Poisson(mean) conditioned on K >= 1.
  const double log_p1 = std::log(mean) - mean - std::log(-std::expm1(-mean));
  double p = std::exp(log_p1);
  double cdf = p;
  int k = 1;
  const int cap = static_cast<int>(mean + 50.0 * std::sqrt(mean) + 50.0);
  while (u >= cdf && k < cap) {
    ++k;
    p *= mean / k;
    cdf += p;
  }
  return k;
}

std::vector<Hotspot> sample_pool(std::uint64_t rng_seed, int pool_size, double mean_users,
                                 const MissionConfig& area, const ChannelParams& chan) {
  if (pool_size < 1) throw ConfigError("sample_pool: pool_size must be >= 1");
  if (!(mean_users > 0.0)) throw ConfigError("sample_pool: mean_users must be positive");
  area.validate();
  chan.validate();

  std::vector<Hotspot> pool;
  pool.reserve(pool_size);
  for (int i = 0; i < pool_size; ++i) {
    Rng rng(derive_seed(rng_seed, {0x706f6f6cULL, static_cast<std::uint64_t>(i)}));
    Hotspot h;
    h.id = i + 1;
    h.center_m = Point2(uniform01(rng) * area.area_side_m, uniform01(rng) * area.area_side_m);
    h.num_users = sample_positive_poisson(mean_users, uniform01(rng));
    h.profit_bps =
        hotspot_sum_rate(h, Point3(h.center_m.x(), h.center_m.y(), area.uav_altitude_m), chan);
    pool.push_back(h);
  }
  return pool;
}

Instance sample_instance(std::uint64_t rng_seed, std::span<const Hotspot> pool, int n_select,
                         const Point2& depot, const ChannelParams& chan,
                         const MissionConfig& mission) {
  if (n_select < 1 || static_cast<std::size_t>(n_select) > pool.size())
    throw ConfigError("sample_instance: n_select must lie in [1, " + std::to_string(pool.size()) +
                      "]");
  Rng rng(derive_seed(rng_seed, {0x696e7374ULL}));
  std::vector<std::size_t> idx(pool.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  // Partial Fisher-Yates.
  for (int i = 0; i < n_select; ++i) {
    const std::size_t j = i + uniform_index(rng, idx.size() - i);
    std::swap(idx[i], idx[j]);
  }
  Instance inst;
  inst.depot_m = depot;
  inst.channel = chan;
  inst.mission = mission;
  inst.seed = rng_seed;
  for (int i = 0; i < n_select; ++i) inst.hotspots.push_back(pool[idx[i]]);
  std::sort(inst.hotspots.begin(), inst.hotspots.end(),
            [](const Hotspot& a, const Hotspot& b) { return a.id < b.id; });
  return inst;
}

}  // namespace uavplan
