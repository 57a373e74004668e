#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace uavplan {

using LetterId = int;
using Point2 = Eigen::Vector2d;
using Point3 = Eigen::Vector3d;

inline constexpr double kSpeedOfLight = 299792458.0;

/// Radio parameters of the air-to-ground link.
struct ChannelParams {
  double carrier_frequency_hz = 2.0e9;
  double path_loss_exponent = 2.0;
  double mu_los_db = 3.0;
  double mu_nlos_db = 23.0;
  double noise_power_dbm = -104.0;  // sigma^2 over one resource block
  double rb_bandwidth_hz = 180.0e3;
  double user_tx_power_w = 1.0;
  double los_sigmoid_a = 9.61;
  double los_sigmoid_b = 0.16;

  /// Throws ConfigError when a power, bandwidth, or frequency is not
  /// positive, or when mu_los_db > mu_nlos_db.
  void validate() const;
  double noise_power_w() const;
};

struct MissionConfig {
  double uav_altitude_m = 200.0;
  double uav_speed_m_per_s = 20.0;
  double dwell_time_s = 0.0;
  double time_slot_s = 1.0;
  double area_side_m = 2000.0;

  void validate() const;
};

struct Hotspot {
  LetterId id = 0;
  Point2 center_m = Point2::Zero();
  int num_users = 0;
  double profit_bps = 0.0;
};

/// One network realization: the hotspots a mission must serve.
struct Instance {
  std::vector<Hotspot> hotspots;  // sorted by id
  Point2 depot_m = Point2::Zero();
  ChannelParams channel;
  MissionConfig mission;
  std::uint64_t seed = 0;

  /// Returns nullptr when the id is not part of this instance.
  const Hotspot* find(LetterId id) const;
  std::vector<LetterId> ids() const;
  double total_profit() const;
};

/// Elevation-angle sigmoid LoS model, 1 / (1 + a exp(-b (theta_deg - a))).
double los_probability(double horizontal_dist_m, double altitude_m, const ChannelParams& chan);

/// Probabilistic mean channel gain (linear) at 3-D distance dist_3d_m.
double channel_gain(double dist_3d_m, double los_prob, const ChannelParams& chan);

/// Sum over the hotspot's users of B log2(1 + p g / sigma^2). All users sit
/// at the hotspot center.
double hotspot_sum_rate(const Hotspot& h, const Point3& uav_pos, const ChannelParams& chan);

/// Horizontal Euclidean distance.
inline double edge_cost(const Point2& a, const Point2& b) { return (a - b).norm(); }

/// Draws pool_size hotspots with ids 1..pool_size. Hotspot i depends only on
/// (rng_seed, i), so a smaller pool is always a prefix of a larger one drawn
/// from the same seed.
std::vector<Hotspot> sample_pool(std::uint64_t rng_seed, int pool_size, double mean_users,
                                 const MissionConfig& area, const ChannelParams& chan);

/// Uniformly selects n_select distinct hotspots from the pool.
Instance sample_instance(std::uint64_t rng_seed, std::span<const Hotspot> pool, int n_select,
                         const Point2& depot, const ChannelParams& chan,
                         const MissionConfig& mission);

/// Zero-truncated Poisson draw (K >= 1). Equivalent in law to drawing
/// Poisson(mean) and redrawing zeros, without the unbounded loop as mean -> 0.
int sample_positive_poisson(double mean, double u);

}  // namespace uavplan
