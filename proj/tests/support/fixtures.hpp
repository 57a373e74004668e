#pragma once

#include <algorithm>
#include <initializer_list>
#include <tuple>

#include "uavplan/environment.hpp"
#include "uavplan/oracle.hpp"
#include "uavplan/random.hpp"
#include "uavplan/world_model.hpp"

namespace uavplan::testing {

struct Spot {
  LetterId id;
  double x;
  double y;
  double profit = 1.0e6;
};

inline Instance make_instance(std::initializer_list<Spot> spots, Point2 depot = Point2::Zero(),
                              std::uint64_t seed = 1) {
  Instance inst;
  inst.depot_m = depot;
  inst.seed = seed;
  for (const auto& s : spots) inst.hotspots.push_back({s.id, Point2(s.x, s.y), 1, s.profit});
  std::sort(inst.hotspots.begin(), inst.hotspots.end(),
            [](const Hotspot& a, const Hotspot& b) { return a.id < b.id; });
  return inst;
}

/// n hotspots drawn from a 50-hotspot pool around a centered depot.
inline Instance random_instance(std::uint64_t seed, int n, int pool_size = 50) {
  MissionConfig m;
  ChannelParams c;
  const auto pool = sample_pool(derive_seed(seed, {77}), pool_size, 5.0, m, c);
  return sample_instance(seed, pool, n, Point2(1000, 1000), c, m);
}

/// A world model learned from m five-hotspot oracle demonstrations over a
/// 50-hotspot pool. The 100-hotspot test pool extends the training pool.
struct Trained {
  std::vector<Hotspot> train_pool;
  std::vector<Hotspot> test_pool;
  std::vector<Tour> demos;
  WorldModel wm;
};

inline Trained trained_world(std::uint64_t seed, int m = 300) {
  MissionConfig mission;
  ChannelParams c;
  const ObjectiveWeights w{0.9, 0.1, ObjectiveScaling::raw};
  Trained t;
  t.test_pool = sample_pool(derive_seed(seed, {0}), 100, 5.0, mission, c);
  t.train_pool.assign(t.test_pool.begin(), t.test_pool.begin() + 50);
  for (int k = 0; k < m; ++k) {
    const auto inst = sample_instance(derive_seed(seed, {1, static_cast<std::uint64_t>(k)}),
                                      t.train_pool, 5, Point2(1000, 1000), c, mission);
    t.demos.push_back(solve(inst, w));
  }
  t.wm = learn(t.demos, t.train_pool, mission);
  return t;
}

inline Instance test_instance(const Trained& t, std::uint64_t seed, int n) {
  return sample_instance(derive_seed(seed, {2}), t.test_pool, n, Point2(1000, 1000),
                         ChannelParams{}, MissionConfig{});
}

}  // namespace uavplan::testing
