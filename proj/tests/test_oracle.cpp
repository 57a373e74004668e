#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "support/fixtures.hpp"
#include "uavplan/errors.hpp"
#include "uavplan/oracle.hpp"

using namespace uavplan;
using testing::make_instance;
using testing::random_instance;

namespace {

const ObjectiveWeights kWeights{0.9, 0.1, ObjectiveScaling::raw};

bool same_objective(double a, double b) {
  return std::abs(a - b) <= 1e-9 * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace

TEST_CASE("objective arithmetic under normalized scaling") {
  // Two coincident hotspots 50 m from the depot: the nearest-neighbor tour
  // costs 100 m and the total profit is 100, so tour {1} normalizes to cost 1.0
  // and profit 0.5.
  const auto inst = make_instance({{1, 50, 0, 50.0}, {2, 50, 0, 50.0}});
  const ObjectiveWeights w{0.9, 0.1, ObjectiveScaling::normalized};
  const Tour t = make_tour({1}, inst, w);
  CHECK(t.total_cost_m == doctest::Approx(100.0));
  CHECK(t.objective == doctest::Approx(0.85));
  CHECK(objective(t, w, inst) == doctest::Approx(0.85));
  CHECK(objective(Tour{}, w, inst) == 0.0);
}

TEST_CASE("objective in raw units") {
  const auto inst = make_instance({{1, 30, 40, 1000.0}});
  const Tour t = make_tour({1}, inst, kWeights);
  CHECK(t.objective == doctest::Approx(0.9 * 100.0 - 0.1 * 1000.0));
}

TEST_CASE("objective rejects unknown and repeated vertices") {
  const auto inst = make_instance({{1, 1, 0}, {2, 2, 0}});
  Tour bad;
  bad.order = {1, 9};
  CHECK_THROWS_AS(objective(bad, kWeights, inst), ConsistencyError);
  bad.order = {1, 1};
  CHECK_THROWS_AS(objective(bad, kWeights, inst), ConsistencyError);
}

TEST_CASE("weights must sum to one") {
  CHECK_THROWS_AS((ObjectiveWeights{0.5, 0.6}.validate()), ConfigError);
  CHECK_NOTHROW(kWeights.validate());
}

TEST_CASE("nearest_neighbor_construct") {
  CHECK(nearest_neighbor_construct(make_instance({{4, 10, 10}})).order == std::vector<LetterId>{4});
  const auto line = make_instance({{3, 3, 0}, {1, 1, 0}, {2, 2, 0}});
  CHECK(nearest_neighbor_construct(line).order == std::vector<LetterId>{1, 2, 3});

  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto inst = random_instance(s, 8);
    const Tour nn = nearest_neighbor_construct(inst, kWeights);
    const Tour opt = brute_force(inst, kWeights);
    CHECK(nn.total_cost_m >= opt.total_cost_m - 1e-9);
  }
}

TEST_CASE("two_opt removes a crossing on the unit square") {
  // The depot coincides with corner 1.
  const auto sq = make_instance({{1, 0, 0}, {2, 1, 0}, {3, 1, 1}, {4, 0, 1}});
  const Tour crossing = make_tour({1, 3, 2, 4}, sq, kWeights);
  CHECK(crossing.total_cost_m == doctest::Approx(2.0 + 2.0 * std::sqrt(2.0)));
  const Tour fixed = two_opt(crossing, kWeights, sq);
  CHECK(fixed.total_cost_m == doctest::Approx(4.0));
  CHECK(fixed.objective < crossing.objective);

  const Tour again = two_opt(fixed, kWeights, sq);
  CHECK(again.order == fixed.order);
  CHECK(again.objective == fixed.objective);
}

TEST_CASE("two_opt from a single start is a local search") {
  int matches = 0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    const auto inst = random_instance(1000 + s, 7);
    const Tour start = nearest_neighbor_construct(inst, kWeights);
    const Tour local = two_opt(start, kWeights, inst);
    CHECK(local.objective <= start.objective + 1e-9 * std::abs(start.objective));
    matches += same_objective(local.objective, brute_force(inst, kWeights).objective);
  }
  MESSAGE("single-start 2-opt optimal on " << matches << "/100");
  CHECK(matches >= 80);
}

TEST_CASE("selection_pass") {
  SUBCASE("beta = 0 drops the outlier") {
    const auto inst = make_instance({{1, 10, 0}, {2, 0, 10}, {3, 5000, 5000}});
    const ObjectiveWeights cost_only{1.0, 0.0};
    const Tour t = selection_pass(make_tour({1, 2, 3}, inst, cost_only), cost_only, inst);
    CHECK_FALSE(t.visits(3));
  }
  SUBCASE("alpha = 0 keeps everything") {
    const auto inst = make_instance({{1, 10, 0}, {2, 0, 10}, {3, 5000, 5000}});
    const ObjectiveWeights profit_only{0.0, 1.0};
    const Tour t = selection_pass(make_tour({1, 2, 3}, inst, profit_only), profit_only, inst);
    CHECK(t.size() == 3);
  }
  SUBCASE("experiment weights keep every hotspot at realistic profits") {
    for (std::uint64_t s = 0; s < 50; ++s) {
      const auto inst = random_instance(s, 20, 100);
      const Tour t = solve(inst, kWeights);
      CHECK(t.size() == 20);
    }
  }
  SUBCASE("never worse than its input and idempotent") {
    const ObjectiveWeights w{0.9, 0.1, ObjectiveScaling::normalized};
    for (std::uint64_t s = 0; s < 20; ++s) {
      const auto inst = random_instance(s, 8);
      const Tour in = two_opt(nearest_neighbor_construct(inst, w), w, inst);
      const Tour out = selection_pass(in, w, inst);
      CHECK(out.objective <= in.objective + 1e-12);
      const Tour twice = selection_pass(out, w, inst);
      CHECK(twice.order == out.order);
    }
  }
}

TEST_CASE("solve") {
  SUBCASE("five-hotspot training instance") {
    const auto inst = random_instance(42, 5);
    const Tour t = solve(inst, kWeights);
    CHECK(t.size() <= 5);
    CHECK(t.objective <= nearest_neighbor_construct(inst, kWeights).objective + 1e-9);
  }
  SUBCASE("two hotspots tie; lower first id wins") {
    const auto inst = make_instance({{8, 100, 0}, {3, 0, 100}});
    CHECK(solve(inst, kWeights).order == std::vector<LetterId>{3, 8});
  }
  SUBCASE("deterministic") {
    const auto inst = random_instance(5, 30, 100);
    const Tour a = solve(inst, kWeights);
    const Tour b = solve(inst, kWeights);
    CHECK(a.order == b.order);
    CHECK(a.objective == b.objective);
  }
  SUBCASE("within 2% of the optimum on 8-node instances") {
    int close = 0;
    for (std::uint64_t s = 0; s < 200; ++s) {
      const auto inst = random_instance(5000 + s, 8);
      const Tour t = solve(inst, kWeights);
      const Tour opt = brute_force(inst, kWeights);
      CHECK(opt.objective <= t.objective + 1e-9 * std::abs(t.objective));
      const double gap = std::abs(t.objective - opt.objective) / std::abs(opt.objective);
      close += gap <= 0.02;
    }
    CHECK(close >= 190);
  }
  SUBCASE("multi-start never loses to the single start") {
    for (std::uint64_t s = 0; s < 30; ++s) {
      const auto inst = random_instance(700 + s, 12, 100);
      const Tour multi = solve(inst, kWeights);
      const Tour single = solve(inst, kWeights, SolveOptions{false});
      CHECK(multi.objective <= single.objective + 1e-9 * std::abs(single.objective));
    }
  }
  SUBCASE("forced first stop") {
    const auto line = make_instance({{3, 3, 0}, {1, 1, 0}, {2, 2, 0}});
    CHECK(nearest_neighbor_from(line, 3).order == std::vector<LetterId>{3, 2, 1});
    CHECK_THROWS_AS(nearest_neighbor_from(line, 9), ConsistencyError);
  }
  SUBCASE("stored cost matches recomputation") {
    for (std::uint64_t s = 0; s < 20; ++s) {
      const auto inst = random_instance(s, 25, 100);
      const Tour t = solve(inst, kWeights);
      CHECK(std::abs(tour_cost(t.order, inst) - t.total_cost_m) <= 1e-9 * t.total_cost_m);
    }
  }
}

TEST_CASE("brute_force") {
  SUBCASE("single hotspot is visited iff its profit outweighs the round trip") {
    // Round trip 200 m: cost term 0.9 * 200 = 180.
    CHECK(brute_force(make_instance({{1, 100, 0, 1000.0}}), kWeights).order.empty());
    CHECK(brute_force(make_instance({{1, 100, 0, 2000.0}}), kWeights).order ==
          std::vector<LetterId>{1});
  }
  SUBCASE("equilateral triangle around the depot: every order ties") {
    const double r = 100.0;
    const auto inst = make_instance({{1, r, 0},
                                     {2, r * std::cos(2 * M_PI / 3), r * std::sin(2 * M_PI / 3)},
                                     {3, r * std::cos(4 * M_PI / 3), r * std::sin(4 * M_PI / 3)}});
    std::vector<LetterId> order{1, 2, 3};
    const double ref = make_tour(order, inst, kWeights).objective;
    while (std::next_permutation(order.begin(), order.end()))
      CHECK(same_objective(make_tour(order, inst, kWeights).objective, ref));
    CHECK(brute_force(inst, kWeights).order == std::vector<LetterId>{1, 2, 3});
  }
  SUBCASE("refuses large instances") {
    CHECK_THROWS_AS(brute_force(random_instance(1, 11), kWeights), ConfigError);
  }
  SUBCASE("dominates solve on small instances") {
    const ObjectiveWeights w{0.9, 0.1, ObjectiveScaling::normalized};
    for (std::uint64_t s = 0; s < 30; ++s) {
      const auto inst = random_instance(200 + s, 1 + static_cast<int>(s % 8));
      CHECK(brute_force(inst, w).objective <= solve(inst, w).objective + 1e-9);
      CHECK(brute_force(inst, kWeights).objective <=
            solve(inst, kWeights).objective + 1e-9 * std::abs(solve(inst, kWeights).objective));
    }
  }
}
