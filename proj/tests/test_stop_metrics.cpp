#include <gtest/gtest.h>

#include <numeric>
#include <random>

#include "shuttleplan/errors.hpp"
#include "shuttleplan/stop_metrics.hpp"

using namespace shuttleplan;

namespace {

RegionalCluster region_of(std::vector<int> ids, long long total = 0) {
  RegionalCluster r;
  r.member_spot_ids = std::move(ids);
  r.seed_spot_id = r.member_spot_ids.front();
  r.order_total = total;
  return r;
}

}  // namespace

TEST(StopMetrics, SingletonRegion) {
  const auto w = WalkMatrix::from_distances({5}, {0});
  const auto m = stop_metrics(5, region_of({5}), w, {{5, 3}});
  EXPECT_EQ(m.avg_dist, 0);
  EXPECT_EQ(m.avg_dura, 0);
  EXPECT_EQ(m.dist_cost, 0);
  for (const auto& [b, share] : m.reach) EXPECT_EQ(share, 1.0);
  EXPECT_EQ(recommend_stop(region_of({5}), w, {{5, 3}}), 5);
}

TEST(StopMetrics, WorkedExample) {
  // Candidate 0 (w=1), member 1 at 100 m (w=2), member 2 at 400 m (w=1).
  const auto w = WalkMatrix::from_distances({0, 1, 2}, {0, 100, 400, 100, 0, 300, 400, 300, 0});
  const SpotWeights weights{{0, 1}, {1, 2}, {2, 1}};
  const auto m = stop_metrics(0, region_of({0, 1, 2}), w, weights);
  EXPECT_DOUBLE_EQ(m.avg_dist, 150);
  EXPECT_DOUBLE_EQ(m.dist_cost, 600);
  EXPECT_DOUBLE_EQ(m.reach.at(200), 0.75);
  EXPECT_DOUBLE_EQ(m.reach.at(400), 1.0);
  EXPECT_DOUBLE_EQ(m.avg_dura, 150 / kDefaultWalkSpeedMps);
  EXPECT_DOUBLE_EQ(m.total_weight, 4);
}

TEST(StopMetrics, CandidateOutsideRegionIsAnError) {
  const auto w = WalkMatrix::from_distances({0, 1}, {0, 1, 1, 0});
  EXPECT_THROW(stop_metrics(1, region_of({0}), w, {{0, 1}, {1, 1}}), PlanError);
}

TEST(RecommendStop, MiddleOfALine) {
  const auto w = WalkMatrix::from_distances({0, 1, 2}, {0, 500, 1000, 500, 0, 500, 1000, 500, 0});
  const SpotWeights weights{{0, 1}, {1, 1}, {2, 1}};
  const auto r = region_of({0, 1, 2});
  EXPECT_EQ(recommend_stop(r, w, weights), 1);
  EXPECT_NEAR(stop_metrics(1, r, w, weights).avg_dist, 1000.0 / 3, 1e-9);
  EXPECT_NEAR(stop_metrics(0, r, w, weights).avg_dist, 500, 1e-9);
}

TEST(RecommendStop, SymmetricTieGoesToSmallerId) {
  const auto w = WalkMatrix::from_distances({3, 8}, {0, 250, 250, 0});
  EXPECT_EQ(recommend_stop(region_of({8, 3}), w, {{3, 2}, {8, 2}}), 3);
  EXPECT_EQ(recommend_stop(region_of({8, 3}), w, {{3, 2}, {8, 5}}), 8);
}

TEST(RankStops, MetricsCanDisagree) {
  // X is closer on average, but its far member sits behind a slow crossing,
  // so Y walks faster and covers more orders within 800 m.
  const std::vector<int> ids{0, 1, 2, 3};  // X, Y, A, B
  const std::vector<double> dist{0, 300, 100, 900,  //
                                 300, 0, 400, 700,  //
                                 100, 400, 0, 950,  //
                                 900, 700, 950, 0};
  const std::vector<double> dura{0, 250, 83, 2000,  //
                                 250, 0, 333, 583,  //
                                 83, 333, 0, 2100,  //
                                 2000, 583, 2100, 0};
  const WalkMatrix w(ids, dist, dura);
  const SpotWeights weights{{0, 1}, {1, 1}, {2, 1}, {3, 1}};
  const auto r = region_of(ids);
  const auto x = stop_metrics(0, r, w, weights);
  const auto y = stop_metrics(1, r, w, weights);
  EXPECT_LT(x.avg_dist, y.avg_dist);
  EXPECT_GT(x.avg_dura, y.avg_dura);
  EXPECT_LT(x.reach.at(800), y.reach.at(800));
  EXPECT_EQ(rank_stops(r, w, weights, MetricKey::parse("avg_dist")).front().spot_id, 0);
  EXPECT_EQ(rank_stops(r, w, weights, MetricKey::parse("avg_dura")).front().spot_id, 1);
  EXPECT_EQ(rank_stops(r, w, weights, MetricKey::parse("reach800")).front().spot_id, 1);
  EXPECT_EQ(recommend_stop(r, w, weights), 0);
}

TEST(MetricKey, ParseAndReject) {
  EXPECT_EQ(MetricKey::parse("reach200").bucket, 200);
  EXPECT_EQ(MetricKey::parse("dist_cost").kind, MetricKey::Kind::kDistCost);
  EXPECT_FALSE(MetricKey::parse("reach400").lower_is_better());
  EXPECT_THROW(MetricKey::parse("speed"), PlanError);
  EXPECT_THROW(MetricKey::parse("reach"), PlanError);
}

TEST(StopMetrics, AlgebraOnRandomRegions) {
  std::mt19937_64 rng(51);
  std::uniform_real_distribution<double> d(0, 1500);
  std::uniform_int_distribution<int> o(1, 40);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + trial % 15;
    std::vector<int> ids(n);
    std::iota(ids.begin(), ids.end(), 10);
    std::vector<double> dist(n * n, 0.0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (i != j) dist[i * n + j] = d(rng);
    const auto w = WalkMatrix::from_distances(ids, dist);
    SpotWeights weights;
    for (int id : ids) weights[id] = o(rng);
    const auto r = region_of(ids);
    for (int c : ids) {
      const auto in = stop_metrics(c, r, w, weights);
      EXPECT_EQ(in.avg_dist * in.total_weight, in.dist_cost);
      double prev = 0;
      for (const auto& [b, share] : in.reach) {
        EXPECT_GE(share, prev);
        prev = share;
      }
      StopMetricsOptions ex;
      ex.include_self = false;
      if (n == 1) continue;
      const auto out = stop_metrics(c, r, w, weights, ex);
      EXPECT_EQ(out.total_weight, in.total_weight - weights[c]);
      EXPECT_NEAR(out.dist_cost, in.dist_cost, 1e-9 * in.dist_cost);
      EXPECT_NEAR(out.avg_dist * out.total_weight, in.avg_dist * in.total_weight, 1e-9 * in.dist_cost);
      for (const auto& [b, share] : in.reach) {
        EXPECT_NEAR(share * in.total_weight - weights[c], out.reach.at(b) * out.total_weight, 1e-9);
      }
    }
  }
}

TEST(StopMetrics, IndependentOfMemberOrder) {
  std::mt19937_64 rng(52);
  std::uniform_real_distribution<double> d(0, 900);
  const int n = 9;
  std::vector<int> ids(n);
  std::iota(ids.begin(), ids.end(), 0);
  std::vector<double> dist(n * n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) dist[i * n + j] = d(rng);
  const auto w = WalkMatrix::from_distances(ids, dist);
  SpotWeights weights;
  for (int id : ids) weights[id] = 1 + id % 4;
  const auto base = stop_metrics(4, region_of(ids), w, weights);
  for (int t = 0; t < 10; ++t) {
    auto shuffled = ids;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    const auto m = stop_metrics(4, region_of(shuffled), w, weights);
    EXPECT_EQ(m.avg_dist, base.avg_dist);
    EXPECT_EQ(m.avg_dura, base.avg_dura);
    EXPECT_EQ(m.reach, base.reach);
  }
}
