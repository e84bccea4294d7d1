#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "shuttleplan/regional.hpp"
#include "shuttleplan/routing.hpp"

namespace shuttleplan {

inline const std::vector<double> kDefaultReachBuckets{200, 400, 600, 800, 1000};

// Walking-reachability of one candidate stop within its regional cluster.
struct StopMetrics {
  int spot_id = 0;
  double avg_dist = 0.0;              // meters, order-weighted
  double avg_dura = 0.0;              // seconds, order-weighted
  std::map<double, double> reach;     // bucket meters -> share of orders within it
  double dist_cost = 0.0;             // meter * orders
  double total_weight = 0.0;          // orders the averages are taken over
};

struct StopMetricsOptions {
  std::vector<double> buckets = kDefaultReachBuckets;
  // Count the candidate's own orders at distance 0. Turning this off drops
  // the candidate's weight from every denominator.
  bool include_self = true;
};

// Order weights of the region's members, as a spot_id -> weight map.
using SpotWeights = std::map<int, double>;

SpotWeights weights_of(const std::vector<DropOffSpot>& spots);

// dist_cost = sum_j w_j * dist(candidate, j); avg_dist = dist_cost / sum_j w_j;
// avg_dura likewise with walking durations; reach[b] = share of w_j with
// dist <= b. Members are accumulated in spot-id order so the result does not
// depend on the member list order. Throws PlanError when the candidate is
// not a member of the region.
StopMetrics stop_metrics(int candidate, const RegionalCluster& region, const WalkMatrix& walk,
                         const SpotWeights& weights, const StopMetricsOptions& options = {});

// argmin avg_dist; ties go to the larger order count, then the smaller spot id.
int recommend_stop(const RegionalCluster& region, const WalkMatrix& walk, const SpotWeights& weights,
                   const StopMetricsOptions& options = {});

// avg_dist | avg_dura | dist_cost | reach<meters>, e.g. "reach800".
struct MetricKey {
  enum class Kind { kAvgDist, kAvgDura, kDistCost, kReach } kind = Kind::kAvgDist;
  double bucket = 0.0;

  static MetricKey parse(const std::string& text);  // throws PlanError("unknown_metric")
  std::string name() const;
  bool lower_is_better() const { return kind != Kind::kReach; }
  double value(const StopMetrics& m) const;
};

// Ascending for cost-like metrics, descending for reach buckets. Ties break
// the same way as recommend_stop, so by avg_dist the recommended stop is first.
std::vector<StopMetrics> rank_stops(const RegionalCluster& region, const WalkMatrix& walk, const SpotWeights& weights,
                                    const MetricKey& key, const StopMetricsOptions& options = {});

}  // namespace shuttleplan
