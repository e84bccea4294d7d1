#pragma once

#include <span>
#include <vector>

#include "shuttleplan/directional.hpp"
#include "shuttleplan/routing.hpp"

namespace shuttleplan {

inline constexpr double kDefaultRegionThresholdM = 1000.0;

// A set of drop-off spots within one direction whose pairwise walking
// distances are all within the threshold. One shuttle stop serves it.
struct RegionalCluster {
  int direction_id = 0;
  int region_id = 0;  // dense per direction, creation order
  std::vector<int> member_spot_ids;  // seed first, then in scan order
  long long order_total = 0;
  int seed_spot_id = 0;
};

// Repeatedly: for every remaining spot as seed, grow a set nearest-first
// (ascending walk distance from the seed, ties by spot id), admitting a spot
// only if it is within threshold_m of every current member. Keep the largest
// set (ties: larger order total, then smaller seed id), emit it as the next
// region and remove its members. `weights` is parallel to `spot_ids`.
std::vector<RegionalCluster> greedy_regions(std::span<const int> spot_ids, std::span<const long long> weights,
                                            const WalkMatrix& walk, double threshold_m = kDefaultRegionThresholdM,
                                            int direction_id = 0);

// greedy_regions applied to every direction of `directional`; result is
// indexed by direction id.
std::vector<std::vector<RegionalCluster>> regions_by_direction(const DirectionalClustering& directional,
                                                               const std::vector<DropOffSpot>& spots,
                                                               const WalkMatrix& walk,
                                                               double threshold_m = kDefaultRegionThresholdM);

}  // namespace shuttleplan
