#include "shuttleplan/regional.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "shuttleplan/errors.hpp"

namespace shuttleplan {
namespace {

struct Candidate {
  std::vector<std::size_t> members;  // positions into the caller's arrays
  long long order_total = 0;
  std::size_t seed = 0;
};

}  // namespace

std::vector<RegionalCluster> greedy_regions(std::span<const int> spot_ids, std::span<const long long> weights,
                                            const WalkMatrix& walk, double threshold_m, int direction_id) {
  const auto n = spot_ids.size();
  if (n == 0) throw PlanError("empty_input", "regional clustering needs at least one spot");
  if (weights.size() != n) throw PlanError("invalid_weight", "one weight per spot is required");

  std::vector<std::size_t> row(n);
  for (std::size_t i = 0; i < n; ++i) row[i] = walk.index_of(spot_ids[i]);
  auto dist = [&](std::size_t a, std::size_t b) { return walk.dist_at(row[a], row[b]); };

  // Scan order per seed is fixed up front: ascending distance, then spot id.
  std::vector<std::vector<std::size_t>> scan(n);
  for (std::size_t s = 0; s < n; ++s) {
    auto& order = scan[s];
    order.resize(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      const double da = dist(s, a), db = dist(s, b);
      if (da != db) return da < db;
      return spot_ids[a] < spot_ids[b];
    });
  }

  std::vector<char> remaining(n, 1);
  std::size_t left = n;
  std::vector<RegionalCluster> regions;
  while (left > 0) {
    std::optional<Candidate> best;
    for (std::size_t s = 0; s < n; ++s) {
      if (!remaining[s]) continue;
      Candidate c;
      c.seed = s;
      c.members.push_back(s);
      c.order_total = weights[s];
      for (std::size_t j : scan[s]) {
        if (j == s || !remaining[j]) continue;
        const bool fits = std::all_of(c.members.begin(), c.members.end(),
                                      [&](std::size_t m) { return dist(m, j) <= threshold_m && dist(j, m) <= threshold_m; });
        if (fits) {
          c.members.push_back(j);
          c.order_total += weights[j];
        }
      }
      const bool better =
          !best || c.members.size() > best->members.size() ||
          (c.members.size() == best->members.size() &&
           (c.order_total > best->order_total ||
            (c.order_total == best->order_total && spot_ids[c.seed] < spot_ids[best->seed])));
      if (better) best = std::move(c);
    }

    RegionalCluster r;
    r.direction_id = direction_id;
    r.region_id = static_cast<int>(regions.size());
    r.order_total = best->order_total;
    r.seed_spot_id = spot_ids[best->seed];
    for (std::size_t m : best->members) {
      r.member_spot_ids.push_back(spot_ids[m]);
      remaining[m] = 0;
      --left;
    }
    regions.push_back(std::move(r));
  }
  return regions;
}

std::vector<std::vector<RegionalCluster>> regions_by_direction(const DirectionalClustering& directional,
                                                               const std::vector<DropOffSpot>& spots,
                                                               const WalkMatrix& walk, double threshold_m) {
  if (!(threshold_m > 0.0)) throw PlanError("invalid_threshold", "walking threshold must be positive");
  std::map<int, long long> orders;
  for (const auto& s : spots) orders[s.spot_id] = s.order_count;
  std::vector<std::vector<RegionalCluster>> out(static_cast<std::size_t>(directional.k));
  for (int d = 0; d < directional.k; ++d) {
    const std::vector<int> ids = directional.members(d);
    std::vector<long long> w;
    w.reserve(ids.size());
    for (int id : ids) {
      auto it = orders.find(id);
      if (it == orders.end()) throw PlanError("unknown_spot", "spot " + std::to_string(id) + " has no order count");
      w.push_back(it->second);
    }
    out[static_cast<std::size_t>(d)] = greedy_regions(ids, w, walk, threshold_m, d);
  }
  return out;
}

}  // namespace shuttleplan
