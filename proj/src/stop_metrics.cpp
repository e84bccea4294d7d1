#include "shuttleplan/stop_metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "shuttleplan/errors.hpp"

namespace shuttleplan {
namespace {

bool nearly_equal(double a, double b) {
  if (a == b) return true;
  if (!std::isfinite(a) || !std::isfinite(b)) return false;
  return std::abs(a - b) <= 1e-12 * std::max(std::abs(a), std::abs(b));
}

double weight_of(const SpotWeights& weights, int spot_id) {
  auto it = weights.find(spot_id);
  if (it == weights.end()) throw PlanError("unknown_spot", "no order count for spot " + std::to_string(spot_id));
  return it->second;
}

std::string format_bucket(double b) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, b);
  return std::string(buf, ptr);
}

}  // namespace

SpotWeights weights_of(const std::vector<DropOffSpot>& spots) {
  SpotWeights w;
  for (const auto& s : spots) w[s.spot_id] = s.order_count;
  return w;
}

StopMetrics stop_metrics(int candidate, const RegionalCluster& region, const WalkMatrix& walk,
                         const SpotWeights& weights, const StopMetricsOptions& options) {
  std::vector<int> members = region.member_spot_ids;
  if (std::find(members.begin(), members.end(), candidate) == members.end()) {
    throw PlanError("spot_not_in_region", "spot " + std::to_string(candidate) + " is not in region " +
                                              std::to_string(region.region_id));
  }
  std::sort(members.begin(), members.end());

  StopMetrics m;
  m.spot_id = candidate;
  std::vector<double> buckets = options.buckets;
  std::sort(buckets.begin(), buckets.end());
  std::vector<double> within(buckets.size(), 0.0);
  double sum_dist = 0.0, sum_dura = 0.0, total = 0.0;
  const std::size_t row = walk.index_of(candidate);
  for (int j : members) {
    if (j == candidate && !options.include_self) continue;
    const double w = weight_of(weights, j);
    const double d = j == candidate ? 0.0 : walk.dist_at(row, walk.index_of(j));
    const double t = j == candidate ? 0.0 : walk.dura_at(row, walk.index_of(j));
    sum_dist += w * d;
    sum_dura += w * t;
    total += w;
    for (std::size_t b = 0; b < buckets.size(); ++b) {
      if (d <= buckets[b]) within[b] += w;
    }
  }
  m.total_weight = total;
  if (total > 0.0) {
    m.avg_dist = sum_dist / total;
    m.avg_dura = sum_dura / total;
    // Derived from avg_dist so that avg_dist * total reproduces it bit for bit.
    m.dist_cost = m.avg_dist * total;
    for (std::size_t b = 0; b < buckets.size(); ++b) m.reach[buckets[b]] = within[b] / total;
  } else {
    for (double b : buckets) m.reach[b] = 1.0;
  }
  return m;
}

int recommend_stop(const RegionalCluster& region, const WalkMatrix& walk, const SpotWeights& weights,
                   const StopMetricsOptions& options) {
  if (region.member_spot_ids.empty()) throw PlanError("empty_region", "region has no members");
  int best = -1;
  double best_avg = 0.0, best_w = 0.0;
  std::vector<int> ids = region.member_spot_ids;
  std::sort(ids.begin(), ids.end());
  for (int id : ids) {
    const double avg = stop_metrics(id, region, walk, weights, options).avg_dist;
    const double w = weight_of(weights, id);
    bool better = best < 0;
    if (!better) {
      if (!nearly_equal(avg, best_avg)) {
        better = avg < best_avg;
      } else if (w != best_w) {
        better = w > best_w;
      } else {
        better = id < best;
      }
    }
    if (better) {
      best = id;
      best_avg = avg;
      best_w = w;
    }
  }
  return best;
}

MetricKey MetricKey::parse(const std::string& text) {
  MetricKey k;
  if (text == "avg_dist") {
    k.kind = Kind::kAvgDist;
  } else if (text == "avg_dura") {
    k.kind = Kind::kAvgDura;
  } else if (text == "dist_cost") {
    k.kind = Kind::kDistCost;
  } else if (text.rfind("reach", 0) == 0 && text.size() > 5) {
    double b = 0.0;
    const char* first = text.data() + 5;
    const char* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, b);
    if (ec != std::errc() || ptr != last || !(b > 0.0)) {
      throw PlanError("unknown_metric", "unknown metric '" + text + "'");
    }
    k.kind = Kind::kReach;
    k.bucket = b;
  } else {
    throw PlanError("unknown_metric", "unknown metric '" + text + "'");
  }
  return k;
}

std::string MetricKey::name() const {
  switch (kind) {
    case Kind::kAvgDist:
      return "avg_dist";
    case Kind::kAvgDura:
      return "avg_dura";
    case Kind::kDistCost:
      return "dist_cost";
    case Kind::kReach:
      return "reach" + format_bucket(bucket);
  }
  return "avg_dist";
}

double MetricKey::value(const StopMetrics& m) const {
  switch (kind) {
    case Kind::kAvgDist:
      return m.avg_dist;
    case Kind::kAvgDura:
      return m.avg_dura;
    case Kind::kDistCost:
      return m.dist_cost;
    case Kind::kReach: {
      auto it = m.reach.find(bucket);
      if (it == m.reach.end()) throw PlanError("unknown_metric", "bucket " + format_bucket(bucket) + " not computed");
      return it->second;
    }
  }
  return m.avg_dist;
}

std::vector<StopMetrics> rank_stops(const RegionalCluster& region, const WalkMatrix& walk, const SpotWeights& weights,
                                    const MetricKey& key, const StopMetricsOptions& options) {
  StopMetricsOptions opts = options;
  if (key.kind == MetricKey::Kind::kReach &&
      std::find(opts.buckets.begin(), opts.buckets.end(), key.bucket) == opts.buckets.end()) {
    opts.buckets.push_back(key.bucket);
  }
  std::vector<StopMetrics> pool;
  std::vector<int> ids = region.member_spot_ids;
  std::sort(ids.begin(), ids.end());
  for (int id : ids) pool.push_back(stop_metrics(id, region, walk, weights, opts));
  auto before = [&](const StopMetrics& a, const StopMetrics& b) {
    const double va = key.value(a), vb = key.value(b);
    if (!nearly_equal(va, vb)) return key.lower_is_better() ? va < vb : va > vb;
    const double wa = weight_of(weights, a.spot_id), wb = weight_of(weights, b.spot_id);
    if (wa != wb) return wa > wb;
    return a.spot_id < b.spot_id;
  };
  // Selection order: the tolerant tie test is not a strict weak ordering, so
  // std::sort is off the table. Regions are small.
  std::vector<StopMetrics> out;
  while (!pool.empty()) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < pool.size(); ++i) {
      if (before(pool[i], pool[best])) best = i;
    }
    out.push_back(std::move(pool[best]));
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(best));
  }
  return out;
}

}  // namespace shuttleplan
