#include "shuttleplan/directional.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <random>

#include "shuttleplan/errors.hpp"

namespace shuttleplan {
namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr double kInf = std::numeric_limits<double>::infinity();

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

double dist2(const Vec2& a, const Vec2& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy;
}

std::vector<int> assign_nearest(const std::vector<Vec2>& pts, const std::vector<Vec2>& centers) {
  std::vector<int> out(pts.size(), 0);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    double best = dist2(pts[i], centers[0]);
    for (std::size_t c = 1; c < centers.size(); ++c) {
      const double d = dist2(pts[i], centers[c]);
      if (d < best) {
        best = d;
        out[i] = static_cast<int>(c);
      }
    }
  }
  return out;
}

// Moves the point farthest from its own center into each empty cluster.
void repair_empty(const std::vector<Vec2>& pts, std::vector<Vec2>& centers, std::vector<int>& assignment) {
  const auto k = centers.size();
  std::vector<int> sizes(k, 0);
  for (int a : assignment) ++sizes[static_cast<std::size_t>(a)];
  for (std::size_t c = 0; c < k; ++c) {
    if (sizes[c] > 0) continue;
    std::size_t victim = pts.size();
    double worst = -1.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const auto from = static_cast<std::size_t>(assignment[i]);
      if (sizes[from] < 2) continue;
      const double d = dist2(pts[i], centers[from]);
      if (d > worst) {
        worst = d;
        victim = i;
      }
    }
    if (victim == pts.size()) throw PlanError("too_few_spots", "not enough spots to fill every direction");
    --sizes[static_cast<std::size_t>(assignment[victim])];
    assignment[victim] = static_cast<int>(c);
    sizes[c] = 1;
    centers[c] = pts[victim];
  }
}

std::vector<Vec2> weighted_means(const std::vector<Vec2>& pts, std::span<const double> w,
                                 const std::vector<int>& assignment, std::size_t k) {
  std::vector<Vec2> sum(k);
  std::vector<double> mass(k, 0.0);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto c = static_cast<std::size_t>(assignment[i]);
    sum[c].x += w[i] * pts[i].x;
    sum[c].y += w[i] * pts[i].y;
    mass[c] += w[i];
  }
  for (std::size_t c = 0; c < k; ++c) {
    sum[c].x /= mass[c];
    sum[c].y /= mass[c];
  }
  return sum;
}

double objective(const std::vector<Vec2>& pts, std::span<const double> w, const std::vector<int>& assignment,
                 const std::vector<Vec2>& centers) {
  double total = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    total += w[i] * dist2(pts[i], centers[static_cast<std::size_t>(assignment[i])]);
  }
  return total;
}

std::size_t sample_index(std::mt19937_64& rng, const std::vector<double>& mass) {
  double total = 0.0;
  for (double m : mass) total += m;
  std::uniform_real_distribution<double> u(0.0, total);
  const double r = u(rng);
  double acc = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < mass.size(); ++i) {
    if (mass[i] <= 0.0) continue;
    acc += mass[i];
    last_positive = i;
    if (r < acc) return i;
  }
  return last_positive;
}

std::vector<Vec2> kmeanspp(const std::vector<Vec2>& pts, std::span<const double> w, std::size_t k,
                           std::mt19937_64& rng) {
  std::vector<Vec2> centers;
  std::vector<char> chosen(pts.size(), 0);
  std::vector<double> mass(w.begin(), w.end());
  auto pick = [&](std::size_t i) {
    centers.push_back(pts[i]);
    chosen[i] = 1;
  };
  pick(sample_index(rng, mass));
  while (centers.size() < k) {
    double total = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      double best = kInf;
      for (const auto& c : centers) best = std::min(best, dist2(pts[i], c));
      mass[i] = chosen[i] ? 0.0 : w[i] * best;
      total += mass[i];
    }
    if (total > 0.0) {
      pick(sample_index(rng, mass));
    } else {
      // Every remaining point coincides with a center; take the first unused one.
      const auto it = std::find(chosen.begin(), chosen.end(), 0);
      pick(static_cast<std::size_t>(it - chosen.begin()));
    }
  }
  return centers;
}

double circular_mean_deg(const Vec2& mean) {
  if (std::hypot(mean.x, mean.y) < 1e-12) return 0.0;
  return wrap_deg_360(std::atan2(mean.y, mean.x) / kDegToRad);
}

}  // namespace

int DirectionalClustering::direction_of(int spot_id) const {
  for (std::size_t i = 0; i < spot_ids.size(); ++i) {
    if (spot_ids[i] == spot_id) return direction[i];
  }
  throw PlanError("unknown_spot", "spot " + std::to_string(spot_id) + " is not part of the clustering");
}

std::vector<int> DirectionalClustering::members(int direction_id) const {
  std::vector<int> out;
  for (std::size_t i = 0; i < spot_ids.size(); ++i) {
    if (direction[i] == direction_id) out.push_back(spot_ids[i]);
  }
  return out;
}

DirectionalClustering cluster_bearings(std::span<const double> bearings_deg, std::span<const double> weights, int k,
                                       std::uint64_t seed, const DirectionalOptions& options) {
  const auto n = bearings_deg.size();
  if (k < 1) throw PlanError("invalid_k", "k must be at least 1");
  if (static_cast<std::size_t>(k) > n) {
    throw PlanError("invalid_k", "k = " + std::to_string(k) + " exceeds the number of spots (" + std::to_string(n) +
                                     ")");
  }
  if (weights.size() != n) throw PlanError("invalid_weight", "one weight per bearing is required");

  DirectionalClustering out;
  out.k = k;
  out.seed = seed;
  out.weighted = options.weighted;
  out.bearing_deg.assign(bearings_deg.begin(), bearings_deg.end());
  out.weight.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (options.weighted && !(weights[i] > 0.0)) throw PlanError("invalid_weight", "weights must be positive");
    out.weight[i] = options.weighted ? weights[i] : 1.0;
  }
  out.spot_ids.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.spot_ids[i] = static_cast<int>(i);

  std::vector<Vec2> pts(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double rad = bearings_deg[i] * kDegToRad;
    pts[i] = {std::cos(rad), std::sin(rad)};
  }
  const auto kk = static_cast<std::size_t>(k);
  const std::span<const double> w(out.weight);

  std::mt19937_64 rng(seed);
  std::vector<Vec2> centers = kmeanspp(pts, w, kk, rng);
  std::vector<int> assignment = assign_nearest(pts, centers);
  repair_empty(pts, centers, assignment);
  centers = weighted_means(pts, w, assignment, kk);
  out.objective_trace.push_back(objective(pts, w, assignment, centers));

  for (int it = 1; it < options.max_iterations; ++it) {
    std::vector<int> next = assign_nearest(pts, centers);
    repair_empty(pts, centers, next);
    if (next == assignment) break;
    assignment = std::move(next);
    centers = weighted_means(pts, w, assignment, kk);
    out.objective_trace.push_back(objective(pts, w, assignment, centers));
  }

  out.direction = std::move(assignment);
  out.centroid_deg.resize(kk);
  for (std::size_t c = 0; c < kk; ++c) out.centroid_deg[c] = circular_mean_deg(centers[c]);
  return out;
}

DirectionalClustering cluster_directions(const std::vector<DropOffSpot>& spots, const GeoPoint& workplace, int k,
                                         std::uint64_t seed, const DirectionalOptions& options) {
  std::vector<double> bearings, weights;
  bearings.reserve(spots.size());
  weights.reserve(spots.size());
  for (const auto& s : spots) {
    if (s.location == workplace) {
      throw PlanError("undefined_bearing", "spot " + std::to_string(s.spot_id) + " coincides with the workplace");
    }
    bearings.push_back(bearing_deg(workplace, s.location));
    weights.push_back(static_cast<double>(s.order_count));
  }
  DirectionalClustering out = cluster_bearings(bearings, weights, k, seed, options);
  for (std::size_t i = 0; i < spots.size(); ++i) out.spot_ids[i] = spots[i].spot_id;
  return out;
}

double silhouette(const DirectionalClustering& c) {
  if (c.k < 2) throw PlanError("invalid_k", "silhouette needs at least two directions");
  const auto n = c.bearing_deg.size();
  const auto k = static_cast<std::size_t>(c.k);
  std::vector<Vec2> pts(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double rad = c.bearing_deg[i] * kDegToRad;
    pts[i] = {std::cos(rad), std::sin(rad)};
  }
  std::vector<double> mass(k, 0.0);
  std::vector<int> count(k, 0);
  for (std::size_t i = 0; i < n; ++i) {
    mass[static_cast<std::size_t>(c.direction[i])] += c.weight[i];
    ++count[static_cast<std::size_t>(c.direction[i])];
  }

  double num = 0.0, den = 0.0;
  std::vector<double> sum(k);
  for (std::size_t i = 0; i < n; ++i) {
    std::fill(sum.begin(), sum.end(), 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      sum[static_cast<std::size_t>(c.direction[j])] += c.weight[j] * std::sqrt(dist2(pts[i], pts[j]));
    }
    const auto own = static_cast<std::size_t>(c.direction[i]);
    double s = 0.0;
    const double own_mass = mass[own] - c.weight[i];
    if (count[own] > 1) {
      const double a = sum[own] / own_mass;
      double b = kInf;
      for (std::size_t other = 0; other < k; ++other) {
        if (other == own) continue;
        b = std::min(b, sum[other] / mass[other]);
      }
      const double m = std::max(a, b);
      s = m > 0.0 ? (b - a) / m : 0.0;
    }
    num += c.weight[i] * s;
    den += c.weight[i];
  }
  return num / den;
}

SilhouetteCurve silhouette_curve(const std::vector<DropOffSpot>& spots, const GeoPoint& workplace, int k_min,
                                 int k_max, std::uint64_t seed, const DirectionalOptions& options) {
  const int n = static_cast<int>(spots.size());
  if (k_min < 2 || k_min > k_max || k_max > n - 1) {
    throw PlanError("invalid_k_range", "k range must satisfy 2 <= k_min <= k_max <= spots - 1");
  }
  SilhouetteCurve curve;
  double best = -2.0;
  for (int k = k_min; k <= k_max; ++k) {
    const double s = silhouette(cluster_directions(spots, workplace, k, seed, options));
    curve.points.push_back({k, s});
    if (s > best) {
      best = s;
      curve.best_k = k;
    }
  }
  return curve;
}

double quantile_type7(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw PlanError("empty_input", "quantile of an empty sample");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

std::vector<AngleStats> angle_stats(const DirectionalClustering& c, const std::vector<DropOffSpot>& spots) {
  std::map<int, int> orders;
  for (const auto& s : spots) orders[s.spot_id] = s.order_count;
  std::vector<AngleStats> out;
  for (int d = 0; d < c.k; ++d) {
    AngleStats st;
    st.direction_id = d;
    st.center = c.centroid_deg[static_cast<std::size_t>(d)];
    std::vector<double> unwrapped;
    for (std::size_t i = 0; i < c.spot_ids.size(); ++i) {
      if (c.direction[i] != d) continue;
      unwrapped.push_back(st.center + angle_diff_deg(st.center, c.bearing_deg[i]));
      auto it = orders.find(c.spot_ids[i]);
      st.order_total += it == orders.end() ? 0 : it->second;
    }
    st.n = static_cast<int>(unwrapped.size());
    if (!unwrapped.empty()) {
      std::sort(unwrapped.begin(), unwrapped.end());
      st.min = unwrapped.front();
      st.q1 = quantile_type7(unwrapped, 0.25);
      st.median = quantile_type7(unwrapped, 0.5);
      st.q3 = quantile_type7(unwrapped, 0.75);
      st.max = unwrapped.back();
    }
    out.push_back(st);
  }
  return out;
}

}  // namespace shuttleplan
