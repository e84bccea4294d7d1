#pragma once

// Test-only reference implementations. They share no code with the library
// and favour obviousness over speed.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <set>
#include <vector>

namespace oracle {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Chord between two bearings on the unit circle, via the half-angle sine.
inline double chord(double deg_a, double deg_b) {
  const double half = (deg_a - deg_b) * std::numbers::pi / 360.0;
  return 2.0 * std::abs(std::sin(half));
}

// Weighted silhouette straight from the definition.
inline double silhouette(const std::vector<double>& bearings, const std::vector<double>& w,
                         const std::vector<int>& label, int k) {
  const std::size_t n = bearings.size();
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> sum(static_cast<std::size_t>(k), 0.0), mass(static_cast<std::size_t>(k), 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      sum[static_cast<std::size_t>(label[j])] += w[j] * chord(bearings[i], bearings[j]);
      mass[static_cast<std::size_t>(label[j])] += w[j];
    }
    int own_count = 0;
    for (std::size_t j = 0; j < n; ++j) own_count += label[j] == label[i];
    double s = 0.0;
    if (own_count > 1) {
      const auto li = static_cast<std::size_t>(label[i]);
      const double a = mass[li] > 0 ? sum[li] / mass[li] : 0.0;
      double b = kInf;
      for (int c = 0; c < k; ++c) {
        if (c == label[i] || mass[static_cast<std::size_t>(c)] == 0.0) continue;
        b = std::min(b, sum[static_cast<std::size_t>(c)] / mass[static_cast<std::size_t>(c)]);
      }
      const double m = std::max(a, b);
      s = (m > 0 && b != kInf) ? (b - a) / m : 0.0;
    }
    num += w[i] * s;
    den += w[i];
  }
  return den > 0 ? num / den : 0.0;
}

using DistFn = std::function<double(int, int)>;

// One seed's nearest-first greedy set over `pool`.
inline std::vector<int> greedy_set(int seed, const std::vector<int>& pool, const DistFn& d, double threshold) {
  std::vector<int> order;
  for (int s : pool)
    if (s != seed) order.push_back(s);
  // Insertion sort by (distance from seed, id).
  for (std::size_t i = 1; i < order.size(); ++i) {
    for (std::size_t j = i; j > 0; --j) {
      const double a = d(seed, order[j - 1]), b = d(seed, order[j]);
      if (b < a || (b == a && order[j] < order[j - 1])) {
        std::swap(order[j - 1], order[j]);
      } else {
        break;
      }
    }
  }
  std::vector<int> set{seed};
  for (int c : order) {
    bool ok = true;
    for (int m : set) ok = ok && d(c, m) <= threshold && d(m, c) <= threshold;
    if (ok) set.push_back(c);
  }
  return set;
}

inline double pair_count(double n) { return n * (n - 1) / 2.0; }

// Adjusted Rand index (Hubert-Arabie) from the contingency table.
inline double adjusted_rand(const std::vector<int>& a, const std::vector<int>& b) {
  std::map<std::pair<int, int>, double> table;
  std::map<int, double> ra, rb;
  for (std::size_t i = 0; i < a.size(); ++i) {
    table[{a[i], b[i]}] += 1;
    ra[a[i]] += 1;
    rb[b[i]] += 1;
  }
  double index = 0, sa = 0, sb = 0;
  for (const auto& [k, v] : table) index += pair_count(v);
  for (const auto& [k, v] : ra) sa += pair_count(v);
  for (const auto& [k, v] : rb) sb += pair_count(v);
  const double total = pair_count(static_cast<double>(a.size()));
  const double expected = sa * sb / total;
  const double maxi = (sa + sb) / 2.0;
  if (maxi == expected) return 1.0;
  return (index - expected) / (maxi - expected);
}

struct Edge {
  int u, v;
  double w;
};

// All-pairs shortest distances by Floyd-Warshall.
inline std::vector<std::vector<double>> floyd_warshall(int n, const std::vector<Edge>& edges) {
  std::vector<std::vector<double>> d(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(n), kInf));
  for (int i = 0; i < n; ++i) d[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = 0;
  for (const auto& e : edges) {
    auto& cell = d[static_cast<std::size_t>(e.u)][static_cast<std::size_t>(e.v)];
    cell = std::min(cell, e.w);
  }
  for (std::size_t k = 0; k < d.size(); ++k)
    for (std::size_t i = 0; i < d.size(); ++i)
      for (std::size_t j = 0; j < d.size(); ++j)
        if (d[i][k] + d[k][j] < d[i][j]) d[i][j] = d[i][k] + d[k][j];
  return d;
}

struct P {
  double x, y;
};

// True when no site lies strictly inside the circumcircle of (a, b, c).
inline bool empty_circumcircle(const std::vector<P>& s, int a, int b, int c, double eps = 1e-9) {
  const P A = s[static_cast<std::size_t>(a)], B = s[static_cast<std::size_t>(b)], C = s[static_cast<std::size_t>(c)];
  const double dd = 2 * (A.x * (B.y - C.y) + B.x * (C.y - A.y) + C.x * (A.y - B.y));
  const double ux = ((A.x * A.x + A.y * A.y) * (B.y - C.y) + (B.x * B.x + B.y * B.y) * (C.y - A.y) +
                     (C.x * C.x + C.y * C.y) * (A.y - B.y)) / dd;
  const double uy = ((A.x * A.x + A.y * A.y) * (C.x - B.x) + (B.x * B.x + B.y * B.y) * (A.x - C.x) +
                     (C.x * C.x + C.y * C.y) * (B.x - A.x)) / dd;
  const double r = std::hypot(A.x - ux, A.y - uy);
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (static_cast<int>(i) == a || static_cast<int>(i) == b || static_cast<int>(i) == c) continue;
    if (std::hypot(s[i].x - ux, s[i].y - uy) < r * (1 - eps)) return false;
  }
  return true;
}

// Type-7 quantile computed from ranks directly.
inline double quantile7(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double h = (static_cast<double>(v.size()) - 1) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

}  // namespace oracle
