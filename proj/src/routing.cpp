#include "shuttleplan/routing.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include "shuttleplan/errors.hpp"

namespace shuttleplan {

RoadRouter::RoadRouter(const RoadNetwork& network, TravelMode mode, double walk_speed_mps)
    : network_(&network), mode_(mode), walk_speed_(walk_speed_mps) {
  if (!(walk_speed_mps > 0.0)) throw PlanError("invalid_walk_speed", "walk speed must be positive");
  const auto n = network.node_count();
  const ModeMask bit = mode_bit(mode);
  offsets_.assign(n + 1, 0);
  has_mode_.assign(n, 0);
  const auto& edges = network.edges();
  for (const auto& e : edges) {
    if (!(e.modes & bit)) continue;
    ++offsets_[static_cast<std::size_t>(e.from) + 1];
    has_mode_[static_cast<std::size_t>(e.from)] = 1;
    has_mode_[static_cast<std::size_t>(e.to)] = 1;
  }
  for (std::size_t i = 0; i < n; ++i) offsets_[i + 1] += offsets_[i];
  out_edges_.assign(static_cast<std::size_t>(offsets_[n]), 0);
  std::vector<int> fill(offsets_.begin(), offsets_.end() - 1);
  for (std::size_t k = 0; k < edges.size(); ++k) {
    if (!(edges[k].modes & bit)) continue;
    out_edges_[static_cast<std::size_t>(fill[static_cast<std::size_t>(edges[k].from)]++)] = static_cast<int>(k);
  }
}

double RoadRouter::edge_duration(const RoadEdge& e) const {
  if (mode_ == TravelMode::kWalk && e.walk_duration_s) return *e.walk_duration_s;
  return e.length_m / walk_speed_;
}

std::optional<Snap> RoadRouter::snap(const GeoPoint& p, double tolerance_m) const {
  std::optional<Snap> best;
  const double band_deg = tolerance_m / 111000.0 + 1e-6;
  for (std::size_t i = 0; i < has_mode_.size(); ++i) {
    if (!has_mode_[i]) continue;
    const GeoPoint& q = network_->location(static_cast<int>(i));
    if (std::abs(q.lat - p.lat) > band_deg) continue;
    const double d = haversine_m(p, q);
    if (d <= tolerance_m && (!best || d < best->offset_m)) best = Snap{static_cast<int>(i), d};
  }
  return best;
}

RoadRouter::Tree RoadRouter::shortest_tree(int source) const {
  const auto n = network_->node_count();
  Tree t;
  t.dist_m.assign(n, kUnreachable);
  t.dura_s.assign(n, kUnreachable);
  t.via_edge.assign(n, -1);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  t.dist_m[static_cast<std::size_t>(source)] = 0.0;
  t.dura_s[static_cast<std::size_t>(source)] = 0.0;
  heap.emplace(0.0, source);
  const auto& edges = network_->edges();
  while (!heap.empty()) {
    auto [d, u] = heap.top();
    heap.pop();
    const auto uu = static_cast<std::size_t>(u);
    if (d > t.dist_m[uu]) continue;
    for (int k = offsets_[uu]; k < offsets_[uu + 1]; ++k) {
      const int ei = out_edges_[static_cast<std::size_t>(k)];
      const RoadEdge& e = edges[static_cast<std::size_t>(ei)];
      const auto v = static_cast<std::size_t>(e.to);
      const double nd = d + e.length_m;
      if (nd < t.dist_m[v]) {
        t.dist_m[v] = nd;
        t.dura_s[v] = t.dura_s[uu] + edge_duration(e);
        t.via_edge[v] = ei;
        heap.emplace(nd, e.to);
      }
    }
  }
  return t;
}

RoadPath RoadRouter::path(int from_node, int to_node) const {
  RoadPath out;
  const Tree t = shortest_tree(from_node);
  const auto target = static_cast<std::size_t>(to_node);
  if (t.dist_m[target] == kUnreachable) return out;
  out.length_m = t.dist_m[target];
  out.walk_duration_s = t.dura_s[target];
  int v = to_node;
  out.polyline.push_back(network_->location(v));
  while (v != from_node) {
    const RoadEdge& e = network_->edges()[static_cast<std::size_t>(t.via_edge[static_cast<std::size_t>(v)])];
    v = e.from;
    out.polyline.push_back(network_->location(v));
  }
  std::reverse(out.polyline.begin(), out.polyline.end());
  return out;
}

RoadPath RoadRouter::path(const GeoPoint& from, const GeoPoint& to, double tolerance_m) const {
  const auto a = snap(from, tolerance_m);
  const auto b = snap(to, tolerance_m);
  if (!a || !b) return RoadPath{};
  RoadPath p = path(a->node, b->node);
  if (p.length_m == kUnreachable) return p;
  p.length_m += a->offset_m + b->offset_m;
  p.walk_duration_s += (a->offset_m + b->offset_m) / walk_speed_;
  p.polyline.insert(p.polyline.begin(), from);
  p.polyline.push_back(to);
  return p;
}

WalkMatrix::WalkMatrix(std::vector<int> spot_ids, std::vector<double> dist_m, std::vector<double> dura_s)
    : spot_ids_(std::move(spot_ids)), dist_m_(std::move(dist_m)), dura_s_(std::move(dura_s)) {
  const auto n = spot_ids_.size();
  if (dist_m_.size() != n * n || dura_s_.size() != n * n) {
    throw PlanError("invalid_matrix", "walk matrix dimensions do not match the spot list");
  }
  int max_id = -1;
  for (int id : spot_ids_) {
    if (id < 0) throw PlanError("invalid_matrix", "spot ids must be non-negative");
    max_id = std::max(max_id, id);
  }
  slot_.assign(static_cast<std::size_t>(max_id + 1), -1);
  for (std::size_t i = 0; i < n; ++i) {
    auto& s = slot_[static_cast<std::size_t>(spot_ids_[i])];
    if (s != -1) throw PlanError("invalid_matrix", "duplicate spot id in walk matrix");
    s = static_cast<int>(i);
  }
}

WalkMatrix WalkMatrix::from_distances(std::vector<int> spot_ids, std::vector<double> dist_m, double walk_speed_mps) {
  std::vector<double> dura(dist_m.size());
  for (std::size_t i = 0; i < dist_m.size(); ++i) dura[i] = dist_m[i] / walk_speed_mps;
  return WalkMatrix(std::move(spot_ids), std::move(dist_m), std::move(dura));
}

bool WalkMatrix::contains(int spot_id) const {
  return spot_id >= 0 && static_cast<std::size_t>(spot_id) < slot_.size() &&
         slot_[static_cast<std::size_t>(spot_id)] != -1;
}

std::size_t WalkMatrix::index_of(int spot_id) const {
  if (!contains(spot_id)) {
    throw PlanError("unknown_spot", "spot " + std::to_string(spot_id) + " is not in the walk matrix");
  }
  return static_cast<std::size_t>(slot_[static_cast<std::size_t>(spot_id)]);
}

WalkMatrix walk_shortest(const RoadNetwork& network, const std::vector<DropOffSpot>& spots, double walk_speed_mps,
                         const ProgressFn& progress) {
  const RoadRouter router(network, TravelMode::kWalk, walk_speed_mps);
  const auto n = spots.size();
  std::vector<Snap> snaps;
  snaps.reserve(n);
  for (const auto& s : spots) {
    auto sn = router.snap(s.location);
    if (!sn) {
      throw PlanError("unsnappable_spot", "spot " + std::to_string(s.spot_id) + " '" + s.name +
                                              "' has no walking node within 500 m");
    }
    snaps.push_back(*sn);
  }

  std::vector<double> dist(n * n, kUnreachable);
  std::vector<double> dura(n * n, kUnreachable);
  for (std::size_t i = 0; i < n; ++i) {
    const auto tree = router.shortest_tree(snaps[i].node);
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) {
        dist[i * n + j] = 0.0;
        dura[i * n + j] = 0.0;
        continue;
      }
      const auto node = static_cast<std::size_t>(snaps[j].node);
      if (tree.dist_m[node] == kUnreachable) continue;
      const double offsets = snaps[i].offset_m + snaps[j].offset_m;
      dist[i * n + j] = offsets + tree.dist_m[node];
      dura[i * n + j] = offsets / walk_speed_mps + tree.dura_s[node];
    }
    if (progress) progress(i + 1, n);
  }
  std::vector<int> ids;
  ids.reserve(n);
  for (const auto& s : spots) ids.push_back(s.spot_id);
  WalkMatrix m(std::move(ids), std::move(dist), std::move(dura));
  m.snaps = std::move(snaps);
  return m;
}

DriveLeg drive_leg(const TravelTimeProfiles& profiles, const std::string& from_ref, const std::string& to_ref,
                   double depart_s) {
  const TravelTimeProfile* profile = profiles.find(from_ref, to_ref);
  if (!profile) {
    throw PlanError("missing_profile", "no travel-time profile for leg '" + from_ref + "' -> '" + to_ref + "'");
  }
  const auto& s = profile->samples;
  DriveLeg leg;
  leg.depart_s = depart_s;
  auto take = [&](const ProfileSample& sample) {
    leg.duration_s = sample.duration_s;
    leg.distance_m = sample.distance_m;
    leg.polyline = sample.polyline;
  };

  if (depart_s <= s.front().depart_s || depart_s >= s.back().depart_s) {
    const bool before = depart_s <= s.front().depart_s;
    take(before ? s.front() : s.back());
    leg.extrapolated = depart_s != (before ? s.front() : s.back()).depart_s;
  } else {
    // First sample strictly after depart_s; its predecessor is <= depart_s.
    auto hi = std::upper_bound(s.begin(), s.end(), depart_s,
                               [](double t, const ProfileSample& x) { return t < x.depart_s; });
    const ProfileSample& b = *hi;
    const ProfileSample& a = *(hi - 1);
    if (a.depart_s == depart_s) {
      take(a);
    } else {
      const double to_a = depart_s - a.depart_s;
      const double to_b = b.depart_s - depart_s;
      take(to_a <= to_b ? a : b);
      const double frac = to_a / (b.depart_s - a.depart_s);
      leg.duration_s = a.duration_s + frac * (b.duration_s - a.duration_s);
    }
  }
  if (!leg.polyline.empty()) {
    leg.from = leg.polyline.front();
    leg.to = leg.polyline.back();
  }
  return leg;
}

DriveLeg drive_leg_on_network(const RoadRouter& drive_router, const GeoPoint& from, const GeoPoint& to,
                              double depart_s, double speed_mps) {
  DriveLeg leg;
  leg.from = from;
  leg.to = to;
  leg.depart_s = depart_s;
  leg.estimated = true;
  RoadPath p = drive_router.path(from, to);
  if (p.length_m == kUnreachable) {
    throw PlanError("unroutable_leg", "no drivable path between the requested points");
  }
  // Coincident endpoints still need a strictly positive leg.
  leg.distance_m = std::max(p.length_m, 1.0);
  leg.duration_s = leg.distance_m / speed_mps;
  leg.polyline = std::move(p.polyline);
  return leg;
}

}  // namespace shuttleplan
