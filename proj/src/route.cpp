#include "shuttleplan/route.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "shuttleplan/errors.hpp"

namespace shuttleplan {
namespace {

constexpr double kReachAxisM = 800.0;

bool is_profile_ref(const RouteStop& s) { return s.spot_id >= 0; }

DriveLeg leg_between(const PlanningContext& ctx, const std::string& from_ref, const GeoPoint& from,
                     const std::string& to_ref, const GeoPoint& to, double depart_s, bool profiled) {
  DriveLeg leg;
  if (profiled && ctx.profiles && ctx.profiles->find(from_ref, to_ref)) {
    leg = drive_leg(*ctx.profiles, from_ref, to_ref, depart_s);
  } else if (ctx.drive_router) {
    leg = drive_leg_on_network(*ctx.drive_router, from, to, depart_s, ctx.fallback_speed_mps);
  } else {
    throw PlanError("missing_profile", "no travel-time profile for leg '" + from_ref + "' -> '" + to_ref + "'");
  }
  leg.from = from;
  leg.to = to;
  return leg;
}

void chain_legs(const PlanningContext& ctx, ShuttleRoute& route) {
  route.legs.clear();
  std::string prev_ref = kWorkplaceRef;
  GeoPoint prev = ctx.workplace;
  bool prev_profiled = true;
  double t = route.departure_s;
  for (const auto& stop : route.stops) {
    const bool profiled = prev_profiled && is_profile_ref(stop);
    DriveLeg leg = leg_between(ctx, prev_ref, prev, stop.name, stop.location, t, profiled);
    t = t + leg.duration_s + route.dwell_s;
    route.legs.push_back(std::move(leg));
    prev_ref = stop.name;
    prev = stop.location;
    prev_profiled = is_profile_ref(stop);
  }
}

const RegionalCluster& find_region(const std::vector<RegionalCluster>& regions, int direction_id, int region_id) {
  for (const auto& r : regions) {
    if (r.region_id == region_id && r.direction_id == direction_id) return r;
  }
  throw PlanError("unknown_region", "direction " + std::to_string(direction_id) + " has no region " +
                                        std::to_string(region_id));
}

double circular_gap_s(double a, double b) {
  double d = std::fmod(std::abs(a - b), kSecondsPerDay);
  return std::min(d, kSecondsPerDay - d);
}

struct Nearest {
  double dist = kUnreachable;
  double dura = kUnreachable;
};

// Walking distance from every route stop to each spot in `universe`; the
// nearest stop wins, its duration goes with it.
std::vector<Nearest> nearest_stop_walk(const PlanningContext& ctx, const ShuttleRoute& route,
                                       std::span<const int> universe) {
  const WalkMatrix& walk = *ctx.walk;
  std::vector<Nearest> out(universe.size());
  for (const auto& stop : route.stops) {
    std::vector<double> dist(universe.size(), kUnreachable), dura(universe.size(), kUnreachable);
    if (stop.spot_id >= 0 && walk.contains(stop.spot_id)) {
      for (std::size_t i = 0; i < universe.size(); ++i) {
        dist[i] = walk.dist(stop.spot_id, universe[i]);
        dura[i] = walk.dura(stop.spot_id, universe[i]);
      }
    } else if (ctx.walk_router) {
      const auto src = ctx.walk_router->snap(stop.location);
      if (src) {
        const auto tree = ctx.walk_router->shortest_tree(src->node);
        const double speed = ctx.walk_router->walk_speed();
        for (std::size_t i = 0; i < universe.size(); ++i) {
          std::optional<Snap> dst;
          const std::size_t row = walk.index_of(universe[i]);
          if (row < walk.snaps.size()) {
            dst = walk.snaps[row];
          } else {
            dst = ctx.walk_router->snap(ctx.spot(universe[i]).location);
          }
          if (!dst) continue;
          const auto node = static_cast<std::size_t>(dst->node);
          if (tree.dist_m[node] == kUnreachable) continue;
          dist[i] = src->offset_m + tree.dist_m[node] + dst->offset_m;
          dura[i] = (src->offset_m + dst->offset_m) / speed + tree.dura_s[node];
        }
      }
    }
    for (std::size_t i = 0; i < universe.size(); ++i) {
      if (dist[i] < out[i].dist) out[i] = {dist[i], dura[i]};
    }
  }
  return out;
}

void driving_totals(const ShuttleRoute& route, RouteMetrics& m) {
  double dura = 0.0, dist = 0.0;
  for (const auto& leg : route.legs) {
    dura += leg.duration_s;
    dist += leg.distance_m;
  }
  if (route.legs.size() > 1) dura += route.dwell_s * static_cast<double>(route.legs.size() - 1);
  m.driving_dura = dura;
  m.driving_dist = dist;
}

}  // namespace

const DropOffSpot& PlanningContext::spot(int spot_id) const {
  if (spot_id < 0 || static_cast<std::size_t>(spot_id) >= spots.size() ||
      spots[static_cast<std::size_t>(spot_id)].spot_id != spot_id) {
    throw PlanError("unknown_spot", "unknown spot " + std::to_string(spot_id));
  }
  return spots[static_cast<std::size_t>(spot_id)];
}

ShuttleRoute string_route(const PlanningContext& ctx, int direction_id, const std::vector<RegionalCluster>& regions,
                          const std::map<int, int>& overrides, double departure_s, const RouteOptions& options) {
  if (!ctx.walk) throw PlanError("missing_walk_matrix", "planning context has no walking matrix");
  for (const auto& [region_id, spot_id] : overrides) {
    const auto& r = find_region(regions, direction_id, region_id);
    if (std::find(r.member_spot_ids.begin(), r.member_spot_ids.end(), spot_id) == r.member_spot_ids.end()) {
      throw PlanError("spot_not_in_region", "spot " + std::to_string(spot_id) + " is not in region " +
                                                std::to_string(region_id));
    }
  }

  ShuttleRoute route;
  route.direction_id = direction_id;
  route.departure_s = departure_s;
  route.dwell_s = options.dwell_s;
  for (const auto& r : regions) {
    if (r.direction_id != direction_id) continue;
    auto it = overrides.find(r.region_id);
    const int chosen =
        it != overrides.end() ? it->second : recommend_stop(r, *ctx.walk, ctx.weights, options.stop_metrics);
    const auto& s = ctx.spot(chosen);
    route.stops.push_back({r.region_id, chosen, s.name, s.location});
  }

  bool profiled = ctx.profiles != nullptr;
  for (const auto& s : route.stops) {
    if (profiled && !ctx.profiles->find(kWorkplaceRef, s.name)) profiled = false;
  }
  std::vector<std::pair<double, std::size_t>> keys;
  for (std::size_t i = 0; i < route.stops.size(); ++i) {
    const auto& s = route.stops[i];
    const double key = profiled ? drive_leg(*ctx.profiles, kWorkplaceRef, s.name, departure_s).distance_m
                                : haversine_m(ctx.workplace, s.location);
    keys.emplace_back(key, i);
  }
  std::stable_sort(keys.begin(), keys.end(), [&](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first < b.first;
    return route.stops[a.second].region_id < route.stops[b.second].region_id;
  });
  std::vector<RouteStop> ordered;
  for (const auto& k : keys) ordered.push_back(route.stops[k.second]);
  route.stops = std::move(ordered);

  chain_legs(ctx, route);
  return route;
}

Timetable timetable(const ShuttleRoute& route) {
  Timetable tt;
  double t = route.departure_s;
  double cum = 0.0;
  for (std::size_t i = 0; i < route.legs.size() && i < route.stops.size(); ++i) {
    if (i > 0) t += route.dwell_s;
    t += route.legs[i].duration_s;
    cum += route.legs[i].distance_m;
    const auto& s = route.stops[i];
    tt.entries.push_back({s.region_id, s.spot_id, s.name, t, cum});
  }
  return tt;
}

std::vector<TripRecord> trips_in_direction(const std::vector<TripRecord>& records, const std::vector<int>& record_spot,
                                           const DirectionalClustering& directional, int direction_id) {
  std::vector<TripRecord> out;
  for (std::size_t i = 0; i < records.size() && i < record_spot.size(); ++i) {
    if (directional.direction_of(record_spot[i]) == direction_id) out.push_back(records[i]);
  }
  return out;
}

long long count_near_departure(std::span<const TripRecord> trips, double departure_s, double window_min) {
  const double window = window_min * 60.0;
  long long n = 0;
  for (const auto& t : trips) {
    if (circular_gap_s(time_of_day_s(t.departure_time), departure_s) <= window) ++n;
  }
  return n;
}

RouteMetrics route_metrics(const ShuttleRoute& route, const std::vector<RegionalCluster>& regions,
                           std::span<const TripRecord> trips, const WalkMatrix& walk, const SpotWeights& weights,
                           double window_min, const StopMetricsOptions& options) {
  RouteMetrics m;
  driving_totals(route, m);

  StopMetricsOptions opts = options;
  if (std::find(opts.buckets.begin(), opts.buckets.end(), kReachAxisM) == opts.buckets.end()) {
    opts.buckets.push_back(kReachAxisM);
  }
  double total = 0.0, reach = 0.0, avg_dura = 0.0, avg_dist = 0.0;
  for (const auto& stop : route.stops) {
    const auto& region = find_region(regions, route.direction_id, stop.region_id);
    const StopMetrics sm = stop_metrics(stop.spot_id, region, walk, weights, opts);
    const double w = static_cast<double>(region.order_total);
    total += w;
    reach += w * sm.reach.at(kReachAxisM);
    avg_dura += w * sm.avg_dura;
    avg_dist += w * sm.avg_dist;
  }
  if (total > 0.0) {
    m.walk_reach800 = reach / total;
    m.walk_avg_dura = avg_dura / total;
    m.walk_avg_dist = avg_dist / total;
  } else {
    m.walk_reach800 = 1.0;
  }
  m.nums = count_near_departure(trips, route.departure_s, window_min);
  return m;
}

std::vector<HistogramBin> departure_histogram(std::span<const TripRecord> trips, int bin_min) {
  if (bin_min < 1) throw PlanError("invalid_bin", "bin width must be at least one minute");
  if (trips.empty()) return {};
  const double width = bin_min * 60.0;
  std::map<long long, long long> counts;
  for (const auto& t : trips) ++counts[static_cast<long long>(std::floor(time_of_day_s(t.departure_time) / width))];
  std::vector<HistogramBin> out;
  for (long long b = counts.begin()->first; b <= counts.rbegin()->first; ++b) {
    auto it = counts.find(b);
    out.push_back({static_cast<double>(b) * width, it == counts.end() ? 0 : it->second});
  }
  return out;
}

std::vector<CriteriaWarning> check_criteria(const ShuttleRoute& route, const GeoPoint& workplace,
                                            const CriteriaOptions& options) {
  std::vector<CriteriaWarning> out;
  const auto& stops = route.stops;
  auto label = [](const RouteStop& s) { return s.name.empty() ? "spot " + std::to_string(s.spot_id) : s.name; };

  for (std::size_t i = 1; i < stops.size(); ++i) {
    const double a = haversine_m(workplace, stops[i - 1].location);
    const double b = haversine_m(workplace, stops[i].location);
    if (!(b > a)) {
      out.push_back({"move_forward",
                     label(stops[i]) + " is not farther from the workplace than " + label(stops[i - 1]), b - a,
                     {stops[i - 1].spot_id, stops[i].spot_id}});
    }
  }

  std::vector<GeoPoint> pts{workplace};
  for (const auto& s : stops) pts.push_back(s.location);
  for (std::size_t i = 2; i < pts.size(); ++i) {
    if (pts[i - 2] == pts[i - 1] || pts[i - 1] == pts[i]) continue;
    const double turn = std::abs(angle_diff_deg(bearing_deg(pts[i - 2], pts[i - 1]), bearing_deg(pts[i - 1], pts[i])));
    if (turn > options.max_turn_deg) {
      std::vector<int> ids;
      if (i >= 3) ids.push_back(stops[i - 3].spot_id);
      ids.push_back(stops[i - 2].spot_id);
      ids.push_back(stops[i - 1].spot_id);
      out.push_back({"zigzag", "route turns " + std::to_string(static_cast<int>(std::lround(turn))) + " degrees at " +
                                   label(stops[i - 2]),
                     turn, ids});
    }
  }

  for (std::size_t i = 1; i < pts.size(); ++i) {
    const double back = haversine_m(workplace, pts[i - 1]) - haversine_m(workplace, pts[i]);
    if (back > options.regression_tolerance_m) {
      std::vector<int> ids;
      if (i >= 2) ids.push_back(stops[i - 2].spot_id);
      ids.push_back(stops[i - 1].spot_id);
      out.push_back({"leg_regression",
                     "leg to " + label(stops[i - 1]) + " ends " + std::to_string(static_cast<int>(std::lround(back))) +
                         " m closer to the workplace than it starts",
                     back, ids});
    }
  }
  return out;
}

const std::vector<RadarAxis>& radar_axes() {
  static const std::vector<RadarAxis> axes{{"driving_dura", true},   {"driving_dist", true},
                                           {"walk_reach800", false}, {"walk_avg_dura", true},
                                           {"walk_avg_dist", true},  {"nums", false}};
  return axes;
}

std::array<double, 6> radar_values(const RouteMetrics& m) {
  return {m.driving_dura, m.driving_dist, m.walk_reach800, m.walk_avg_dura, m.walk_avg_dist,
          static_cast<double>(m.nums)};
}

RadarPayload radar_from_metrics(const std::vector<std::string>& labels, const std::vector<RouteMetrics>& metrics) {
  if (metrics.size() > kMaxCandidates) {
    throw PlanError("too_many_routes", "at most " + std::to_string(kMaxCandidates) + " routes can be compared");
  }
  RadarPayload p;
  p.axes = radar_axes();
  std::vector<std::array<double, 6>> raw;
  for (const auto& m : metrics) raw.push_back(radar_values(m));
  for (std::size_t i = 0; i < metrics.size(); ++i) {
    RadarEntry e;
    e.label = i < labels.size() ? labels[i] : "route " + std::to_string(i + 1);
    e.metrics = metrics[i];
    p.routes.push_back(std::move(e));
  }
  for (std::size_t a = 0; a < 6; ++a) {
    double lo = kUnreachable, hi = -kUnreachable;
    for (const auto& r : raw) {
      lo = std::min(lo, r[a]);
      hi = std::max(hi, r[a]);
    }
    for (std::size_t i = 0; i < raw.size(); ++i) {
      p.routes[i].normalized[a] = hi > lo ? (raw[i][a] - lo) / (hi - lo) : 1.0;
    }
  }
  return p;
}

RadarPayload compare_routes(const std::vector<ShuttleRoute>& routes, const std::vector<RegionalCluster>& regions,
                            std::span<const TripRecord> trips, const WalkMatrix& walk, const SpotWeights& weights,
                            double window_min) {
  if (routes.size() > kMaxCandidates) {
    throw PlanError("too_many_routes", "at most " + std::to_string(kMaxCandidates) + " routes can be compared");
  }
  std::vector<std::string> labels;
  std::vector<RouteMetrics> metrics;
  for (const auto& r : routes) {
    labels.push_back(r.label);
    metrics.push_back(route_metrics(r, regions, trips, walk, weights, window_min));
  }
  return radar_from_metrics(labels, metrics);
}

ShuttleRoute realize_reference(const PlanningContext& ctx, const ReferenceRoute& reference, double departure_s,
                               double dwell_s) {
  ShuttleRoute route;
  route.label = reference.label;
  route.departure_s = departure_s;
  route.dwell_s = dwell_s;
  route.direction_id = -1;
  for (std::size_t i = 0; i < reference.stops.size(); ++i) {
    const GeoPoint& p = reference.stops[i];
    int best = -1;
    double best_d = kReferenceSnapM;
    for (const auto& s : ctx.spots) {
      const double d = haversine_m(p, s.location);
      if (d <= best_d && (best < 0 || d < best_d || s.spot_id < best)) {
        best = s.spot_id;
        best_d = d;
      }
    }
    RouteStop stop;
    if (best >= 0) {
      const auto& s = ctx.spot(best);
      stop = {-1, best, s.name, s.location};
    } else {
      const std::string name =
          i < reference.names.size() && !reference.names[i].empty() ? reference.names[i] : "stop " + std::to_string(i + 1);
      stop = {-1, -1, name, p};
    }
    route.stops.push_back(std::move(stop));
  }
  chain_legs(ctx, route);
  return route;
}

DiffReport diff_routes(const PlanningContext& ctx, const ShuttleRoute& ours, const ShuttleRoute& reference,
                       std::span<const int> direction_spots, std::span<const TripRecord> trips, double window_min) {
  if (!ctx.walk) throw PlanError("missing_walk_matrix", "planning context has no walking matrix");
  DiffReport rep;
  rep.ours = ours;
  rep.reference = reference;

  auto score = [&](const ShuttleRoute& route, RouteMetrics& m, std::vector<Nearest>& near) {
    driving_totals(route, m);
    near = nearest_stop_walk(ctx, route, direction_spots);
    double total = 0.0, reach = 0.0, dist = 0.0, dura = 0.0;
    for (std::size_t i = 0; i < direction_spots.size(); ++i) {
      auto it = ctx.weights.find(direction_spots[i]);
      const double w = it != ctx.weights.end() ? it->second : ctx.spot(direction_spots[i]).order_count;
      total += w;
      if (near[i].dist <= kReachAxisM) reach += w;
      dist += w * near[i].dist;
      dura += w * near[i].dura;
    }
    if (total > 0.0) {
      m.walk_reach800 = reach / total;
      m.walk_avg_dist = dist / total;
      m.walk_avg_dura = dura / total;
    } else {
      m.walk_reach800 = 1.0;
    }
    m.nums = count_near_departure(trips, route.departure_s, window_min);
  };

  std::vector<Nearest> a, b;
  score(ours, rep.ours_metrics, a);
  score(reference, rep.reference_metrics, b);
  for (std::size_t i = 0; i < direction_spots.size(); ++i) {
    const double delta = a[i].dist == b[i].dist ? 0.0 : a[i].dist - b[i].dist;
    rep.spot_deltas.push_back({direction_spots[i], a[i].dist, b[i].dist, delta});
  }
  return rep;
}

}  // namespace shuttleplan
