// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
// failure.

#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "json.hpp"
#include "oracles.hpp"
#include "shuttleplan/directional.hpp"
#include "shuttleplan/errors.hpp"
#include "shuttleplan/regional.hpp"
#include "shuttleplan/route.hpp"
#include "shuttleplan/service.hpp"
#include "shuttleplan/stop_metrics.hpp"
#include "shuttleplan/synthetic.hpp"
#include "shuttleplan/voronoi.hpp"

using namespace shuttleplan;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  const char* id;
  const char* title;
  double budget_s;
  std::function<Outcome()> run;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

fs::path scratch_dir() {
  static const fs::path dir = fs::temp_directory_path() / ("shuttleplan_acceptance_" + std::to_string(::getpid()));
  return dir;
}

// 1. Engine silhouette against the brute-force oracle.
Outcome silhouette_oracle() {
  std::mt19937_64 rng(20210301);
  double worst = 0;
  for (int inst = 0; inst < 100; ++inst) {
    const int n = std::uniform_int_distribution<int>(3, 50)(rng);
    const int k = std::uniform_int_distribution<int>(2, std::min(6, n - 1))(rng);
    std::uniform_real_distribution<double> deg(0, 360);
    std::uniform_int_distribution<int> orders(1, 30);
    std::vector<double> b, w;
    for (int i = 0; i < n; ++i) {
      b.push_back(deg(rng));
      w.push_back(orders(rng));
    }
    DirectionalOptions opts;
    opts.weighted = inst % 3 != 0;
    const auto c = cluster_bearings(b, w, k, rng(), opts);
    const double got = silhouette(c);
    const double want = oracle::silhouette(c.bearing_deg, c.weight, c.direction, k);
    worst = std::max(worst, std::abs(got - want));
  }
  return {worst <= 1e-9, "100 instances, max |engine - oracle| = " + fmt("%.2e", worst)};
}

// 2. Regional clustering invariants.
Outcome regional_invariants() {
  std::mt19937_64 rng(77);
  int regions_seen = 0;
  for (int inst = 0; inst < 200; ++inst) {
    const int n = std::uniform_int_distribution<int>(1, 40)(rng);
    const double threshold = std::uniform_real_distribution<double>(300, 1500)(rng);
    std::uniform_real_distribution<double> coord(0, 3000), stretch(1.0, 1.5), u(0, 1);
    std::vector<std::pair<double, double>> p;
    for (int i = 0; i < n; ++i) p.emplace_back(coord(rng), coord(rng));
    std::vector<double> flat(static_cast<std::size_t>(n * n));
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        double d = i == j ? 0 : std::hypot(p[i].first - p[j].first, p[i].second - p[j].second) * stretch(rng);
        if (i != j && u(rng) < 0.03) d = kUnreachable;
        flat[static_cast<std::size_t>(i * n + j)] = std::round(d);
      }
    }
    std::vector<int> ids(static_cast<std::size_t>(n));
    std::vector<long long> orders;
    for (int i = 0; i < n; ++i) {
      ids[static_cast<std::size_t>(i)] = 3 * i + 1;
      orders.push_back(std::uniform_int_distribution<int>(1, 20)(rng));
    }
    const auto walk = WalkMatrix::from_distances(ids, flat);
    const auto regions = greedy_regions(ids, orders, walk, threshold);
    const oracle::DistFn dist = [&](int a, int b) { return walk.dist(a, b); };
    std::vector<int> pool = ids;
    std::set<int> seen;
    for (const auto& r : regions) {
      ++regions_seen;
      for (int a : r.member_spot_ids) {
        if (!seen.insert(a).second) return {false, "spot " + std::to_string(a) + " in two regions"};
        for (int b : r.member_spot_ids) {
          if (!(walk.dist(a, b) <= threshold)) return {false, "region exceeds threshold"};
        }
      }
      for (int s : pool) {
        if (oracle::greedy_set(s, pool, dist, threshold).size() > r.member_spot_ids.size()) {
          return {false, "seed " + std::to_string(s) + " beats the chosen set"};
        }
      }
      std::erase_if(pool, [&](int s) { return seen.contains(s); });
    }
    if (!pool.empty() || seen.size() != ids.size()) return {false, "regions do not partition the spots"};
  }
  return {true, "200 instances, " + std::to_string(regions_seen) + " regions checked"};
}

// 3. Square + centre Voronoi fixture.
Outcome voronoi_fixture() {
  const GeoPoint centre{22.54, 113.93};
  const LocalProjection proj(centre);
  const std::vector<PlanarPoint> planar{{-1000, -1000}, {1000, -1000}, {1000, 1000}, {-1000, 1000}, {0, 0}};
  std::vector<DropOffSpot> spots;
  for (int i = 0; i < 5; ++i) spots.push_back({i, proj.inverse(planar[static_cast<std::size_t>(i)]), "", 1});
  // Direction 0: SW, SE corners and the centre; regions {SW, centre}, {SE}.
  // Direction 1: NE, NW corners, one region.
  DirectionalClustering dir;
  dir.k = 2;
  dir.spot_ids = {0, 1, 2, 3, 4};
  dir.direction = {0, 0, 1, 1, 0};
  const std::vector<std::vector<RegionalCluster>> regions{{{0, 0, {4, 0}, 2, 4}, {0, 1, {1}, 1, 1}},
                                                          {{1, 0, {2, 3}, 2, 2}}};
  const std::map<std::pair<int, int>, EdgeClass> expected{
      {{0, 4}, EdgeClass::kRemoved}, {{1, 4}, EdgeClass::kDashed}, {{2, 4}, EdgeClass::kSolid},
      {{3, 4}, EdgeClass::kSolid},   {{0, 1}, EdgeClass::kDashed}, {{1, 2}, EdgeClass::kSolid},
      {{2, 3}, EdgeClass::kRemoved}, {{0, 3}, EdgeClass::kSolid}};

  const ClipRect clip{-2000, -2000, 2000, 2000};
  const auto grid = build_voronoi(spots, dir, regions, clip);
  std::map<std::pair<int, int>, EdgeClass> got;
  for (const auto& e : grid.edges) got[{e.spot_a, e.spot_b}] = e.cls;
  if (got != expected) return {false, "adjacency or classes differ from the hand derivation"};
  const auto planar_v = voronoi_planar(planar, clip);
  std::set<std::pair<int, int>> adj;
  for (const auto& e : planar_v.edges) adj.insert({e.site_a, e.site_b});
  for (const auto& [pair, cls] : expected) {
    if (!adj.contains(pair)) return {false, "planar adjacency misses a hand-derived edge"};
  }
  double total = 0;
  for (double a : grid.cell_area_m2) total += a;
  const double rel = std::abs(total - clip.area()) / clip.area();
  if (rel > 1e-6) return {false, "cell areas sum off by " + fmt("%.2e", rel)};
  return {true, "8 edges classified as derived, area error " + fmt("%.1e", rel) + " relative"};
}

// 4. Stop metric algebra.
Outcome metric_algebra() {
  std::mt19937_64 rng(404);
  long long checks = 0;
  for (int inst = 0; inst < 300; ++inst) {
    const int n = std::uniform_int_distribution<int>(1, 25)(rng);
    std::uniform_real_distribution<double> d(0, 1200);
    std::vector<int> ids(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) ids[static_cast<std::size_t>(i)] = i;
    std::vector<double> flat(static_cast<std::size_t>(n * n), 0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (i != j) flat[static_cast<std::size_t>(i * n + j)] = d(rng);
    const auto walk = WalkMatrix::from_distances(ids, flat);
    SpotWeights w;
    for (int id : ids) w[id] = std::uniform_int_distribution<int>(1, 50)(rng);
    RegionalCluster r{0, 0, ids, 0, 0};
    StopMetricsOptions ex;
    ex.include_self = false;
    for (int c : ids) {
      const auto in = stop_metrics(c, r, walk, w);
      if (in.avg_dist * in.total_weight != in.dist_cost) return {false, "avg_dist * sum(w) != dist_cost"};
      double prev = -1;
      for (const auto& [b, share] : in.reach) {
        if (share < prev) return {false, "reach buckets not monotone"};
        prev = share;
      }
      ++checks;
      if (n == 1) continue;
      const auto out = stop_metrics(c, r, walk, w, ex);
      if (out.avg_dist * out.total_weight != out.dist_cost) return {false, "exclude-self identity broken"};
      if (out.total_weight != in.total_weight - w[c]) return {false, "exclude-self weight differs"};
      if (std::abs(out.dist_cost - in.dist_cost) > 1e-9 * std::max(1.0, in.dist_cost)) {
        return {false, "exclude-self dist_cost differs beyond the own term"};
      }
      for (const auto& [b, share] : in.reach) {
        if (std::abs(share * in.total_weight - w[c] - out.reach.at(b) * out.total_weight) > 1e-9 * in.total_weight) {
          return {false, "exclude-self reach differs beyond the own term"};
        }
      }
    }
  }
  return {true, std::to_string(checks) + " candidate evaluations"};
}

struct Pipeline {
  SyntheticDataset data;
  Unification uni;
  WalkMatrix walk;
  DirectionalClustering directional;
  std::vector<std::vector<RegionalCluster>> regions;
  std::unique_ptr<RoadRouter> drive;
  PlanningContext ctx;

  Pipeline(const SyntheticSpec& spec, std::uint64_t seed, int k) : data(generate_synthetic(spec, seed)) {
    uni = unify_locations(data.records);
    walk = walk_shortest(data.network, uni.spots);
    directional = cluster_directions(uni.spots, spec.workplace, k, 0);
    regions = regions_by_direction(directional, uni.spots, walk);
    drive = std::make_unique<RoadRouter>(data.network, TravelMode::kDrive);
    ctx.workplace = spec.workplace;
    ctx.spots = uni.spots;
    ctx.walk = &walk;
    ctx.profiles = &data.profiles;
    ctx.drive_router = drive.get();
    ctx.weights = weights_of(uni.spots);
  }
};

// 5. Timetable and route consistency.
Outcome route_consistency() {
  SyntheticSpec spec;
  spec.directions = 4;
  spec.days = 5;
  Pipeline p(spec, 55, 4);
  int routes = 0;
  for (int d = 0; d < 4; ++d) {
    for (double t = 21 * 3600; t <= 22.25 * 3600; t += 420) {
      const auto r = string_route(p.ctx, d, p.regions[static_cast<std::size_t>(d)], {}, t);
      const auto tt = timetable(r);
      for (std::size_t i = 1; i < tt.entries.size(); ++i) {
        if (!(tt.entries[i].arrival_s > tt.entries[i - 1].arrival_s)) return {false, "arrivals not increasing"};
      }
      const auto m = route_metrics(r, p.regions[static_cast<std::size_t>(d)], {}, p.walk, p.ctx.weights);
      if (m.driving_dist != tt.entries.back().cumulative_distance_m) return {false, "driving_dist != cumulative"};
      ++routes;
    }
  }
  double worst = 0;
  std::mt19937_64 rng(9);
  for (double delta : {-7200.0, 900.0, 3600.0 * 5}) {
    const auto shifted = p.data.profiles.shifted(delta);
    for (const auto& [key, leg] : p.data.profiles.legs()) {
      const double lo = leg.samples.front().depart_s, hi = leg.samples.back().depart_s;
      const double t = std::uniform_real_distribution<double>(lo - 600, hi + 600)(rng);
      const auto a = drive_leg(p.data.profiles, key.first, key.second, t);
      const auto b = drive_leg(shifted, key.first, key.second, t + delta);
      worst = std::max(worst, std::abs(a.duration_s - b.duration_s));
      if (a.distance_m != b.distance_m || a.extrapolated != b.extrapolated) return {false, "shifted lookup differs"};
    }
  }
  if (worst > 1e-9) return {false, "time translation error " + fmt("%.2e", worst) + " s"};
  return {true, std::to_string(routes) + " routes; translation error " + fmt("%.1e", worst) + " s over " +
                    std::to_string(p.data.profiles.size() * 3) + " lookups"};
}

// 6. Planted direction recovery.
Outcome planted_recovery() {
  SyntheticSpec spec;  // 9 directions, 8 degree fans
  const auto data = generate_synthetic(spec, 2021);
  const auto uni = unify_locations(data.records);
  const auto curve = silhouette_curve(uni.spots, spec.workplace, 2, 12, 0);
  const auto dc = cluster_directions(uni.spots, spec.workplace, 9, 0);
  std::vector<int> planted(uni.spots.size(), -1);
  for (std::size_t r = 0; r < data.records.size(); ++r) {
    const int planted_spot = data.metadata.record_spot[r];
    planted[static_cast<std::size_t>(uni.record_spot[r])] =
        data.metadata.spot_direction[static_cast<std::size_t>(planted_spot)];
  }
  std::vector<int> recovered;
  for (const auto& s : uni.spots) recovered.push_back(dc.direction_of(s.spot_id));
  const double ari = oracle::adjusted_rand(recovered, planted);
  return {curve.best_k == 9 && ari >= 0.95, "silhouette argmax k=" + std::to_string(curve.best_k) + ", ARI " +
                                                fmt("%.4f", ari) + " over " + std::to_string(uni.spots.size()) +
                                                " spots"};
}

// 7. Congested 21:30 versus 21:55.
Outcome congestion_pattern() {
  SyntheticSpec spec;
  spec.directions = 3;
  spec.neighbourhoods_per_direction = 2;
  spec.neighbourhood_radius_m = 300;
  spec.spread_deg = 20;
  spec.spots_per_neighbourhood = 3;
  spec.min_distance_m = 2500;
  spec.max_distance_m = 6000;
  spec.congestion = {{21 * 3600.0, 1.18, 1.30}, {(21 * 60 + 52) * 60.0, 1.18, 1.30}, {(21 * 60 + 54) * 60.0, 1, 1}};
  Pipeline p(spec, 7, 3);
  std::string detail;
  bool ok = true;
  for (int d = 0; d < 3; ++d) {
    const auto& regions = p.regions[static_cast<std::size_t>(d)];
    const auto early = string_route(p.ctx, d, regions, {}, parse_time_of_day("21:30"));
    const auto late = string_route(p.ctx, d, regions, {}, parse_time_of_day("21:55"));
    const auto trips = trips_in_direction(p.data.records, p.uni.record_spot, p.directional, d);
    const auto radar = compare_routes({early, late}, regions, trips, p.walk, p.ctx.weights);
    const auto& a = radar.routes[0];
    const auto& b = radar.routes[1];
    const double dura_ratio = a.metrics.driving_dura / b.metrics.driving_dura;
    const double dist_ratio = a.metrics.driving_dist / b.metrics.driving_dist;
    const bool pattern = a.normalized[0] == 1 && b.normalized[0] == 0 && a.normalized[1] == 1 &&
                         b.normalized[1] == 0 && a.metrics.nums > b.metrics.nums;
    const bool ratios = std::abs(dura_ratio - 1.18) <= 0.01 * 1.18 && std::abs(dist_ratio - 1.30) <= 0.01 * 1.30;
    ok = ok && pattern && ratios;
    detail += (d ? "; " : "") + std::string("D") + std::to_string(d) + " stops " + std::to_string(early.stops.size()) +
              " dura x" + fmt("%.3f", dura_ratio) + " dist x" + fmt("%.3f", dist_ratio) + " nums " +
              std::to_string(a.metrics.nums) + ">" + std::to_string(b.metrics.nums) + (pattern ? "" : " (pattern broken)");
  }
  return {ok, detail};
}

// 8. Replaying a recorded session twice yields the same export bundle.
Outcome service_determinism() {
  const fs::path data_dir = scratch_dir() / "data";
  SyntheticSpec spec;
  spec.days = 10;
  write_dataset(generate_synthetic(spec, 808), data_dir / "planted9");

  auto replay = [&]() -> std::pair<std::string, std::string> {
    ServiceConfig cfg;
    cfg.data_dir = data_dir;
    PlanService svc(cfg);
    std::string base;
    int step = 0;
    auto call = [&](const char* method, const std::string& path, const nlohmann::json& body,
                    std::map<std::string, std::string> query = {}) {
      ApiRequest r{method, base + path, std::move(query), body.is_null() ? "" : body.dump(), std::nullopt};
      ++step;
      auto res = svc.handle(r);
      if (res.status >= 300) throw std::runtime_error("step " + std::to_string(step) + " " + path + ": " + res.body);
      return nlohmann::json::parse(res.body);
    };
    const auto created = call("POST", "/sessions", {{"dataset", "planted9"}});
    base = "/sessions/" + created["session_id"].get<std::string>();
    call("GET", "/silhouette", nullptr, {{"kmin", "2"}, {"kmax", "12"}});
    call("PUT", "/k", {{"k", 9}, {"seed", 0}});
    call("POST", "/regions", {{"threshold_m", 1000}});
    call("GET", "/directions/0/histogram", nullptr, {{"bin", "5"}});
    const auto stops = call("GET", "/directions/0/stops", nullptr, {{"metric", "avg_dist"}});
    call("POST", "/directions/0/candidates", {{"departure_time", "21:30"}});
    call("POST", "/directions/0/candidates", {{"departure_time", "21:55"}});
    int region = -1, spot = -1;
    for (const auto& r : stops["regions"]) {
      for (const auto& s : r["stops"]) {
        if (region < 0 && s["spot_id"] != r["recommended_spot_id"]) {
          region = r["region_id"];
          spot = s["spot_id"];
        }
      }
    }
    if (region < 0) throw std::runtime_error("no multi-spot region to override");
    call("PUT", "/directions/0/override", {{"region_id", region}, {"spot_id", spot}});
    call("GET", "/directions/0/compare", nullptr);
    call("GET", "", nullptr);
    const auto bundle = svc.handle({"GET", base + "/export", {}, "", std::nullopt});
    ++step;
    return {bundle.body, std::to_string(step) + " steps"};
  };
  const auto [first, steps] = replay();
  const auto second = replay().first;
  const bool same = first == second;
  return {same && !first.empty(), steps + ", export " + std::to_string(first.size()) + " bytes, " +
                                      (same ? "byte-identical" : "DIFFERENT")};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {"AC1", "silhouette oracle equivalence", 10, silhouette_oracle},
      {"AC2", "regional clustering invariants", 20, regional_invariants},
      {"AC3", "voronoi square+centre fixture", 5, voronoi_fixture},
      {"AC4", "stop metric algebra", 10, metric_algebra},
      {"AC5", "timetable and route consistency", 30, route_consistency},
      {"AC6", "planted direction recovery", 60, planted_recovery},
      {"AC7", "congestion decision pattern", 30, congestion_pattern},
      {"AC8", "service replay determinism", 60, service_determinism},
  };
  const auto suite_start = Clock::now();
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = Clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(Clock::now() - start).count();
    if (secs > c.budget_s) {
      o.pass = false;
      o.detail += "; over the " + fmt("%.0f", c.budget_s) + " s budget";
    }
    failures += !o.pass;
    std::printf("%s %s  %s (%.2f s): %s\n", o.pass ? "PASS" : "FAIL", c.id, c.title, secs, o.detail.c_str());
    std::fflush(stdout);
  }
  const double total = std::chrono::duration<double>(Clock::now() - suite_start).count();
  std::printf("%d/%zu criteria passed in %.2f s\n", static_cast<int>(criteria.size()) - failures, criteria.size(),
              total);
  std::error_code ec;
  fs::remove_all(scratch_dir(), ec);
  return failures == 0 ? 0 : 1;
}
