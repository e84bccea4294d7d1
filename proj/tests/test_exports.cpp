#include <gtest/gtest.h>

#include <sstream>

#include "shuttleplan/errors.hpp"
#include "shuttleplan/exports.hpp"

using namespace shuttleplan;

namespace {

const GeoPoint kWork{22.5, 113.9};
const LocalProjection kProj(kWork);

GeoPoint at(double east_m, double north_m) { return kProj.inverse({east_m, north_m}); }

struct Fixture {
  std::vector<DropOffSpot> spots{{0, at(1000, 0), "Alpha Court", 4},
                                 {1, at(1000, 500), "Beta, Garden", 2},
                                 {2, at(3000, 0), "Gamma Villa", 3}};
  WalkMatrix walk;
  TravelTimeProfiles profiles;
  PlanningContext ctx;
  DirectionalClustering dir;
  std::vector<std::vector<RegionalCluster>> regions{{{0, 0, {0, 1}, 6, 0}, {0, 1, {2}, 3, 2}}};

  Fixture() {
    std::vector<double> dist;
    for (const auto& a : spots)
      for (const auto& b : spots) dist.push_back(haversine_m(a.location, b.location));
    walk = WalkMatrix::from_distances({0, 1, 2}, dist);
    auto add = [&](const std::string& f, const GeoPoint& p, const std::string& t, const GeoPoint& q) {
      const double d = haversine_m(p, q);
      profiles.add({f, t, {{21 * 3600, d / 10, d, {p, q}}}});
    };
    for (const auto& a : spots) {
      add(kWorkplaceRef, kWork, a.name, a.location);
      for (const auto& b : spots)
        if (a.spot_id != b.spot_id) add(a.name, a.location, b.name, b.location);
    }
    ctx.workplace = kWork;
    ctx.spots = spots;
    ctx.walk = &walk;
    ctx.profiles = &profiles;
    ctx.weights = weights_of(spots);
    dir.k = 1;
    dir.spot_ids = {0, 1, 2};
    dir.direction = {0, 0, 0};
  }
};

}  // namespace

TEST(ReachBand, Boundaries) {
  EXPECT_EQ(reach_band(0), "<=200");
  EXPECT_EQ(reach_band(200), "<=200");
  EXPECT_EQ(reach_band(200.5), "<=400");
  EXPECT_EQ(reach_band(800), "<=800");
  EXPECT_EQ(reach_band(801), ">800");
  EXPECT_EQ(reach_band(kUnreachable), ">800");
}

TEST(VoronoiGeoJson, FeaturesAndLonLatOrder) {
  Fixture f;
  const auto grid = build_voronoi(f.spots, f.dir, f.regions);
  const Json g = voronoi_geojson(grid, f.spots, f.dir, f.regions);
  EXPECT_EQ(g["type"], "FeatureCollection");
  int cells = 0, edges = 0, points = 0;
  for (const auto& feat : g["features"]) {
    const auto kind = feat["properties"]["kind"].get<std::string>();
    if (kind == "cell") {
      ++cells;
      EXPECT_EQ(feat["geometry"]["type"], "Polygon");
      const auto& ring = feat["geometry"]["coordinates"][0];
      EXPECT_EQ(ring.front(), ring.back());
    } else if (kind == "edge") {
      ++edges;
      const auto cls = feat["properties"]["class"].get<std::string>();
      const bool same_region = (feat["properties"]["spot_a"] == 2) == (feat["properties"]["spot_b"] == 2);
      EXPECT_EQ(cls, same_region ? "removed" : "dashed");
    } else if (kind == "spot") {
      ++points;
      const auto id = feat["properties"]["spot_id"].get<int>();
      EXPECT_DOUBLE_EQ(feat["geometry"]["coordinates"][0].get<double>(), f.spots[id].location.lon);
      EXPECT_DOUBLE_EQ(feat["geometry"]["coordinates"][1].get<double>(), f.spots[id].location.lat);
    }
  }
  EXPECT_EQ(cells, 3);
  EXPECT_EQ(points, 3);
  EXPECT_EQ(edges, static_cast<int>(grid.edges.size()));
}

TEST(RouteGeoJson, RouteStopsAndWalks) {
  Fixture f;
  const auto route = string_route(f.ctx, 0, f.regions[0], {}, 21.5 * 3600);
  const auto table = timetable(route);
  const auto metrics = route_metrics(route, f.regions[0], {}, f.walk, f.ctx.weights);
  const Json g = route_geojson(f.ctx, route, f.regions[0], metrics, table);
  const auto& feats = g["features"];
  ASSERT_EQ(feats.size(), 4u);  // route, stop, walk, stop
  EXPECT_EQ(feats[0]["properties"]["kind"], "route");
  EXPECT_EQ(feats[0]["geometry"]["coordinates"][0][0].get<double>(), kWork.lon);
  EXPECT_EQ(feats[1]["properties"]["kind"], "stop");
  EXPECT_EQ(feats[1]["properties"]["seq"], 1);
  EXPECT_EQ(feats[1]["properties"]["spot_id"], 0);
  EXPECT_EQ(feats[2]["properties"]["kind"], "walk");
  EXPECT_EQ(feats[2]["properties"]["from_spot_id"], 1);
  EXPECT_EQ(feats[2]["properties"]["reach_band"], "<=600");
  EXPECT_EQ(feats[3]["properties"]["arrival"], format_time_of_day(table.entries[1].arrival_s));
}

TEST(TimetableCsv, HeaderAndEscaping) {
  Timetable t;
  t.entries = {{0, 0, "Alpha Court", parse_time_of_day("22:05"), 1500},
               {1, 1, "Beta, Garden", parse_time_of_day("22:10:30"), 2750}};
  EXPECT_EQ(timetable_csv(t),
            "seq,region_id,spot_name,arrival_iso,cumulative_km\n"
            "1,0,Alpha Court,22:05:00,1.5\n"
            "2,1,\"Beta, Garden\",22:10:30,2.75\n");
}

TEST(StopMetricsCsv, OneRowPerMember) {
  Fixture f;
  const std::string csv = stop_metrics_csv(f.ctx, f.regions[0]);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "region_id,spot_id,name,avg_dist_m,avg_dura_s,reach200,reach400,reach600,reach800,reach1000,dist_cost");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 3);
  EXPECT_NE(csv.find("\n1,2,Gamma Villa,0,0,1,1,1,1,1,0\n"), std::string::npos);
}

TEST(ReferenceGeoJson, OrdersBySeqAndReadsDeparture) {
  const auto doc = nlohmann::json::parse(R"({
    "type": "FeatureCollection",
    "properties": {"departure_time": "21:55"},
    "features": [
      {"type": "Feature", "geometry": {"type": "Point", "coordinates": [113.95, 22.52]}, "properties": {"seq": 2, "name": "B"}},
      {"type": "Feature", "geometry": {"type": "Point", "coordinates": [113.91, 22.51]}, "properties": {"seq": 1, "name": "A"}},
      {"type": "Feature", "geometry": {"type": "LineString", "coordinates": [[113.9, 22.5], [113.95, 22.52]]}, "properties": {"label": "day line"}}
    ]})");
  const auto ref = parse_reference_geojson(doc);
  ASSERT_EQ(ref.stops.size(), 2u);
  EXPECT_EQ(ref.names, (std::vector<std::string>{"A", "B"}));
  EXPECT_DOUBLE_EQ(ref.stops[0].lat, 22.51);
  EXPECT_EQ(ref.departure_s, parse_time_of_day("21:55"));
  EXPECT_EQ(ref.polyline.size(), 2u);
  EXPECT_EQ(ref.label, "day line");
}

TEST(ReferenceGeoJson, RejectsBadInput) {
  EXPECT_THROW(parse_reference_geojson(nlohmann::json::parse(R"({"type":"FeatureCollection","features":[]})")),
               FormatError);
  EXPECT_THROW(parse_reference_geojson(nlohmann::json::parse(R"([1,2])")), FormatError);
  EXPECT_THROW(parse_reference_geojson(nlohmann::json::parse(
                   R"({"type":"Feature","geometry":{"type":"Point","coordinates":[200, 22]}})")),
               FormatError);
}

TEST(Json, RadarAndWarnings) {
  RouteMetrics a, b;
  a.driving_dura = 100;
  b.driving_dura = 200;
  const Json r = radar_json(radar_from_metrics({"x", "y"}, {a, b}));
  ASSERT_EQ(r["axes"].size(), 6u);
  EXPECT_EQ(r["axes"][0]["name"], "driving_dura");
  EXPECT_EQ(r["axes"][0]["lower_is_better"], true);
  ASSERT_EQ(r["routes"].size(), 2u);
  EXPECT_EQ(r["routes"][1]["label"], "y");
  const Json w = warnings_json({{"zigzag", "turns", 120, {1, 2}}});
  EXPECT_EQ(w[0]["kind"], "zigzag");
  EXPECT_EQ(w[0]["spot_ids"], Json::array({1, 2}));
}
