#include "shuttleplan/exports.hpp"

#include <algorithm>
#include <sstream>

#include "csv.hpp"
#include "shuttleplan/errors.hpp"

namespace shuttleplan {
namespace {

Json coord(const GeoPoint& p) { return Json::array({p.lon, p.lat}); }

Json line(const std::vector<GeoPoint>& pts) {
  Json a = Json::array();
  for (const auto& p : pts) a.push_back(coord(p));
  return a;
}

Json feature(Json geometry, Json properties) {
  Json f;
  f["type"] = "Feature";
  f["geometry"] = std::move(geometry);
  f["properties"] = std::move(properties);
  return f;
}

Json geometry(const char* type, Json coordinates) {
  Json g;
  g["type"] = type;
  g["coordinates"] = std::move(coordinates);
  return g;
}

Json collection(Json features) {
  Json c;
  c["type"] = "FeatureCollection";
  c["features"] = std::move(features);
  return c;
}

std::string bucket_key(double b) { return "reach" + csv::format_double(b); }

const RegionalCluster* region_of(const std::vector<RegionalCluster>& regions, int direction_id, int region_id) {
  for (const auto& r : regions) {
    if (r.direction_id == direction_id && r.region_id == region_id) return &r;
  }
  return nullptr;
}

std::vector<GeoPoint> route_line(const PlanningContext& ctx, const ShuttleRoute& route) {
  std::vector<GeoPoint> pts{ctx.workplace};
  for (std::size_t i = 0; i < route.legs.size(); ++i) {
    const auto& leg = route.legs[i];
    std::vector<GeoPoint> seg = leg.polyline;
    if (seg.empty()) seg = {leg.from, leg.to};
    for (const auto& p : seg) {
      if (pts.back() != p) pts.push_back(p);
    }
    const GeoPoint& stop = route.stops[i].location;
    if (pts.back() != stop) pts.push_back(stop);
  }
  return pts;
}

}  // namespace

std::string reach_band(double d) {
  if (d <= 200) return "<=200";
  if (d <= 400) return "<=400";
  if (d <= 600) return "<=600";
  if (d <= 800) return "<=800";
  return ">800";
}

Json stop_metrics_json(const StopMetrics& m) {
  Json j;
  j["spot_id"] = m.spot_id;
  j["avg_dist"] = m.avg_dist;
  j["avg_dura"] = m.avg_dura;
  for (const auto& [b, v] : m.reach) j[bucket_key(b)] = v;
  j["dist_cost"] = m.dist_cost;
  j["total_weight"] = m.total_weight;
  return j;
}

Json route_metrics_json(const RouteMetrics& m) {
  Json j;
  j["driving_dura"] = m.driving_dura;
  j["driving_dist"] = m.driving_dist;
  j["walk_reach800"] = m.walk_reach800;
  j["walk_avg_dura"] = m.walk_avg_dura;
  j["walk_avg_dist"] = m.walk_avg_dist;
  j["nums"] = m.nums;
  return j;
}

Json radar_json(const RadarPayload& payload) {
  Json j;
  Json axes = Json::array();
  for (const auto& a : payload.axes) axes.push_back({{"name", a.name}, {"lower_is_better", a.lower_is_better}});
  j["axes"] = std::move(axes);
  Json routes = Json::array();
  for (const auto& r : payload.routes) {
    Json e;
    e["label"] = r.label;
    e["metrics"] = route_metrics_json(r.metrics);
    e["normalized"] = r.normalized;
    routes.push_back(std::move(e));
  }
  j["routes"] = std::move(routes);
  return j;
}

Json warnings_json(const std::vector<CriteriaWarning>& warnings) {
  Json a = Json::array();
  for (const auto& w : warnings) {
    a.push_back({{"kind", w.kind}, {"message", w.message}, {"value", w.value}, {"spot_ids", w.spot_ids}});
  }
  return a;
}

Json voronoi_geojson(const VoronoiGrid& grid, const std::vector<DropOffSpot>& spots,
                     const DirectionalClustering& directional,
                     const std::vector<std::vector<RegionalCluster>>& regions) {
  std::map<int, int> region;
  for (const auto& dir : regions) {
    for (const auto& r : dir) {
      for (int id : r.member_spot_ids) region[id] = r.region_id;
    }
  }
  Json features = Json::array();
  for (std::size_t i = 0; i < grid.spot_ids.size(); ++i) {
    const int id = grid.spot_ids[i];
    Json props;
    props["kind"] = "cell";
    props["spot_id"] = id;
    props["name"] = spots.at(static_cast<std::size_t>(id)).name;
    props["order_count"] = spots.at(static_cast<std::size_t>(id)).order_count;
    props["direction_id"] = directional.direction_of(id);
    auto it = region.find(id);
    props["region_id"] = it == region.end() ? Json(nullptr) : Json(it->second);
    props["area_m2"] = grid.cell_area_m2[i];
    features.push_back(feature(geometry("Polygon", Json::array({line(grid.cells[i])})), std::move(props)));
  }
  for (const auto& e : grid.edges) {
    Json props;
    props["kind"] = "edge";
    props["spot_a"] = e.spot_a;
    props["spot_b"] = e.spot_b;
    props["class"] = std::string(to_string(e.cls));
    features.push_back(feature(geometry("LineString", line({e.p, e.q})), std::move(props)));
  }
  for (const auto& s : spots) {
    Json props;
    props["kind"] = "spot";
    props["spot_id"] = s.spot_id;
    props["name"] = s.name;
    props["order_count"] = s.order_count;
    features.push_back(feature(geometry("Point", coord(s.location)), std::move(props)));
  }
  return collection(std::move(features));
}

Json route_geojson(const PlanningContext& ctx, const ShuttleRoute& route, const std::vector<RegionalCluster>& regions,
                   const RouteMetrics& metrics, const Timetable& table) {
  Json features = Json::array();
  {
    Json props;
    props["kind"] = "route";
    props["label"] = route.label;
    props["direction_id"] = route.direction_id;
    props["departure_time"] = format_time_of_day(route.departure_s);
    props["driving_dura"] = metrics.driving_dura;
    props["driving_dist"] = metrics.driving_dist;
    features.push_back(feature(geometry("LineString", line(route_line(ctx, route))), std::move(props)));
  }
  for (std::size_t i = 0; i < route.stops.size(); ++i) {
    const auto& stop = route.stops[i];
    Json props;
    props["kind"] = "stop";
    props["seq"] = i + 1;
    props["region_id"] = stop.region_id;
    props["spot_id"] = stop.spot_id;
    props["name"] = stop.name;
    if (i < table.entries.size()) {
      props["arrival"] = format_time_of_day(table.entries[i].arrival_s);
      props["arrival_s"] = table.entries[i].arrival_s;
      props["cumulative_distance_m"] = table.entries[i].cumulative_distance_m;
    }
    const RegionalCluster* region = region_of(regions, route.direction_id, stop.region_id);
    if (region && ctx.walk) props["metrics"] = stop_metrics_json(stop_metrics(stop.spot_id, *region, *ctx.walk, ctx.weights));
    features.push_back(feature(geometry("Point", coord(stop.location)), std::move(props)));

    if (!region || !ctx.walk) continue;
    std::vector<int> members = region->member_spot_ids;
    std::sort(members.begin(), members.end());
    for (int m : members) {
      if (m == stop.spot_id) continue;
      const auto& spot = ctx.spot(m);
      const double d = ctx.walk->dist(m, stop.spot_id);
      std::vector<GeoPoint> path;
      if (ctx.walk_router) {
        RoadPath rp = ctx.walk_router->path(spot.location, stop.location);
        path = std::move(rp.polyline);
      }
      if (path.size() < 2) path = {spot.location, stop.location};
      Json wp;
      wp["kind"] = "walk";
      wp["region_id"] = stop.region_id;
      wp["from_spot_id"] = m;
      wp["to_spot_id"] = stop.spot_id;
      wp["orders"] = spot.order_count;
      wp["walk_dist_m"] = d;
      wp["walk_dura_s"] = ctx.walk->dura(m, stop.spot_id);
      wp["reach_band"] = reach_band(d);
      features.push_back(feature(geometry("LineString", line(path)), std::move(wp)));
    }
  }
  return collection(std::move(features));
}

std::string timetable_csv(const Timetable& table) {
  std::ostringstream out;
  out << "seq,region_id,spot_name,arrival_iso,cumulative_km\n";
  for (std::size_t i = 0; i < table.entries.size(); ++i) {
    const auto& e = table.entries[i];
    out << (i + 1) << ',' << e.region_id << ',' << csv::escape(e.name) << ',' << format_time_of_day(e.arrival_s)
        << ',' << csv::format_double(e.cumulative_distance_m / 1000.0) << '\n';
  }
  return out.str();
}

std::string stop_metrics_csv(const PlanningContext& ctx, const std::vector<RegionalCluster>& regions) {
  std::ostringstream out;
  out << "region_id,spot_id,name,avg_dist_m,avg_dura_s";
  for (double b : kDefaultReachBuckets) out << ',' << bucket_key(b);
  out << ",dist_cost\n";
  if (!ctx.walk) return out.str();
  std::vector<const RegionalCluster*> order;
  for (const auto& r : regions) order.push_back(&r);
  std::sort(order.begin(), order.end(), [](auto* a, auto* b) {
    return std::pair(a->direction_id, a->region_id) < std::pair(b->direction_id, b->region_id);
  });
  for (const auto* r : order) {
    std::vector<int> members = r->member_spot_ids;
    std::sort(members.begin(), members.end());
    for (int id : members) {
      const StopMetrics m = stop_metrics(id, *r, *ctx.walk, ctx.weights);
      out << r->region_id << ',' << id << ',' << csv::escape(ctx.spot(id).name) << ','
          << csv::format_double(m.avg_dist) << ',' << csv::format_double(m.avg_dura);
      for (double b : kDefaultReachBuckets) out << ',' << csv::format_double(m.reach.at(b));
      out << ',' << csv::format_double(m.dist_cost) << '\n';
    }
  }
  return out.str();
}

ReferenceRoute parse_reference_geojson(const nlohmann::json& doc) {
  ReferenceRoute ref;
  auto read_point = [](const nlohmann::json& c) {
    if (!c.is_array() || c.size() < 2 || !c[0].is_number() || !c[1].is_number()) {
      throw FormatError("reference coordinates must be [lon, lat]");
    }
    GeoPoint p{c[1].get<double>(), c[0].get<double>()};
    if (!is_valid(p)) throw FormatError("reference coordinate out of range");
    return p;
  };
  auto read_departure = [&](const nlohmann::json& props) {
    if (!props.is_object() || !props.contains("departure_time")) return;
    const auto& d = props["departure_time"];
    if (d.is_string()) {
      ref.departure_s = parse_time_of_day(d.get<std::string>());
    } else if (d.is_number()) {
      ref.departure_s = d.get<double>();
    }
  };
  if (!doc.is_object()) throw FormatError("reference route must be a GeoJSON object");
  if (doc.contains("properties")) read_departure(doc["properties"]);
  if (doc.contains("label") && doc["label"].is_string()) ref.label = doc["label"].get<std::string>();

  std::vector<nlohmann::json> features;
  if (doc.value("type", "") == "FeatureCollection" && doc.contains("features") && doc["features"].is_array()) {
    for (const auto& f : doc["features"]) features.push_back(f);
  } else if (doc.value("type", "") == "Feature") {
    features.push_back(doc);
  } else {
    throw FormatError("reference route must be a Feature or FeatureCollection");
  }

  struct Stop {
    double seq;
    std::size_t pos;
    GeoPoint p;
    std::string name;
  };
  std::vector<Stop> stops;
  for (std::size_t i = 0; i < features.size(); ++i) {
    const auto& f = features[i];
    if (!f.is_object() || !f.contains("geometry") || !f["geometry"].is_object()) continue;
    const auto& g = f["geometry"];
    const std::string type = g.value("type", "");
    const nlohmann::json props = f.contains("properties") && f["properties"].is_object() ? f["properties"] : nlohmann::json::object();
    read_departure(props);
    if (type == "Point") {
      Stop s{static_cast<double>(i), i, read_point(g["coordinates"]), ""};
      if (props.contains("seq") && props["seq"].is_number()) s.seq = props["seq"].get<double>();
      if (props.contains("name") && props["name"].is_string()) s.name = props["name"].get<std::string>();
      stops.push_back(std::move(s));
    } else if (type == "LineString" && g.contains("coordinates") && g["coordinates"].is_array()) {
      for (const auto& c : g["coordinates"]) ref.polyline.push_back(read_point(c));
      if (props.contains("label") && props["label"].is_string()) ref.label = props["label"].get<std::string>();
    }
  }
  if (stops.empty()) throw FormatError("reference route has no Point stops");
  std::stable_sort(stops.begin(), stops.end(), [](const Stop& a, const Stop& b) { return a.seq < b.seq; });
  for (const auto& s : stops) {
    ref.stops.push_back(s.p);
    ref.names.push_back(s.name);
  }
  return ref;
}

}  // namespace shuttleplan
