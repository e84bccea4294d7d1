#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "shuttleplan/route.hpp"
#include "shuttleplan/voronoi.hpp"

namespace shuttleplan {

using Json = nlohmann::ordered_json;

// Cells as Polygons (spot_id, name, direction_id, region_id, area_m2) and
// boundaries as LineStrings (spot_a, spot_b, class).
Json voronoi_geojson(const VoronoiGrid& grid, const std::vector<DropOffSpot>& spots,
                     const DirectionalClustering& directional,
                     const std::vector<std::vector<RegionalCluster>>& regions);

// "<=200", "<=400", "<=600", "<=800" or ">800".
std::string reach_band(double walk_dist_m);

// Route LineString, stop Points with arrival and stop metrics, and one
// walking path per region member to its stop. Walking paths follow the
// context's walk router when it has one, else straight segments.
Json route_geojson(const PlanningContext& ctx, const ShuttleRoute& route, const std::vector<RegionalCluster>& regions,
                   const RouteMetrics& metrics, const Timetable& table);

// seq,region_id,spot_name,arrival_iso,cumulative_km
std::string timetable_csv(const Timetable& table);

// region_id,spot_id,name,avg_dist_m,avg_dura_s,reach200,...,reach1000,dist_cost
// for every member of every region, by region then spot id.
std::string stop_metrics_csv(const PlanningContext& ctx, const std::vector<RegionalCluster>& regions);

Json stop_metrics_json(const StopMetrics& m);
Json route_metrics_json(const RouteMetrics& m);
Json radar_json(const RadarPayload& payload);
Json warnings_json(const std::vector<CriteriaWarning>& warnings);

// FeatureCollection of Point stops in visiting order (optional "name",
// "seq" orders them when present) and an optional LineString; a
// "departure_time" property on any feature or the collection sets the
// departure. Throws FormatError when there are no stops.
ReferenceRoute parse_reference_geojson(const nlohmann::json& doc);

}  // namespace shuttleplan
