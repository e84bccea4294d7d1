#pragma once

#include <array>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "shuttleplan/directional.hpp"
#include "shuttleplan/profiles.hpp"
#include "shuttleplan/regional.hpp"
#include "shuttleplan/routing.hpp"
#include "shuttleplan/stop_metrics.hpp"
#include "shuttleplan/trips.hpp"

namespace shuttleplan {

inline constexpr double kDefaultDwellS = 30.0;
inline constexpr double kDefaultNumsWindowMin = 10.0;
inline constexpr std::size_t kMaxCandidates = 3;

struct RouteStop {
  int region_id = -1;  // -1 for stops outside the region structure
  int spot_id = -1;    // -1 for free points that match no known spot
  std::string name;
  GeoPoint location;
};

// One stop per region, strung outward from the workplace.
struct ShuttleRoute {
  int direction_id = 0;
  std::string label;
  double departure_s = 0.0;  // time of day
  double dwell_s = kDefaultDwellS;
  std::vector<RouteStop> stops;
  std::vector<DriveLeg> legs;  // workplace -> stop 1, stop 1 -> stop 2, ...
};

// Everything string_route needs besides the direction's regions.
struct PlanningContext {
  GeoPoint workplace;
  std::span<const DropOffSpot> spots;  // indexed by spot id
  const WalkMatrix* walk = nullptr;
  const TravelTimeProfiles* profiles = nullptr;
  // Optional free-flow fallback for legs with no profile.
  const RoadRouter* drive_router = nullptr;
  double fallback_speed_mps = 25.0 / 3.6;
  // Optional walking router, for reference stops that are not known spots.
  const RoadRouter* walk_router = nullptr;
  SpotWeights weights;

  const DropOffSpot& spot(int spot_id) const;
};

struct RouteOptions {
  double dwell_s = kDefaultDwellS;
  StopMetricsOptions stop_metrics;
};

// Picks the override or the recommended stop per region, orders regions by
// driving distance from the workplace at the departure time (great-circle
// when any first leg lacks a profile), and chains the legs: each leg leaves
// when the bus has dwelt at the previous stop.
ShuttleRoute string_route(const PlanningContext& ctx, int direction_id, const std::vector<RegionalCluster>& regions,
                          const std::map<int, int>& overrides, double departure_s, const RouteOptions& options = {});

struct TimetableEntry {
  int region_id = -1;
  int spot_id = -1;
  std::string name;
  double arrival_s = 0.0;
  double cumulative_distance_m = 0.0;
};

struct Timetable {
  std::vector<TimetableEntry> entries;
};

// arrival_1 = departure + leg_1; arrival_i = arrival_{i-1} + dwell + leg_i.
Timetable timetable(const ShuttleRoute& route);

struct RouteMetrics {
  double driving_dura = 0.0;  // seconds, dwell included
  double driving_dist = 0.0;  // meters, ends at the last stop
  double walk_reach800 = 0.0;
  double walk_avg_dura = 0.0;
  double walk_avg_dist = 0.0;
  long long nums = 0;
};

// Trip records whose spot falls in `direction_id`.
std::vector<TripRecord> trips_in_direction(const std::vector<TripRecord>& records, const std::vector<int>& record_spot,
                                           const DirectionalClustering& directional, int direction_id);

// Records departing within +-window_min of `departure_s` (time of day,
// circular across midnight).
long long count_near_departure(std::span<const TripRecord> trips, double departure_s,
                               double window_min = kDefaultNumsWindowMin);

// Driving totals from the legs; walking metrics are the chosen stops' region
// metrics averaged with region order totals as weights.
RouteMetrics route_metrics(const ShuttleRoute& route, const std::vector<RegionalCluster>& regions,
                           std::span<const TripRecord> trips, const WalkMatrix& walk, const SpotWeights& weights,
                           double window_min = kDefaultNumsWindowMin, const StopMetricsOptions& options = {});

struct HistogramBin {
  double start_s = 0.0;  // time of day, aligned to midnight
  long long count = 0;
};

std::vector<HistogramBin> departure_histogram(std::span<const TripRecord> trips, int bin_min = 5);

struct CriteriaWarning {
  std::string kind;  // move_forward | zigzag | leg_regression
  std::string message;
  double value = 0.0;
  std::vector<int> spot_ids;
};

struct CriteriaOptions {
  double max_turn_deg = 90.0;
  double regression_tolerance_m = 200.0;
};

// Advisory only: move-forward (distance from the workplace strictly grows),
// no-zigzag (chord bearing change <= max_turn_deg) and leg regression.
std::vector<CriteriaWarning> check_criteria(const ShuttleRoute& route, const GeoPoint& workplace,
                                            const CriteriaOptions& options = {});

struct RadarAxis {
  std::string name;
  bool lower_is_better = false;
};

struct RadarEntry {
  std::string label;
  RouteMetrics metrics;
  std::array<double, 6> normalized{};
};

struct RadarPayload {
  std::vector<RadarAxis> axes;
  std::vector<RadarEntry> routes;
};

std::array<double, 6> radar_values(const RouteMetrics& m);
const std::vector<RadarAxis>& radar_axes();

// Per-axis min-max normalization across the compared set; an axis where all
// routes agree maps to 1.0. Throws PlanError for more than three routes.
RadarPayload radar_from_metrics(const std::vector<std::string>& labels, const std::vector<RouteMetrics>& metrics);

RadarPayload compare_routes(const std::vector<ShuttleRoute>& routes, const std::vector<RegionalCluster>& regions,
                            std::span<const TripRecord> trips, const WalkMatrix& walk, const SpotWeights& weights,
                            double window_min = kDefaultNumsWindowMin);

// A planner-supplied route, e.g. the daytime line, as stops in visiting order.
struct ReferenceRoute {
  std::string label = "reference";
  std::optional<double> departure_s;
  std::vector<GeoPoint> stops;
  std::vector<std::string> names;  // optional, parallel to stops
  std::vector<GeoPoint> polyline;  // optional drawn geometry
};

inline constexpr double kReferenceSnapM = 300.0;

// Matches reference stops to known spots within kReferenceSnapM (others
// stay free points with no demand) and builds legs from profiles, falling
// back to the drive router.
ShuttleRoute realize_reference(const PlanningContext& ctx, const ReferenceRoute& reference, double departure_s,
                               double dwell_s = kDefaultDwellS);

struct SpotDelta {
  int spot_id = 0;
  double ours_m = 0.0;       // walk distance to our nearest stop
  double reference_m = 0.0;  // walk distance to the reference's nearest stop
  double delta_m = 0.0;      // ours - reference
};

struct DiffReport {
  ShuttleRoute ours;
  ShuttleRoute reference;
  RouteMetrics ours_metrics;
  RouteMetrics reference_metrics;
  std::vector<SpotDelta> spot_deltas;
};

// Both routes are scored the same way: driving totals from their legs,
// walking metrics from every spot of the direction to its nearest stop on
// that route, nums from the same trip set.
DiffReport diff_routes(const PlanningContext& ctx, const ShuttleRoute& ours, const ShuttleRoute& reference,
                       std::span<const int> direction_spots, std::span<const TripRecord> trips,
                       double window_min = kDefaultNumsWindowMin);

}  // namespace shuttleplan
