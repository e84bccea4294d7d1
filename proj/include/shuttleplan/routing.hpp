#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "shuttleplan/geo.hpp"
#include "shuttleplan/network.hpp"
#include "shuttleplan/profiles.hpp"
#include "shuttleplan/trips.hpp"

namespace shuttleplan {

inline constexpr double kUnreachable = std::numeric_limits<double>::infinity();
inline constexpr double kDefaultWalkSpeedMps = 1.2;
inline constexpr double kSnapToleranceM = 500.0;

struct Snap {
  int node = -1;
  double offset_m = 0.0;
};

struct RoadPath {
  double length_m = kUnreachable;
  double walk_duration_s = kUnreachable;
  std::vector<GeoPoint> polyline;
};

// Shortest-path engine over the subgraph of one travel mode. Immutable after
// construction; every query is const and safe to run concurrently.
class RoadRouter {
 public:
  RoadRouter(const RoadNetwork& network, TravelMode mode, double walk_speed_mps = kDefaultWalkSpeedMps);

  // Nearest node that carries at least one edge of this mode.
  std::optional<Snap> snap(const GeoPoint& p, double tolerance_m = kSnapToleranceM) const;

  struct Tree {
    std::vector<double> dist_m;
    std::vector<double> dura_s;  // walking time along the distance-shortest path
    std::vector<int> via_edge;   // -1 at the source and for unreached nodes
  };

  // Dijkstra by length from `source`.
  Tree shortest_tree(int source) const;

  RoadPath path(int from_node, int to_node) const;
  RoadPath path(const GeoPoint& from, const GeoPoint& to, double tolerance_m = kSnapToleranceM) const;

  const RoadNetwork& network() const { return *network_; }
  double walk_speed() const { return walk_speed_; }

 private:
  double edge_duration(const RoadEdge& e) const;

  const RoadNetwork* network_;
  TravelMode mode_;
  double walk_speed_;
  std::vector<int> offsets_;  // CSR over edge indices by source node
  std::vector<int> out_edges_;
  std::vector<char> has_mode_;
};

// Walking distances and durations between drop-off spots. Row/column i
// corresponds to spot_ids[i]; unreachable pairs hold kUnreachable.
class WalkMatrix {
 public:
  WalkMatrix() = default;
  WalkMatrix(std::vector<int> spot_ids, std::vector<double> dist_m, std::vector<double> dura_s);

  // Constant-speed matrix from explicit distances (row-major n x n).
  static WalkMatrix from_distances(std::vector<int> spot_ids, std::vector<double> dist_m,
                                   double walk_speed_mps = kDefaultWalkSpeedMps);

  std::size_t size() const { return spot_ids_.size(); }
  const std::vector<int>& spot_ids() const { return spot_ids_; }
  // Throws PlanError for a spot id outside the matrix.
  std::size_t index_of(int spot_id) const;
  bool contains(int spot_id) const;

  double dist(int spot_a, int spot_b) const { return dist_m_[index_of(spot_a) * size() + index_of(spot_b)]; }
  double dura(int spot_a, int spot_b) const { return dura_s_[index_of(spot_a) * size() + index_of(spot_b)]; }
  double dist_at(std::size_t i, std::size_t j) const { return dist_m_[i * size() + j]; }
  double dura_at(std::size_t i, std::size_t j) const { return dura_s_[i * size() + j]; }

  const std::vector<double>& dist_data() const { return dist_m_; }
  const std::vector<double>& dura_data() const { return dura_s_; }

  std::vector<Snap> snaps;  // per row, when built from a network

 private:
  std::vector<int> spot_ids_;
  std::vector<int> slot_;  // spot_id -> row, -1 when absent
  std::vector<double> dist_m_;
  std::vector<double> dura_s_;
};

using ProgressFn = std::function<void(std::size_t done, std::size_t total)>;

// One single-source run per spot over the walking subgraph. Distances include
// both snap offsets. Throws PlanError naming the spot when it has no walking
// node within 500 m.
WalkMatrix walk_shortest(const RoadNetwork& network, const std::vector<DropOffSpot>& spots,
                         double walk_speed_mps = kDefaultWalkSpeedMps, const ProgressFn& progress = {});

struct DriveLeg {
  GeoPoint from;
  GeoPoint to;
  double depart_s = 0.0;
  double duration_s = 0.0;
  double distance_m = 0.0;
  std::vector<GeoPoint> polyline;
  bool extrapolated = false;  // departure clamped to the sampled range
  bool estimated = false;     // derived from the road network, not a profile
};

// Profile lookup: exact sample when `depart_s` hits one; otherwise duration
// is interpolated between the bracketing samples and distance and polyline
// come from the nearer sample (the earlier on a tie). Throws PlanError when
// the leg has no profile.
DriveLeg drive_leg(const TravelTimeProfiles& profiles, const std::string& from_ref, const std::string& to_ref,
                   double depart_s);

// Free-flow estimate over the drive subgraph, for legs with no profile.
DriveLeg drive_leg_on_network(const RoadRouter& drive_router, const GeoPoint& from, const GeoPoint& to,
                              double depart_s, double speed_mps);

}  // namespace shuttleplan
