#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <unordered_map>
#include <vector>

#include "shuttleplan/geo.hpp"

namespace shuttleplan {

enum class TravelMode : std::uint8_t { kWalk = 1, kDrive = 2 };

using ModeMask = std::uint8_t;

inline constexpr ModeMask mode_bit(TravelMode m) { return static_cast<ModeMask>(m); }

struct RoadEdge {
  int from = 0;  // dense node index
  int to = 0;
  double length_m = 0.0;
  ModeMask modes = 0;
  // Measured walking time for legs the constant-speed model gets wrong
  // (footbridges, underpasses). Empty means length / walk speed.
  std::optional<double> walk_duration_s;
};

// Directed road graph. External node ids are arbitrary integers; everything
// inside uses dense indices in insertion order.
class RoadNetwork {
 public:
  int add_node(std::int64_t external_id, const GeoPoint& location);
  // Validates endpoints, positive length, and length >= 0.99 x great-circle.
  void add_edge(std::int64_t from_id, std::int64_t to_id, double length_m, ModeMask modes,
                std::optional<double> walk_duration_s = std::nullopt);

  std::size_t node_count() const { return locations_.size(); }
  const std::vector<RoadEdge>& edges() const { return edges_; }
  const GeoPoint& location(int index) const { return locations_[static_cast<std::size_t>(index)]; }
  std::int64_t external_id(int index) const { return ids_[static_cast<std::size_t>(index)]; }
  std::optional<int> index_of(std::int64_t external_id) const;

 private:
  std::vector<GeoPoint> locations_;
  std::vector<std::int64_t> ids_;
  std::unordered_map<std::int64_t, int> index_;
  std::vector<RoadEdge> edges_;
};

// nodes.csv: id,lat,lon. edges.csv: from,to,length_m,modes[,walk_duration_s]
// with modes one of walk, drive, walk|drive.
RoadNetwork read_road_network(std::istream& nodes, std::istream& edges);
void write_nodes(std::ostream& out, const RoadNetwork& network);
void write_edges(std::ostream& out, const RoadNetwork& network);

}  // namespace shuttleplan
