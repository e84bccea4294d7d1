#pragma once

#include <array>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "shuttleplan/directional.hpp"
#include "shuttleplan/geo.hpp"
#include "shuttleplan/regional.hpp"

namespace shuttleplan {

struct ClipRect {
  double min_x = 0.0;
  double min_y = 0.0;
  double max_x = 0.0;
  double max_y = 0.0;

  double area() const { return (max_x - min_x) * (max_y - min_y); }
};

// Bowyer-Watson triangulation. Triangles index into `sites`, counter-clockwise.
std::vector<std::array<int, 3>> delaunay_triangles(std::span<const PlanarPoint> sites);

// Unique undirected edges (a < b) of a triangulation, sorted.
std::vector<std::pair<int, int>> triangle_edges(const std::vector<std::array<int, 3>>& triangles);

struct PlanarVoronoi {
  struct Edge {
    int site_a = 0;  // site_a < site_b
    int site_b = 0;
    PlanarPoint p;
    PlanarPoint q;
  };
  ClipRect clip;
  std::vector<std::vector<PlanarPoint>> cells;  // counter-clockwise, open rings
  std::vector<Edge> edges;                      // shared cell boundaries of positive length
};

// Voronoi cells clipped to `clip`. Each cell is the clip rectangle cut by the
// bisector half-planes of the other sites. Throws PlanError("degenerate_sites")
// for fewer than 3 sites, all-collinear or duplicate sites.
PlanarVoronoi voronoi_planar(std::span<const PlanarPoint> sites, const ClipRect& clip);

double polygon_area(const std::vector<PlanarPoint>& ring);

enum class EdgeClass { kSolid, kDashed, kRemoved };

std::string_view to_string(EdgeClass c);

// solid: different directions; dashed: same direction, different regions;
// removed: same region.
EdgeClass classify_edge(int direction_a, int region_a, int direction_b, int region_b);

struct VoronoiEdge {
  int spot_a = 0;
  int spot_b = 0;
  GeoPoint p;
  GeoPoint q;
  EdgeClass cls = EdgeClass::kRemoved;
};

struct VoronoiGrid {
  std::vector<int> spot_ids;                    // site order
  std::vector<std::vector<GeoPoint>> cells;     // closed rings, parallel to spot_ids
  std::vector<double> cell_area_m2;             // planar areas, parallel to spot_ids
  std::vector<VoronoiEdge> edges;
  std::vector<std::pair<int, int>> delaunay;    // spot id pairs, a < b
  ClipRect clip;                                // in the local projection
  GeoPoint projection_center;
};

// Bounding box of the projected points inflated by `inflate` of its size on
// each axis (20% by default, split evenly between the two sides).
ClipRect inflated_bounds(std::span<const PlanarPoint> points, double inflate = 0.2);

// Voronoi grid over all spots in a local azimuthal-equidistant projection
// about the spot centroid, edges classified by direction and region.
VoronoiGrid build_voronoi(const std::vector<DropOffSpot>& spots, const DirectionalClustering& directional,
                          const std::vector<std::vector<RegionalCluster>>& regions,
                          std::optional<ClipRect> clip = std::nullopt);

}  // namespace shuttleplan
