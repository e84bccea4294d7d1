#include "shuttleplan/voronoi.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "shuttleplan/errors.hpp"

namespace shuttleplan {
namespace {

std::pair<int, int> ordered(int a, int b) { return a < b ? std::pair{a, b} : std::pair{b, a}; }

double cross(const PlanarPoint& o, const PlanarPoint& a, const PlanarPoint& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

// > 0 when d lies inside the circumcircle of the counter-clockwise triangle abc.
double in_circle(const PlanarPoint& a, const PlanarPoint& b, const PlanarPoint& c, const PlanarPoint& d) {
  const double adx = a.x - d.x, ady = a.y - d.y;
  const double bdx = b.x - d.x, bdy = b.y - d.y;
  const double cdx = c.x - d.x, cdy = c.y - d.y;
  const double ad = adx * adx + ady * ady;
  const double bd = bdx * bdx + bdy * bdy;
  const double cd = cdx * cdx + cdy * cdy;
  return adx * (bdy * cd - bd * cdy) - ady * (bdx * cd - bd * cdx) + ad * (bdx * cdy - bdy * cdx);
}

double extent(std::span<const PlanarPoint> pts) {
  double min_x = pts[0].x, max_x = pts[0].x, min_y = pts[0].y, max_y = pts[0].y;
  for (const auto& p : pts) {
    min_x = std::min(min_x, p.x);
    max_x = std::max(max_x, p.x);
    min_y = std::min(min_y, p.y);
    max_y = std::max(max_y, p.y);
  }
  return std::max(max_x - min_x, max_y - min_y);
}

void check_sites(std::span<const PlanarPoint> sites) {
  if (sites.size() < 3) throw PlanError("degenerate_sites", "degenerate site set: fewer than 3 sites");
  const double scale = extent(sites);
  if (!(scale > 0.0)) throw PlanError("degenerate_sites", "degenerate site set: all sites coincide");
  std::size_t far = 0;
  double far_d = 0.0;
  for (std::size_t i = 1; i < sites.size(); ++i) {
    const double d = std::hypot(sites[i].x - sites[0].x, sites[i].y - sites[0].y);
    if (d > far_d) {
      far_d = d;
      far = i;
    }
  }
  bool collinear = true;
  for (std::size_t i = 1; i < sites.size() && collinear; ++i) {
    collinear = std::abs(cross(sites[0], sites[far], sites[i])) <= 1e-12 * far_d * scale;
  }
  if (collinear) throw PlanError("degenerate_sites", "degenerate site set: all sites are collinear");
  std::vector<std::size_t> order(sites.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return sites[a].x < sites[b].x || (sites[a].x == sites[b].x && sites[a].y < sites[b].y);
  });
  const double eps = 1e-9 * scale;
  for (std::size_t i = 0; i < order.size(); ++i) {
    for (std::size_t j = i + 1; j < order.size(); ++j) {
      const auto& a = sites[order[i]];
      const auto& b = sites[order[j]];
      if (b.x - a.x > eps) break;
      if (std::abs(b.y - a.y) <= eps) throw PlanError("degenerate_sites", "degenerate site set: duplicate sites");
    }
  }
}

// Polygon vertex plus the label of the edge that starts at it: a neighbor
// site index, or -1 for the clip border.
struct LabeledVertex {
  PlanarPoint p;
  int label = -1;
};

// Keeps the half-plane closer to `site` than to `other`.
std::vector<LabeledVertex> clip_bisector(const std::vector<LabeledVertex>& poly, const PlanarPoint& site,
                                         const PlanarPoint& other, int other_label, double eps) {
  const double nx = other.x - site.x, ny = other.y - site.y;
  const double mx = 0.5 * (site.x + other.x), my = 0.5 * (site.y + other.y);
  const double norm = std::hypot(nx, ny);
  auto side = [&](const PlanarPoint& p) { return ((p.x - mx) * nx + (p.y - my) * ny) / norm; };

  std::vector<LabeledVertex> out;
  out.reserve(poly.size() + 2);
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const LabeledVertex& cur = poly[i];
    const LabeledVertex& nxt = poly[(i + 1) % poly.size()];
    const double s0 = side(cur.p), s1 = side(nxt.p);
    const bool in0 = s0 <= eps, in1 = s1 <= eps;
    if (in0) {
      out.push_back(cur);
      if (!in1) {
        const double t = s0 / (s0 - s1);
        out.push_back({{cur.p.x + t * (nxt.p.x - cur.p.x), cur.p.y + t * (nxt.p.y - cur.p.y)}, other_label});
      }
    } else if (in1) {
      const double t = s0 / (s0 - s1);
      out.push_back({{cur.p.x + t * (nxt.p.x - cur.p.x), cur.p.y + t * (nxt.p.y - cur.p.y)}, cur.label});
    }
  }
  // Drop zero-length edges; the surviving vertex inherits the next edge's label.
  std::vector<LabeledVertex> clean;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto& nxt = out[(i + 1) % out.size()];
    if (std::hypot(out[i].p.x - nxt.p.x, out[i].p.y - nxt.p.y) <= eps && out.size() > 1) {
      if (i + 1 < out.size()) out[i + 1].p = out[i].p;
      continue;
    }
    clean.push_back(out[i]);
  }
  return clean;
}

}  // namespace

std::vector<std::array<int, 3>> delaunay_triangles(std::span<const PlanarPoint> sites) {
  check_sites(sites);
  const auto n = sites.size();
  double cx = 0.0, cy = 0.0;
  for (const auto& p : sites) {
    cx += p.x;
    cy += p.y;
  }
  cx /= static_cast<double>(n);
  cy /= static_cast<double>(n);
  std::vector<PlanarPoint> pts;
  pts.reserve(n + 3);
  for (const auto& p : sites) pts.push_back({p.x - cx, p.y - cy});
  const double d = extent(sites) * 100.0;
  pts.push_back({-2.0 * d, -d});
  pts.push_back({2.0 * d, -d});
  pts.push_back({0.0, 2.0 * d});
  const int s0 = static_cast<int>(n);

  std::vector<std::array<int, 3>> tris{{s0, s0 + 1, s0 + 2}};
  for (int i = 0; i < static_cast<int>(n); ++i) {
    const PlanarPoint& p = pts[static_cast<std::size_t>(i)];
    std::map<std::pair<int, int>, int> edge_count;
    std::vector<std::pair<int, int>> boundary_order;
    std::vector<std::array<int, 3>> keep;
    keep.reserve(tris.size());
    for (const auto& t : tris) {
      if (in_circle(pts[static_cast<std::size_t>(t[0])], pts[static_cast<std::size_t>(t[1])],
                    pts[static_cast<std::size_t>(t[2])], p) > 0.0) {
        for (int e = 0; e < 3; ++e) {
          const int a = t[static_cast<std::size_t>(e)], b = t[static_cast<std::size_t>((e + 1) % 3)];
          const auto key = ordered(a, b);
          if (edge_count[key]++ == 0) boundary_order.push_back({a, b});
        }
      } else {
        keep.push_back(t);
      }
    }
    for (const auto& [a, b] : boundary_order) {
      if (edge_count[ordered(a, b)] == 1) keep.push_back({a, b, i});
    }
    tris = std::move(keep);
  }

  std::vector<std::array<int, 3>> out;
  for (const auto& t : tris) {
    if (t[0] < s0 && t[1] < s0 && t[2] < s0) out.push_back(t);
  }
  return out;
}

std::vector<std::pair<int, int>> triangle_edges(const std::vector<std::array<int, 3>>& triangles) {
  std::vector<std::pair<int, int>> edges;
  for (const auto& t : triangles) {
    for (int e = 0; e < 3; ++e) {
      edges.push_back(ordered(t[static_cast<std::size_t>(e)], t[static_cast<std::size_t>((e + 1) % 3)]));
    }
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return edges;
}

double polygon_area(const std::vector<PlanarPoint>& ring) {
  double a = 0.0;
  for (std::size_t i = 0; i < ring.size(); ++i) {
    const auto& p = ring[i];
    const auto& q = ring[(i + 1) % ring.size()];
    a += p.x * q.y - q.x * p.y;
  }
  return 0.5 * std::abs(a);
}

PlanarVoronoi voronoi_planar(std::span<const PlanarPoint> sites, const ClipRect& clip) {
  check_sites(sites);
  const auto n = sites.size();
  const double scale = std::max({extent(sites), clip.max_x - clip.min_x, clip.max_y - clip.min_y});
  const double eps = 1e-12 * scale;

  PlanarVoronoi out;
  out.clip = clip;
  out.cells.resize(n);
  std::map<std::pair<int, int>, PlanarVoronoi::Edge> shared;

  for (std::size_t a = 0; a < n; ++a) {
    std::vector<LabeledVertex> poly{{{clip.min_x, clip.min_y}, -1},
                                    {{clip.max_x, clip.min_y}, -1},
                                    {{clip.max_x, clip.max_y}, -1},
                                    {{clip.min_x, clip.max_y}, -1}};
    std::vector<std::size_t> others;
    others.reserve(n - 1);
    for (std::size_t b = 0; b < n; ++b) {
      if (b != a) others.push_back(b);
    }
    auto d2 = [&](std::size_t b) {
      const double dx = sites[b].x - sites[a].x, dy = sites[b].y - sites[a].y;
      return dx * dx + dy * dy;
    };
    std::sort(others.begin(), others.end(), [&](std::size_t x, std::size_t y) {
      const double dx = d2(x), dy = d2(y);
      return dx < dy || (dx == dy && x < y);
    });
    for (std::size_t b : others) {
      // The cell lies within radius r of the site; bisectors farther than r cannot cut it.
      double r2 = 0.0;
      for (const auto& v : poly) {
        const double dx = v.p.x - sites[a].x, dy = v.p.y - sites[a].y;
        r2 = std::max(r2, dx * dx + dy * dy);
      }
      if (d2(b) > 4.0 * r2 * (1.0 + 1e-9)) break;
      poly = clip_bisector(poly, sites[a], sites[b], static_cast<int>(b), eps);
      if (poly.size() < 3) break;
    }
    auto& cell = out.cells[a];
    for (std::size_t i = 0; i < poly.size(); ++i) {
      cell.push_back(poly[i].p);
      const int b = poly[i].label;
      if (b < 0) continue;
      const auto& q = poly[(i + 1) % poly.size()].p;
      const double len = std::hypot(q.x - poly[i].p.x, q.y - poly[i].p.y);
      if (len <= 1e-9 * scale) continue;
      const auto key = ordered(static_cast<int>(a), b);
      auto it = shared.find(key);
      const double prev = it == shared.end() ? -1.0 : std::hypot(it->second.q.x - it->second.p.x,
                                                                 it->second.q.y - it->second.p.y);
      if (len > prev) shared[key] = PlanarVoronoi::Edge{key.first, key.second, poly[i].p, q};
    }
  }
  for (auto& [key, e] : shared) out.edges.push_back(e);
  return out;
}

std::string_view to_string(EdgeClass c) {
  switch (c) {
    case EdgeClass::kSolid:
      return "solid";
    case EdgeClass::kDashed:
      return "dashed";
    case EdgeClass::kRemoved:
      return "removed";
  }
  return "removed";
}

EdgeClass classify_edge(int direction_a, int region_a, int direction_b, int region_b) {
  if (direction_a != direction_b) return EdgeClass::kSolid;
  if (region_a != region_b) return EdgeClass::kDashed;
  return EdgeClass::kRemoved;
}

ClipRect inflated_bounds(std::span<const PlanarPoint> points, double inflate) {
  ClipRect r{points[0].x, points[0].y, points[0].x, points[0].y};
  for (const auto& p : points) {
    r.min_x = std::min(r.min_x, p.x);
    r.min_y = std::min(r.min_y, p.y);
    r.max_x = std::max(r.max_x, p.x);
    r.max_y = std::max(r.max_y, p.y);
  }
  const double mx = 0.5 * inflate * (r.max_x - r.min_x);
  const double my = 0.5 * inflate * (r.max_y - r.min_y);
  return ClipRect{r.min_x - mx, r.min_y - my, r.max_x + mx, r.max_y + my};
}

VoronoiGrid build_voronoi(const std::vector<DropOffSpot>& spots, const DirectionalClustering& directional,
                          const std::vector<std::vector<RegionalCluster>>& regions, std::optional<ClipRect> clip) {
  if (spots.size() < 3) throw PlanError("degenerate_sites", "degenerate site set: fewer than 3 sites");
  std::vector<GeoPoint> locations;
  locations.reserve(spots.size());
  for (const auto& s : spots) locations.push_back(s.location);
  const LocalProjection proj = LocalProjection::about_centroid(locations);
  std::vector<PlanarPoint> sites;
  sites.reserve(spots.size());
  for (const auto& p : locations) sites.push_back(proj.forward(p));

  std::map<int, std::pair<int, int>> membership;  // spot id -> (direction, region)
  for (const auto& dir : regions) {
    for (const auto& r : dir) {
      for (int id : r.member_spot_ids) membership[id] = {r.direction_id, r.region_id};
    }
  }
  for (const auto& s : spots) {
    if (!membership.contains(s.spot_id)) {
      // Fall back to the directional label alone when regions are not built.
      membership[s.spot_id] = {directional.direction_of(s.spot_id), -1 - s.spot_id};
    }
  }

  VoronoiGrid grid;
  grid.clip = clip.value_or(inflated_bounds(sites));
  grid.projection_center = proj.center();
  const PlanarVoronoi v = voronoi_planar(sites, grid.clip);
  for (std::size_t i = 0; i < spots.size(); ++i) {
    grid.spot_ids.push_back(spots[i].spot_id);
    std::vector<GeoPoint> ring;
    for (const auto& p : v.cells[i]) ring.push_back(proj.inverse(p));
    if (!ring.empty()) ring.push_back(ring.front());
    grid.cells.push_back(std::move(ring));
    grid.cell_area_m2.push_back(polygon_area(v.cells[i]));
  }
  for (const auto& e : v.edges) {
    const DropOffSpot& a = spots[static_cast<std::size_t>(e.site_a)];
    const DropOffSpot& b = spots[static_cast<std::size_t>(e.site_b)];
    const auto [da, ra] = membership.at(a.spot_id);
    const auto [db, rb] = membership.at(b.spot_id);
    VoronoiEdge out;
    out.spot_a = a.spot_id;
    out.spot_b = b.spot_id;
    out.p = proj.inverse(e.p);
    out.q = proj.inverse(e.q);
    out.cls = classify_edge(da, ra, db, rb);
    grid.edges.push_back(out);
  }
  for (const auto& [a, b] : triangle_edges(delaunay_triangles(sites))) {
    grid.delaunay.push_back(ordered(spots[static_cast<std::size_t>(a)].spot_id,
                                        spots[static_cast<std::size_t>(b)].spot_id));
  }
  std::sort(grid.delaunay.begin(), grid.delaunay.end());
  return grid;
}

}  // namespace shuttleplan
