#include <gtest/gtest.h>

#include <random>
#include <set>

#include "oracles.hpp"
#include "shuttleplan/errors.hpp"
#include "shuttleplan/voronoi.hpp"

using namespace shuttleplan;

namespace {

const std::vector<PlanarPoint> kSquare{{-1000, -1000}, {1000, -1000}, {1000, 1000}, {-1000, 1000}, {0, 0}};
const ClipRect kClip{-2000, -2000, 2000, 2000};

std::vector<oracle::P> as_oracle(const std::vector<PlanarPoint>& s) {
  std::vector<oracle::P> out;
  for (const auto& p : s) out.push_back({p.x, p.y});
  return out;
}

}  // namespace

TEST(Delaunay, SquareWithCentre) {
  const auto tris = delaunay_triangles(kSquare);
  ASSERT_EQ(tris.size(), 4u);
  for (const auto& t : tris) {
    EXPECT_NE(std::find(t.begin(), t.end(), 4), t.end());
    const auto& a = kSquare[t[0]];
    const auto& b = kSquare[t[1]];
    const auto& c = kSquare[t[2]];
    EXPECT_GT((b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x), 0);  // counter-clockwise
  }
  EXPECT_EQ(triangle_edges(tris).size(), 8u);
}

TEST(Delaunay, EmptyCircumcircleOnRandomSites) {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(-5000, 5000);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<PlanarPoint> sites;
    for (int i = 0; i < 60; ++i) sites.push_back({u(rng), u(rng)});
    const auto tris = delaunay_triangles(sites);
    const auto o = as_oracle(sites);
    for (const auto& t : tris) EXPECT_TRUE(oracle::empty_circumcircle(o, t[0], t[1], t[2]));
    // Euler: a triangulation of n points with h on the hull has 2n - 2 - h triangles.
    EXPECT_GE(tris.size(), sites.size() - 2);
  }
}

TEST(VoronoiPlanar, SquareWithCentreCells) {
  const auto v = voronoi_planar(kSquare, kClip);
  ASSERT_EQ(v.cells.size(), 5u);
  EXPECT_NEAR(polygon_area(v.cells[4]), 2e6, 1e-6);
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(polygon_area(v.cells[i]), 3.5e6, 1e-6);
  double total = 0;
  for (const auto& c : v.cells) total += polygon_area(c);
  EXPECT_NEAR(total, kClip.area(), 1e-6);
  EXPECT_EQ(v.edges.size(), 8u);
}

TEST(VoronoiPlanar, CellsPartitionClipAndEdgesAreDelaunayDual) {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(-3000, 3000);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<PlanarPoint> sites;
    for (int i = 0; i < 40; ++i) sites.push_back({u(rng), u(rng)});
    const auto clip = inflated_bounds(sites);
    const auto v = voronoi_planar(sites, clip);
    double total = 0;
    for (const auto& c : v.cells) total += polygon_area(c);
    EXPECT_NEAR(total, clip.area(), clip.area() * 1e-9);
    const auto dt = triangle_edges(delaunay_triangles(sites));
    const std::set<std::pair<int, int>> dual(dt.begin(), dt.end());
    for (const auto& e : v.edges) {
      EXPECT_LT(e.site_a, e.site_b);
      EXPECT_TRUE(dual.contains({e.site_a, e.site_b})) << e.site_a << '-' << e.site_b;
      // Edge endpoints are equidistant from both sites.
      for (const auto& p : {e.p, e.q}) {
        const double da = std::hypot(p.x - sites[e.site_a].x, p.y - sites[e.site_a].y);
        const double db = std::hypot(p.x - sites[e.site_b].x, p.y - sites[e.site_b].y);
        EXPECT_NEAR(da, db, 1e-6 * (1 + da));
      }
    }
    // Every site lies in its own cell: the nearest site to each cell vertex
    // is the cell's own site (or tied with it).
    for (std::size_t i = 0; i < sites.size(); ++i) {
      for (const auto& p : v.cells[i]) {
        const double own = std::hypot(p.x - sites[i].x, p.y - sites[i].y);
        for (const auto& s : sites) EXPECT_LE(own, std::hypot(p.x - s.x, p.y - s.y) + 1e-6);
      }
    }
  }
}

TEST(VoronoiPlanar, DegenerateSiteSetsAreRejected) {
  auto code_of = [](std::vector<PlanarPoint> s) {
    try {
      voronoi_planar(s, kClip);
    } catch (const PlanError& e) {
      return e.code();
    }
    return std::string("none");
  };
  EXPECT_EQ(code_of({{0, 0}, {1, 1}}), "degenerate_sites");
  EXPECT_EQ(code_of({{0, 0}, {1, 1}, {2, 2}, {3, 3}}), "degenerate_sites");
  EXPECT_EQ(code_of({{0, 0}, {1, 0}, {0, 1}, {0, 1}}), "degenerate_sites");
}

TEST(ClassifyEdge, ThreeClasses) {
  EXPECT_EQ(classify_edge(0, 0, 1, 0), EdgeClass::kSolid);
  EXPECT_EQ(classify_edge(0, 0, 0, 1), EdgeClass::kDashed);
  EXPECT_EQ(classify_edge(2, 3, 2, 3), EdgeClass::kRemoved);
  EXPECT_EQ(to_string(EdgeClass::kDashed), "dashed");
}

namespace {

std::vector<DropOffSpot> grid_spots() {
  std::vector<DropOffSpot> spots;
  int id = 0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) spots.push_back({id++, {22.6 + 0.005 * i, 113.9 + 0.005 * j}, "", 1});
  return spots;
}

DirectionalClustering labels(const std::vector<int>& direction, int k) {
  DirectionalClustering c;
  c.k = k;
  for (std::size_t i = 0; i < direction.size(); ++i) c.spot_ids.push_back(static_cast<int>(i));
  c.direction = direction;
  return c;
}

}  // namespace

TEST(BuildVoronoi, SingleRegionRemovesEveryEdge) {
  const auto spots = grid_spots();
  const auto dir = labels(std::vector<int>(9, 0), 1);
  std::vector<std::vector<RegionalCluster>> regions{{{0, 0, {0, 1, 2, 3, 4, 5, 6, 7, 8}, 9, 0}}};
  const auto g = build_voronoi(spots, dir, regions);
  ASSERT_FALSE(g.edges.empty());
  for (const auto& e : g.edges) EXPECT_EQ(e.cls, EdgeClass::kRemoved);
  for (const auto& ring : g.cells) {
    ASSERT_GE(ring.size(), 4u);
    EXPECT_EQ(ring.front(), ring.back());
  }
}

TEST(BuildVoronoi, EdgeClassesFollowLabels) {
  const auto spots = grid_spots();
  // Rows are directions 0, 0, 1; in direction 0 the first row is region 0.
  const auto dir = labels({0, 0, 0, 0, 0, 0, 1, 1, 1}, 2);
  std::vector<std::vector<RegionalCluster>> regions{{{0, 0, {0, 1, 2}, 3, 0}, {0, 1, {3, 4, 5}, 3, 3}},
                                                    {{1, 0, {6, 7, 8}, 3, 6}}};
  const auto g = build_voronoi(spots, dir, regions);
  int solid = 0, dashed = 0, removed = 0;
  for (const auto& e : g.edges) {
    const int ra = e.spot_a / 3, rb = e.spot_b / 3;
    const EdgeClass want = (ra == 2) != (rb == 2) ? EdgeClass::kSolid
                           : ra != rb             ? EdgeClass::kDashed
                                                  : EdgeClass::kRemoved;
    EXPECT_EQ(e.cls, want) << e.spot_a << '-' << e.spot_b;
    solid += e.cls == EdgeClass::kSolid;
    dashed += e.cls == EdgeClass::kDashed;
    removed += e.cls == EdgeClass::kRemoved;
  }
  EXPECT_GT(solid, 0);
  EXPECT_GT(dashed, 0);
  EXPECT_GT(removed, 0);
  double total = 0;
  for (double a : g.cell_area_m2) total += a;
  EXPECT_NEAR(total, g.clip.area(), g.clip.area() * 1e-9);
}
