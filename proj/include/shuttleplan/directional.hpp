#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "shuttleplan/geo.hpp"
#include "shuttleplan/trips.hpp"

namespace shuttleplan {

// Partition of drop-off spots into travel directions. Vectors are parallel:
// entry i describes spot_ids[i].
struct DirectionalClustering {
  int k = 0;
  std::uint64_t seed = 0;
  bool weighted = true;
  std::vector<int> spot_ids;
  std::vector<int> direction;        // in [0, k)
  std::vector<double> bearing_deg;   // workplace -> spot
  std::vector<double> weight;        // order_count, or 1 when unweighted
  std::vector<double> centroid_deg;  // circular (weighted) mean per direction
  std::vector<double> objective_trace;  // within-cluster sum after each Lloyd update

  // Throws PlanError for a spot that is not part of the clustering.
  int direction_of(int spot_id) const;
  std::vector<int> members(int direction_id) const;  // spot ids
};

struct DirectionalOptions {
  bool weighted = true;
  int max_iterations = 300;
};

// Weighted K-means on the unit vectors (cos b, sin b) of the bearings,
// k-means++ seeding, Lloyd iterations to an assignment fixpoint. An empty
// cluster takes the point farthest from its own centroid. Deterministic for
// a fixed seed.
DirectionalClustering cluster_bearings(std::span<const double> bearings_deg, std::span<const double> weights, int k,
                                       std::uint64_t seed, const DirectionalOptions& options = {});

DirectionalClustering cluster_directions(const std::vector<DropOffSpot>& spots, const GeoPoint& workplace, int k,
                                         std::uint64_t seed, const DirectionalOptions& options = {});

// Order-weighted mean silhouette, chord distance on the unit circle. A spot
// alone in its direction scores 0, as does a point with a = b = 0.
double silhouette(const DirectionalClustering& clustering);

struct SilhouettePoint {
  int k = 0;
  double silhouette = 0.0;
};

struct SilhouetteCurve {
  std::vector<SilhouettePoint> points;
  int best_k = 0;  // global argmax, smallest k on ties
};

SilhouetteCurve silhouette_curve(const std::vector<DropOffSpot>& spots, const GeoPoint& workplace, int k_min,
                                 int k_max, std::uint64_t seed, const DirectionalOptions& options = {});

// Five-number summary of member bearings, unwrapped into the +-180 degree
// frame around the direction's circular mean (type-7 quantiles).
struct AngleStats {
  int direction_id = 0;
  double center = 0.0;
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;
  int n = 0;
  long long order_total = 0;
};

std::vector<AngleStats> angle_stats(const DirectionalClustering& clustering, const std::vector<DropOffSpot>& spots);

// Linear-interpolation quantile of a sorted sample, q in [0, 1].
double quantile_type7(std::span<const double> sorted, double q);

}  // namespace shuttleplan
