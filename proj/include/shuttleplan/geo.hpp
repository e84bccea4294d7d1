#pragma once

#include <vector>

namespace shuttleplan {

inline constexpr double kEarthRadiusM = 6371000.0;

struct GeoPoint {
  double lat = 0.0;
  double lon = 0.0;

  friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

bool is_valid(const GeoPoint& p);

// Great-circle distance in meters (haversine, R = 6,371 km).
double haversine_m(const GeoPoint& a, const GeoPoint& b);

// Initial great-circle bearing from `origin` to `dest`, degrees in [0, 360),
// 0 = north, clockwise. Throws PlanError when the points coincide.
double bearing_deg(const GeoPoint& origin, const GeoPoint& dest);

// Wraps an angle in degrees into [0, 360).
double wrap_deg_360(double deg);

// Smallest signed difference `to - from` in degrees, in (-180, 180].
double angle_diff_deg(double from, double to);

struct PlanarPoint {
  double x = 0.0;  // meters east
  double y = 0.0;  // meters north
};

// Azimuthal-equidistant projection about a fixed center. Distances and
// bearings from the center are preserved exactly; city-scale distortion
// elsewhere is well below 0.1%.
class LocalProjection {
 public:
  explicit LocalProjection(GeoPoint center);

  static LocalProjection about_centroid(const std::vector<GeoPoint>& points);

  PlanarPoint forward(const GeoPoint& p) const;
  GeoPoint inverse(const PlanarPoint& p) const;
  const GeoPoint& center() const { return center_; }

 private:
  GeoPoint center_;
  double sin_lat0_;
  double cos_lat0_;
};

}  // namespace shuttleplan
