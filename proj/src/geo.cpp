#include "shuttleplan/geo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "shuttleplan/errors.hpp"

namespace shuttleplan {
namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr double kRadToDeg = 180.0 / std::numbers::pi;

}  // namespace

bool is_valid(const GeoPoint& p) {
  return std::isfinite(p.lat) && std::isfinite(p.lon) && p.lat >= -90.0 &&
         p.lat <= 90.0 && p.lon >= -180.0 && p.lon <= 180.0;
}

double haversine_m(const GeoPoint& a, const GeoPoint& b) {
  // Order the operands so that the result is bit-identical under swapping.
  const GeoPoint& p = (a.lat < b.lat || (a.lat == b.lat && a.lon <= b.lon)) ? a : b;
  const GeoPoint& q = (&p == &a) ? b : a;
  const double phi1 = p.lat * kDegToRad;
  const double phi2 = q.lat * kDegToRad;
  const double dphi = (q.lat - p.lat) * kDegToRad;
  const double dlambda = (q.lon - p.lon) * kDegToRad;
  const double s1 = std::sin(dphi / 2.0);
  const double s2 = std::sin(dlambda / 2.0);
  const double h = s1 * s1 + std::cos(phi1) * std::cos(phi2) * s2 * s2;
  return 2.0 * kEarthRadiusM * std::asin(std::sqrt(std::min(1.0, h)));
}

double bearing_deg(const GeoPoint& origin, const GeoPoint& dest) {
  if (origin == dest) {
    throw PlanError("undefined_bearing", "bearing is undefined for identical points");
  }
  const double phi1 = origin.lat * kDegToRad;
  const double phi2 = dest.lat * kDegToRad;
  const double dlambda = (dest.lon - origin.lon) * kDegToRad;
  const double y = std::sin(dlambda) * std::cos(phi2);
  const double x = std::cos(phi1) * std::sin(phi2) -
                   std::sin(phi1) * std::cos(phi2) * std::cos(dlambda);
  return wrap_deg_360(std::atan2(y, x) * kRadToDeg);
}

double wrap_deg_360(double deg) {
  double r = std::fmod(deg, 360.0);
  if (r < 0.0) r += 360.0;
  if (r >= 360.0) r -= 360.0;
  return r;
}

double angle_diff_deg(double from, double to) {
  double d = std::fmod(to - from, 360.0);
  if (d <= -180.0) d += 360.0;
  if (d > 180.0) d -= 360.0;
  return d;
}

LocalProjection::LocalProjection(GeoPoint center)
    : center_(center),
      sin_lat0_(std::sin(center.lat * kDegToRad)),
      cos_lat0_(std::cos(center.lat * kDegToRad)) {}

LocalProjection LocalProjection::about_centroid(const std::vector<GeoPoint>& points) {
  if (points.empty()) return LocalProjection(GeoPoint{});
  // Mean of unit vectors, so the centroid is well defined across the antimeridian.
  double x = 0.0, y = 0.0, z = 0.0;
  for (const auto& p : points) {
    const double phi = p.lat * kDegToRad;
    const double lam = p.lon * kDegToRad;
    x += std::cos(phi) * std::cos(lam);
    y += std::cos(phi) * std::sin(lam);
    z += std::sin(phi);
  }
  const double hyp = std::hypot(x, y);
  return LocalProjection(GeoPoint{std::atan2(z, hyp) * kRadToDeg, std::atan2(y, x) * kRadToDeg});
}

PlanarPoint LocalProjection::forward(const GeoPoint& p) const {
  const double phi = p.lat * kDegToRad;
  const double dlam = (p.lon - center_.lon) * kDegToRad;
  const double sin_phi = std::sin(phi);
  const double cos_phi = std::cos(phi);
  const double cos_dlam = std::cos(dlam);
  const double s1 = std::sin((phi - center_.lat * kDegToRad) / 2.0);
  const double s2 = std::sin(dlam / 2.0);
  const double h = std::clamp(s1 * s1 + cos_lat0_ * cos_phi * s2 * s2, 0.0, 1.0);
  const double c = 2.0 * std::asin(std::sqrt(h));
  const double k = c < 1e-12 ? 1.0 : c / std::sin(c);
  return PlanarPoint{kEarthRadiusM * k * cos_phi * std::sin(dlam),
                     kEarthRadiusM * k * (cos_lat0_ * sin_phi - sin_lat0_ * cos_phi * cos_dlam)};
}

GeoPoint LocalProjection::inverse(const PlanarPoint& p) const {
  const double rho = std::hypot(p.x, p.y);
  if (rho < 1e-9) return center_;
  const double c = rho / kEarthRadiusM;
  const double sin_c = std::sin(c);
  const double cos_c = std::cos(c);
  const double phi = std::asin(std::clamp(cos_c * sin_lat0_ + p.y * sin_c * cos_lat0_ / rho, -1.0, 1.0));
  const double lam = center_.lon * kDegToRad +
                     std::atan2(p.x * sin_c, rho * cos_lat0_ * cos_c - p.y * sin_lat0_ * sin_c);
  double lon = lam * kRadToDeg;
  if (lon > 180.0) lon -= 360.0;
  if (lon < -180.0) lon += 360.0;
  return GeoPoint{phi * kRadToDeg, lon};
}

}  // namespace shuttleplan
