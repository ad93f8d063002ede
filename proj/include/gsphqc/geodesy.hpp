#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "gsphqc/errors.hpp"

namespace gsphqc {

/// Mean Earth radius in kilometres, used for every great-circle distance.
inline constexpr double kEarthRadiusKm = 6371.0;

/// Geographic coordinate in degrees.
struct GeoPoint {
  double latitude_deg = 0.0;   // [-90, 90]
  double longitude_deg = 0.0;  // [-180, 180]
};

inline void validate_geo_point(const GeoPoint& p) {
  if (!(p.latitude_deg >= -90.0 && p.latitude_deg <= 90.0)) {
    throw InputError("latitude out of range [-90, 90]: " +
                     std::to_string(p.latitude_deg));
  }
  if (!(p.longitude_deg >= -180.0 && p.longitude_deg <= 180.0)) {
    throw InputError("longitude out of range [-180, 180]: " +
                     std::to_string(p.longitude_deg));
  }
}

inline double degrees_to_radians(double deg) {
  return deg * (std::numbers::pi / 180.0);
}

/// Great-circle distance in kilometres via the haversine formula.
/// Symmetric in its arguments bit-for-bit.
inline double haversine_distance(const GeoPoint& a, const GeoPoint& b) {
  validate_geo_point(a);
  validate_geo_point(b);
  const double phi1 = degrees_to_radians(a.latitude_deg);
  const double phi2 = degrees_to_radians(b.latitude_deg);
  const double dphi = degrees_to_radians(b.latitude_deg - a.latitude_deg);
  const double dlambda = degrees_to_radians(b.longitude_deg - a.longitude_deg);
  const double sp = std::sin(0.5 * dphi);
  const double sl = std::sin(0.5 * dlambda);
  const double h = sp * sp + std::cos(phi1) * std::cos(phi2) * sl * sl;
  return 2.0 * kEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(h)));
}

}  // namespace gsphqc
