#include "transit/geo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace transit {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr double kMetersPerDegreeFactor = std::numbers::pi / 180.0;

double hav(double theta_rad) {
  const double s = std::sin(theta_rad / 2.0);
  return s * s;
}

void require_valid(const GeoPoint& p, const char* what) {
  if (!is_valid(p)) {
    throw TransitError(ErrorKind::InvalidArgument,
                       std::string(what) + ": coordinates out of range (lat " +
                           std::to_string(p.lat) + ", lon " +
                           std::to_string(p.lon) + ")");
  }
}

}  // namespace

bool is_valid(const GeoPoint& p) {
  return std::isfinite(p.lat) && std::isfinite(p.lon) && p.lat >= -90.0 &&
         p.lat <= 90.0 && p.lon >= -180.0 && p.lon <= 180.0;
}

double earth_radius(double lat_deg, const EarthModel& model) {
  if (!std::isfinite(lat_deg) || lat_deg < -90.0 || lat_deg > 90.0) {
    throw TransitError(ErrorKind::InvalidArgument,
                       "earth_radius: latitude out of range: " +
                           std::to_string(lat_deg));
  }
  const double a = model.equatorial_radius_m;
  const double b = model.polar_radius_m;
  const double phi = lat_deg * kDegToRad;
  const double c = std::cos(phi);
  const double s = std::sin(phi);
  const double num = (a * a * c) * (a * a * c) + (b * b * s) * (b * b * s);
  const double den = (a * c) * (a * c) + (b * s) * (b * s);
  return std::sqrt(num / den);
}

double haversine_distance(const GeoPoint& p1, const GeoPoint& p2,
                          const EarthModel& model) {
  require_valid(p1, "haversine_distance");
  require_valid(p2, "haversine_distance");
  if (p1 == p2) {
    return 0.0;
  }
  const double phi1 = p1.lat * kDegToRad;
  const double phi2 = p2.lat * kDegToRad;
  const double dphi = phi2 - phi1;
  const double dlambda = (p2.lon - p1.lon) * kDegToRad;
  const double h = hav(dphi) + std::cos(phi1) * std::cos(phi2) * hav(dlambda);
  const double r = earth_radius((p1.lat + p2.lat) / 2.0, model);
  return 2.0 * r * std::asin(std::min(1.0, std::sqrt(h)));
}

GeoBounds bounding_square(const GeoPoint& center, double half_side_m,
                          const EarthModel& model) {
  require_valid(center, "bounding_square");
  if (!(half_side_m >= 0.0) || !std::isfinite(half_side_m)) {
    throw TransitError(ErrorKind::InvalidArgument,
                       "bounding_square: half_side_m must be nonnegative");
  }
  const double r = earth_radius(center.lat, model);
  const double dlat = half_side_m / (r * kMetersPerDegreeFactor);
  const double coslat = std::cos(center.lat * kDegToRad);
  if (coslat <= 0.0) {
    throw TransitError(ErrorKind::UnsupportedRegion,
                       "bounding_square: polar center unsupported");
  }
  const double dlon = dlat / coslat;
  GeoBounds b{center.lat - dlat, center.lat + dlat, center.lon - dlon,
              center.lon + dlon};
  if (b.min_lat < -90.0 || b.max_lat > 90.0) {
    throw TransitError(ErrorKind::UnsupportedRegion,
                       "bounding_square: bounds cross a pole");
  }
  if (b.min_lon < -180.0 || b.max_lon > 180.0) {
    throw TransitError(ErrorKind::UnsupportedRegion,
                       "bounding_square: bounds cross the antimeridian");
  }
  return b;
}

SpatialGrid::SpatialGrid(
    const std::vector<std::pair<std::string, GeoPoint>>& stops,
    double cell_size_deg, const EarthModel& model)
    : stops_(stops), cell_size_deg_(cell_size_deg), model_(model) {
  if (cell_size_deg_ <= 0.0) {
    double mean_lat = 0.0;
    for (const auto& [id, p] : stops_) {
      mean_lat += p.lat;
    }
    if (!stops_.empty()) {
      mean_lat /= static_cast<double>(stops_.size());
    }
    const double r = earth_radius(mean_lat, model_);
    cell_size_deg_ = 800.0 / (r * kMetersPerDegreeFactor);
  }
  for (std::size_t i = 0; i < stops_.size(); ++i) {
    cells_[cell_of(stops_[i].second)].push_back(i);
  }
}

std::pair<std::int32_t, std::int32_t> SpatialGrid::cell_of(
    const GeoPoint& p) const {
  return {static_cast<std::int32_t>(std::floor(p.lat / cell_size_deg_)),
          static_cast<std::int32_t>(std::floor(p.lon / cell_size_deg_))};
}

std::vector<std::pair<std::string, double>> SpatialGrid::stops_within_radius(
    const GeoPoint& center, double radius_m) const {
  std::vector<std::pair<std::string, double>> result;
  if (stops_.empty()) {
    return result;
  }
  if (!(radius_m > 0.0)) {
    throw TransitError(ErrorKind::InvalidArgument,
                       "stops_within_radius: radius_m must be positive");
  }
  const GeoBounds box = bounding_square(center, radius_m, model_);
  const auto [row_lo, col_lo] = cell_of({box.min_lat, box.min_lon});
  const auto [row_hi, col_hi] = cell_of({box.max_lat, box.max_lon});
  for (std::int32_t row = row_lo; row <= row_hi; ++row) {
    for (std::int32_t col = col_lo; col <= col_hi; ++col) {
      auto it = cells_.find({row, col});
      if (it == cells_.end()) {
        continue;
      }
      for (std::size_t i : it->second) {
        const double d = haversine_distance(center, stops_[i].second, model_);
        if (d <= radius_m) {
          result.emplace_back(stops_[i].first, d);
        }
      }
    }
  }
  std::sort(result.begin(), result.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second < b.second : a.first < b.first;
  });
  return result;
}

std::optional<std::pair<std::string, double>> SpatialGrid::nearest_stop(
    const GeoPoint& center, double cap_m) const {
  auto hits = stops_within_radius(center, cap_m);
  if (hits.empty()) {
    return std::nullopt;
  }
  return hits.front();
}

}  // namespace transit
