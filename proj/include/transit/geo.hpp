#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "transit/error.hpp"

namespace transit {

// WGS84 coordinate in decimal degrees.
struct GeoPoint {
  double lat = 0.0;  // [-90, 90]
  double lon = 0.0;  // [-180, 180]

  bool operator==(const GeoPoint&) const = default;
};

bool is_valid(const GeoPoint& p);

// Spheroid radius endpoints used to interpolate a latitude-dependent radius.
struct EarthModel {
  double equatorial_radius_m = 6378137.0;
  double polar_radius_m = 6356752.0;
};

// Axis-aligned lat/lon rectangle. Antimeridian-crossing bounds are never
// constructed; builders reject them instead of wrapping.
struct GeoBounds {
  double min_lat = 0.0;
  double max_lat = 0.0;
  double min_lon = 0.0;
  double max_lon = 0.0;

  bool contains(const GeoPoint& p) const {
    return p.lat >= min_lat && p.lat <= max_lat && p.lon >= min_lon &&
           p.lon <= max_lon;
  }
};

// Geocentric radius at the given latitude, interpolating between the model's
// equatorial and polar radii.
double earth_radius(double lat_deg, const EarthModel& model = {});

// Great-circle distance on a sphere of geocentric radius taken at the mean
// latitude of the two endpoints.
double haversine_distance(const GeoPoint& p1, const GeoPoint& p2,
                          const EarthModel& model = {});

// Lat/lon rectangle covering the square of the given half side centered at
// `center`. The rectangle contains the great-circle disc of radius
// half_side_m.
GeoBounds bounding_square(const GeoPoint& center, double half_side_m,
                          const EarthModel& model = {});

// Uniform lat/lon grid over a stop collection for radius queries. Immutable
// after construction.
class SpatialGrid {
 public:
  // Stops are (id, location) pairs; ids must be unique. cell_size_deg <= 0
  // picks the degree equivalent of 800 m at the stops' mean latitude.
  SpatialGrid(const std::vector<std::pair<std::string, GeoPoint>>& stops,
              double cell_size_deg = 0.0, const EarthModel& model = {});

  double cell_size_deg() const { return cell_size_deg_; }
  std::size_t stop_count() const { return stops_.size(); }

  // Exactly the stops within radius_m of center, ascending by distance,
  // ties broken by stop id.
  std::vector<std::pair<std::string, double>> stops_within_radius(
      const GeoPoint& center, double radius_m) const;

  // Nearest stop within cap_m, if any.
  std::optional<std::pair<std::string, double>> nearest_stop(
      const GeoPoint& center, double cap_m) const;

  // Cell coordinates of a point; exposed so the indexing stays recomputable.
  std::pair<std::int32_t, std::int32_t> cell_of(const GeoPoint& p) const;

 private:
  std::vector<std::pair<std::string, GeoPoint>> stops_;
  std::map<std::pair<std::int32_t, std::int32_t>, std::vector<std::size_t>>
      cells_;
  double cell_size_deg_ = 0.0;
  EarthModel model_;
};

}  // namespace transit
