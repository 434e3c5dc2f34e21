#pragma once

#include <optional>
#include <string>
#include <vector>

#include "transit/geo.hpp"

namespace transit {

struct RawStop {
  std::string id;
  std::string name;
  GeoPoint location;
  // Provenance carried through normalized snapshots; empty means unmerged.
  std::vector<std::string> merged_from;
};

// One directional stop sequence of a route. leg_times_sec, when present, has
// one entry per adjacent stop pair.
struct RouteDirection {
  std::vector<std::string> stops;
  std::optional<std::vector<double>> leg_times_sec;
};

struct RawRoute {
  std::string id;
  std::string name;
  double headway_min = 0.0;
  std::vector<RouteDirection> directions;
};

struct RawFeed {
  std::string city_name;
  std::vector<RawStop> stops;
  std::vector<RawRoute> routes;
};

struct PopulationRegion {
  std::string region_id;
  std::string name;
  GeoPoint centroid;
  double population = 0.0;
  double side_m = 0.0;
};

struct PointOfInterest {
  std::string poi_id;
  std::string name;
  GeoPoint location;
};

// Undirected edge between two stops. Endpoint ids are stored in lexicographic
// order so equal edges compare equal.
struct Connection {
  std::string from_stop;
  std::string to_stop;
  std::vector<std::string> routes;  // sorted, unique, nonempty
  double straight_distance_m = 0.0;
  std::optional<double> road_distance_m;
  double travel_time_sec = 0.0;
};

struct IngestOptions {
  double default_speed_kmh = 18.0;       // fills in missing leg travel times
  double default_region_side_m = 1000.0; // when area_km2 is absent
};

// Parses and validates a snapshot JSON document. Throws TransitError with a
// kind matching the first violation found.
RawFeed load_snapshot(const std::string& path);

// Re-emits a feed in normalized form: stops and routes sorted by id,
// canonical key order. load(save(load(x))) is a fixed point.
std::string serialize_snapshot(const RawFeed& feed);
void save_snapshot(const RawFeed& feed, const std::string& path);

// One Connection per unordered adjacent stop pair of any directional
// sequence; route sets are unioned, travel time is the minimum over
// traversals (or distance at the default speed when no leg time is given).
// Zero-distance pairs between distinct stops are kept and reported in
// `warnings` when provided.
std::vector<Connection> derive_connections(
    const RawFeed& feed, const EarthModel& model = {},
    const IngestOptions& options = {},
    std::vector<std::string>* warnings = nullptr);

// Drops stops that appear in no connection. Stop order is preserved.
RawFeed prune_isolated_stops(const RawFeed& feed,
                             const std::vector<Connection>& connections);

std::vector<PopulationRegion> load_population(
    const std::string& path, const IngestOptions& options = {});

std::vector<PointOfInterest> load_pois(const std::string& path);

}  // namespace transit
