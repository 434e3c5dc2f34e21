#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "transit/feed.hpp"
#include "transit/geo.hpp"

namespace transit {

struct Stop {
  std::string id;
  std::string name;
  GeoPoint location;
  std::set<std::string> routes;
  std::set<std::string> merged_from;  // original stop ids, singleton if unmerged
};

struct RouteInfo {
  std::string name;
  double headway_min = 0.0;
};

// Undirected simple graph of stops and connections. Immutable after build;
// analyses return new values.
struct TransitNetwork {
  std::string city_name;
  std::map<std::string, Stop> stops;
  std::vector<Connection> connections;  // sorted by endpoint pair
  std::map<std::string, RouteInfo> routes;
};

struct StructuralMetrics {
  double total_length_km = 0.0;
  double total_travel_time_h = 0.0;
  double mean_speed_kmh = 0.0;
  std::size_t stop_count = 0;
  std::size_t route_count = 0;
  std::size_t connected_pair_count = 0;
  std::size_t component_count = 0;
  std::size_t bridge_count = 0;
  // Library-style graph statistics, computed on the largest component.
  std::optional<double> avg_shortest_path_length;
  std::optional<double> avg_clustering_coefficient;
};

struct NetworkOptions {
  double merge_threshold_m = 30.0;
  // Exact all-pairs path length up to this many stops; sampled above it.
  std::size_t exact_apsp_stop_cap = 3000;
  std::size_t apsp_sample_sources = 500;
  std::uint64_t apsp_sample_seed = 42;
};

// Validates endpoints and collapses duplicate pairs (route union, minimum
// travel time). Self-loops are rejected.
TransitNetwork build_network(const std::vector<RawStop>& stops,
                             const std::vector<Connection>& connections,
                             const std::vector<RawRoute>& routes,
                             const std::string& city_name = "");

TransitNetwork build_network(const RawFeed& feed,
                             const std::vector<Connection>& connections);

// Single-linkage clustering of stops closer than threshold_m, iterated until
// no pair remains below the threshold. Cluster stops sit at the member
// centroid, keep the union of routes, and record provenance in merged_from.
TransitNetwork merge_nearby_stops(const TransitNetwork& network,
                                  double threshold_m,
                                  const EarthModel& model = {});

// Partition of stop ids into connected components, each sorted, components
// ordered by their smallest member.
std::vector<std::vector<std::string>> connected_components(
    const TransitNetwork& network);

// Connections whose removal would increase the component count.
std::vector<Connection> find_bridges(const TransitNetwork& network);

StructuralMetrics structural_metrics(const TransitNetwork& network,
                                     const NetworkOptions& options = {});

// Normalized snapshot form of a (possibly merged) network: the original
// feed's route sequences remapped through merged_from provenance, consecutive
// duplicates collapsed, and per-leg travel times materialized from the
// network's connections.
RawFeed network_to_feed(const TransitNetwork& network, const RawFeed& original);

}  // namespace transit
