#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "transit/coverage.hpp"
#include "transit/network.hpp"
#include "transit/routing.hpp"

namespace transit {

struct ConnectionSummary {
  double mean_connection_time_sec = 0.0;
  double mean_connection_length_m = 0.0;
  double mean_wait_time_min = 0.0;
  double wait_time_stddev_min = 0.0;
};

// Everything needed to reproduce a report bit for bit.
struct ReportConfig {
  SampleConfig sampling;
  double merge_threshold_m = 30.0;
  RoutingPolicy routing;
};

struct CityReport {
  std::string city;
  StructuralMetrics structural;
  TripSummary area_trips;
  TripSummary population_trips;
  CoverageResult area_coverage;
  CoverageResult population_coverage;
  ConnectionSummary per_connection;
  std::optional<AccessResult> poi_access;  // present when POIs were supplied
  ReportConfig config_echo;
};

enum class MetricDirection {
  kHigherIsBetter,
  kLowerIsBetter,
};

struct ComparisonRow {
  std::string metric;
  MetricDirection direction;
  std::vector<double> values;          // one per city, column order
  std::vector<std::string> best_cities;  // all cities attaining the best value
};

struct ComparisonTable {
  std::vector<std::string> cities;
  std::vector<ComparisonRow> rows;
};

ConnectionSummary summarize_connections(const TransitNetwork& network);

CityReport build_city_report(const TransitNetwork& network,
                             const PopulationMap& popmap,
                             const std::vector<PointOfInterest>& pois,
                             const ReportConfig& config, unsigned threads = 0);

// Side-by-side table over reports computed with identical thresholds;
// differing configs are an error naming the mismatched fields.
ComparisonTable compare_cities(const std::vector<CityReport>& reports);

struct GeoJsonOptions {
  bool include_bridges = false;
};

// RFC 7946 FeatureCollection: one Point per stop, one LineString per
// connection, coordinates in [lon, lat] order.
std::string export_geojson(const TransitNetwork& network,
                           const GeoJsonOptions& options = {});

enum class TableFormat {
  kCsv,
  kJson,
};

std::string render_report(const CityReport& report, TableFormat format);
std::string render_comparison(const ComparisonTable& table, TableFormat format);

// Single-result renderers backing the CLI subcommands.
std::string render_structural(const StructuralMetrics& metrics,
                              TableFormat format);
std::string render_coverage(const CoverageResult& area,
                            const CoverageResult* population,
                            TableFormat format);
std::string render_trips(const TripSummary& area,
                         const TripSummary* population, TableFormat format);
std::string render_access(const AccessResult& access, TableFormat format);
std::string render_path(const PathResult& path, TableFormat format);
std::string render_bridges(const std::vector<Connection>& bridges,
                           TableFormat format);

// Parses a city report previously rendered as JSON (schema_version 1).
CityReport parse_report_json(const std::string& text);

}  // namespace transit
