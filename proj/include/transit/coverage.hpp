#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "transit/feed.hpp"
#include "transit/network.hpp"
#include "transit/routing.hpp"

namespace transit {

struct SampleConfig {
  std::size_t sample_count = 10000;
  double walk_threshold_m = 400.0;
  double service_bound_m = 800.0;
  std::size_t poi_start_count = 1000;
  std::uint64_t seed = 42;
  double walking_speed_m_per_min = 80.0;
};

struct PopulationMap {
  std::vector<PopulationRegion> regions;
  double total_population = 0.0;
};

PopulationMap make_population_map(std::vector<PopulationRegion> regions);

enum class PointSource {
  kArea,
  kPopulation,
};

struct CoverageResult {
  double mean_stops_within_threshold = 0.0;
  double stddev_stops_within_threshold = 0.0;
  double mean_distance_to_closest_stop_m = 0.0;
  double stddev_distance_to_closest_stop_m = 0.0;
  std::size_t samples_used = 0;
  SampleConfig config_echo;
};

struct TripSummary {
  double mean_trip_time_min = 0.0;
  double mean_trip_length_km = 0.0;
  double mean_transfers = 0.0;
  double mean_straight_distance_km = 0.0;
  double trip_time_per_straight_km_min = 0.0;
  double transfers_per_straight_km = 0.0;
  double trip_length_ratio = 0.0;
  double stddev_trip_time_min = 0.0;
  double stddev_trip_length_km = 0.0;
  double stddev_transfers = 0.0;
  double stddev_straight_distance_km = 0.0;
  std::size_t samples_used = 0;
  std::size_t unreachable_pairs = 0;
  SampleConfig config_echo;
};

// Normalized fields are ratios of the means; this keeps them arithmetic
// identities of the summary regardless of how the means were obtained.
TripSummary make_trip_summary(double mean_trip_time_min,
                              double mean_trip_length_km, double mean_transfers,
                              double mean_straight_distance_km);

struct AccessResult {
  double mean_access_time_min = 0.0;
  double stddev_access_time_min = 0.0;
  double mean_access_distance_km = 0.0;
  double stddev_access_distance_km = 0.0;
  std::size_t samples_used = 0;
  std::size_t starts_without_access = 0;
  SampleConfig config_echo;
};

// Deterministic counter-based random stream: the i-th sample depends only on
// (seed, stream, i), so partitioning the index space over threads cannot
// change the output.
class SampleStream {
 public:
  SampleStream(std::uint64_t seed, std::uint64_t stream, std::uint64_t index);

  std::uint64_t next_u64();
  double next_double();  // uniform in [0, 1)
  double next_in(double lo, double hi);

 private:
  std::uint64_t state_;
};

// Uniform rejection samples over the stop bounding box expanded by
// service_bound_m, keeping points within service_bound_m of some stop.
std::vector<GeoPoint> sample_area_points(const TransitNetwork& network,
                                         const SampleConfig& config,
                                         unsigned threads = 0);

// Region chosen proportionally to population, then uniform within the
// region's square.
std::vector<GeoPoint> sample_population_points(const PopulationMap& popmap,
                                               const SampleConfig& config,
                                               unsigned threads = 0);

// Coverage statistics for an explicit point set; area_coverage and
// population_coverage are this over their respective samplers.
CoverageResult coverage_from_points(const TransitNetwork& network,
                                    const std::vector<GeoPoint>& points,
                                    const SampleConfig& config);

CoverageResult area_coverage(const TransitNetwork& network,
                             const SampleConfig& config, unsigned threads = 0);

CoverageResult population_coverage(const TransitNetwork& network,
                                   const PopulationMap& popmap,
                                   const SampleConfig& config,
                                   unsigned threads = 0);

// Random origin-destination trips: walk to the nearest stop, transit path,
// walk from the final stop. Population source requires popmap.
TripSummary trip_metrics(const TransitNetwork& network,
                         const SampleConfig& config, PointSource source,
                         const RoutingPolicy& policy = {},
                         const PopulationMap* popmap = nullptr,
                         unsigned threads = 0);

// Mean door-to-door time and length to the nearest point of interest, where
// nearest is decided by total time.
AccessResult poi_access(const TransitNetwork& network,
                        const std::vector<PointOfInterest>& pois,
                        const SampleConfig& config, PointSource source,
                        const RoutingPolicy& policy = {},
                        const PopulationMap* popmap = nullptr,
                        unsigned threads = 0);

}  // namespace transit
