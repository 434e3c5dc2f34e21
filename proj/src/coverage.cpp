#include "transit/coverage.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <functional>
#include <mutex>
#include <optional>
#include <thread>

namespace transit {

namespace {

// Stream tags keep the sampling domains of the different estimators
// independent even under one seed.
enum Stream : std::uint64_t {
  kProbe = 0,
  kAreaPoints = 1,
  kPopulationPoints = 2,
  kTripOrigins = 3,
  kTripDestinations = 4,
  kAccessStarts = 5,
};

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Runs fn(i) for i in [0, n), partitioned over contiguous chunks. Results
// must be written into per-index slots; the partitioning cannot influence
// them because every index derives its own random stream.
void parallel_for(std::size_t n, unsigned threads,
                  const std::function<void(std::size_t)>& fn) {
  unsigned worker_count = threads != 0
                              ? threads
                              : std::max(1u, std::thread::hardware_concurrency());
  worker_count = static_cast<unsigned>(
      std::min<std::size_t>(worker_count, std::max<std::size_t>(n, 1)));
  if (worker_count <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) {
      fn(i);
    }
    return;
  }
  std::mutex error_mutex;
  std::exception_ptr first_error;
  std::vector<std::thread> workers;
  const std::size_t chunk = (n + worker_count - 1) / worker_count;
  for (unsigned w = 0; w < worker_count; ++w) {
    const std::size_t begin = static_cast<std::size_t>(w) * chunk;
    const std::size_t end = std::min(n, begin + chunk);
    if (begin >= end) {
      break;
    }
    workers.emplace_back([&, begin, end] {
      try {
        for (std::size_t i = begin; i < end; ++i) {
          fn(i);
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) {
          first_error = std::current_exception();
        }
      }
    });
  }
  for (auto& worker : workers) {
    worker.join();
  }
  if (first_error) {
    std::rethrow_exception(first_error);
  }
}

void validate(const SampleConfig& config) {
  if (!(config.sample_count > 0)) {
    throw TransitError(ErrorKind::InvalidArgument,
                       "sample_count must be positive");
  }
  if (!(config.walk_threshold_m > 0.0) ||
      !(config.walk_threshold_m <= config.service_bound_m)) {
    throw TransitError(ErrorKind::InvalidArgument,
                       "walk_threshold_m must be in (0, service_bound_m]");
  }
  if (!(config.walking_speed_m_per_min > 0.0)) {
    throw TransitError(ErrorKind::InvalidArgument,
                       "walking_speed_m_per_min must be positive");
  }
}

struct Stats {
  double mean = 0.0;
  double stddev = 0.0;
};

Stats summarize(const std::vector<double>& values) {
  Stats s;
  if (values.empty()) {
    return s;
  }
  double sum = 0.0;
  for (double v : values) {
    sum += v;
  }
  s.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) {
      ss += (v - s.mean) * (v - s.mean);
    }
    s.stddev = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return s;
}

GeoBounds expanded_stop_bounds(const TransitNetwork& network,
                               double margin_m) {
  if (network.stops.empty()) {
    throw TransitError(ErrorKind::InvalidArgument,
                       "sampling requires a nonempty network");
  }
  double min_lat = 90.0, max_lat = -90.0, min_lon = 180.0, max_lon = -180.0;
  for (const auto& [id, stop] : network.stops) {
    min_lat = std::min(min_lat, stop.location.lat);
    max_lat = std::max(max_lat, stop.location.lat);
    min_lon = std::min(min_lon, stop.location.lon);
    max_lon = std::max(max_lon, stop.location.lon);
  }
  const GeoPoint center{(min_lat + max_lat) / 2.0, (min_lon + max_lon) / 2.0};
  const GeoBounds margin = bounding_square(center, margin_m);
  const double dlat = margin.max_lat - center.lat;
  const double dlon = margin.max_lon - center.lon;
  GeoBounds out{min_lat - dlat, max_lat + dlat, min_lon - dlon,
                max_lon + dlon};
  if (out.min_lat < -90.0 || out.max_lat > 90.0 || out.min_lon < -180.0 ||
      out.max_lon > 180.0) {
    throw TransitError(ErrorKind::UnsupportedRegion,
                       "service area touches a pole or the antimeridian");
  }
  return out;
}

std::vector<std::pair<std::string, GeoPoint>> grid_input(
    const TransitNetwork& network) {
  std::vector<std::pair<std::string, GeoPoint>> stops;
  stops.reserve(network.stops.size());
  for (const auto& [id, stop] : network.stops) {
    stops.emplace_back(id, stop.location);
  }
  return stops;
}

// One rejection-sampled point in the service area, driven entirely by the
// per-index stream.
GeoPoint service_area_point(const GeoBounds& box, const SpatialGrid& grid,
                            double service_bound_m, SampleStream& rng) {
  for (std::size_t attempt = 0; attempt < 1000000; ++attempt) {
    const GeoPoint p{rng.next_in(box.min_lat, box.max_lat),
                     rng.next_in(box.min_lon, box.max_lon)};
    if (grid.nearest_stop(p, service_bound_m)) {
      return p;
    }
  }
  throw TransitError(ErrorKind::DegenerateGeometry,
                     "service-area sampling failed to accept a point");
}

void probe_acceptance(const GeoBounds& box, const SpatialGrid& grid,
                      double service_bound_m, std::uint64_t seed) {
  constexpr std::size_t kProbeDraws = 10000;  // gate at 1e-4 acceptance
  std::size_t accepted = 0;
  SampleStream rng(seed, kProbe, 0);
  for (std::size_t i = 0; i < kProbeDraws; ++i) {
    const GeoPoint p{rng.next_in(box.min_lat, box.max_lat),
                     rng.next_in(box.min_lon, box.max_lon)};
    if (grid.nearest_stop(p, service_bound_m)) {
      ++accepted;
    }
  }
  if (accepted == 0) {
    throw TransitError(ErrorKind::DegenerateGeometry,
                       "service-area acceptance rate below 1e-4; stops too "
                       "sparse for the sampling domain");
  }
}

GeoPoint region_point(const PopulationRegion& region, SampleStream& rng) {
  const GeoBounds square = bounding_square(region.centroid,
                                           region.side_m / 2.0);
  return {rng.next_in(square.min_lat, square.max_lat),
          rng.next_in(square.min_lon, square.max_lon)};
}

class PopulationPicker {
 public:
  explicit PopulationPicker(const PopulationMap& popmap) : popmap_(&popmap) {
    if (!(popmap.total_population > 0.0)) {
      throw TransitError(ErrorKind::InvalidArgument,
                         "population map has zero total population");
    }
    cumulative_.reserve(popmap.regions.size());
    double acc = 0.0;
    for (const PopulationRegion& r : popmap.regions) {
      acc += r.population;
      cumulative_.push_back(acc);
    }
  }

  GeoPoint sample(SampleStream& rng) const {
    const double u = rng.next_double() * cumulative_.back();
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(),
                                     u);
    const std::size_t idx = std::min<std::size_t>(
        static_cast<std::size_t>(it - cumulative_.begin()),
        popmap_->regions.size() - 1);
    return region_point(popmap_->regions[idx], rng);
  }

 private:
  const PopulationMap* popmap_;
  std::vector<double> cumulative_;
};

// Shared point generator: fills points[i] from (seed, stream, i).
std::vector<GeoPoint> generate_points(
    std::size_t count, unsigned threads,
    const std::function<GeoPoint(std::size_t)>& make) {
  std::vector<GeoPoint> points(count);
  parallel_for(count, threads, [&](std::size_t i) { points[i] = make(i); });
  return points;
}

}  // namespace

PopulationMap make_population_map(std::vector<PopulationRegion> regions) {
  PopulationMap map;
  for (const PopulationRegion& r : regions) {
    if (!(r.side_m > 0.0) || r.population < 0.0 || !is_valid(r.centroid)) {
      throw TransitError(ErrorKind::InvalidArgument,
                         "invalid population region \"" + r.region_id + "\"");
    }
    map.total_population += r.population;
  }
  if (!(map.total_population > 0.0)) {
    throw TransitError(ErrorKind::InvalidArgument,
                       "population map has zero total population");
  }
  map.regions = std::move(regions);
  return map;
}

SampleStream::SampleStream(std::uint64_t seed, std::uint64_t stream,
                           std::uint64_t index) {
  std::uint64_t z = seed;
  z = mix64(z + 0x9e3779b97f4a7c15ULL * (stream + 1));
  z = mix64(z + 0x9e3779b97f4a7c15ULL * (index + 1));
  state_ = z;
}

std::uint64_t SampleStream::next_u64() {
  state_ += 0x9e3779b97f4a7c15ULL;
  return mix64(state_);
}

double SampleStream::next_double() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double SampleStream::next_in(double lo, double hi) {
  return lo + (hi - lo) * next_double();
}

std::vector<GeoPoint> sample_area_points(const TransitNetwork& network,
                                         const SampleConfig& config,
                                         unsigned threads) {
  validate(config);
  const GeoBounds box = expanded_stop_bounds(network, config.service_bound_m);
  const SpatialGrid grid(grid_input(network));
  probe_acceptance(box, grid, config.service_bound_m, config.seed);
  return generate_points(config.sample_count, threads, [&](std::size_t i) {
    SampleStream rng(config.seed, kAreaPoints, i);
    return service_area_point(box, grid, config.service_bound_m, rng);
  });
}

std::vector<GeoPoint> sample_population_points(const PopulationMap& popmap,
                                               const SampleConfig& config,
                                               unsigned threads) {
  validate(config);
  const PopulationPicker picker(popmap);
  return generate_points(config.sample_count, threads, [&](std::size_t i) {
    SampleStream rng(config.seed, kPopulationPoints, i);
    return picker.sample(rng);
  });
}

CoverageResult coverage_from_points(const TransitNetwork& network,
                                    const std::vector<GeoPoint>& points,
                                    const SampleConfig& config) {
  validate(config);
  const SpatialGrid grid(grid_input(network));
  std::vector<double> counts(points.size());
  std::vector<double> distances(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto hits = grid.stops_within_radius(points[i],
                                               config.walk_threshold_m);
    counts[i] = static_cast<double>(hits.size());
    if (!hits.empty()) {
      distances[i] = hits.front().second;
    } else if (const auto nearest =
                   grid.nearest_stop(points[i], config.service_bound_m)) {
      distances[i] = nearest->second;
    } else {
      // No stop within the service bound; the distance saturates there.
      distances[i] = config.service_bound_m;
    }
  }
  const Stats count_stats = summarize(counts);
  const Stats distance_stats = summarize(distances);
  CoverageResult result;
  result.mean_stops_within_threshold = count_stats.mean;
  result.stddev_stops_within_threshold = count_stats.stddev;
  result.mean_distance_to_closest_stop_m = distance_stats.mean;
  result.stddev_distance_to_closest_stop_m = distance_stats.stddev;
  result.samples_used = points.size();
  result.config_echo = config;
  return result;
}

CoverageResult area_coverage(const TransitNetwork& network,
                             const SampleConfig& config, unsigned threads) {
  return coverage_from_points(network,
                              sample_area_points(network, config, threads),
                              config);
}

CoverageResult population_coverage(const TransitNetwork& network,
                                   const PopulationMap& popmap,
                                   const SampleConfig& config,
                                   unsigned threads) {
  return coverage_from_points(
      network, sample_population_points(popmap, config, threads), config);
}

TripSummary make_trip_summary(double mean_trip_time_min,
                              double mean_trip_length_km,
                              double mean_transfers,
                              double mean_straight_distance_km) {
  TripSummary s;
  s.mean_trip_time_min = mean_trip_time_min;
  s.mean_trip_length_km = mean_trip_length_km;
  s.mean_transfers = mean_transfers;
  s.mean_straight_distance_km = mean_straight_distance_km;
  if (mean_straight_distance_km > 0.0) {
    s.trip_time_per_straight_km_min =
        mean_trip_time_min / mean_straight_distance_km;
    s.transfers_per_straight_km = mean_transfers / mean_straight_distance_km;
    s.trip_length_ratio = mean_trip_length_km / mean_straight_distance_km;
  }
  return s;
}

TripSummary trip_metrics(const TransitNetwork& network,
                         const SampleConfig& config, PointSource source,
                         const RoutingPolicy& policy,
                         const PopulationMap* popmap, unsigned threads) {
  validate(config);
  if (source == PointSource::kPopulation && popmap == nullptr) {
    throw TransitError(ErrorKind::InvalidArgument,
                       "population-based trips require a population map");
  }
  const SpatialGrid grid(grid_input(network));
  const Router router(network);

  std::function<GeoPoint(Stream, std::size_t)> draw;
  GeoBounds box{};
  std::optional<PopulationPicker> picker;
  if (source == PointSource::kArea) {
    box = expanded_stop_bounds(network, config.service_bound_m);
    probe_acceptance(box, grid, config.service_bound_m, config.seed);
    draw = [&](Stream stream, std::size_t i) {
      SampleStream rng(config.seed, stream, i);
      return service_area_point(box, grid, config.service_bound_m, rng);
    };
  } else {
    picker.emplace(*popmap);
    draw = [&](Stream stream, std::size_t i) {
      SampleStream rng(config.seed, stream, i);
      return picker->sample(rng);
    };
  }

  struct TripSample {
    bool usable = false;
    double time_min = 0.0;
    double length_km = 0.0;
    double transfers = 0.0;
    double straight_km = 0.0;
  };
  std::vector<TripSample> samples(config.sample_count);
  parallel_for(config.sample_count, threads, [&](std::size_t i) {
    const GeoPoint origin = draw(kTripOrigins, i);
    const GeoPoint destination = draw(kTripDestinations, i);
    TripSample& out = samples[i];
    const auto origin_stop = grid.nearest_stop(origin,
                                               config.service_bound_m);
    const auto destination_stop =
        grid.nearest_stop(destination, config.service_bound_m);
    if (!origin_stop || !destination_stop) {
      return;  // no transit access at one end
    }
    const PathResult path = router.shortest_path(
        {origin_stop->first, destination_stop->first, policy});
    if (!path.reachable) {
      return;
    }
    const double walk_m = origin_stop->second + destination_stop->second;
    out.usable = true;
    out.time_min = walk_m / config.walking_speed_m_per_min +
                   path.total_time_sec / 60.0;
    out.length_km = (walk_m + path.total_length_m) / 1000.0;
    out.transfers = static_cast<double>(path.transfers);
    out.straight_km = haversine_distance(origin, destination) / 1000.0;
  });

  std::vector<double> times, lengths, transfers, straights;
  std::size_t unreachable = 0;
  for (const TripSample& s : samples) {
    if (!s.usable) {
      ++unreachable;
      continue;
    }
    times.push_back(s.time_min);
    lengths.push_back(s.length_km);
    transfers.push_back(s.transfers);
    straights.push_back(s.straight_km);
  }
  if (static_cast<double>(unreachable) >
      0.10 * static_cast<double>(config.sample_count)) {
    throw TransitError(ErrorKind::DataQuality,
                       "trip sampling: " + std::to_string(unreachable) +
                           " of " + std::to_string(config.sample_count) +
                           " origin-destination pairs are unreachable");
  }

  const Stats time_stats = summarize(times);
  const Stats length_stats = summarize(lengths);
  const Stats transfer_stats = summarize(transfers);
  const Stats straight_stats = summarize(straights);
  TripSummary summary = make_trip_summary(time_stats.mean, length_stats.mean,
                                          transfer_stats.mean,
                                          straight_stats.mean);
  summary.stddev_trip_time_min = time_stats.stddev;
  summary.stddev_trip_length_km = length_stats.stddev;
  summary.stddev_transfers = transfer_stats.stddev;
  summary.stddev_straight_distance_km = straight_stats.stddev;
  summary.samples_used = times.size();
  summary.unreachable_pairs = unreachable;
  summary.config_echo = config;
  return summary;
}

AccessResult poi_access(const TransitNetwork& network,
                        const std::vector<PointOfInterest>& pois,
                        const SampleConfig& config, PointSource source,
                        const RoutingPolicy& policy,
                        const PopulationMap* popmap, unsigned threads) {
  validate(config);
  if (pois.empty()) {
    throw TransitError(ErrorKind::InvalidArgument,
                       "poi_access requires a nonempty POI set");
  }
  if (source == PointSource::kPopulation && popmap == nullptr) {
    throw TransitError(ErrorKind::InvalidArgument,
                       "population-based access requires a population map");
  }
  const SpatialGrid grid(grid_input(network));
  const Router router(network);

  struct PoiTarget {
    const PointOfInterest* poi;
    std::string stop_id;
    double walk_m = 0.0;
  };
  std::vector<PoiTarget> targets;
  std::vector<PointOfInterest> sorted_pois = pois;
  std::sort(sorted_pois.begin(), sorted_pois.end(),
            [](const PointOfInterest& a, const PointOfInterest& b) {
              return a.poi_id < b.poi_id;
            });
  for (const PointOfInterest& poi : sorted_pois) {
    if (const auto stop = grid.nearest_stop(poi.location,
                                            config.service_bound_m)) {
      targets.push_back({&poi, stop->first, stop->second});
    }
  }
  if (targets.empty()) {
    throw TransitError(ErrorKind::DataQuality,
                       "no point of interest lies within the service bound "
                       "of any stop");
  }
  std::vector<std::string> target_stops;
  target_stops.reserve(targets.size());
  for (const PoiTarget& t : targets) {
    target_stops.push_back(t.stop_id);
  }

  GeoBounds box{};
  std::optional<PopulationPicker> picker;
  std::function<GeoPoint(std::size_t)> draw;
  if (source == PointSource::kArea) {
    box = expanded_stop_bounds(network, config.service_bound_m);
    probe_acceptance(box, grid, config.service_bound_m, config.seed);
    draw = [&](std::size_t i) {
      SampleStream rng(config.seed, kAccessStarts, i);
      return service_area_point(box, grid, config.service_bound_m, rng);
    };
  } else {
    picker.emplace(*popmap);
    draw = [&](std::size_t i) {
      SampleStream rng(config.seed, kAccessStarts, i);
      return picker->sample(rng);
    };
  }

  struct AccessSample {
    bool usable = false;
    double time_min = 0.0;
    double length_km = 0.0;
  };
  std::vector<AccessSample> samples(config.poi_start_count);
  parallel_for(config.poi_start_count, threads, [&](std::size_t i) {
    const GeoPoint start = draw(i);
    const auto start_stop = grid.nearest_stop(start, config.service_bound_m);
    if (!start_stop) {
      return;
    }
    const auto paths = router.shortest_paths(start_stop->first, target_stops,
                                             policy);
    AccessSample& out = samples[i];
    for (std::size_t t = 0; t < targets.size(); ++t) {
      if (!paths[t].reachable) {
        continue;
      }
      const double walk_m = start_stop->second + targets[t].walk_m;
      const double time_min = walk_m / config.walking_speed_m_per_min +
                              paths[t].total_time_sec / 60.0;
      const double length_km = (walk_m + paths[t].total_length_m) / 1000.0;
      if (!out.usable || time_min < out.time_min) {
        out.usable = true;
        out.time_min = time_min;
        out.length_km = length_km;
      }
    }
  });

  std::vector<double> times, lengths;
  std::size_t without_access = 0;
  for (const AccessSample& s : samples) {
    if (!s.usable) {
      ++without_access;
      continue;
    }
    times.push_back(s.time_min);
    lengths.push_back(s.length_km);
  }
  const Stats time_stats = summarize(times);
  const Stats length_stats = summarize(lengths);
  AccessResult result;
  result.mean_access_time_min = time_stats.mean;
  result.stddev_access_time_min = time_stats.stddev;
  result.mean_access_distance_km = length_stats.mean;
  result.stddev_access_distance_km = length_stats.stddev;
  result.samples_used = times.size();
  result.starts_without_access = without_access;
  result.config_echo = config;
  return result;
}

}  // namespace transit
