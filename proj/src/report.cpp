#include "transit/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>

#include <nlohmann/json.hpp>

#include "csv.hpp"

namespace transit {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

constexpr int kTableSignificantDigits = 4;

std::string format_sig(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", kTableSignificantDigits, v);
  return buf;
}

std::string policy_name(BoardWaitPolicy policy) {
  return policy == BoardWaitPolicy::kHalfHeadway ? "half-headway" : "zero";
}

BoardWaitPolicy policy_from_name(const std::string& name) {
  if (name == "half-headway") {
    return BoardWaitPolicy::kHalfHeadway;
  }
  if (name == "zero") {
    return BoardWaitPolicy::kZero;
  }
  throw TransitError(ErrorKind::SchemaViolation,
                     "unknown board wait policy \"" + name + "\"");
}

ordered_json sample_config_json(const SampleConfig& c) {
  ordered_json j;
  j["sample_count"] = c.sample_count;
  j["walk_threshold_m"] = c.walk_threshold_m;
  j["service_bound_m"] = c.service_bound_m;
  j["poi_start_count"] = c.poi_start_count;
  j["seed"] = c.seed;
  j["walking_speed_m_per_min"] = c.walking_speed_m_per_min;
  return j;
}

SampleConfig sample_config_from_json(const json& j) {
  SampleConfig c;
  c.sample_count = j.at("sample_count").get<std::size_t>();
  c.walk_threshold_m = j.at("walk_threshold_m").get<double>();
  c.service_bound_m = j.at("service_bound_m").get<double>();
  c.poi_start_count = j.at("poi_start_count").get<std::size_t>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.walking_speed_m_per_min = j.at("walking_speed_m_per_min").get<double>();
  return c;
}

ordered_json structural_json(const StructuralMetrics& m) {
  ordered_json j;
  j["total_length_km"] = m.total_length_km;
  j["total_travel_time_h"] = m.total_travel_time_h;
  j["mean_speed_kmh"] = m.mean_speed_kmh;
  j["stop_count"] = m.stop_count;
  j["route_count"] = m.route_count;
  j["connected_pair_count"] = m.connected_pair_count;
  j["component_count"] = m.component_count;
  j["bridge_count"] = m.bridge_count;
  j["avg_shortest_path_length"] =
      m.avg_shortest_path_length ? json(*m.avg_shortest_path_length)
                                 : json(nullptr);
  j["avg_clustering_coefficient"] =
      m.avg_clustering_coefficient ? json(*m.avg_clustering_coefficient)
                                   : json(nullptr);
  return j;
}

StructuralMetrics structural_from_json(const json& j) {
  StructuralMetrics m;
  m.total_length_km = j.at("total_length_km").get<double>();
  m.total_travel_time_h = j.at("total_travel_time_h").get<double>();
  m.mean_speed_kmh = j.at("mean_speed_kmh").get<double>();
  m.stop_count = j.at("stop_count").get<std::size_t>();
  m.route_count = j.at("route_count").get<std::size_t>();
  m.connected_pair_count = j.at("connected_pair_count").get<std::size_t>();
  m.component_count = j.at("component_count").get<std::size_t>();
  m.bridge_count = j.at("bridge_count").get<std::size_t>();
  if (!j.at("avg_shortest_path_length").is_null()) {
    m.avg_shortest_path_length =
        j.at("avg_shortest_path_length").get<double>();
  }
  if (!j.at("avg_clustering_coefficient").is_null()) {
    m.avg_clustering_coefficient =
        j.at("avg_clustering_coefficient").get<double>();
  }
  return m;
}

ordered_json coverage_json(const CoverageResult& c) {
  ordered_json j;
  j["mean_stops_within_threshold"] = c.mean_stops_within_threshold;
  j["stddev_stops_within_threshold"] = c.stddev_stops_within_threshold;
  j["mean_distance_to_closest_stop_m"] = c.mean_distance_to_closest_stop_m;
  j["stddev_distance_to_closest_stop_m"] =
      c.stddev_distance_to_closest_stop_m;
  j["samples_used"] = c.samples_used;
  return j;
}

CoverageResult coverage_from_json(const json& j, const SampleConfig& config) {
  CoverageResult c;
  c.mean_stops_within_threshold =
      j.at("mean_stops_within_threshold").get<double>();
  c.stddev_stops_within_threshold =
      j.at("stddev_stops_within_threshold").get<double>();
  c.mean_distance_to_closest_stop_m =
      j.at("mean_distance_to_closest_stop_m").get<double>();
  c.stddev_distance_to_closest_stop_m =
      j.at("stddev_distance_to_closest_stop_m").get<double>();
  c.samples_used = j.at("samples_used").get<std::size_t>();
  c.config_echo = config;
  return c;
}

ordered_json trips_json(const TripSummary& t) {
  ordered_json j;
  j["mean_trip_time_min"] = t.mean_trip_time_min;
  j["mean_trip_length_km"] = t.mean_trip_length_km;
  j["mean_transfers"] = t.mean_transfers;
  j["mean_straight_distance_km"] = t.mean_straight_distance_km;
  j["trip_time_per_straight_km_min"] = t.trip_time_per_straight_km_min;
  j["transfers_per_straight_km"] = t.transfers_per_straight_km;
  j["trip_length_ratio"] = t.trip_length_ratio;
  j["stddev_trip_time_min"] = t.stddev_trip_time_min;
  j["stddev_trip_length_km"] = t.stddev_trip_length_km;
  j["stddev_transfers"] = t.stddev_transfers;
  j["stddev_straight_distance_km"] = t.stddev_straight_distance_km;
  j["samples_used"] = t.samples_used;
  j["unreachable_pairs"] = t.unreachable_pairs;
  return j;
}

TripSummary trips_from_json(const json& j, const SampleConfig& config) {
  TripSummary t = make_trip_summary(
      j.at("mean_trip_time_min").get<double>(),
      j.at("mean_trip_length_km").get<double>(),
      j.at("mean_transfers").get<double>(),
      j.at("mean_straight_distance_km").get<double>());
  t.trip_time_per_straight_km_min =
      j.at("trip_time_per_straight_km_min").get<double>();
  t.transfers_per_straight_km = j.at("transfers_per_straight_km").get<double>();
  t.trip_length_ratio = j.at("trip_length_ratio").get<double>();
  t.stddev_trip_time_min = j.at("stddev_trip_time_min").get<double>();
  t.stddev_trip_length_km = j.at("stddev_trip_length_km").get<double>();
  t.stddev_transfers = j.at("stddev_transfers").get<double>();
  t.stddev_straight_distance_km =
      j.at("stddev_straight_distance_km").get<double>();
  t.samples_used = j.at("samples_used").get<std::size_t>();
  t.unreachable_pairs = j.at("unreachable_pairs").get<std::size_t>();
  t.config_echo = config;
  return t;
}

ordered_json access_json(const AccessResult& a) {
  ordered_json j;
  j["mean_access_time_min"] = a.mean_access_time_min;
  j["stddev_access_time_min"] = a.stddev_access_time_min;
  j["mean_access_distance_km"] = a.mean_access_distance_km;
  j["stddev_access_distance_km"] = a.stddev_access_distance_km;
  j["samples_used"] = a.samples_used;
  j["starts_without_access"] = a.starts_without_access;
  return j;
}

AccessResult access_from_json(const json& j, const SampleConfig& config) {
  AccessResult a;
  a.mean_access_time_min = j.at("mean_access_time_min").get<double>();
  a.stddev_access_time_min = j.at("stddev_access_time_min").get<double>();
  a.mean_access_distance_km = j.at("mean_access_distance_km").get<double>();
  a.stddev_access_distance_km =
      j.at("stddev_access_distance_km").get<double>();
  a.samples_used = j.at("samples_used").get<std::size_t>();
  a.starts_without_access = j.at("starts_without_access").get<std::size_t>();
  a.config_echo = config;
  return a;
}

// Flat (name, value) rows used by the CSV renderer; counts keep their
// integer spelling.
std::vector<std::pair<std::string, std::string>> report_rows(
    const CityReport& r) {
  std::vector<std::pair<std::string, std::string>> rows;
  auto num = [&](const std::string& name, double v) {
    rows.emplace_back(name, format_sig(v));
  };
  auto count = [&](const std::string& name, std::size_t v) {
    rows.emplace_back(name, std::to_string(v));
  };

  num("structural.total_length_km", r.structural.total_length_km);
  num("structural.total_travel_time_h", r.structural.total_travel_time_h);
  num("structural.mean_speed_kmh", r.structural.mean_speed_kmh);
  count("structural.stop_count", r.structural.stop_count);
  count("structural.route_count", r.structural.route_count);
  count("structural.connected_pair_count",
        r.structural.connected_pair_count);
  count("structural.component_count", r.structural.component_count);
  count("structural.bridge_count", r.structural.bridge_count);
  if (r.structural.avg_shortest_path_length) {
    num("structural.avg_shortest_path_length",
        *r.structural.avg_shortest_path_length);
  }
  if (r.structural.avg_clustering_coefficient) {
    num("structural.avg_clustering_coefficient",
        *r.structural.avg_clustering_coefficient);
  }
  for (const auto& [prefix, trips] :
       {std::make_pair(std::string("area_trips"), &r.area_trips),
        std::make_pair(std::string("population_trips"),
                       &r.population_trips)}) {
    num(prefix + ".mean_trip_time_min", trips->mean_trip_time_min);
    num(prefix + ".trip_time_per_straight_km_min",
        trips->trip_time_per_straight_km_min);
    num(prefix + ".mean_trip_length_km", trips->mean_trip_length_km);
    num(prefix + ".mean_transfers", trips->mean_transfers);
    num(prefix + ".transfers_per_straight_km",
        trips->transfers_per_straight_km);
    num(prefix + ".mean_straight_distance_km",
        trips->mean_straight_distance_km);
    num(prefix + ".trip_length_ratio", trips->trip_length_ratio);
    count(prefix + ".samples_used", trips->samples_used);
    count(prefix + ".unreachable_pairs", trips->unreachable_pairs);
  }
  for (const auto& [prefix, cov] :
       {std::make_pair(std::string("area_coverage"), &r.area_coverage),
        std::make_pair(std::string("population_coverage"),
                       &r.population_coverage)}) {
    num(prefix + ".mean_stops_within_threshold",
        cov->mean_stops_within_threshold);
    num(prefix + ".mean_distance_to_closest_stop_m",
        cov->mean_distance_to_closest_stop_m);
    count(prefix + ".samples_used", cov->samples_used);
  }
  num("per_connection.mean_connection_time_sec",
      r.per_connection.mean_connection_time_sec);
  num("per_connection.mean_connection_length_m",
      r.per_connection.mean_connection_length_m);
  num("per_connection.mean_wait_time_min",
      r.per_connection.mean_wait_time_min);
  num("per_connection.wait_time_stddev_min",
      r.per_connection.wait_time_stddev_min);
  if (r.poi_access) {
    num("poi_access.mean_access_time_min",
        r.poi_access->mean_access_time_min);
    num("poi_access.mean_access_distance_km",
        r.poi_access->mean_access_distance_km);
    count("poi_access.samples_used", r.poi_access->samples_used);
  }
  count("config.sample_count", r.config_echo.sampling.sample_count);
  num("config.walk_threshold_m", r.config_echo.sampling.walk_threshold_m);
  num("config.service_bound_m", r.config_echo.sampling.service_bound_m);
  count("config.poi_start_count", r.config_echo.sampling.poi_start_count);
  count("config.seed", r.config_echo.sampling.seed);
  num("config.walking_speed_m_per_min",
      r.config_echo.sampling.walking_speed_m_per_min);
  num("config.merge_threshold_m", r.config_echo.merge_threshold_m);
  num("config.transfer_penalty_sec",
      r.config_echo.routing.transfer_penalty_sec);
  rows.emplace_back("config.board_wait_policy",
                    policy_name(r.config_echo.routing.board_wait));
  return rows;
}

struct MetricSpec {
  std::string name;
  MetricDirection direction;
  std::function<std::optional<double>(const CityReport&)> extract;
};

const std::vector<MetricSpec>& comparison_metrics() {
  static const std::vector<MetricSpec> specs = [] {
    std::vector<MetricSpec> s;
    auto add = [&](std::string name, MetricDirection d,
                   std::function<std::optional<double>(const CityReport&)>
                       f) { s.push_back({std::move(name), d, std::move(f)}); };
    using D = MetricDirection;
    add("structural.total_length_km", D::kHigherIsBetter,
        [](const CityReport& r) { return r.structural.total_length_km; });
    add("structural.total_travel_time_h", D::kLowerIsBetter,
        [](const CityReport& r) { return r.structural.total_travel_time_h; });
    add("structural.mean_speed_kmh", D::kHigherIsBetter,
        [](const CityReport& r) { return r.structural.mean_speed_kmh; });
    add("structural.stop_count", D::kHigherIsBetter, [](const CityReport& r) {
      return static_cast<double>(r.structural.stop_count);
    });
    add("structural.route_count", D::kHigherIsBetter,
        [](const CityReport& r) {
          return static_cast<double>(r.structural.route_count);
        });
    add("structural.connected_pair_count", D::kHigherIsBetter,
        [](const CityReport& r) {
          return static_cast<double>(r.structural.connected_pair_count);
        });
    add("structural.component_count", D::kLowerIsBetter,
        [](const CityReport& r) {
          return static_cast<double>(r.structural.component_count);
        });
    add("structural.bridge_count", D::kLowerIsBetter,
        [](const CityReport& r) {
          return static_cast<double>(r.structural.bridge_count);
        });
    add("structural.avg_shortest_path_length", D::kLowerIsBetter,
        [](const CityReport& r) { return r.structural.avg_shortest_path_length; });
    add("structural.avg_clustering_coefficient", D::kHigherIsBetter,
        [](const CityReport& r) {
          return r.structural.avg_clustering_coefficient;
        });
    for (const auto& [prefix, pick] :
         {std::make_pair(std::string("area_trips"),
                         +[](const CityReport& r) { return &r.area_trips; }),
          std::make_pair(std::string("population_trips"),
                         +[](const CityReport& r) {
                           return &r.population_trips;
                         })}) {
      auto p = pick;
      add(prefix + ".mean_trip_time_min", D::kLowerIsBetter,
          [p](const CityReport& r) { return p(r)->mean_trip_time_min; });
      add(prefix + ".trip_time_per_straight_km_min", D::kLowerIsBetter,
          [p](const CityReport& r) {
            return p(r)->trip_time_per_straight_km_min;
          });
      add(prefix + ".mean_trip_length_km", D::kLowerIsBetter,
          [p](const CityReport& r) { return p(r)->mean_trip_length_km; });
      add(prefix + ".mean_transfers", D::kLowerIsBetter,
          [p](const CityReport& r) { return p(r)->mean_transfers; });
      add(prefix + ".transfers_per_straight_km", D::kLowerIsBetter,
          [p](const CityReport& r) { return p(r)->transfers_per_straight_km; });
      add(prefix + ".trip_length_ratio", D::kLowerIsBetter,
          [p](const CityReport& r) { return p(r)->trip_length_ratio; });
    }
    for (const auto& [prefix, pick] :
         {std::make_pair(std::string("area_coverage"),
                         +[](const CityReport& r) { return &r.area_coverage; }),
          std::make_pair(std::string("population_coverage"),
                         +[](const CityReport& r) {
                           return &r.population_coverage;
                         })}) {
      auto p = pick;
      add(prefix + ".mean_stops_within_threshold", D::kHigherIsBetter,
          [p](const CityReport& r) {
            return p(r)->mean_stops_within_threshold;
          });
      add(prefix + ".mean_distance_to_closest_stop_m", D::kLowerIsBetter,
          [p](const CityReport& r) {
            return p(r)->mean_distance_to_closest_stop_m;
          });
    }
    add("per_connection.mean_connection_time_sec", D::kLowerIsBetter,
        [](const CityReport& r) {
          return r.per_connection.mean_connection_time_sec;
        });
    add("per_connection.mean_connection_length_m", D::kHigherIsBetter,
        [](const CityReport& r) {
          return r.per_connection.mean_connection_length_m;
        });
    add("per_connection.mean_wait_time_min", D::kLowerIsBetter,
        [](const CityReport& r) { return r.per_connection.mean_wait_time_min; });
    add("per_connection.wait_time_stddev_min", D::kLowerIsBetter,
        [](const CityReport& r) {
          return r.per_connection.wait_time_stddev_min;
        });
    add("poi_access.mean_access_time_min", D::kLowerIsBetter,
        [](const CityReport& r) -> std::optional<double> {
          if (!r.poi_access) return std::nullopt;
          return r.poi_access->mean_access_time_min;
        });
    add("poi_access.mean_access_distance_km", D::kLowerIsBetter,
        [](const CityReport& r) -> std::optional<double> {
          if (!r.poi_access) return std::nullopt;
          return r.poi_access->mean_access_distance_km;
        });
    return s;
  }();
  return specs;
}

void append_config_mismatches(const ReportConfig& a, const ReportConfig& b,
                              std::vector<std::string>& fields) {
  if (a.sampling.sample_count != b.sampling.sample_count) {
    fields.push_back("sample_count");
  }
  if (a.sampling.walk_threshold_m != b.sampling.walk_threshold_m) {
    fields.push_back("walk_threshold_m");
  }
  if (a.sampling.service_bound_m != b.sampling.service_bound_m) {
    fields.push_back("service_bound_m");
  }
  if (a.sampling.poi_start_count != b.sampling.poi_start_count) {
    fields.push_back("poi_start_count");
  }
  if (a.sampling.walking_speed_m_per_min !=
      b.sampling.walking_speed_m_per_min) {
    fields.push_back("walking_speed_m_per_min");
  }
  if (a.merge_threshold_m != b.merge_threshold_m) {
    fields.push_back("merge_threshold_m");
  }
  if (a.routing.transfer_penalty_sec != b.routing.transfer_penalty_sec) {
    fields.push_back("transfer_penalty_sec");
  }
  if (a.routing.board_wait != b.routing.board_wait) {
    fields.push_back("board_wait_policy");
  }
}

}  // namespace

ConnectionSummary summarize_connections(const TransitNetwork& network) {
  ConnectionSummary s;
  if (!network.connections.empty()) {
    double time = 0.0;
    double length = 0.0;
    for (const Connection& c : network.connections) {
      time += c.travel_time_sec;
      length += c.road_distance_m ? *c.road_distance_m
                                  : c.straight_distance_m;
    }
    const double n = static_cast<double>(network.connections.size());
    s.mean_connection_time_sec = time / n;
    s.mean_connection_length_m = length / n;
  }
  if (!network.routes.empty()) {
    // Waits over the route population: expected boarding wait is half the
    // headway, unweighted across routes.
    double sum = 0.0;
    for (const auto& [id, info] : network.routes) {
      sum += info.headway_min / 2.0;
    }
    const double n = static_cast<double>(network.routes.size());
    s.mean_wait_time_min = sum / n;
    double ss = 0.0;
    for (const auto& [id, info] : network.routes) {
      const double w = info.headway_min / 2.0;
      ss += (w - s.mean_wait_time_min) * (w - s.mean_wait_time_min);
    }
    s.wait_time_stddev_min = std::sqrt(ss / n);
  }
  return s;
}

CityReport build_city_report(const TransitNetwork& network,
                             const PopulationMap& popmap,
                             const std::vector<PointOfInterest>& pois,
                             const ReportConfig& config, unsigned threads) {
  CityReport report;
  report.city = network.city_name;
  report.config_echo = config;
  report.structural = structural_metrics(network);
  report.area_coverage = area_coverage(network, config.sampling, threads);
  report.population_coverage =
      population_coverage(network, popmap, config.sampling, threads);
  report.area_trips = trip_metrics(network, config.sampling,
                                   PointSource::kArea, config.routing,
                                   nullptr, threads);
  report.population_trips = trip_metrics(network, config.sampling,
                                         PointSource::kPopulation,
                                         config.routing, &popmap, threads);
  report.per_connection = summarize_connections(network);
  if (!pois.empty()) {
    report.poi_access = poi_access(network, pois, config.sampling,
                                   PointSource::kPopulation, config.routing,
                                   &popmap, threads);
  }
  return report;
}

ComparisonTable compare_cities(const std::vector<CityReport>& reports) {
  if (reports.size() < 2) {
    throw TransitError(ErrorKind::InvalidArgument,
                       "compare_cities requires at least 2 reports");
  }
  std::vector<std::string> mismatched;
  for (std::size_t i = 1; i < reports.size(); ++i) {
    append_config_mismatches(reports[0].config_echo, reports[i].config_echo,
                             mismatched);
  }
  if (!mismatched.empty()) {
    std::sort(mismatched.begin(), mismatched.end());
    mismatched.erase(std::unique(mismatched.begin(), mismatched.end()),
                     mismatched.end());
    std::string fields;
    for (const std::string& f : mismatched) {
      if (!fields.empty()) fields += ", ";
      fields += f;
    }
    throw TransitError(ErrorKind::IncomparableReports,
                       "reports were produced with differing configs: " +
                           fields);
  }

  ComparisonTable table;
  for (const CityReport& r : reports) {
    table.cities.push_back(r.city);
  }
  for (const MetricSpec& spec : comparison_metrics()) {
    ComparisonRow row;
    row.metric = spec.name;
    row.direction = spec.direction;
    bool complete = true;
    for (const CityReport& r : reports) {
      const auto v = spec.extract(r);
      if (!v) {
        complete = false;
        break;
      }
      row.values.push_back(*v);
    }
    if (!complete) {
      continue;  // metric absent in at least one report
    }
    double best = row.values.front();
    for (double v : row.values) {
      best = spec.direction == MetricDirection::kHigherIsBetter
                 ? std::max(best, v)
                 : std::min(best, v);
    }
    for (std::size_t i = 0; i < row.values.size(); ++i) {
      if (row.values[i] == best) {
        row.best_cities.push_back(table.cities[i]);
      }
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::string export_geojson(const TransitNetwork& network,
                           const GeoJsonOptions& options) {
  std::set<std::pair<std::string, std::string>> bridge_pairs;
  if (options.include_bridges) {
    for (const Connection& c : find_bridges(network)) {
      bridge_pairs.insert({c.from_stop, c.to_stop});
    }
  }

  ordered_json doc;
  doc["type"] = "FeatureCollection";
  doc["features"] = ordered_json::array();
  for (const auto& [id, stop] : network.stops) {
    ordered_json f;
    f["type"] = "Feature";
    f["geometry"]["type"] = "Point";
    f["geometry"]["coordinates"] = {stop.location.lon, stop.location.lat};
    f["properties"]["id"] = stop.id;
    f["properties"]["name"] = stop.name;
    f["properties"]["routes"] =
        std::vector<std::string>(stop.routes.begin(), stop.routes.end());
    f["properties"]["merged_from"] = std::vector<std::string>(
        stop.merged_from.begin(), stop.merged_from.end());
    doc["features"].push_back(std::move(f));
  }
  for (const Connection& c : network.connections) {
    const Stop& a = network.stops.at(c.from_stop);
    const Stop& b = network.stops.at(c.to_stop);
    ordered_json f;
    f["type"] = "Feature";
    f["geometry"]["type"] = "LineString";
    f["geometry"]["coordinates"] = {
        {a.location.lon, a.location.lat},
        {b.location.lon, b.location.lat},
    };
    f["properties"]["from"] = c.from_stop;
    f["properties"]["to"] = c.to_stop;
    f["properties"]["routes"] = c.routes;
    f["properties"]["straight_distance_m"] = c.straight_distance_m;
    f["properties"]["travel_time_sec"] = c.travel_time_sec;
    if (c.road_distance_m) {
      f["properties"]["road_distance_m"] = *c.road_distance_m;
    }
    if (options.include_bridges) {
      f["properties"]["bridge"] =
          bridge_pairs.contains({c.from_stop, c.to_stop});
    }
    doc["features"].push_back(std::move(f));
  }
  return doc.dump(2) + "\n";
}

std::string render_report(const CityReport& report, TableFormat format) {
  if (format == TableFormat::kCsv) {
    std::string body = csv::join_row({"metric", "value_4sig"});
    body += csv::join_row({"city", report.city});
    for (const auto& [name, value] : report_rows(report)) {
      body += csv::join_row({name, value});
    }
    return body;
  }

  ordered_json doc;
  doc["schema_version"] = 1;
  doc["number_format"] = {
      {"table_significant_digits", kTableSignificantDigits},
      {"json", "full precision"},
  };
  doc["city"] = report.city;
  doc["structural"] = structural_json(report.structural);
  doc["area_trips"] = trips_json(report.area_trips);
  doc["population_trips"] = trips_json(report.population_trips);
  doc["area_coverage"] = coverage_json(report.area_coverage);
  doc["population_coverage"] = coverage_json(report.population_coverage);
  ordered_json per_connection;
  per_connection["mean_connection_time_sec"] =
      report.per_connection.mean_connection_time_sec;
  per_connection["mean_connection_length_m"] =
      report.per_connection.mean_connection_length_m;
  per_connection["mean_wait_time_min"] =
      report.per_connection.mean_wait_time_min;
  per_connection["wait_time_stddev_min"] =
      report.per_connection.wait_time_stddev_min;
  doc["per_connection"] = std::move(per_connection);
  if (report.poi_access) {
    doc["poi_access"] = access_json(*report.poi_access);
  }
  ordered_json config;
  config["sampling"] = sample_config_json(report.config_echo.sampling);
  config["merge_threshold_m"] = report.config_echo.merge_threshold_m;
  config["routing"] = {
      {"transfer_penalty_sec", report.config_echo.routing.transfer_penalty_sec},
      {"board_wait_policy", policy_name(report.config_echo.routing.board_wait)},
  };
  doc["config"] = std::move(config);
  return doc.dump(2) + "\n";
}

CityReport parse_report_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw TransitError(ErrorKind::MalformedSyntax,
                       "report: " + std::string(e.what()));
  }
  if (!doc.is_object() || doc.value("schema_version", 0) != 1) {
    throw TransitError(ErrorKind::SchemaViolation,
                       "report: expected schema_version 1");
  }
  CityReport r;
  r.city = doc.at("city").get<std::string>();
  const json& config = doc.at("config");
  r.config_echo.sampling = sample_config_from_json(config.at("sampling"));
  r.config_echo.merge_threshold_m =
      config.at("merge_threshold_m").get<double>();
  r.config_echo.routing.transfer_penalty_sec =
      config.at("routing").at("transfer_penalty_sec").get<double>();
  r.config_echo.routing.board_wait = policy_from_name(
      config.at("routing").at("board_wait_policy").get<std::string>());
  r.structural = structural_from_json(doc.at("structural"));
  r.area_trips = trips_from_json(doc.at("area_trips"),
                                 r.config_echo.sampling);
  r.population_trips = trips_from_json(doc.at("population_trips"),
                                       r.config_echo.sampling);
  r.area_coverage = coverage_from_json(doc.at("area_coverage"),
                                       r.config_echo.sampling);
  r.population_coverage = coverage_from_json(doc.at("population_coverage"),
                                             r.config_echo.sampling);
  const json& pc = doc.at("per_connection");
  r.per_connection.mean_connection_time_sec =
      pc.at("mean_connection_time_sec").get<double>();
  r.per_connection.mean_connection_length_m =
      pc.at("mean_connection_length_m").get<double>();
  r.per_connection.mean_wait_time_min =
      pc.at("mean_wait_time_min").get<double>();
  r.per_connection.wait_time_stddev_min =
      pc.at("wait_time_stddev_min").get<double>();
  if (doc.contains("poi_access")) {
    r.poi_access = access_from_json(doc.at("poi_access"),
                                    r.config_echo.sampling);
  }
  return r;
}

namespace {

std::string rows_to_csv(
    const std::vector<std::pair<std::string, std::string>>& rows) {
  std::string out = csv::join_row({"metric", "value_4sig"});
  for (const auto& [name, value] : rows) {
    out += csv::join_row({name, value});
  }
  return out;
}

void coverage_rows(const std::string& prefix, const CoverageResult& c,
                   std::vector<std::pair<std::string, std::string>>& rows) {
  rows.emplace_back(prefix + ".mean_stops_within_threshold",
                    format_sig(c.mean_stops_within_threshold));
  rows.emplace_back(prefix + ".stddev_stops_within_threshold",
                    format_sig(c.stddev_stops_within_threshold));
  rows.emplace_back(prefix + ".mean_distance_to_closest_stop_m",
                    format_sig(c.mean_distance_to_closest_stop_m));
  rows.emplace_back(prefix + ".stddev_distance_to_closest_stop_m",
                    format_sig(c.stddev_distance_to_closest_stop_m));
  rows.emplace_back(prefix + ".samples_used",
                    std::to_string(c.samples_used));
}

void trips_rows(const std::string& prefix, const TripSummary& t,
                std::vector<std::pair<std::string, std::string>>& rows) {
  rows.emplace_back(prefix + ".mean_trip_time_min",
                    format_sig(t.mean_trip_time_min));
  rows.emplace_back(prefix + ".trip_time_per_straight_km_min",
                    format_sig(t.trip_time_per_straight_km_min));
  rows.emplace_back(prefix + ".mean_trip_length_km",
                    format_sig(t.mean_trip_length_km));
  rows.emplace_back(prefix + ".mean_transfers", format_sig(t.mean_transfers));
  rows.emplace_back(prefix + ".transfers_per_straight_km",
                    format_sig(t.transfers_per_straight_km));
  rows.emplace_back(prefix + ".mean_straight_distance_km",
                    format_sig(t.mean_straight_distance_km));
  rows.emplace_back(prefix + ".trip_length_ratio",
                    format_sig(t.trip_length_ratio));
  rows.emplace_back(prefix + ".samples_used", std::to_string(t.samples_used));
  rows.emplace_back(prefix + ".unreachable_pairs",
                    std::to_string(t.unreachable_pairs));
}

}  // namespace

std::string render_structural(const StructuralMetrics& m,
                              TableFormat format) {
  if (format == TableFormat::kJson) {
    ordered_json doc;
    doc["schema_version"] = 1;
    doc["structural"] = structural_json(m);
    return doc.dump(2) + "\n";
  }
  std::vector<std::pair<std::string, std::string>> rows;
  rows.emplace_back("total_length_km", format_sig(m.total_length_km));
  rows.emplace_back("total_travel_time_h", format_sig(m.total_travel_time_h));
  rows.emplace_back("mean_speed_kmh", format_sig(m.mean_speed_kmh));
  rows.emplace_back("stop_count", std::to_string(m.stop_count));
  rows.emplace_back("route_count", std::to_string(m.route_count));
  rows.emplace_back("connected_pair_count",
                    std::to_string(m.connected_pair_count));
  rows.emplace_back("component_count", std::to_string(m.component_count));
  rows.emplace_back("bridge_count", std::to_string(m.bridge_count));
  if (m.avg_shortest_path_length) {
    rows.emplace_back("avg_shortest_path_length",
                      format_sig(*m.avg_shortest_path_length));
  }
  if (m.avg_clustering_coefficient) {
    rows.emplace_back("avg_clustering_coefficient",
                      format_sig(*m.avg_clustering_coefficient));
  }
  return rows_to_csv(rows);
}

std::string render_coverage(const CoverageResult& area,
                            const CoverageResult* population,
                            TableFormat format) {
  if (format == TableFormat::kJson) {
    ordered_json doc;
    doc["schema_version"] = 1;
    doc["area_coverage"] = coverage_json(area);
    if (population != nullptr) {
      doc["population_coverage"] = coverage_json(*population);
    }
    return doc.dump(2) + "\n";
  }
  std::vector<std::pair<std::string, std::string>> rows;
  coverage_rows("area_coverage", area, rows);
  if (population != nullptr) {
    coverage_rows("population_coverage", *population, rows);
  }
  return rows_to_csv(rows);
}

std::string render_trips(const TripSummary& area,
                         const TripSummary* population, TableFormat format) {
  if (format == TableFormat::kJson) {
    ordered_json doc;
    doc["schema_version"] = 1;
    doc["area_trips"] = trips_json(area);
    if (population != nullptr) {
      doc["population_trips"] = trips_json(*population);
    }
    return doc.dump(2) + "\n";
  }
  std::vector<std::pair<std::string, std::string>> rows;
  trips_rows("area_trips", area, rows);
  if (population != nullptr) {
    trips_rows("population_trips", *population, rows);
  }
  return rows_to_csv(rows);
}

std::string render_access(const AccessResult& access, TableFormat format) {
  if (format == TableFormat::kJson) {
    ordered_json doc;
    doc["schema_version"] = 1;
    doc["poi_access"] = access_json(access);
    return doc.dump(2) + "\n";
  }
  std::vector<std::pair<std::string, std::string>> rows;
  rows.emplace_back("mean_access_time_min",
                    format_sig(access.mean_access_time_min));
  rows.emplace_back("stddev_access_time_min",
                    format_sig(access.stddev_access_time_min));
  rows.emplace_back("mean_access_distance_km",
                    format_sig(access.mean_access_distance_km));
  rows.emplace_back("stddev_access_distance_km",
                    format_sig(access.stddev_access_distance_km));
  rows.emplace_back("samples_used", std::to_string(access.samples_used));
  rows.emplace_back("starts_without_access",
                    std::to_string(access.starts_without_access));
  return rows_to_csv(rows);
}

std::string render_path(const PathResult& path, TableFormat format) {
  if (format == TableFormat::kJson) {
    ordered_json doc;
    doc["schema_version"] = 1;
    doc["reachable"] = path.reachable;
    doc["total_time_sec"] = path.total_time_sec;
    doc["total_length_m"] = path.total_length_m;
    doc["transfers"] = path.transfers;
    doc["chosen_routes"] = path.chosen_routes;
    doc["edges"] = ordered_json::array();
    for (const Connection& c : path.edges) {
      ordered_json e;
      e["from"] = c.from_stop;
      e["to"] = c.to_stop;
      e["routes"] = c.routes;
      e["straight_distance_m"] = c.straight_distance_m;
      e["travel_time_sec"] = c.travel_time_sec;
      doc["edges"].push_back(std::move(e));
    }
    return doc.dump(2) + "\n";
  }
  std::string out = csv::join_row(
      {"from", "to", "routes", "straight_distance_m", "travel_time_sec"});
  for (const Connection& c : path.edges) {
    std::string routes;
    for (const std::string& r : c.routes) {
      if (!routes.empty()) routes += ";";
      routes += r;
    }
    out += csv::join_row({c.from_stop, c.to_stop, routes,
                          format_sig(c.straight_distance_m),
                          format_sig(c.travel_time_sec)});
  }
  return out;
}

std::string render_bridges(const std::vector<Connection>& bridges,
                           TableFormat format) {
  if (format == TableFormat::kJson) {
    ordered_json doc;
    doc["schema_version"] = 1;
    doc["bridges"] = ordered_json::array();
    for (const Connection& c : bridges) {
      ordered_json e;
      e["from"] = c.from_stop;
      e["to"] = c.to_stop;
      e["routes"] = c.routes;
      e["straight_distance_m"] = c.straight_distance_m;
      doc["bridges"].push_back(std::move(e));
    }
    return doc.dump(2) + "\n";
  }
  std::string out = csv::join_row(
      {"from", "to", "routes", "straight_distance_m"});
  for (const Connection& c : bridges) {
    std::string routes;
    for (const std::string& r : c.routes) {
      if (!routes.empty()) routes += ";";
      routes += r;
    }
    out += csv::join_row({c.from_stop, c.to_stop, routes,
                          format_sig(c.straight_distance_m)});
  }
  return out;
}

std::string render_comparison(const ComparisonTable& table,
                              TableFormat format) {
  if (format == TableFormat::kCsv) {
    std::vector<std::string> header{"metric", "direction"};
    for (const std::string& city : table.cities) {
      header.push_back(city + "_4sig");
    }
    header.push_back("best");
    std::string out = csv::join_row(header);
    for (const ComparisonRow& row : table.rows) {
      std::vector<std::string> fields{
          row.metric,
          row.direction == MetricDirection::kHigherIsBetter ? "max" : "min"};
      for (double v : row.values) {
        fields.push_back(format_sig(v));
      }
      std::string best;
      for (const std::string& city : row.best_cities) {
        if (!best.empty()) best += ";";
        best += city;
      }
      fields.push_back(best);
      out += csv::join_row(fields);
    }
    return out;
  }

  ordered_json doc;
  doc["schema_version"] = 1;
  doc["number_format"] = {
      {"table_significant_digits", kTableSignificantDigits},
      {"json", "full precision"},
  };
  doc["cities"] = table.cities;
  doc["rows"] = ordered_json::array();
  for (const ComparisonRow& row : table.rows) {
    ordered_json r;
    r["metric"] = row.metric;
    r["direction"] =
        row.direction == MetricDirection::kHigherIsBetter ? "max" : "min";
    r["values"] = row.values;
    r["best"] = row.best_cities;
    doc["rows"].push_back(std::move(r));
  }
  return doc.dump(2) + "\n";
}

}  // namespace transit
