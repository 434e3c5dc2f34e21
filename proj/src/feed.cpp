#include "transit/feed.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "csv.hpp"

namespace transit {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw TransitError(ErrorKind::MissingFile, "cannot open file: " + path);
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void reject_unknown_keys(const json& obj, const std::set<std::string>& known,
                         const std::string& context) {
  for (const auto& [key, value] : obj.items()) {
    if (!known.contains(key)) {
      throw TransitError(ErrorKind::SchemaViolation,
                         context + ": unknown key \"" + key + "\"");
    }
  }
}

const json& require_key(const json& obj, const char* key,
                        const std::string& context) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw TransitError(ErrorKind::SchemaViolation,
                       context + ": missing key \"" + key + "\"");
  }
  return *it;
}

std::string require_string(const json& obj, const char* key,
                           const std::string& context) {
  const json& v = require_key(obj, key, context);
  if (!v.is_string()) {
    throw TransitError(ErrorKind::SchemaViolation,
                       context + ": \"" + key + "\" must be a string");
  }
  return v.get<std::string>();
}

double require_number(const json& obj, const char* key,
                      const std::string& context) {
  const json& v = require_key(obj, key, context);
  if (!v.is_number()) {
    throw TransitError(ErrorKind::SchemaViolation,
                       context + ": \"" + key + "\" must be a number");
  }
  return v.get<double>();
}

GeoPoint parse_point(double lat, double lon, const std::string& context) {
  GeoPoint p{lat, lon};
  if (!is_valid(p)) {
    throw TransitError(ErrorKind::InvalidArgument,
                       context + ": coordinates out of range (lat " +
                           std::to_string(lat) + ", lon " +
                           std::to_string(lon) + ")");
  }
  return p;
}

double parse_csv_double(const std::string& field, const std::string& context) {
  double value = 0.0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || !std::isfinite(value)) {
    throw TransitError(ErrorKind::BadRow,
                       context + ": not a number: \"" + field + "\"");
  }
  return value;
}

void check_header(const std::vector<std::string>& header,
                  const std::vector<std::string>& expected,
                  const std::string& path) {
  for (const auto& col : header) {
    if (std::find(expected.begin(), expected.end(), col) == expected.end()) {
      throw TransitError(ErrorKind::SchemaViolation,
                         path + ": unknown header column \"" + col + "\"");
    }
  }
  if (header != expected) {
    std::string want;
    for (std::size_t i = 0; i < expected.size(); ++i) {
      if (i) want += ",";
      want += expected[i];
    }
    throw TransitError(ErrorKind::SchemaViolation,
                       path + ": header must be exactly \"" + want + "\"");
  }
}

}  // namespace

RawFeed load_snapshot(const std::string& path) {
  const std::string text = read_file(path);
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw TransitError(ErrorKind::MalformedSyntax,
                       path + ": " + std::string(e.what()));
  }
  if (!doc.is_object()) {
    throw TransitError(ErrorKind::SchemaViolation,
                       path + ": top level must be an object");
  }
  reject_unknown_keys(doc, {"city", "stops", "routes"}, path);

  RawFeed feed;
  feed.city_name = require_string(doc, "city", path);

  const json& stops = require_key(doc, "stops", path);
  if (!stops.is_array()) {
    throw TransitError(ErrorKind::SchemaViolation,
                       path + ": \"stops\" must be an array");
  }
  std::set<std::string> stop_ids;
  for (std::size_t i = 0; i < stops.size(); ++i) {
    const json& s = stops[i];
    const std::string context = path + ": stops[" + std::to_string(i) + "]";
    if (!s.is_object()) {
      throw TransitError(ErrorKind::SchemaViolation,
                         context + ": must be an object");
    }
    reject_unknown_keys(s, {"id", "name", "lat", "lon", "merged_from"},
                        context);
    RawStop stop;
    stop.id = require_string(s, "id", context);
    stop.name = require_string(s, "name", context);
    stop.location = parse_point(require_number(s, "lat", context),
                                require_number(s, "lon", context), context);
    if (auto it = s.find("merged_from"); it != s.end()) {
      if (!it->is_array()) {
        throw TransitError(ErrorKind::SchemaViolation,
                           context + ": \"merged_from\" must be an array");
      }
      for (const json& m : *it) {
        if (!m.is_string()) {
          throw TransitError(
              ErrorKind::SchemaViolation,
              context + ": \"merged_from\" entries must be strings");
        }
        stop.merged_from.push_back(m.get<std::string>());
      }
    }
    if (!stop_ids.insert(stop.id).second) {
      throw TransitError(ErrorKind::DuplicateId,
                         context + ": duplicate stop id \"" + stop.id + "\"");
    }
    feed.stops.push_back(std::move(stop));
  }

  const json& routes = require_key(doc, "routes", path);
  if (!routes.is_array()) {
    throw TransitError(ErrorKind::SchemaViolation,
                       path + ": \"routes\" must be an array");
  }
  std::set<std::string> route_ids;
  for (std::size_t i = 0; i < routes.size(); ++i) {
    const json& r = routes[i];
    const std::string context = path + ": routes[" + std::to_string(i) + "]";
    if (!r.is_object()) {
      throw TransitError(ErrorKind::SchemaViolation,
                         context + ": must be an object");
    }
    reject_unknown_keys(r, {"id", "name", "headway_min", "directions"},
                        context);
    RawRoute route;
    route.id = require_string(r, "id", context);
    route.name = require_string(r, "name", context);
    route.headway_min = require_number(r, "headway_min", context);
    if (!(route.headway_min >= 0.0) || !std::isfinite(route.headway_min)) {
      throw TransitError(ErrorKind::SchemaViolation,
                         context + ": headway_min must be nonnegative");
    }
    if (!route_ids.insert(route.id).second) {
      throw TransitError(ErrorKind::DuplicateId,
                         context + ": duplicate route id \"" + route.id + "\"");
    }
    const json& directions = require_key(r, "directions", context);
    if (!directions.is_array()) {
      throw TransitError(ErrorKind::SchemaViolation,
                         context + ": \"directions\" must be an array");
    }
    for (std::size_t d = 0; d < directions.size(); ++d) {
      const json& dir = directions[d];
      const std::string dctx = context + ".directions[" + std::to_string(d) +
                               "]";
      if (!dir.is_object()) {
        throw TransitError(ErrorKind::SchemaViolation,
                           dctx + ": must be an object");
      }
      reject_unknown_keys(dir, {"stops", "leg_times_sec"}, dctx);
      RouteDirection direction;
      const json& seq = require_key(dir, "stops", dctx);
      if (!seq.is_array()) {
        throw TransitError(ErrorKind::SchemaViolation,
                           dctx + ": \"stops\" must be an array");
      }
      for (const json& sid : seq) {
        if (!sid.is_string()) {
          throw TransitError(ErrorKind::SchemaViolation,
                             dctx + ": stop ids must be strings");
        }
        const std::string id = sid.get<std::string>();
        if (!stop_ids.contains(id)) {
          throw TransitError(
              ErrorKind::DanglingReference,
              dctx + ": references unknown stop \"" + id + "\"");
        }
        direction.stops.push_back(id);
      }
      if (direction.stops.size() < 2) {
        throw TransitError(ErrorKind::ShortSequence,
                           dctx + ": sequence must have at least 2 stops");
      }
      if (auto it = dir.find("leg_times_sec"); it != dir.end()) {
        if (!it->is_array()) {
          throw TransitError(ErrorKind::SchemaViolation,
                             dctx + ": \"leg_times_sec\" must be an array");
        }
        std::vector<double> times;
        for (const json& t : *it) {
          if (!t.is_number()) {
            throw TransitError(ErrorKind::SchemaViolation,
                               dctx + ": leg times must be numbers");
          }
          const double v = t.get<double>();
          if (!(v >= 0.0) || !std::isfinite(v)) {
            throw TransitError(ErrorKind::SchemaViolation,
                               dctx + ": leg times must be nonnegative");
          }
          times.push_back(v);
        }
        if (times.size() != direction.stops.size() - 1) {
          throw TransitError(
              ErrorKind::SchemaViolation,
              dctx + ": leg_times_sec must have stops-1 entries (got " +
                  std::to_string(times.size()) + ", want " +
                  std::to_string(direction.stops.size() - 1) + ")");
        }
        direction.leg_times_sec = std::move(times);
      }
      route.directions.push_back(std::move(direction));
    }
    feed.routes.push_back(std::move(route));
  }
  return feed;
}

std::string serialize_snapshot(const RawFeed& feed) {
  RawFeed sorted = feed;
  std::sort(sorted.stops.begin(), sorted.stops.end(),
            [](const RawStop& a, const RawStop& b) { return a.id < b.id; });
  std::sort(sorted.routes.begin(), sorted.routes.end(),
            [](const RawRoute& a, const RawRoute& b) { return a.id < b.id; });

  ordered_json doc;
  doc["city"] = sorted.city_name;
  doc["stops"] = ordered_json::array();
  for (const RawStop& s : sorted.stops) {
    ordered_json stop;
    stop["id"] = s.id;
    stop["name"] = s.name;
    stop["lat"] = s.location.lat;
    stop["lon"] = s.location.lon;
    const bool self_only =
        s.merged_from.empty() ||
        (s.merged_from.size() == 1 && s.merged_from.front() == s.id);
    if (!self_only) {
      std::vector<std::string> merged = s.merged_from;
      std::sort(merged.begin(), merged.end());
      stop["merged_from"] = merged;
    }
    doc["stops"].push_back(std::move(stop));
  }
  doc["routes"] = ordered_json::array();
  for (const RawRoute& r : sorted.routes) {
    ordered_json route;
    route["id"] = r.id;
    route["name"] = r.name;
    route["headway_min"] = r.headway_min;
    route["directions"] = ordered_json::array();
    for (const RouteDirection& d : r.directions) {
      ordered_json dir;
      dir["stops"] = d.stops;
      if (d.leg_times_sec) {
        dir["leg_times_sec"] = *d.leg_times_sec;
      }
      route["directions"].push_back(std::move(dir));
    }
    doc["routes"].push_back(std::move(route));
  }
  return doc.dump(2) + "\n";
}

void save_snapshot(const RawFeed& feed, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw TransitError(ErrorKind::MissingFile, "cannot write file: " + path);
  }
  out << serialize_snapshot(feed);
}

std::vector<Connection> derive_connections(const RawFeed& feed,
                                           const EarthModel& model,
                                           const IngestOptions& options,
                                           std::vector<std::string>* warnings) {
  std::map<std::string, const RawStop*> stop_by_id;
  for (const RawStop& s : feed.stops) {
    stop_by_id[s.id] = &s;
  }

  struct PairData {
    std::set<std::string> routes;
    std::optional<double> min_leg_time;
    double distance_m = 0.0;
  };
  std::map<std::pair<std::string, std::string>, PairData> pairs;

  for (const RawRoute& route : feed.routes) {
    for (const RouteDirection& dir : route.directions) {
      for (std::size_t i = 0; i + 1 < dir.stops.size(); ++i) {
        const std::string& a = dir.stops[i];
        const std::string& b = dir.stops[i + 1];
        if (a == b) {
          continue;  // repeated stop in sequence contributes no edge
        }
        auto key = a < b ? std::make_pair(a, b) : std::make_pair(b, a);
        PairData& data = pairs[key];
        if (data.routes.empty()) {
          data.distance_m = haversine_distance(stop_by_id.at(a)->location,
                                               stop_by_id.at(b)->location,
                                               model);
          if (data.distance_m == 0.0 && warnings != nullptr) {
            warnings->push_back("zero-distance connection between distinct "
                                "stops \"" + key.first + "\" and \"" +
                                key.second + "\"");
          }
        }
        data.routes.insert(route.id);
        if (dir.leg_times_sec) {
          const double t = (*dir.leg_times_sec)[i];
          if (!data.min_leg_time || t < *data.min_leg_time) {
            data.min_leg_time = t;
          }
        }
      }
    }
  }

  const double meters_per_sec = options.default_speed_kmh * 1000.0 / 3600.0;
  std::vector<Connection> connections;
  connections.reserve(pairs.size());
  for (const auto& [key, data] : pairs) {
    Connection c;
    c.from_stop = key.first;
    c.to_stop = key.second;
    c.routes.assign(data.routes.begin(), data.routes.end());
    c.straight_distance_m = data.distance_m;
    c.travel_time_sec = data.min_leg_time
                            ? *data.min_leg_time
                            : data.distance_m / meters_per_sec;
    connections.push_back(std::move(c));
  }
  return connections;
}

RawFeed prune_isolated_stops(const RawFeed& feed,
                             const std::vector<Connection>& connections) {
  std::set<std::string> connected;
  for (const Connection& c : connections) {
    connected.insert(c.from_stop);
    connected.insert(c.to_stop);
  }
  RawFeed pruned;
  pruned.city_name = feed.city_name;
  pruned.routes = feed.routes;
  for (const RawStop& s : feed.stops) {
    if (connected.contains(s.id)) {
      pruned.stops.push_back(s);
    }
  }
  return pruned;
}

std::vector<PopulationRegion> load_population(const std::string& path,
                                              const IngestOptions& options) {
  const auto records = csv::parse(read_file(path));
  if (records.empty()) {
    throw TransitError(ErrorKind::SchemaViolation, path + ": missing header");
  }
  check_header(records[0],
               {"region_id", "name", "centroid_lat", "centroid_lon",
                "population", "area_km2"},
               path);
  std::vector<PopulationRegion> regions;
  std::set<std::string> ids;
  double total = 0.0;
  for (std::size_t row = 1; row < records.size(); ++row) {
    const auto& rec = records[row];
    const std::string context = path + ": row " + std::to_string(row + 1);
    if (rec.size() != 6) {
      throw TransitError(ErrorKind::BadRow,
                         context + ": expected 6 fields, got " +
                             std::to_string(rec.size()));
    }
    PopulationRegion region;
    region.region_id = rec[0];
    region.name = rec[1];
    region.centroid = parse_point(parse_csv_double(rec[2], context),
                                  parse_csv_double(rec[3], context), context);
    region.population = parse_csv_double(rec[4], context);
    if (region.population < 0.0) {
      throw TransitError(ErrorKind::BadRow,
                         context + ": negative population " + rec[4]);
    }
    if (rec[5].empty()) {
      region.side_m = options.default_region_side_m;
    } else {
      const double area_km2 = parse_csv_double(rec[5], context);
      if (!(area_km2 > 0.0)) {
        throw TransitError(ErrorKind::BadRow,
                           context + ": area_km2 must be positive");
      }
      region.side_m = std::sqrt(area_km2) * 1000.0;
    }
    if (!ids.insert(region.region_id).second) {
      throw TransitError(ErrorKind::DuplicateId,
                         context + ": duplicate region id \"" +
                             region.region_id + "\"");
    }
    total += region.population;
    regions.push_back(std::move(region));
  }
  if (!(total > 0.0)) {
    throw TransitError(ErrorKind::DataQuality,
                       path + ": total population must be positive");
  }
  return regions;
}

std::vector<PointOfInterest> load_pois(const std::string& path) {
  const auto records = csv::parse(read_file(path));
  if (records.empty()) {
    throw TransitError(ErrorKind::SchemaViolation, path + ": missing header");
  }
  check_header(records[0], {"poi_id", "name", "lat", "lon"}, path);
  std::vector<PointOfInterest> pois;
  std::set<std::string> ids;
  for (std::size_t row = 1; row < records.size(); ++row) {
    const auto& rec = records[row];
    const std::string context = path + ": row " + std::to_string(row + 1);
    if (rec.size() != 4) {
      throw TransitError(ErrorKind::BadRow,
                         context + ": expected 4 fields, got " +
                             std::to_string(rec.size()));
    }
    PointOfInterest poi;
    poi.poi_id = rec[0];
    poi.name = rec[1];
    poi.location = parse_point(parse_csv_double(rec[2], context),
                               parse_csv_double(rec[3], context), context);
    if (!ids.insert(poi.poi_id).second) {
      throw TransitError(ErrorKind::DuplicateId,
                         context + ": duplicate poi id \"" + poi.poi_id +
                             "\"");
    }
    pois.push_back(std::move(poi));
  }
  return pois;
}

}  // namespace transit
