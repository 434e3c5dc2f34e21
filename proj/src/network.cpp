#include "transit/network.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <set>
#include <unordered_map>

namespace transit {

namespace {

struct UnionFind {
  std::vector<std::size_t> parent;

  explicit UnionFind(std::size_t n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0);
  }

  std::size_t find(std::size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }

  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) {
      return false;
    }
    if (b < a) {
      std::swap(a, b);  // keep the smaller index as representative
    }
    parent[b] = a;
    return true;
  }
};

Connection merged_connection(const Connection& a, const Connection& b) {
  Connection out = a;
  std::set<std::string> routes(a.routes.begin(), a.routes.end());
  routes.insert(b.routes.begin(), b.routes.end());
  out.routes.assign(routes.begin(), routes.end());
  out.travel_time_sec = std::min(a.travel_time_sec, b.travel_time_sec);
  if (a.road_distance_m && b.road_distance_m) {
    out.road_distance_m = std::min(*a.road_distance_m, *b.road_distance_m);
  } else if (b.road_distance_m) {
    out.road_distance_m = b.road_distance_m;
  }
  return out;
}

// Stop-index adjacency used by the graph analyses.
struct IndexedGraph {
  std::vector<std::string> ids;  // sorted
  std::unordered_map<std::string, std::size_t> index;
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>>
      adjacency;  // (neighbor, edge id)

  explicit IndexedGraph(const TransitNetwork& network) {
    ids.reserve(network.stops.size());
    for (const auto& [id, stop] : network.stops) {
      index[id] = ids.size();
      ids.push_back(id);
    }
    adjacency.resize(ids.size());
    for (std::size_t e = 0; e < network.connections.size(); ++e) {
      const Connection& c = network.connections[e];
      const std::size_t a = index.at(c.from_stop);
      const std::size_t b = index.at(c.to_stop);
      adjacency[a].emplace_back(b, e);
      adjacency[b].emplace_back(a, e);
    }
  }
};

std::vector<std::vector<std::size_t>> component_indices(
    const IndexedGraph& graph) {
  const std::size_t n = graph.ids.size();
  std::vector<bool> seen(n, false);
  std::vector<std::vector<std::size_t>> components;
  for (std::size_t start = 0; start < n; ++start) {
    if (seen[start]) {
      continue;
    }
    std::vector<std::size_t> component;
    std::deque<std::size_t> queue{start};
    seen[start] = true;
    while (!queue.empty()) {
      const std::size_t v = queue.front();
      queue.pop_front();
      component.push_back(v);
      for (const auto& [w, e] : graph.adjacency[v]) {
        if (!seen[w]) {
          seen[w] = true;
          queue.push_back(w);
        }
      }
    }
    std::sort(component.begin(), component.end());
    components.push_back(std::move(component));
  }
  return components;
}

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

TransitNetwork build_network(const std::vector<RawStop>& stops,
                             const std::vector<Connection>& connections,
                             const std::vector<RawRoute>& routes,
                             const std::string& city_name) {
  TransitNetwork network;
  network.city_name = city_name;
  for (const RawRoute& r : routes) {
    network.routes[r.id] = RouteInfo{r.name, r.headway_min};
  }
  for (const RawStop& s : stops) {
    Stop stop;
    stop.id = s.id;
    stop.name = s.name;
    stop.location = s.location;
    if (s.merged_from.empty()) {
      stop.merged_from = {s.id};
    } else {
      stop.merged_from.insert(s.merged_from.begin(), s.merged_from.end());
    }
    network.stops[s.id] = std::move(stop);
  }
  for (const RawRoute& r : routes) {
    for (const RouteDirection& d : r.directions) {
      for (const std::string& sid : d.stops) {
        auto it = network.stops.find(sid);
        if (it != network.stops.end()) {
          it->second.routes.insert(r.id);
        }
      }
    }
  }

  std::map<std::pair<std::string, std::string>, Connection> unique;
  for (const Connection& c : connections) {
    if (c.from_stop == c.to_stop) {
      throw TransitError(ErrorKind::SelfLoop,
                         "self-loop connection at stop \"" + c.from_stop +
                             "\"");
    }
    if (!network.stops.contains(c.from_stop) ||
        !network.stops.contains(c.to_stop)) {
      throw TransitError(ErrorKind::DanglingReference,
                         "connection references unknown stop \"" +
                             (network.stops.contains(c.from_stop)
                                  ? c.to_stop
                                  : c.from_stop) +
                             "\"");
    }
    Connection normalized = c;
    if (normalized.to_stop < normalized.from_stop) {
      std::swap(normalized.from_stop, normalized.to_stop);
    }
    std::sort(normalized.routes.begin(), normalized.routes.end());
    normalized.routes.erase(
        std::unique(normalized.routes.begin(), normalized.routes.end()),
        normalized.routes.end());
    auto key = std::make_pair(normalized.from_stop, normalized.to_stop);
    auto it = unique.find(key);
    if (it == unique.end()) {
      unique.emplace(key, std::move(normalized));
    } else {
      it->second = merged_connection(it->second, normalized);
    }
  }
  network.connections.reserve(unique.size());
  for (auto& [key, c] : unique) {
    network.connections.push_back(std::move(c));
  }
  for (const Connection& c : network.connections) {
    network.stops.at(c.from_stop).routes.insert(c.routes.begin(),
                                                c.routes.end());
    network.stops.at(c.to_stop).routes.insert(c.routes.begin(),
                                              c.routes.end());
  }
  return network;
}

TransitNetwork build_network(const RawFeed& feed,
                             const std::vector<Connection>& connections) {
  return build_network(feed.stops, connections, feed.routes, feed.city_name);
}

TransitNetwork merge_nearby_stops(const TransitNetwork& network,
                                  double threshold_m, const EarthModel& model) {
  if (!(threshold_m > 0.0)) {
    throw TransitError(ErrorKind::InvalidArgument,
                       "merge_nearby_stops: threshold_m must be positive");
  }

  TransitNetwork current = network;
  while (true) {
    std::vector<const Stop*> stops;
    stops.reserve(current.stops.size());
    std::vector<std::pair<std::string, GeoPoint>> grid_input;
    std::unordered_map<std::string, std::size_t> index;
    for (const auto& [id, stop] : current.stops) {
      index[id] = stops.size();
      stops.push_back(&stop);
      grid_input.emplace_back(id, stop.location);
    }
    if (stops.empty()) {
      return current;
    }

    SpatialGrid grid(grid_input, 0.0, model);
    UnionFind clusters(stops.size());
    bool any = false;
    for (std::size_t i = 0; i < stops.size(); ++i) {
      for (const auto& [id, dist] :
           grid.stops_within_radius(stops[i]->location, threshold_m)) {
        if (dist < threshold_m && id != stops[i]->id) {
          any |= clusters.unite(i, index.at(id));
        }
      }
    }
    if (!any) {
      return current;
    }

    std::unordered_map<std::size_t, std::vector<std::size_t>> members;
    for (std::size_t i = 0; i < stops.size(); ++i) {
      members[clusters.find(i)].push_back(i);
    }

    TransitNetwork next;
    next.city_name = current.city_name;
    next.routes = current.routes;
    std::unordered_map<std::string, std::string> remap;
    for (const auto& entry : members) {
      const std::vector<std::size_t>& group = entry.second;
      Stop merged;
      merged.id = stops[group.front()]->id;  // group is index-sorted, so this
                                             // is the smallest id
      double lat = 0.0;
      double lon = 0.0;
      for (std::size_t i : group) {
        const Stop& member = *stops[i];
        lat += member.location.lat;
        lon += member.location.lon;
        merged.routes.insert(member.routes.begin(), member.routes.end());
        merged.merged_from.insert(member.merged_from.begin(),
                                  member.merged_from.end());
      }
      merged.name = current.stops.at(merged.id).name;
      merged.location = {lat / static_cast<double>(group.size()),
                         lon / static_cast<double>(group.size())};
      for (std::size_t i : group) {
        remap[stops[i]->id] = merged.id;
      }
      next.stops[merged.id] = std::move(merged);
    }

    std::map<std::pair<std::string, std::string>, Connection> unique;
    for (const Connection& c : current.connections) {
      std::string a = remap.at(c.from_stop);
      std::string b = remap.at(c.to_stop);
      if (a == b) {
        continue;  // collapsed by the merge
      }
      if (b < a) {
        std::swap(a, b);
      }
      Connection moved = c;
      moved.from_stop = a;
      moved.to_stop = b;
      moved.straight_distance_m = haversine_distance(
          next.stops.at(a).location, next.stops.at(b).location, model);
      auto key = std::make_pair(a, b);
      auto it = unique.find(key);
      if (it == unique.end()) {
        unique.emplace(key, std::move(moved));
      } else {
        it->second = merged_connection(it->second, moved);
      }
    }
    next.connections.reserve(unique.size());
    for (auto& [key, c] : unique) {
      next.connections.push_back(std::move(c));
    }
    current = std::move(next);
  }
}

std::vector<std::vector<std::string>> connected_components(
    const TransitNetwork& network) {
  IndexedGraph graph(network);
  std::vector<std::vector<std::string>> result;
  for (const auto& component : component_indices(graph)) {
    std::vector<std::string> ids;
    ids.reserve(component.size());
    for (std::size_t v : component) {
      ids.push_back(graph.ids[v]);
    }
    result.push_back(std::move(ids));
  }
  std::sort(result.begin(), result.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  return result;
}

std::vector<Connection> find_bridges(const TransitNetwork& network) {
  IndexedGraph graph(network);
  const std::size_t n = graph.ids.size();
  std::vector<int> disc(n, -1);
  std::vector<int> low(n, 0);
  std::vector<bool> is_bridge(network.connections.size(), false);
  int timer = 0;

  struct Frame {
    std::size_t vertex;
    std::size_t parent_edge;
    std::size_t next_child = 0;
  };

  for (std::size_t root = 0; root < n; ++root) {
    if (disc[root] != -1) {
      continue;
    }
    std::vector<Frame> stack;
    stack.push_back({root, static_cast<std::size_t>(-1)});
    disc[root] = low[root] = timer++;
    while (!stack.empty()) {
      Frame& frame = stack.back();
      const std::size_t v = frame.vertex;
      if (frame.next_child < graph.adjacency[v].size()) {
        const auto [w, e] = graph.adjacency[v][frame.next_child++];
        if (e == frame.parent_edge) {
          continue;
        }
        if (disc[w] == -1) {
          disc[w] = low[w] = timer++;
          stack.push_back({w, e});
        } else {
          low[v] = std::min(low[v], disc[w]);
        }
      } else {
        stack.pop_back();
        if (!stack.empty()) {
          const std::size_t parent = stack.back().vertex;
          low[parent] = std::min(low[parent], low[v]);
          if (low[v] > disc[parent]) {
            is_bridge[frame.parent_edge] = true;
          }
        }
      }
    }
  }

  std::vector<Connection> bridges;
  for (std::size_t e = 0; e < network.connections.size(); ++e) {
    if (is_bridge[e]) {
      bridges.push_back(network.connections[e]);
    }
  }
  return bridges;
}

StructuralMetrics structural_metrics(const TransitNetwork& network,
                                     const NetworkOptions& options) {
  StructuralMetrics m;
  m.stop_count = network.stops.size();
  m.route_count = network.routes.size();
  m.connected_pair_count = network.connections.size();

  double length_m = 0.0;
  double time_sec = 0.0;
  for (const Connection& c : network.connections) {
    const double per_route_length =
        c.road_distance_m ? *c.road_distance_m : c.straight_distance_m;
    const double n_routes = static_cast<double>(c.routes.size());
    length_m += per_route_length * n_routes;
    time_sec += c.travel_time_sec * n_routes;
  }
  m.total_length_km = length_m / 1000.0;
  m.total_travel_time_h = time_sec / 3600.0;
  if (m.total_travel_time_h > 0.0) {
    m.mean_speed_kmh = m.total_length_km / m.total_travel_time_h;
  } else if (m.total_length_km > 0.0) {
    throw TransitError(ErrorKind::UndefinedSpeed,
                       "structural_metrics: nonzero length with zero total "
                       "travel time");
  }

  IndexedGraph graph(network);
  const auto components = component_indices(graph);
  m.component_count = components.size();
  m.bridge_count = find_bridges(network).size();

  if (components.empty()) {
    return m;
  }
  const auto largest = std::max_element(
      components.begin(), components.end(),
      [](const auto& a, const auto& b) { return a.size() < b.size(); });
  const std::vector<std::size_t>& comp = *largest;
  if (comp.size() < 2) {
    return m;
  }

  // Unweighted average shortest path length over ordered pairs in the
  // largest component; full APSP below the cap, seeded source sampling above.
  std::vector<std::size_t> sources = comp;
  if (comp.size() > options.exact_apsp_stop_cap) {
    std::uint64_t rng = options.apsp_sample_seed;
    std::vector<std::size_t> pool = comp;
    std::vector<std::size_t> picked;
    for (std::size_t k = 0; k < options.apsp_sample_sources && !pool.empty();
         ++k) {
      const std::size_t j = splitmix64(rng) % pool.size();
      picked.push_back(pool[j]);
      pool[j] = pool.back();
      pool.pop_back();
    }
    std::sort(picked.begin(), picked.end());
    sources = std::move(picked);
  }
  std::vector<bool> in_comp(graph.ids.size(), false);
  for (std::size_t v : comp) {
    in_comp[v] = true;
  }
  double hop_sum = 0.0;
  std::size_t pair_count = 0;
  std::vector<int> dist(graph.ids.size());
  for (std::size_t s : sources) {
    std::fill(dist.begin(), dist.end(), -1);
    std::deque<std::size_t> queue{s};
    dist[s] = 0;
    while (!queue.empty()) {
      const std::size_t v = queue.front();
      queue.pop_front();
      for (const auto& [w, e] : graph.adjacency[v]) {
        if (dist[w] == -1) {
          dist[w] = dist[v] + 1;
          queue.push_back(w);
        }
      }
    }
    for (std::size_t t : comp) {
      if (t != s && dist[t] > 0) {
        hop_sum += dist[t];
        ++pair_count;
      }
    }
  }
  if (pair_count > 0) {
    m.avg_shortest_path_length = hop_sum / static_cast<double>(pair_count);
  }

  // Average local clustering coefficient over the largest component.
  std::vector<std::set<std::size_t>> neighbors(graph.ids.size());
  for (std::size_t v : comp) {
    for (const auto& [w, e] : graph.adjacency[v]) {
      neighbors[v].insert(w);
    }
  }
  double coeff_sum = 0.0;
  for (std::size_t v : comp) {
    const auto& nv = neighbors[v];
    if (nv.size() < 2) {
      continue;
    }
    std::size_t links = 0;
    for (auto it = nv.begin(); it != nv.end(); ++it) {
      for (auto jt = std::next(it); jt != nv.end(); ++jt) {
        if (neighbors[*it].contains(*jt)) {
          ++links;
        }
      }
    }
    const double degree = static_cast<double>(nv.size());
    coeff_sum += 2.0 * static_cast<double>(links) / (degree * (degree - 1.0));
  }
  m.avg_clustering_coefficient =
      coeff_sum / static_cast<double>(comp.size());

  return m;
}

RawFeed network_to_feed(const TransitNetwork& network,
                        const RawFeed& original) {
  std::unordered_map<std::string, std::string> remap;
  for (const auto& [id, stop] : network.stops) {
    for (const std::string& member : stop.merged_from) {
      remap[member] = id;
    }
  }
  std::map<std::pair<std::string, std::string>, double> leg_time;
  for (const Connection& c : network.connections) {
    leg_time[{c.from_stop, c.to_stop}] = c.travel_time_sec;
  }

  RawFeed feed;
  feed.city_name = network.city_name.empty() ? original.city_name
                                             : network.city_name;
  for (const auto& [id, stop] : network.stops) {
    RawStop raw;
    raw.id = stop.id;
    raw.name = stop.name;
    raw.location = stop.location;
    raw.merged_from.assign(stop.merged_from.begin(), stop.merged_from.end());
    feed.stops.push_back(std::move(raw));
  }
  for (const RawRoute& route : original.routes) {
    if (!network.routes.contains(route.id)) {
      continue;
    }
    RawRoute out;
    out.id = route.id;
    out.name = route.name;
    out.headway_min = route.headway_min;
    for (const RouteDirection& dir : route.directions) {
      RouteDirection mapped;
      std::vector<double> times;
      for (const std::string& sid : dir.stops) {
        auto it = remap.find(sid);
        if (it == remap.end()) {
          continue;  // stop was pruned
        }
        if (!mapped.stops.empty() && mapped.stops.back() == it->second) {
          continue;  // leg collapsed by merging
        }
        if (!mapped.stops.empty()) {
          const std::string& prev = mapped.stops.back();
          auto key = prev < it->second ? std::make_pair(prev, it->second)
                                       : std::make_pair(it->second, prev);
          times.push_back(leg_time.at(key));
        }
        mapped.stops.push_back(it->second);
      }
      if (mapped.stops.size() >= 2) {
        mapped.leg_times_sec = std::move(times);
        out.directions.push_back(std::move(mapped));
      }
    }
    if (!out.directions.empty()) {
      feed.routes.push_back(std::move(out));
    }
  }
  return feed;
}

}  // namespace transit
