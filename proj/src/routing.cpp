#include "transit/routing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

namespace transit {

namespace {

constexpr std::size_t kNoEdge = static_cast<std::size_t>(-1);
constexpr double kInfinity = std::numeric_limits<double>::infinity();

std::vector<std::string> intersect_routes(const std::vector<std::string>& a,
                                          const std::vector<std::string>& b) {
  std::vector<std::string> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                        std::back_inserter(out));
  return out;
}

void validate_contiguous(const std::vector<Connection>& path) {
  if (path.size() < 2) {
    return;
  }
  // Orient the walk from the endpoint of the first edge not shared with the
  // second, then chain through shared endpoints.
  const Connection& first = path[0];
  const Connection& second = path[1];
  std::string pos;
  if (first.from_stop == second.from_stop ||
      first.from_stop == second.to_stop) {
    pos = first.from_stop;
  } else if (first.to_stop == second.from_stop ||
             first.to_stop == second.to_stop) {
    pos = first.to_stop;
  } else {
    throw TransitError(ErrorKind::InvalidArgument,
                       "count_transfers: edges 0 and 1 share no stop");
  }
  for (std::size_t i = 1; i < path.size(); ++i) {
    const Connection& e = path[i];
    if (e.from_stop == pos) {
      pos = e.to_stop;
    } else if (e.to_stop == pos) {
      pos = e.from_stop;
    } else {
      throw TransitError(ErrorKind::InvalidArgument,
                         "count_transfers: edge " + std::to_string(i) +
                             " does not continue the walk at \"" + pos +
                             "\"");
    }
  }
}

// Final candidate route set of each maximal single-route segment, following
// the candidate-intersection scan.
std::vector<std::vector<std::string>> path_segments(
    const std::vector<Connection>& path) {
  validate_contiguous(path);
  std::vector<std::vector<std::string>> segments;
  if (path.empty()) {
    return segments;
  }
  std::vector<std::string> candidates = path[0].routes;
  for (std::size_t i = 1; i < path.size(); ++i) {
    std::vector<std::string> kept = intersect_routes(candidates,
                                                     path[i].routes);
    if (kept.empty()) {
      segments.push_back(std::move(candidates));
      candidates = path[i].routes;
    } else {
      candidates = std::move(kept);
    }
  }
  segments.push_back(std::move(candidates));
  return segments;
}

}  // namespace

std::size_t count_transfers(const std::vector<Connection>& path) {
  const auto segments = path_segments(path);
  return segments.empty() ? 0 : segments.size() - 1;
}

std::size_t min_transfers_bruteforce(const std::vector<Connection>& path) {
  if (path.size() > 12) {
    throw TransitError(ErrorKind::InvalidArgument,
                       "min_transfers_bruteforce: path longer than 12 edges");
  }
  validate_contiguous(path);
  if (path.empty()) {
    return 0;
  }
  std::size_t best = path.size();  // upper bound: change on every edge
  std::vector<std::size_t> choice(path.size(), 0);
  while (true) {
    std::size_t changes = 0;
    for (std::size_t i = 1; i < path.size(); ++i) {
      if (path[i].routes[choice[i]] != path[i - 1].routes[choice[i - 1]]) {
        ++changes;
      }
    }
    best = std::min(best, changes);
    std::size_t pos = 0;
    while (pos < path.size()) {
      if (++choice[pos] < path[pos].routes.size()) {
        break;
      }
      choice[pos] = 0;
      ++pos;
    }
    if (pos == path.size()) {
      break;
    }
  }
  return best;
}

struct Router::SearchState {
  // Settled search labels. Each carries the candidate routes still valid
  // since the last transfer on its relaxation chain, mirroring the
  // transfer-counting scan; at most kMaxLabelsPerStop survive per stop.
  struct Label {
    std::size_t stop;
    double time;
    std::size_t pred_label;  // kNoEdge for the origin label
    std::size_t pred_edge;
    std::vector<std::string> candidates;
  };
  static constexpr std::size_t kMaxLabelsPerStop = 4;

  std::vector<Label> labels;
  std::vector<std::vector<std::size_t>> by_stop;  // surviving label ids
  std::vector<double> best_time;
};

Router::Router(const TransitNetwork& network) : network_(&network) {
  stop_ids_.reserve(network.stops.size());
  for (const auto& [id, stop] : network.stops) {
    stop_ids_.push_back(id);
  }
  adjacency_.resize(stop_ids_.size());
  edge_endpoints_.reserve(network.connections.size());
  for (std::size_t e = 0; e < network.connections.size(); ++e) {
    const Connection& c = network.connections[e];
    const std::size_t a = index_of(c.from_stop);
    const std::size_t b = index_of(c.to_stop);
    edge_endpoints_.emplace_back(a, b);
    adjacency_[a].push_back(e);
    adjacency_[b].push_back(e);
  }
}

std::size_t Router::index_of(const std::string& stop_id) const {
  auto it = std::lower_bound(stop_ids_.begin(), stop_ids_.end(), stop_id);
  if (it == stop_ids_.end() || *it != stop_id) {
    throw TransitError(ErrorKind::InvalidArgument,
                       "routing: unknown stop \"" + stop_id + "\"");
  }
  return static_cast<std::size_t>(it - stop_ids_.begin());
}

void Router::run_search(std::size_t origin, const RoutingPolicy& policy,
                        SearchState& state) const {
  using Label = SearchState::Label;
  const std::size_t n = stop_ids_.size();
  state.labels.clear();
  state.by_stop.assign(n, {});
  state.best_time.assign(n, kInfinity);

  // (time, stop index, label id): deterministic pop order.
  using Entry = std::tuple<double, std::size_t, std::size_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue;

  state.labels.push_back(Label{origin, 0.0, kNoEdge, kNoEdge, {}});
  state.by_stop[origin].push_back(0);
  state.best_time[origin] = 0.0;
  queue.push({0.0, origin, 0});

  // A new label is useful only if no kept label is at least as fast with
  // candidates that can cover at least as many continuations.
  auto dominated = [&](const Label& fresh) {
    for (std::size_t id : state.by_stop[fresh.stop]) {
      const Label& kept = state.labels[id];
      if (kept.time <= fresh.time &&
          (kept.pred_edge == kNoEdge ||
           std::includes(kept.candidates.begin(), kept.candidates.end(),
                         fresh.candidates.begin(), fresh.candidates.end()))) {
        return true;
      }
    }
    return state.by_stop[fresh.stop].size() >=
           SearchState::kMaxLabelsPerStop;
  };

  while (!queue.empty()) {
    const auto [d, v, label_id] = queue.top();
    queue.pop();
    if (d > state.labels[label_id].time) {
      continue;  // stale entry
    }
    for (std::size_t e : adjacency_[v]) {
      const Connection& c = network_->connections[e];
      const auto [a, b] = edge_endpoints_[e];
      const std::size_t w = (a == v) ? b : a;
      // Surcharge exactly when the label's candidate routes cannot cover
      // this edge, the same rule the transfer count applies per path.
      const Label& from = state.labels[label_id];
      double cost = c.travel_time_sec;
      std::vector<std::string> kept;
      if (from.pred_edge == kNoEdge) {
        kept = c.routes;
      } else {
        kept = intersect_routes(from.candidates, c.routes);
        if (kept.empty()) {
          cost += policy.transfer_penalty_sec;
          kept = c.routes;
        }
      }
      Label next{w, from.time + cost, label_id, e, std::move(kept)};
      if (dominated(next)) {
        continue;
      }
      state.best_time[w] = std::min(state.best_time[w], next.time);
      const std::size_t next_id = state.labels.size();
      state.by_stop[w].push_back(next_id);
      queue.push({next.time, w, next_id});
      state.labels.push_back(std::move(next));
    }
  }
}

PathResult Router::extract(const SearchState& state, std::size_t origin,
                           std::size_t destination,
                           const RoutingPolicy& policy) const {
  PathResult result;
  if (origin == destination) {
    return result;
  }
  std::size_t best = kNoEdge;
  for (std::size_t id : state.by_stop[destination]) {
    if (best == kNoEdge || state.labels[id].time < state.labels[best].time) {
      best = id;
    }
  }
  if (best == kNoEdge) {
    result.reachable = false;
    return result;
  }
  std::vector<std::size_t> edge_ids;
  for (std::size_t id = best; state.labels[id].pred_edge != kNoEdge;
       id = state.labels[id].pred_label) {
    edge_ids.push_back(state.labels[id].pred_edge);
  }
  std::reverse(edge_ids.begin(), edge_ids.end());

  double ride_time = 0.0;
  for (std::size_t e : edge_ids) {
    const Connection& c = network_->connections[e];
    result.edges.push_back(c);
    ride_time += c.travel_time_sec;
    result.total_length_m +=
        c.road_distance_m ? *c.road_distance_m : c.straight_distance_m;
  }

  const auto segments = path_segments(result.edges);
  result.transfers = segments.size() - 1;
  double wait_sec = 0.0;
  for (const auto& candidates : segments) {
    // Board the cheapest-headway route able to cover the whole segment.
    std::string chosen = candidates.front();
    double headway = network_->routes.at(chosen).headway_min;
    for (const std::string& route : candidates) {
      const double h = network_->routes.at(route).headway_min;
      if (h < headway) {
        headway = h;
        chosen = route;
      }
    }
    result.chosen_routes.push_back(chosen);
    if (policy.board_wait == BoardWaitPolicy::kHalfHeadway) {
      wait_sec += headway / 2.0 * 60.0;
    }
  }
  result.total_time_sec =
      ride_time +
      policy.transfer_penalty_sec * static_cast<double>(result.transfers) +
      wait_sec;
  return result;
}

PathResult Router::shortest_path(const PathQuery& query) const {
  const std::size_t origin = index_of(query.origin_stop);
  const std::size_t destination = index_of(query.destination_stop);
  SearchState state;
  run_search(origin, query.policy, state);
  return extract(state, origin, destination, query.policy);
}

std::vector<PathResult> Router::shortest_paths(
    const std::string& origin_stop,
    const std::vector<std::string>& destination_stops,
    const RoutingPolicy& policy) const {
  const std::size_t origin = index_of(origin_stop);
  SearchState state;
  run_search(origin, policy, state);
  std::vector<PathResult> results;
  results.reserve(destination_stops.size());
  for (const std::string& dest : destination_stops) {
    results.push_back(extract(state, origin, index_of(dest), policy));
  }
  return results;
}

PathResult shortest_time_path(const TransitNetwork& network,
                              const PathQuery& query) {
  return Router(network).shortest_path(query);
}

}  // namespace transit
