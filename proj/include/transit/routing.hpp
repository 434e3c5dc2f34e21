#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "transit/network.hpp"

namespace transit {

enum class BoardWaitPolicy {
  kHalfHeadway,  // headway/2 expected wait per boarded route segment
  kZero,
};

struct RoutingPolicy {
  double transfer_penalty_sec = 300.0;
  BoardWaitPolicy board_wait = BoardWaitPolicy::kHalfHeadway;
};

struct PathQuery {
  std::string origin_stop;
  std::string destination_stop;
  RoutingPolicy policy;
};

struct PathResult {
  bool reachable = true;
  std::vector<Connection> edges;
  double total_time_sec = 0.0;
  double total_length_m = 0.0;
  std::size_t transfers = 0;
  std::vector<std::string> chosen_routes;  // one per single-route segment
};

// Minimum number of transfers along a contiguous edge walk: scan with a
// candidate route set, intersecting with each edge's routes and counting a
// transfer whenever the intersection empties.
std::size_t count_transfers(const std::vector<Connection>& path);

// Exponential oracle: exact minimum over all per-edge route assignments.
// Refuses paths longer than 12 edges.
std::size_t min_transfers_bruteforce(const std::vector<Connection>& path);

// Time-first Dijkstra with a static per-edge transfer surcharge: each label
// carries the candidate route set valid since its last transfer, and an edge
// that empties the intersection pays the penalty. Greedy, since only one
// label per stop survives. The reported total recounts transfers on the
// found path and adds boarding waits per the policy.
PathResult shortest_time_path(const TransitNetwork& network,
                              const PathQuery& query);

// Reusable single-source engine over an immutable network; all queries give
// results identical to the free function.
class Router {
 public:
  explicit Router(const TransitNetwork& network);

  PathResult shortest_path(const PathQuery& query) const;

  // Runs the search from one origin and extracts paths to many destinations,
  // each identical to a standalone query with the same policy.
  std::vector<PathResult> shortest_paths(
      const std::string& origin_stop,
      const std::vector<std::string>& destination_stops,
      const RoutingPolicy& policy) const;

  const TransitNetwork& network() const { return *network_; }

 private:
  struct SearchState;
  void run_search(std::size_t origin, const RoutingPolicy& policy,
                  SearchState& state) const;
  PathResult extract(const SearchState& state, std::size_t origin,
                     std::size_t destination,
                     const RoutingPolicy& policy) const;
  std::size_t index_of(const std::string& stop_id) const;

  const TransitNetwork* network_;
  std::vector<std::string> stop_ids_;               // index -> id, sorted
  std::vector<std::vector<std::size_t>> adjacency_; // stop index -> edge ids
  std::vector<std::pair<std::size_t, std::size_t>> edge_endpoints_;
};

}  // namespace transit
