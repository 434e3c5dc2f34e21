#include "transit/routing.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <queue>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "test_support.hpp"

namespace transit {
namespace {

using testing::make_conn;
using testing::make_random_network;
using testing::make_route;
using testing::make_stop;

// Chain path s0-s1-...-sn with the given per-edge route sets.
std::vector<Connection> make_path(
    const std::vector<std::vector<std::string>>& colors) {
  std::vector<Connection> path;
  for (std::size_t i = 0; i < colors.size(); ++i) {
    path.push_back(make_conn("s" + std::to_string(i),
                             "s" + std::to_string(i + 1), colors[i]));
  }
  return path;
}

TEST(CountTransfers, SharedRouteNeedsNoTransfer) {
  EXPECT_EQ(count_transfers(make_path({{"A"}, {"A"}, {"A"}})), 0u);
  EXPECT_EQ(count_transfers({}), 0u);
}

TEST(CountTransfers, DisjointConsecutiveEdges) {
  EXPECT_EQ(count_transfers(make_path({{"A"}, {"B"}})), 1u);
}

TEST(CountTransfers, CandidateNarrowingForcesLateTransfer) {
  // {A,B}, {B,C}, {C}: B survives the first two edges, then C forces one
  // change; brute force confirms the minimum is 1.
  const auto path = make_path({{"A", "B"}, {"B", "C"}, {"C"}});
  EXPECT_EQ(count_transfers(path), 1u);
  EXPECT_EQ(min_transfers_bruteforce(path), 1u);
}

TEST(CountTransfers, NonContiguousSequenceRejected) {
  std::vector<Connection> path{make_conn("a", "b", {"A"}),
                               make_conn("c", "d", {"A"})};
  try {
    count_transfers(path);
    FAIL() << "expected TransitError";
  } catch (const TransitError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidArgument);
  }
}

TEST(MinTransfersBruteforce, SingleEdgeZero) {
  EXPECT_EQ(min_transfers_bruteforce(make_path({{"A", "B"}})), 0u);
}

TEST(MinTransfersBruteforce, ForcedAlternation) {
  EXPECT_EQ(min_transfers_bruteforce(make_path({{"A"}, {"B"}, {"A"}})), 2u);
}

TEST(MinTransfersBruteforce, RefusesLongPaths) {
  std::vector<std::vector<std::string>> colors(13, {"A"});
  EXPECT_THROW(min_transfers_bruteforce(make_path(colors)), TransitError);
}

TEST(CountTransfers, MatchesBruteForceOnRandomPaths) {
  std::mt19937_64 rng(21);
  std::uniform_int_distribution<std::size_t> path_length(1, 8);
  std::uniform_int_distribution<int> color_count(1, 4);
  const std::vector<std::string> palette{"A", "B", "C", "D"};
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<std::vector<std::string>> colors(path_length(rng));
    for (auto& edge : colors) {
      std::vector<std::string> pool = palette;
      std::shuffle(pool.begin(), pool.end(), rng);
      pool.resize(static_cast<std::size_t>(color_count(rng)));
      std::sort(pool.begin(), pool.end());
      edge = pool;
    }
    const auto path = make_path(colors);
    EXPECT_EQ(count_transfers(path), min_transfers_bruteforce(path))
        << "trial " << trial;
  }
}

TransitNetwork two_stop_network(double travel_time_sec) {
  return build_network(
      {make_stop("A", 43.65, -79.40), make_stop("B", 43.65, -79.395)},
      {make_conn("A", "B", {"r1"}, travel_time_sec)},
      {make_route("r1", 10.0)});
}

TEST(ShortestTimePath, OriginEqualsDestination) {
  const auto network = two_stop_network(300.0);
  const auto result = shortest_time_path(network, {"A", "A", {}});
  EXPECT_TRUE(result.reachable);
  EXPECT_TRUE(result.edges.empty());
  EXPECT_DOUBLE_EQ(result.total_time_sec, 0.0);
  EXPECT_EQ(result.transfers, 0u);
}

TEST(ShortestTimePath, SingleEdgeZeroWait) {
  const auto network = two_stop_network(300.0);
  RoutingPolicy policy{300.0, BoardWaitPolicy::kZero};
  const auto result = shortest_time_path(network, {"A", "B", policy});
  ASSERT_EQ(result.edges.size(), 1u);
  EXPECT_DOUBLE_EQ(result.total_time_sec, 300.0);
  EXPECT_EQ(result.transfers, 0u);
  EXPECT_EQ(result.chosen_routes, (std::vector<std::string>{"r1"}));
}

TEST(ShortestTimePath, HalfHeadwayWaitPerBoardedSegment) {
  // Two edges with no shared route force one transfer; each boarded segment
  // waits half its route's headway.
  const auto network = build_network(
      {make_stop("A", 43.65, -79.40), make_stop("B", 43.65, -79.395),
       make_stop("C", 43.65, -79.39)},
      {make_conn("A", "B", {"r1"}, 100.0), make_conn("B", "C", {"r2"}, 100.0)},
      {make_route("r1", 10.0), make_route("r2", 6.0)});
  RoutingPolicy policy{300.0, BoardWaitPolicy::kHalfHeadway};
  const auto result = shortest_time_path(network, {"A", "C", policy});
  ASSERT_EQ(result.edges.size(), 2u);
  EXPECT_EQ(result.transfers, 1u);
  EXPECT_EQ(result.chosen_routes, (std::vector<std::string>{"r1", "r2"}));
  // 200 ride + 300 penalty + (5 + 3) minutes of waits.
  EXPECT_DOUBLE_EQ(result.total_time_sec, 200.0 + 300.0 + 300.0 + 180.0);
}

TEST(ShortestTimePath, UnknownStopRejected) {
  const auto network = two_stop_network(300.0);
  try {
    shortest_time_path(network, {"A", "nope", {}});
    FAIL() << "expected TransitError";
  } catch (const TransitError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidArgument);
  }
}

TEST(ShortestTimePath, UnreachableDestinationIsNotAnError) {
  const auto network = build_network(
      {make_stop("A", 43.65, -79.40), make_stop("B", 43.65, -79.395),
       make_stop("C", 43.67, -79.40), make_stop("D", 43.67, -79.395)},
      {make_conn("A", "B", {"r1"}), make_conn("C", "D", {"r2"})},
      {make_route("r1"), make_route("r2")});
  const auto result = shortest_time_path(network, {"A", "C", {}});
  EXPECT_FALSE(result.reachable);
  EXPECT_TRUE(result.edges.empty());
}

// Bellman-Ford oracle on plain travel times.
std::map<std::string, double> bellman_ford(const TransitNetwork& network,
                                           const std::string& origin) {
  std::map<std::string, double> dist;
  for (const auto& [id, s] : network.stops) {
    dist[id] = std::numeric_limits<double>::infinity();
  }
  dist[origin] = 0.0;
  for (std::size_t pass = 1; pass < network.stops.size(); ++pass) {
    bool changed = false;
    for (const auto& c : network.connections) {
      if (dist[c.from_stop] + c.travel_time_sec < dist[c.to_stop]) {
        dist[c.to_stop] = dist[c.from_stop] + c.travel_time_sec;
        changed = true;
      }
      if (dist[c.to_stop] + c.travel_time_sec < dist[c.from_stop]) {
        dist[c.from_stop] = dist[c.to_stop] + c.travel_time_sec;
        changed = true;
      }
    }
    if (!changed) break;
  }
  return dist;
}

TEST(ShortestTimePath, ZeroPenaltyMatchesBellmanFord) {
  std::mt19937_64 rng(22);
  RoutingPolicy policy{0.0, BoardWaitPolicy::kZero};
  for (int trial = 0; trial < 100; ++trial) {
    const auto random = make_random_network(rng, 30 + trial % 21, 4, 8);
    const auto& network = random.network;
    std::vector<std::string> ids;
    for (const auto& [id, s] : network.stops) {
      ids.push_back(id);
    }
    std::uniform_int_distribution<std::size_t> pick(0, ids.size() - 1);
    const std::string origin = ids[pick(rng)];
    const auto oracle = bellman_ford(network, origin);
    const Router router(network);
    for (int q = 0; q < 5; ++q) {
      const std::string dest = ids[pick(rng)];
      const auto result = router.shortest_path({origin, dest, policy});
      if (!result.reachable) {
        EXPECT_TRUE(std::isinf(oracle.at(dest)));
        continue;
      }
      EXPECT_DOUBLE_EQ(result.total_time_sec, oracle.at(dest))
          << origin << " -> " << dest << " trial " << trial;
    }
  }
}

TEST(ShortestTimePath, WithinTenPercentOfExactColoredOracle) {
  std::mt19937_64 rng(23);
  RoutingPolicy policy{300.0, BoardWaitPolicy::kZero};
  std::size_t checked = 0;
  for (int trial = 0; trial < 100; ++trial) {
    // Mix of radial cities and nearest-neighbor walk networks.
    const auto random = trial % 2 == 0
                            ? testing::make_radial_network(rng, 4, 12)
                            : make_random_network(rng, 50, 6, 12);
    const auto& network = random.network;
    std::vector<std::string> ids;
    for (const auto& [id, s] : network.stops) {
      ids.push_back(id);
    }
    std::uniform_int_distribution<std::size_t> pick(0, ids.size() - 1);
    const Router router(network);
    for (int q = 0; q < 7; ++q) {
      const std::string origin = ids[pick(rng)];
      const std::string dest = ids[pick(rng)];
      if (origin == dest) continue;
      const auto result = router.shortest_path({origin, dest, policy});
      const double oracle =
          testing::exact_colored_cost(network, origin, dest, 300.0);
      if (!result.reachable) {
        EXPECT_TRUE(std::isinf(oracle));
        continue;
      }
      ASSERT_FALSE(std::isinf(oracle));
      EXPECT_GE(result.total_time_sec, oracle - 1e-9)
          << origin << " -> " << dest << " trial " << trial;
      EXPECT_LE(result.total_time_sec, 1.10 * oracle + 1e-9)
          << origin << " -> " << dest << " trial " << trial;
      ++checked;
    }
  }
  EXPECT_GT(checked, 300u);  // the bound must actually have been exercised
}

TEST(ShortestTimePath, TransfersFieldIsInternallyConsistent) {
  std::mt19937_64 rng(24);
  RoutingPolicy policy{300.0, BoardWaitPolicy::kZero};
  for (int trial = 0; trial < 20; ++trial) {
    const auto random = make_random_network(rng, 40, 5, 10);
    const auto& network = random.network;
    std::vector<std::string> ids;
    for (const auto& [id, s] : network.stops) {
      ids.push_back(id);
    }
    std::uniform_int_distribution<std::size_t> pick(0, ids.size() - 1);
    const Router router(network);
    for (int q = 0; q < 10; ++q) {
      const auto result =
          router.shortest_path({ids[pick(rng)], ids[pick(rng)], policy});
      if (!result.reachable || result.edges.empty()) continue;
      EXPECT_EQ(result.transfers, count_transfers(result.edges));
      double ride = 0.0;
      for (const auto& e : result.edges) {
        ride += e.travel_time_sec;
      }
      EXPECT_GE(result.total_time_sec, ride - 1e-9);
    }
  }
}

TEST(Router, BatchResultsMatchSingleQueries) {
  std::mt19937_64 rng(25);
  const auto random = make_random_network(rng, 40, 5, 10);
  const auto& network = random.network;
  std::vector<std::string> ids;
  for (const auto& [id, s] : network.stops) {
    ids.push_back(id);
  }
  const Router router(network);
  RoutingPolicy policy{300.0, BoardWaitPolicy::kHalfHeadway};
  const auto batch = router.shortest_paths(ids.front(), ids, policy);
  ASSERT_EQ(batch.size(), ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const auto single = router.shortest_path({ids.front(), ids[i], policy});
    EXPECT_EQ(batch[i].reachable, single.reachable);
    EXPECT_DOUBLE_EQ(batch[i].total_time_sec, single.total_time_sec);
    EXPECT_EQ(batch[i].transfers, single.transfers);
  }
}

}  // namespace
}  // namespace transit
