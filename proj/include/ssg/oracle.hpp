#pragma once

#include <cstdint>
#include <vector>

#include "ssg/adjacency.hpp"
#include "ssg/dataset.hpp"

namespace ssg {

// Exact k-NN lists per query, strictly sorted by (distance, id) ascending.
struct GroundTruth {
  std::uint32_t k = 0;
  std::vector<std::vector<std::uint32_t>> ids;
  std::vector<std::vector<float>> dists;

  IdList id_lists() const { return ids; }
};

// Brute-force exact k nearest neighbors of a single query point.
std::vector<Neighbor> exact_knn(const DatasetMatrix& data, const float* query,
                                std::uint32_t k);

GroundTruth ground_truth(const DatasetMatrix& data, const DatasetMatrix& queries,
                         std::uint32_t k, int threads = 0);

struct MonotonicityFailure {
  std::uint32_t start = 0;
  std::uint32_t target = 0;
  std::uint32_t stuck = 0;
};

struct MonotonicityReport {
  std::uint64_t pairs_checked = 0;
  std::uint64_t failures = 0;
  std::vector<MonotonicityFailure> failing_pairs;
};

struct WalkResult {
  std::uint32_t end_node = 0;
  std::uint32_t hops = 0;
  bool reached = false;
};

// Strictly-greedy walk toward the point `target`: from the current node move
// to the out-neighbor strictly closer to target, picking the closest such
// neighbor (ties by smaller id). Stops on arrival at stop_id (if given) or
// when no strictly-closer neighbor exists. Each step strictly decreases the
// distance to target, so the walk terminates.
WalkResult greedy_walk(const AdjacencyGraph& graph, const DatasetMatrix& data,
                       std::uint32_t start, const float* target,
                       std::int64_t stop_id = -1);

// Samples pair_budget ordered (start, target) node pairs (all n*(n-1) pairs
// when the budget covers them) and reports every pair whose greedy walk gets
// stuck before reaching the target. A monotonic search network reports zero.
MonotonicityReport verify_monotonic(const AdjacencyGraph& graph, const DatasetMatrix& data,
                                    std::uint64_t pair_budget, std::uint64_t seed,
                                    int threads = 0);

// For queries not present in the dataset: walks greedily toward each query
// from a seeded random start and returns the fraction of counted steps that
// strictly decrease the distance to both the query and its exact nearest
// neighbor. Steps where the current node has an out-edge at least as long as
// its distance to the query are excluded (terminal neighborhood of the walk).
double unindexed_monotonic_rate(const AdjacencyGraph& graph, const DatasetMatrix& data,
                                const DatasetMatrix& queries, std::uint64_t seed = 0);

}  // namespace ssg
