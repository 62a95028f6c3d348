#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "ssg/adjacency.hpp"
#include "ssg/dataset.hpp"
#include "ssg/knn_graph.hpp"
#include "ssg/ssg_exact.hpp"

namespace ssg {

struct NssgMeta {
  float alpha_degrees = 60.0f;
  std::uint32_t l = 0;  // build-time only, not persisted
  std::uint32_t r = 0;
  std::uint32_t s = 0;
  std::uint64_t seed = 0;  // build-time only, not persisted
  std::uint64_t dataset_checksum = 0;
  std::uint32_t dim = 0;
};

struct NssgIndex {
  AdjacencyGraph graph;  // cap == r
  std::vector<std::uint32_t> navigating;
  NssgMeta meta;
};

// Abstract provider of ranked candidate neighbors, generalizing how the
// close neighborhood of a node is retrieved before pruning: 2-hop
// propagation over a prebuilt k-NN graph, an exact scan, or a search over
// any prior ANN index all qualify. candidates() must be const and
// thread-safe; it is called concurrently from the build loop.
class CandidateSource {
 public:
  virtual ~CandidateSource() = default;
  // Ranked by (distance, id) ascending, excluding `node` itself. May return
  // slightly more than l (propagation finishes a neighbor's expansion) or
  // fewer when the neighborhood is exhausted.
  virtual std::vector<Neighbor> candidates(std::uint32_t node, std::uint32_t l) const = 0;
};

// Two-hop propagation over a k-NN graph. Walks the node's rows in order,
// adding each neighbor and that neighbor's neighbors; expansion stops after
// the neighbor whose expansion brought the deduplicated pool to l.
std::vector<Neighbor> gather_candidates(const KnnGraph& knn, const DatasetMatrix& data,
                                        std::uint32_t node, std::uint32_t l);

class KnnPropagationSource : public CandidateSource {
 public:
  KnnPropagationSource(const KnnGraph& knn, const DatasetMatrix& data)
      : knn_(&knn), data_(&data) {}
  std::vector<Neighbor> candidates(std::uint32_t node, std::uint32_t l) const override {
    return gather_candidates(*knn_, *data_, node, l);
  }

 private:
  const KnnGraph* knn_;
  const DatasetMatrix* data_;
};

// Brute-force source; exact candidate lists at desk scale.
class ExactOracleSource : public CandidateSource {
 public:
  explicit ExactOracleSource(const DatasetMatrix& data) : data_(&data) {}
  std::vector<Neighbor> candidates(std::uint32_t node, std::uint32_t l) const override;

 private:
  const DatasetMatrix* data_;
};

// Same greedy accept/conflict loop as the exact construction, restricted to
// the pool and capped at r edges. The pool must be sorted by (distance, id)
// and exclude the node.
std::vector<Neighbor> prune_candidates(std::uint32_t node, std::span<const Neighbor> pool,
                                       const AngleParam& alpha, std::uint32_t r,
                                       const DatasetMatrix& data);

// For every edge i->j of the input graph (scanned ascending i, then row
// order) tries to add j->i to j's row unless it duplicates or conflicts with
// an edge already there; rows exceeding r drop their longest edge. The scan
// enumerates the input graph's edges only, so the pass is deterministic.
AdjacencyGraph reverse_insert(const AdjacencyGraph& graph, const AngleParam& alpha,
                              std::uint32_t r, const DatasetMatrix& data);

std::vector<std::uint32_t> select_navigating(std::size_t n, std::uint32_t s,
                                             std::uint64_t seed);

// Spanning edges added for connectivity are exempt from eviction for the
// rest of the build; the registry lives across all navigating roots.
struct SpanningContext {
  std::unordered_set<std::uint64_t> edges;

  static std::uint64_t key(std::uint32_t u, std::uint32_t v) {
    return (static_cast<std::uint64_t>(u) << 32) | v;
  }
  bool is_spanning(std::uint32_t u, std::uint32_t v) const {
    return edges.count(key(u, v)) != 0;
  }
};

// Makes every node reachable from root: depth-first marking over out-edges,
// then repeatedly links the lowest-id unreached node to its nearest reached
// node (located by greedy search over the current graph, exact scan as
// fallback) and resumes the traversal from it. Returns the number of bridge
// edges added.
std::uint32_t dfs_span(AdjacencyGraph& graph, std::uint32_t root, SpanningContext& ctx,
                       const DatasetMatrix& data, std::uint32_t search_pool = 64);

struct NssgParams {
  std::uint32_t l = 100;
  std::uint32_t r = 50;
  std::uint32_t s = 10;
  AngleParam alpha{60.0f};
  std::uint64_t seed = 0;
  int threads = 0;  // gather+prune loop; the pass is deterministic either way
};

struct NssgBuildReport {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> spanning_edges;
  std::uint32_t spanning_sweeps = 0;
};

// Full pipeline: per-node gather+prune, reverse-neighbor insertion,
// navigating-node selection, then connectivity spanning from every
// navigating node (swept until no pass adds an edge, so reachability from
// every root holds simultaneously).
NssgIndex build_nssg(const DatasetMatrix& data, const CandidateSource& source,
                     const NssgParams& params, NssgBuildReport* report = nullptr);

// Binary index format, little-endian throughout:
//   "NSSG" magic, version u32, n u64, dim u32, r u32, alpha f32, s u32,
//   dataset checksum u64, s navigating ids u32, then per node a degree u32
//   followed by that many neighbor ids.
void save_index(const NssgIndex& index, const std::string& path);
NssgIndex load_index(const std::string& path);

// Equality over persisted content (graph rows, navigating ids, metadata).
bool index_equals(const NssgIndex& a, const NssgIndex& b);

}  // namespace ssg
