#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "ssg/adjacency.hpp"
#include "ssg/dataset.hpp"
#include "ssg/nssg.hpp"

namespace ssg {

struct SearchStats {
  std::uint32_t hops = 0;        // pool-head expansions
  std::uint32_t dist_comps = 0;  // including entry-node distances
  std::uint32_t visited = 0;     // distinct nodes whose distance was computed
};

// Per-query visited marks: epoch-stamped array sized n, reset lazily by
// bumping the epoch. Reusable across queries on the same thread.
class SearchScratch {
 public:
  void begin(std::size_t n) {
    if (stamp_.size() != n) {
      stamp_.assign(n, 0);
      epoch_ = 0;
    }
    if (++epoch_ == 0) {
      std::fill(stamp_.begin(), stamp_.end(), 0);
      epoch_ = 1;
    }
  }
  bool test_and_set(std::uint32_t id) {
    if (stamp_[id] == epoch_) return true;
    stamp_[id] = epoch_;
    return false;
  }

 private:
  std::vector<std::uint32_t> stamp_;
  std::uint32_t epoch_ = 0;
};

// Greedy best-first search over any adjacency graph. The candidate pool is
// kept sorted by (distance, id) and capped at l; the first unchecked entry
// is expanded until every entry is checked. Entry distances to all start
// nodes are computed (and counted), the nearest start seeds the pool.
std::vector<Neighbor> pool_search(const AdjacencyGraph& graph, const DatasetMatrix& data,
                                  const float* query, std::span<const std::uint32_t> starts,
                                  std::uint32_t l, std::uint32_t k,
                                  SearchStats* stats = nullptr,
                                  SearchScratch* scratch = nullptr);

// Search-path length: expansions the pool search performs up to the moment
// the node that ends up as the top result is first reached (0 when the start
// node already is it). On a monotonic graph with an indexed query this is
// the length of the monotonic path; for unindexed queries it additionally
// counts the detours the search takes around the query's empty neighborhood.
std::uint32_t search_path_length(const AdjacencyGraph& graph, const DatasetMatrix& data,
                                 const float* query, std::uint32_t start, std::uint32_t pool,
                                 std::uint32_t* top_out = nullptr);

// Entry point per the index contract: search starts from the navigating
// node nearest to the query (node 0 for graphs serialized with s = 0).
std::vector<Neighbor> search_on_graph(const NssgIndex& index, const DatasetMatrix& data,
                                      const float* query, std::uint32_t l, std::uint32_t k,
                                      SearchStats* stats = nullptr,
                                      SearchScratch* scratch = nullptr);

// All queries, results in query order; parallel over queries with
// per-thread scratch. stats_out, when given, is resized to one entry per
// query.
IdList batch_search(const NssgIndex& index, const DatasetMatrix& data,
                    const DatasetMatrix& queries, std::uint32_t l, std::uint32_t k,
                    int threads = 1, std::vector<SearchStats>* stats_out = nullptr);

// Candidate source backed by graph search over a prior index (the
// on-the-fly retrieval variant of the indexing algorithm).
class GraphSearchSource : public CandidateSource {
 public:
  GraphSearchSource(const NssgIndex& index, const DatasetMatrix& data,
                    std::uint32_t search_pool)
      : index_(&index), data_(&data), pool_(search_pool) {}
  std::vector<Neighbor> candidates(std::uint32_t node, std::uint32_t l) const override;

 private:
  const NssgIndex* index_;
  const DatasetMatrix* data_;
  std::uint32_t pool_;
};

struct ShardedIndex {
  std::vector<NssgIndex> shards;
  std::vector<DatasetMatrix> shard_data;
  std::vector<std::vector<std::uint32_t>> to_global;  // shard-local id -> global id
  std::size_t total_n = 0;
};

using SourceFactory =
    std::function<std::unique_ptr<CandidateSource>(const DatasetMatrix& shard)>;

// Seeded random partition into near-equal shards (sizes differ by at most
// one), one independent NSSG per shard.
ShardedIndex sharded_build(const DatasetMatrix& data, std::uint32_t shard_count,
                           const NssgParams& params, const SourceFactory& source_factory,
                           std::uint64_t seed);

// Per-shard search, global-id remap, merge by (distance, id), top k. Stats
// are summed across shards. Shard searches run concurrently when threads
// allows.
std::pair<std::vector<Neighbor>, SearchStats> sharded_search(const ShardedIndex& sharded,
                                                             const float* query,
                                                             std::uint32_t l, std::uint32_t k,
                                                             int threads = 1);

void validate_sharded(const ShardedIndex& sharded);

}  // namespace ssg
