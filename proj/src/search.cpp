#include "ssg/search.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <stdexcept>

#include "ssg/distance.hpp"
#include "ssg/parallel.hpp"

namespace ssg {

namespace {

struct PoolEntry {
  std::uint32_t id = 0;
  float dist = 0.0f;
  bool checked = false;
};

inline bool pool_less(const PoolEntry& a, const PoolEntry& b) {
  if (a.dist != b.dist) return a.dist < b.dist;
  return a.id < b.id;
}

// Sorted insert capped at l; returns the insertion position or l when the
// candidate fell off the back.
std::size_t pool_insert(std::vector<PoolEntry>& pool, std::size_t l, PoolEntry entry) {
  auto it = std::lower_bound(pool.begin(), pool.end(), entry, pool_less);
  std::size_t pos = static_cast<std::size_t>(it - pool.begin());
  if (pos >= l) return l;
  pool.insert(it, entry);
  if (pool.size() > l) pool.pop_back();
  return pos;
}

}  // namespace

std::vector<Neighbor> pool_search(const AdjacencyGraph& graph, const DatasetMatrix& data,
                                  const float* query, std::span<const std::uint32_t> starts,
                                  std::uint32_t l, std::uint32_t k, SearchStats* stats,
                                  SearchScratch* scratch) {
  if (l < 1) throw std::invalid_argument("pool_search: need l >= 1");
  if (k > l) throw std::invalid_argument("pool_search: need k <= l");
  if (starts.empty()) throw std::invalid_argument("pool_search: no start nodes");
  const std::size_t n = graph.size();
  const std::size_t dim = data.dim();

  SearchScratch local;
  SearchScratch* marks = scratch ? scratch : &local;
  marks->begin(n);
  SearchStats st;

  // Entry: one distance per start node, nearest one seeds the pool. The
  // others are left unstamped so they stay reachable through graph edges.
  std::uint32_t entry = starts[0];
  float entry_dist = squared_euclidean(data.row(entry), query, dim);
  ++st.dist_comps;
  for (std::size_t i = 1; i < starts.size(); ++i) {
    float d = squared_euclidean(data.row(starts[i]), query, dim);
    ++st.dist_comps;
    if (d < entry_dist || (d == entry_dist && starts[i] < entry)) {
      entry = starts[i];
      entry_dist = d;
    }
  }
  marks->test_and_set(entry);
  ++st.visited;

  std::vector<PoolEntry> pool;
  pool.reserve(l + 1);
  pool.push_back({entry, entry_dist, false});

  std::size_t cur = 0;
  while (cur < pool.size()) {
    if (pool[cur].checked) {
      ++cur;
      continue;
    }
    pool[cur].checked = true;
    ++st.hops;
    std::uint32_t u = pool[cur].id;
    std::size_t lowest = pool.size();
    for (std::uint32_t v : graph.neighbors(u)) {
      if (marks->test_and_set(v)) continue;
      float d = squared_euclidean(data.row(v), query, dim);
      ++st.dist_comps;
      ++st.visited;
      std::size_t pos = pool_insert(pool, l, {v, d, false});
      lowest = std::min(lowest, pos);
    }
    if (lowest <= cur) cur = lowest;
  }

  std::vector<Neighbor> result;
  result.reserve(std::min<std::size_t>(k, pool.size()));
  for (std::size_t i = 0; i < pool.size() && i < k; ++i)
    result.emplace_back(pool[i].id, pool[i].dist);
  if (stats) *stats = st;
  return result;
}

std::uint32_t search_path_length(const AdjacencyGraph& graph, const DatasetMatrix& data,
                                 const float* query, std::uint32_t start,
                                 std::uint32_t pool_size, std::uint32_t* top_out) {
  const std::size_t dim = data.dim();
  std::vector<PoolEntry> pool;
  std::vector<std::uint32_t> first_seen(graph.size(), UINT32_MAX);
  std::uint32_t hops = 0;
  first_seen[start] = 0;
  pool.push_back({start, squared_euclidean(data.row(start), query, dim), false});
  std::size_t cur = 0;
  while (cur < pool.size()) {
    if (pool[cur].checked) {
      ++cur;
      continue;
    }
    pool[cur].checked = true;
    ++hops;
    std::size_t lowest = pool.size();
    for (std::uint32_t v : graph.neighbors(pool[cur].id)) {
      if (first_seen[v] != UINT32_MAX) continue;
      first_seen[v] = hops;
      float d = squared_euclidean(data.row(v), query, dim);
      std::size_t pos = pool_insert(pool, pool_size, {v, d, false});
      lowest = std::min(lowest, pos);
    }
    if (lowest <= cur) cur = lowest;
  }
  if (top_out) *top_out = pool[0].id;
  return first_seen[pool[0].id];
}

std::vector<Neighbor> search_on_graph(const NssgIndex& index, const DatasetMatrix& data,
                                      const float* query, std::uint32_t l, std::uint32_t k,
                                      SearchStats* stats, SearchScratch* scratch) {
  static const std::uint32_t kNodeZero[1] = {0};
  std::span<const std::uint32_t> starts =
      index.navigating.empty() ? std::span<const std::uint32_t>(kNodeZero, 1)
                               : std::span<const std::uint32_t>(index.navigating);
  return pool_search(index.graph, data, query, starts, l, k, stats, scratch);
}

IdList batch_search(const NssgIndex& index, const DatasetMatrix& data,
                    const DatasetMatrix& queries, std::uint32_t l, std::uint32_t k,
                    int threads, std::vector<SearchStats>* stats_out) {
  if (data.dim() != queries.dim())
    throw std::invalid_argument("batch_search: dimension mismatch");
  if (l < 1 || k > l) throw std::invalid_argument("batch_search: need k <= l, l >= 1");
  const std::size_t nq = queries.size();
  IdList results(nq);
  if (stats_out) stats_out->assign(nq, {});
  int nt = resolve_threads(threads);
#pragma omp parallel num_threads(nt)
  {
    SearchScratch scratch;
#pragma omp for schedule(dynamic, 8)
    for (std::int64_t q = 0; q < static_cast<std::int64_t>(nq); ++q) {
      SearchStats st;
      auto nn = search_on_graph(index, data, queries.row(q), l, k, &st, &scratch);
      auto& out = results[q];
      out.resize(nn.size());
      for (std::size_t i = 0; i < nn.size(); ++i) out[i] = nn[i].id;
      if (stats_out) (*stats_out)[q] = st;
    }
  }
  return results;
}

std::vector<Neighbor> GraphSearchSource::candidates(std::uint32_t node,
                                                    std::uint32_t l) const {
  std::uint32_t want = l + 1;
  std::uint32_t pool = std::max(pool_, want);
  auto nn = search_on_graph(*index_, *data_, data_->row(node), pool, want);
  std::vector<Neighbor> out;
  out.reserve(l);
  for (const Neighbor& e : nn) {
    if (e.id == node) continue;
    if (out.size() == l) break;
    out.push_back(e);
  }
  return out;
}

ShardedIndex sharded_build(const DatasetMatrix& data, std::uint32_t shard_count,
                           const NssgParams& params, const SourceFactory& source_factory,
                           std::uint64_t seed) {
  const std::size_t n = data.size();
  if (shard_count < 1) throw std::invalid_argument("sharded_build: need shard_count >= 1");
  if (n < shard_count * 2)
    throw std::invalid_argument("sharded_build: shards would be too small");

  std::vector<std::uint32_t> ids(n);
  std::iota(ids.begin(), ids.end(), 0u);
  std::mt19937_64 rng(seed);
  std::shuffle(ids.begin(), ids.end(), rng);

  ShardedIndex sharded;
  sharded.total_n = n;
  std::size_t base = n / shard_count;
  std::size_t extra = n % shard_count;
  std::size_t offset = 0;
  for (std::uint32_t sh = 0; sh < shard_count; ++sh) {
    std::size_t size = base + (sh < extra ? 1 : 0);
    std::vector<std::uint32_t> local(ids.begin() + offset, ids.begin() + offset + size);
    offset += size;
    std::sort(local.begin(), local.end());
    DatasetMatrix shard_data = data.subset(local);

    NssgParams shard_params = params;
    shard_params.s = std::min<std::uint32_t>(params.s, static_cast<std::uint32_t>(size));
    shard_params.seed = params.seed + sh;
    auto source = source_factory(shard_data);
    sharded.shards.push_back(build_nssg(shard_data, *source, shard_params));
    sharded.shard_data.push_back(std::move(shard_data));
    sharded.to_global.push_back(std::move(local));
  }
  return sharded;
}

std::pair<std::vector<Neighbor>, SearchStats> sharded_search(const ShardedIndex& sharded,
                                                             const float* query,
                                                             std::uint32_t l, std::uint32_t k,
                                                             int threads) {
  const std::size_t shard_count = sharded.shards.size();
  std::vector<std::vector<Neighbor>> partial(shard_count);
  std::vector<SearchStats> stats(shard_count);
  int nt = resolve_threads(threads);
#pragma omp parallel for schedule(static) num_threads(nt)
  for (std::int64_t sh = 0; sh < static_cast<std::int64_t>(shard_count); ++sh) {
    const auto& shard = sharded.shards[sh];
    std::uint32_t shard_k =
        std::min<std::uint32_t>(k, static_cast<std::uint32_t>(shard.graph.size()));
    std::uint32_t shard_l = std::max(l, shard_k);
    auto nn = pool_search(shard.graph, sharded.shard_data[sh], query,
                          shard.navigating, shard_l, shard_k, &stats[sh]);
    for (Neighbor& e : nn) e.id = sharded.to_global[sh][e.id];
    partial[sh] = std::move(nn);
  }

  std::vector<Neighbor> merged;
  for (auto& part : partial) merged.insert(merged.end(), part.begin(), part.end());
  std::sort(merged.begin(), merged.end(), neighbor_less);
  if (merged.size() > k) merged.resize(k);

  SearchStats total;
  for (const SearchStats& st : stats) {
    total.hops += st.hops;
    total.dist_comps += st.dist_comps;
    total.visited += st.visited;
  }
  return {std::move(merged), total};
}

void validate_sharded(const ShardedIndex& sharded) {
  std::vector<char> seen(sharded.total_n, 0);
  std::size_t covered = 0;
  for (std::size_t sh = 0; sh < sharded.shards.size(); ++sh) {
    const auto& map = sharded.to_global[sh];
    if (map.size() != sharded.shards[sh].graph.size())
      throw std::runtime_error("sharded index: remap size mismatch");
    for (std::uint32_t g : map) {
      if (g >= sharded.total_n || seen[g])
        throw std::runtime_error("sharded index: ids do not partition the dataset");
      seen[g] = 1;
      ++covered;
    }
  }
  if (covered != sharded.total_n)
    throw std::runtime_error("sharded index: ids do not cover the dataset");
}

}  // namespace ssg
