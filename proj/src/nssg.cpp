#include "ssg/nssg.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <numeric>
#include <random>
#include <stdexcept>

#include "ssg/distance.hpp"
#include "ssg/oracle.hpp"
#include "ssg/parallel.hpp"
#include "ssg/search.hpp"

namespace ssg {

std::vector<Neighbor> gather_candidates(const KnnGraph& knn, const DatasetMatrix& data,
                                        std::uint32_t node, std::uint32_t l) {
  if (l < 1) throw std::invalid_argument("gather_candidates: need l >= 1");
  const std::size_t dim = data.dim();

  // epoch-stamped dedup marks; thread-local because this runs inside the
  // parallel build loop, lazily reset so the pass stays O(pool) per node
  static thread_local std::vector<std::uint32_t> stamp;
  static thread_local std::uint32_t epoch = 0;
  if (stamp.size() != knn.n) {
    stamp.assign(knn.n, 0);
    epoch = 0;
  }
  if (++epoch == 0) {
    std::fill(stamp.begin(), stamp.end(), 0);
    epoch = 1;
  }
  auto seen = [&](std::uint32_t id) {
    if (stamp[id] == epoch) return true;
    stamp[id] = epoch;
    return false;
  };
  seen(node);

  std::vector<Neighbor> pool;
  pool.reserve(l + knn.k);
  for (const KnnEntry& nb : knn.row(node)) {
    if (!seen(nb.id)) pool.emplace_back(nb.id, nb.dist);
    for (const KnnEntry& nb2 : knn.row(nb.id)) {
      if (seen(nb2.id)) continue;
      pool.emplace_back(nb2.id, squared_euclidean(data.row(node), data.row(nb2.id), dim));
    }
    // The budget check sits after a full neighbor expansion, so the pool may
    // end slightly larger than l.
    if (pool.size() >= l) break;
  }
  std::sort(pool.begin(), pool.end(), neighbor_less);
  return pool;
}

std::vector<Neighbor> ExactOracleSource::candidates(std::uint32_t node,
                                                    std::uint32_t l) const {
  auto want = std::min<std::uint32_t>(l + 1, static_cast<std::uint32_t>(data_->size()));
  auto nn = exact_knn(*data_, data_->row(node), want);
  std::vector<Neighbor> pool;
  pool.reserve(l);
  for (const Neighbor& e : nn) {
    if (e.id == node) continue;
    if (pool.size() == l) break;
    pool.push_back(e);
  }
  return pool;
}

std::vector<Neighbor> prune_candidates(std::uint32_t node, std::span<const Neighbor> pool,
                                       const AngleParam& alpha, std::uint32_t r,
                                       const DatasetMatrix& data) {
  (void)node;
  const std::size_t dim = data.dim();
  std::vector<Neighbor> kept;
  kept.reserve(std::min<std::size_t>(pool.size(), r));
  for (const Neighbor& cand : pool) {
    if (kept.size() == r) break;
    bool blocked = false;
    for (const Neighbor& e : kept) {
      float kc = squared_euclidean(data.row(e.id), data.row(cand.id), dim);
      if (conflict(e.dist, cand.dist, kc, alpha)) {
        blocked = true;
        break;
      }
    }
    if (!blocked) kept.push_back(cand);
  }
  return kept;
}

AdjacencyGraph reverse_insert(const AdjacencyGraph& graph, const AngleParam& alpha,
                              std::uint32_t r, const DatasetMatrix& data) {
  const std::size_t n = graph.size();
  const std::size_t dim = data.dim();
  std::size_t cap = std::max<std::size_t>(graph.cap(), r);
  AdjacencyGraph out(n, cap, true);
  std::vector<Neighbor> row;
  for (std::uint32_t u = 0; u < n; ++u) {
    auto ids = graph.neighbors(u);
    row.resize(ids.size());
    for (std::size_t j = 0; j < ids.size(); ++j) {
      float d = graph.has_distances()
                    ? graph.edge_dists(u)[j]
                    : squared_euclidean(data.row(u), data.row(ids[j]), dim);
      row[j] = {ids[j], d};
    }
    std::sort(row.begin(), row.end(), neighbor_less);
    out.set_row(u, row);
  }

  for (std::uint32_t i = 0; i < n; ++i) {
    auto ids = graph.neighbors(i);
    for (std::size_t slot = 0; slot < ids.size(); ++slot) {
      std::uint32_t j = ids[slot];
      float dij = graph.has_distances()
                      ? graph.edge_dists(i)[slot]
                      : squared_euclidean(data.row(i), data.row(j), dim);
      Neighbor cand{i, dij};

      if (out.contains_edge(j, i)) continue;
      bool blocked = false;
      auto jn = out.neighbors(j);
      auto jd = out.edge_dists(j);
      for (std::size_t m = 0; m < jn.size(); ++m) {
        float ie = squared_euclidean(data.row(i), data.row(jn[m]), dim);
        if (conflict(jd[m], dij, ie, alpha)) {
          blocked = true;
          break;
        }
      }
      if (blocked) continue;

      if (out.degree(j) == cap) {
        Neighbor back = out.entry(j, out.degree(j) - 1);
        if (!neighbor_less(cand, back)) continue;  // would be the dropped edge
        out.remove_at(j, out.degree(j) - 1);
      }
      out.insert_sorted(j, cand);
      while (out.degree(j) > r) out.remove_at(j, out.degree(j) - 1);
    }
  }
  return out;
}

std::vector<std::uint32_t> select_navigating(std::size_t n, std::uint32_t s,
                                             std::uint64_t seed) {
  if (s < 1 || s > n) throw std::invalid_argument("select_navigating: need 1 <= s <= n");
  std::vector<std::uint32_t> ids(n);
  std::iota(ids.begin(), ids.end(), 0u);
  std::mt19937_64 rng(seed);
  for (std::uint32_t i = 0; i < s; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, n - 1);
    std::swap(ids[i], ids[pick(rng)]);
  }
  ids.resize(s);
  std::sort(ids.begin(), ids.end());
  return ids;
}

namespace {

void mark_reachable(const AdjacencyGraph& graph, std::uint32_t from,
                    std::vector<char>& reached, std::vector<std::uint32_t>& stack) {
  stack.clear();
  if (!reached[from]) {
    reached[from] = 1;
    stack.push_back(from);
  }
  while (!stack.empty()) {
    std::uint32_t u = stack.back();
    stack.pop_back();
    for (std::uint32_t v : graph.neighbors(u)) {
      if (!reached[v]) {
        reached[v] = 1;
        stack.push_back(v);
      }
    }
  }
}

// Longest edge of v's row that is not a spanning edge; rows are sorted so
// the scan runs from the back. Returns false when every edge is protected.
bool find_evictable(const AdjacencyGraph& graph, std::uint32_t v, const SpanningContext& ctx,
                    std::uint32_t& slot_out) {
  for (std::uint32_t j = graph.degree(v); j > 0; --j) {
    std::uint32_t w = graph.neighbors(v)[j - 1];
    if (!ctx.is_spanning(v, w)) {
      slot_out = j - 1;
      return true;
    }
  }
  return false;
}

}  // namespace

std::uint32_t dfs_span(AdjacencyGraph& graph, std::uint32_t root, SpanningContext& ctx,
                       const DatasetMatrix& data, std::uint32_t search_pool) {
  const std::size_t n = graph.size();
  if (root >= n) throw std::invalid_argument("dfs_span: root out of range");
  const std::size_t dim = data.dim();

  std::vector<char> reached(n, 0);
  std::vector<std::uint32_t> stack;
  mark_reachable(graph, root, reached, stack);

  std::uint32_t added = 0;
  std::uint32_t scan_from = 0;
  std::uint32_t start[1] = {root};
  while (true) {
    while (scan_from < n && reached[scan_from]) ++scan_from;
    if (scan_from == n) break;
    std::uint32_t u = scan_from;

    // Nearest reached node: greedy search from the root only ever visits
    // reached nodes, so its pool is already filtered; an exact scan over the
    // reached set covers the leftover cases (empty result, protected rows).
    auto found = pool_search(graph, data, data.row(u), start,
                             std::max<std::uint32_t>(search_pool, 1),
                             std::max<std::uint32_t>(search_pool, 1));
    std::int64_t link = -1;
    std::uint32_t evict_slot = 0;
    bool must_evict = false;
    for (const Neighbor& c : found) {
      if (graph.degree(c.id) < graph.cap()) {
        link = c.id;
        must_evict = false;
        break;
      }
      if (find_evictable(graph, c.id, ctx, evict_slot)) {
        link = c.id;
        must_evict = true;
        break;
      }
    }
    if (link < 0) {
      std::vector<Neighbor> all;
      all.reserve(n);
      for (std::uint32_t v = 0; v < n; ++v)
        if (reached[v]) all.emplace_back(v, squared_euclidean(data.row(v), data.row(u), dim));
      std::sort(all.begin(), all.end(), neighbor_less);
      for (const Neighbor& c : all) {
        if (graph.degree(c.id) < graph.cap()) {
          link = c.id;
          must_evict = false;
          break;
        }
        if (find_evictable(graph, c.id, ctx, evict_slot)) {
          link = c.id;
          must_evict = true;
          break;
        }
      }
    }
    if (link < 0) throw std::runtime_error("dfs_span: no linkable reached node");

    auto v = static_cast<std::uint32_t>(link);
    if (must_evict) graph.remove_at(v, evict_slot);
    graph.insert_sorted(v, {u, squared_euclidean(data.row(v), data.row(u), dim)});
    ctx.edges.insert(SpanningContext::key(v, u));
    ++added;
    mark_reachable(graph, u, reached, stack);
  }
  return added;
}

NssgIndex build_nssg(const DatasetMatrix& data, const CandidateSource& source,
                     const NssgParams& params, NssgBuildReport* report) {
  const std::size_t n = data.size();
  if (n < 2) throw std::invalid_argument("build_nssg: need n >= 2");
  if (params.l < 1 || params.r < 1)
    throw std::invalid_argument("build_nssg: need l >= 1 and r >= 1");
  if (params.s < 1 || params.s > n)
    throw std::invalid_argument("build_nssg: need 1 <= s <= n");

  const int nt = resolve_threads(params.threads);
  AdjacencyGraph graph(n, params.r, true);
#pragma omp parallel for schedule(dynamic, 64) num_threads(nt)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) {
    auto node = static_cast<std::uint32_t>(i);
    auto pool = source.candidates(node, params.l);
    auto kept = prune_candidates(node, pool, params.alpha, params.r, data);
    graph.set_row(node, kept);
  }

  graph = reverse_insert(graph, params.alpha, params.r, data);

  NssgIndex index;
  index.navigating = select_navigating(n, params.s, params.seed);

  // Later roots may evict ordinary edges an earlier root's reachability
  // relied on, so sweep until a full pass over all roots adds nothing.
  SpanningContext ctx;
  NssgBuildReport local_report;
  std::uint32_t sweeps = 0;
  while (true) {
    std::size_t before = ctx.edges.size();
    for (std::uint32_t root : index.navigating)
      dfs_span(graph, root, ctx, data, params.l);
    ++sweeps;
    if (ctx.edges.size() == before) break;
  }
  local_report.spanning_sweeps = sweeps;
  for (std::uint64_t key : ctx.edges)
    local_report.spanning_edges.emplace_back(static_cast<std::uint32_t>(key >> 32),
                                             static_cast<std::uint32_t>(key & 0xffffffffu));
  std::sort(local_report.spanning_edges.begin(), local_report.spanning_edges.end());
  if (report) *report = std::move(local_report);

  index.graph = std::move(graph);
  index.meta.alpha_degrees = params.alpha.degrees;
  index.meta.l = params.l;
  index.meta.r = params.r;
  index.meta.s = params.s;
  index.meta.seed = params.seed;
  index.meta.dataset_checksum = dataset_checksum(data);
  index.meta.dim = static_cast<std::uint32_t>(data.dim());
  return index;
}

namespace {

constexpr char kMagic[4] = {'N', 'S', 'S', 'G'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void write_pod(std::ofstream& out, const T& value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
void read_pod(std::ifstream& in, T& value, const std::string& path) {
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw std::runtime_error(path + ": truncated index file");
}

}  // namespace

void save_index(const NssgIndex& index, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out.write(kMagic, 4);
  write_pod(out, kVersion);
  write_pod(out, static_cast<std::uint64_t>(index.graph.size()));
  write_pod(out, index.meta.dim);
  write_pod(out, index.meta.r);
  write_pod(out, index.meta.alpha_degrees);
  write_pod(out, static_cast<std::uint32_t>(index.navigating.size()));
  write_pod(out, index.meta.dataset_checksum);
  for (std::uint32_t id : index.navigating) write_pod(out, id);
  for (std::uint32_t u = 0; u < index.graph.size(); ++u) {
    auto row = index.graph.neighbors(u);
    write_pod(out, static_cast<std::uint32_t>(row.size()));
    out.write(reinterpret_cast<const char*>(row.data()),
              static_cast<std::streamsize>(row.size()) * 4);
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

NssgIndex load_index(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0)
    throw std::runtime_error(path + ": not an NSSG index (bad magic)");
  std::uint32_t version = 0;
  read_pod(in, version, path);
  if (version != kVersion) throw std::runtime_error(path + ": unsupported index version");

  std::uint64_t n = 0;
  NssgIndex index;
  read_pod(in, n, path);
  read_pod(in, index.meta.dim, path);
  read_pod(in, index.meta.r, path);
  read_pod(in, index.meta.alpha_degrees, path);
  std::uint32_t s = 0;
  read_pod(in, s, path);
  read_pod(in, index.meta.dataset_checksum, path);
  if (n < 1 || index.meta.r < 1 || s > n)
    throw std::runtime_error(path + ": implausible index header");
  index.meta.s = s;

  index.navigating.resize(s);
  for (std::uint32_t i = 0; i < s; ++i) read_pod(in, index.navigating[i], path);

  index.graph = AdjacencyGraph(n, index.meta.r, false);
  std::vector<Neighbor> row;
  for (std::uint64_t u = 0; u < n; ++u) {
    std::uint32_t degree = 0;
    read_pod(in, degree, path);
    if (degree > index.meta.r) throw std::runtime_error(path + ": row degree exceeds r");
    row.resize(degree);
    for (std::uint32_t j = 0; j < degree; ++j) {
      std::uint32_t id = 0;
      read_pod(in, id, path);
      if (id >= n || id == u) throw std::runtime_error(path + ": invalid neighbor id");
      row[j] = {id, 0.0f};
    }
    for (std::uint32_t a = 0; a < degree; ++a)
      for (std::uint32_t b = a + 1; b < degree; ++b)
        if (row[a].id == row[b].id)
          throw std::runtime_error(path + ": duplicate neighbor id");
    index.graph.set_row(static_cast<std::uint32_t>(u), row);
  }
  in.peek();
  if (!in.eof()) throw std::runtime_error(path + ": trailing bytes after index");

  std::vector<char> seen(n, 0);
  for (std::uint32_t id : index.navigating) {
    if (id >= n || seen[id]) throw std::runtime_error(path + ": invalid navigating ids");
    seen[id] = 1;
  }
  return index;
}

bool index_equals(const NssgIndex& a, const NssgIndex& b) {
  if (a.graph.size() != b.graph.size()) return false;
  if (a.navigating != b.navigating) return false;
  if (a.meta.alpha_degrees != b.meta.alpha_degrees || a.meta.r != b.meta.r ||
      a.meta.dim != b.meta.dim || a.meta.dataset_checksum != b.meta.dataset_checksum)
    return false;
  for (std::uint32_t u = 0; u < a.graph.size(); ++u) {
    auto ra = a.graph.neighbors(u);
    auto rb = b.graph.neighbors(u);
    if (!std::equal(ra.begin(), ra.end(), rb.begin(), rb.end())) return false;
  }
  return true;
}

}  // namespace ssg
