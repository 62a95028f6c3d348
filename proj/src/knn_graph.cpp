#include "ssg/knn_graph.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <random>
#include <stdexcept>

#include "ssg/distance.hpp"
#include "ssg/oracle.hpp"
#include "ssg/parallel.hpp"

namespace ssg {

namespace {

bool entry_less(const KnnEntry& a, const KnnEntry& b) {
  if (a.dist != b.dist) return a.dist < b.dist;
  return a.id < b.id;
}

// Sorted-row insertion, capped at k. Rejects self-loops, duplicates and
// candidates no better than the current worst. Ties break by smaller id.
bool try_insert(std::span<KnnEntry> row, std::uint32_t self, std::uint32_t id, float dist) {
  if (id == self) return false;
  const KnnEntry cand{id, dist, true};
  if (!entry_less(cand, row.back())) return false;
  for (const KnnEntry& e : row)
    if (e.id == id) return false;
  std::size_t pos = row.size() - 1;
  while (pos > 0 && entry_less(cand, row[pos - 1])) {
    row[pos] = row[pos - 1];
    --pos;
  }
  row[pos] = cand;
  return true;
}

// k distinct ids in [0, n) excluding `self`, deterministic per rng state.
void sample_distinct(std::mt19937_64& rng, std::uint32_t n, std::uint32_t self,
                     std::uint32_t k, std::vector<std::uint32_t>& out) {
  out.clear();
  std::uniform_int_distribution<std::uint32_t> pick(0, n - 1);
  std::vector<bool> used(n, false);
  used[self] = true;
  while (out.size() < k) {
    std::uint32_t id = pick(rng);
    if (used[id]) continue;
    used[id] = true;
    out.push_back(id);
  }
}

}  // namespace

KnnGraph nn_descent(const DatasetMatrix& data, const NnDescentParams& params,
                    NnDescentStats* stats) {
  const std::size_t n = data.size();
  const std::uint32_t k = params.k;
  if (k < 1 || k >= n) throw std::invalid_argument("nn_descent: need 1 <= k < n");
  if (!(params.rho > 0.0f && params.rho <= 1.0f))
    throw std::invalid_argument("nn_descent: need 0 < rho <= 1");
  if (params.iters < 1) throw std::invalid_argument("nn_descent: need iters >= 1");

  const std::size_t dim = data.dim();
  std::mt19937_64 rng(params.seed);

  KnnGraph graph;
  graph.n = n;
  graph.k = k;
  graph.entries.resize(n * k);

  std::vector<std::uint32_t> init_ids;
  for (std::uint32_t i = 0; i < n; ++i) {
    sample_distinct(rng, static_cast<std::uint32_t>(n), i, k, init_ids);
    auto row = graph.row(i);
    for (std::uint32_t j = 0; j < k; ++j)
      row[j] = {init_ids[j], squared_euclidean(data.row(i), data.row(init_ids[j]), dim), true};
    std::sort(row.begin(), row.end(), entry_less);
  }

  const auto sample = std::max<std::uint32_t>(1, static_cast<std::uint32_t>(
                                                     std::ceil(params.rho * k)));
  const int nt = resolve_threads(params.threads);
  std::vector<std::mutex> locks(nt > 1 ? n : 0);

  std::vector<std::vector<std::uint32_t>> nn_new(n), nn_old(n), rev_new(n), rev_old(n);

  if (stats) *stats = {};
  for (std::uint32_t it = 0; it < params.iters; ++it) {
    // Sampling and reverse lists stay serial: their order defines the join
    // and keeps single-threaded runs reproducible.
    for (std::uint32_t i = 0; i < n; ++i) {
      auto& nw = nn_new[i];
      auto& od = nn_old[i];
      nw.clear();
      od.clear();
      for (KnnEntry& e : graph.row(i)) {
        if (e.is_new && nw.size() < sample) {
          nw.push_back(e.id);
          e.is_new = false;
        } else if (!e.is_new) {
          od.push_back(e.id);
        }
      }
    }
    for (std::uint32_t i = 0; i < n; ++i) {
      rev_new[i].clear();
      rev_old[i].clear();
    }
    for (std::uint32_t i = 0; i < n; ++i) {
      for (std::uint32_t j : nn_new[i]) rev_new[j].push_back(i);
      for (std::uint32_t j : nn_old[i]) rev_old[j].push_back(i);
    }
    for (std::uint32_t i = 0; i < n; ++i) {
      auto& rn = rev_new[i];
      if (rn.size() > sample) {
        std::shuffle(rn.begin(), rn.end(), rng);
        rn.resize(sample);
      }
      nn_new[i].insert(nn_new[i].end(), rn.begin(), rn.end());
      auto& ro = rev_old[i];
      if (ro.size() > sample) {
        std::shuffle(ro.begin(), ro.end(), rng);
        ro.resize(sample);
      }
      nn_old[i].insert(nn_old[i].end(), ro.begin(), ro.end());
    }

    std::uint64_t updates = 0;
#pragma omp parallel for schedule(dynamic, 64) num_threads(nt) reduction(+ : updates)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) {
      const auto& nw = nn_new[i];
      const auto& od = nn_old[i];
      auto join = [&](std::uint32_t a, std::uint32_t b) {
        if (a == b) return;
        float d = squared_euclidean(data.row(a), data.row(b), dim);
        if (nt > 1) {
          {
            std::lock_guard<std::mutex> g(locks[a]);
            if (try_insert(graph.row(a), a, b, d)) ++updates;
          }
          std::lock_guard<std::mutex> g(locks[b]);
          if (try_insert(graph.row(b), b, a, d)) ++updates;
        } else {
          if (try_insert(graph.row(a), a, b, d)) ++updates;
          if (try_insert(graph.row(b), b, a, d)) ++updates;
        }
      };
      for (std::size_t a = 0; a < nw.size(); ++a) {
        for (std::size_t b = a + 1; b < nw.size(); ++b) join(nw[a], nw[b]);
        for (std::uint32_t old_id : od) join(nw[a], old_id);
      }
    }

    if (stats) {
      double total = 0.0;
      for (const KnnEntry& e : graph.entries) total += e.dist;
      stats->mean_row_dist.push_back(total / static_cast<double>(n * k));
      stats->updates.push_back(updates);
      stats->iterations_run = it + 1;
    }
    if (static_cast<double>(updates) < params.delta * static_cast<double>(n) * k) break;
  }
  return graph;
}

KnnGraph exact_knn_graph(const DatasetMatrix& data, std::uint32_t k, int threads) {
  const std::size_t n = data.size();
  if (k < 1 || k >= n) throw std::invalid_argument("exact_knn_graph: need 1 <= k < n");
  KnnGraph graph;
  graph.n = n;
  graph.k = k;
  graph.entries.resize(n * k);
  int nt = resolve_threads(threads);
#pragma omp parallel for schedule(dynamic, 16) num_threads(nt)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) {
    // k+1 so the node itself can be dropped; the k+1 list minus self always
    // leaves at least k entries.
    auto nn = exact_knn(data, data.row(i), k + 1);
    auto row = graph.row(static_cast<std::uint32_t>(i));
    std::size_t w = 0;
    for (const Neighbor& e : nn) {
      if (e.id == static_cast<std::uint32_t>(i)) continue;
      if (w == k) break;
      row[w++] = {e.id, e.dist, false};
    }
  }
  return graph;
}

std::pair<double, double> knn_accuracy(const KnnGraph& approx, const DatasetMatrix& data,
                                       int threads) {
  const std::size_t n = approx.n;
  const std::uint32_t k = approx.k;
  KnnGraph exact = exact_knn_graph(data, k, threads);
  std::uint64_t nn_hits = 0;
  std::uint64_t overlap = 0;
  int nt = resolve_threads(threads);
#pragma omp parallel for schedule(static) num_threads(nt) reduction(+ : nn_hits, overlap)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) {
    auto apx = approx.row(static_cast<std::uint32_t>(i));
    auto exa = exact.row(static_cast<std::uint32_t>(i));
    std::uint32_t true_nn = exa[0].id;
    for (const KnnEntry& e : apx) {
      if (e.id == true_nn) {
        ++nn_hits;
        break;
      }
    }
    for (const KnnEntry& e : apx) {
      for (const KnnEntry& g : exa) {
        if (e.id == g.id) {
          ++overlap;
          break;
        }
      }
    }
  }
  return {static_cast<double>(nn_hits) / static_cast<double>(n),
          static_cast<double>(overlap) / static_cast<double>(n * k)};
}

void save_knn_ivecs(const KnnGraph& graph, const std::string& path) {
  IdList lists(graph.n);
  for (std::uint32_t i = 0; i < graph.n; ++i) {
    auto row = graph.row(i);
    lists[i].resize(graph.k);
    for (std::uint32_t j = 0; j < graph.k; ++j) lists[i][j] = row[j].id;
  }
  save_ivecs(lists, path);
}

KnnGraph load_knn_ivecs(const std::string& path, const DatasetMatrix& data) {
  IdList lists = load_ivecs(path);
  if (lists.empty() || lists.size() != data.size())
    throw std::runtime_error(path + ": knn graph row count does not match dataset");
  std::size_t k = lists[0].size();
  KnnGraph graph;
  graph.n = lists.size();
  graph.k = static_cast<std::uint32_t>(k);
  graph.entries.resize(graph.n * k);
  for (std::uint32_t i = 0; i < graph.n; ++i) {
    if (lists[i].size() != k)
      throw std::runtime_error(path + ": knn graph rows must have uniform length");
    auto row = graph.row(i);
    for (std::size_t j = 0; j < k; ++j) {
      std::uint32_t id = lists[i][j];
      if (id >= data.size()) throw std::runtime_error(path + ": neighbor id out of range");
      row[j] = {id, squared_euclidean(data.row(i), data.row(id), data.dim()), false};
    }
    std::sort(row.begin(), row.end(), entry_less);
  }
  validate_knn_graph(graph);
  return graph;
}

void validate_knn_graph(const KnnGraph& graph) {
  for (std::uint32_t i = 0; i < graph.n; ++i) {
    auto row = graph.row(i);
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (row[j].id == i) throw std::runtime_error("knn graph: self-loop");
      if (j > 0 && !entry_less(row[j - 1], row[j]))
        throw std::runtime_error("knn graph: row not strictly sorted by (dist, id)");
      for (std::size_t m = j + 1; m < row.size(); ++m)
        if (row[j].id == row[m].id) throw std::runtime_error("knn graph: duplicate id in row");
    }
  }
}

}  // namespace ssg
