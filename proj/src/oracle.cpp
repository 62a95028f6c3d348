#include "ssg/oracle.hpp"

#include <algorithm>
#include <cstring>
#include <random>
#include <stdexcept>

#include "ssg/distance.hpp"
#include "ssg/parallel.hpp"

namespace ssg {

std::vector<Neighbor> exact_knn(const DatasetMatrix& data, const float* query,
                                std::uint32_t k) {
  std::size_t n = data.size();
  if (k < 1 || k > n) throw std::invalid_argument("exact_knn: need 1 <= k <= n");
  std::vector<Neighbor> all(n);
  for (std::size_t i = 0; i < n; ++i)
    all[i] = {static_cast<std::uint32_t>(i), squared_euclidean(data.row(i), query, data.dim())};
  std::partial_sort(all.begin(), all.begin() + k, all.end(), neighbor_less);
  all.resize(k);
  return all;
}

GroundTruth ground_truth(const DatasetMatrix& data, const DatasetMatrix& queries,
                         std::uint32_t k, int threads) {
  if (data.dim() != queries.dim())
    throw std::invalid_argument("ground_truth: dimension mismatch");
  if (k < 1 || k > data.size())
    throw std::invalid_argument("ground_truth: need 1 <= k <= n");
  GroundTruth gt;
  gt.k = k;
  gt.ids.resize(queries.size());
  gt.dists.resize(queries.size());
  int nt = resolve_threads(threads);
#pragma omp parallel for schedule(dynamic, 8) num_threads(nt)
  for (std::int64_t q = 0; q < static_cast<std::int64_t>(queries.size()); ++q) {
    auto nn = exact_knn(data, queries.row(q), k);
    auto& ids = gt.ids[q];
    auto& ds = gt.dists[q];
    ids.resize(nn.size());
    ds.resize(nn.size());
    for (std::size_t i = 0; i < nn.size(); ++i) {
      ids[i] = nn[i].id;
      ds[i] = nn[i].dist;
    }
  }
  return gt;
}

WalkResult greedy_walk(const AdjacencyGraph& graph, const DatasetMatrix& data,
                       std::uint32_t start, const float* target, std::int64_t stop_id) {
  WalkResult res;
  std::uint32_t cur = start;
  float cur_dist = squared_euclidean(data.row(cur), target, data.dim());
  while (true) {
    if (stop_id >= 0 && cur == static_cast<std::uint32_t>(stop_id)) {
      res.reached = true;
      break;
    }
    std::uint32_t best = cur;
    float best_dist = cur_dist;
    bool found = false;
    for (std::uint32_t nb : graph.neighbors(cur)) {
      float d = squared_euclidean(data.row(nb), target, data.dim());
      if (d < cur_dist) {
        if (!found || d < best_dist || (d == best_dist && nb < best)) {
          best = nb;
          best_dist = d;
          found = true;
        }
      }
    }
    if (!found) break;
    cur = best;
    cur_dist = best_dist;
    ++res.hops;
  }
  res.end_node = cur;
  return res;
}

MonotonicityReport verify_monotonic(const AdjacencyGraph& graph, const DatasetMatrix& data,
                                    std::uint64_t pair_budget, std::uint64_t seed,
                                    int threads) {
  std::size_t n = data.size();
  if (graph.size() != n)
    throw std::invalid_argument("verify_monotonic: graph/dataset size mismatch");
  if (pair_budget < 1) throw std::invalid_argument("verify_monotonic: pair_budget >= 1");

  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
  std::uint64_t all_pairs = static_cast<std::uint64_t>(n) * (n - 1);
  if (pair_budget >= all_pairs) {
    pairs.reserve(all_pairs);
    for (std::uint32_t s = 0; s < n; ++s)
      for (std::uint32_t q = 0; q < n; ++q)
        if (s != q) pairs.emplace_back(s, q);
  } else {
    pairs.reserve(pair_budget);
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::uint32_t> pick(0, static_cast<std::uint32_t>(n - 1));
    for (std::uint64_t i = 0; i < pair_budget; ++i) {
      std::uint32_t s = pick(rng);
      std::uint32_t q = pick(rng);
      while (q == s) q = pick(rng);
      pairs.emplace_back(s, q);
    }
  }

  MonotonicityReport report;
  report.pairs_checked = pairs.size();
  int nt = resolve_threads(threads);
  std::vector<std::vector<MonotonicityFailure>> local(nt);
#pragma omp parallel num_threads(nt)
  {
#ifdef _OPENMP
    auto& mine = local[omp_get_thread_num()];
#else
    auto& mine = local[0];
#endif
#pragma omp for schedule(dynamic, 256)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(pairs.size()); ++i) {
      auto [s, q] = pairs[i];
      WalkResult walk = greedy_walk(graph, data, s, data.row(q), q);
      if (!walk.reached) mine.push_back({s, q, walk.end_node});
    }
  }
  for (auto& part : local)
    report.failing_pairs.insert(report.failing_pairs.end(), part.begin(), part.end());
  std::sort(report.failing_pairs.begin(), report.failing_pairs.end(),
            [](const MonotonicityFailure& a, const MonotonicityFailure& b) {
              if (a.start != b.start) return a.start < b.start;
              return a.target < b.target;
            });
  report.failures = report.failing_pairs.size();
  return report;
}

double unindexed_monotonic_rate(const AdjacencyGraph& graph, const DatasetMatrix& data,
                                const DatasetMatrix& queries, std::uint64_t seed) {
  if (data.dim() != queries.dim())
    throw std::invalid_argument("unindexed_monotonic_rate: dimension mismatch");
  std::size_t n = data.size();
  std::size_t dim = data.dim();
  for (std::size_t q = 0; q < queries.size(); ++q) {
    for (std::size_t i = 0; i < n; ++i) {
      if (std::memcmp(queries.row(q), data.row(i), dim * sizeof(float)) == 0)
        throw std::invalid_argument("unindexed_monotonic_rate: query found in dataset");
    }
  }

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::uint32_t> pick(0, static_cast<std::uint32_t>(n - 1));
  std::uint64_t counted = 0;
  std::uint64_t both_monotonic = 0;

  for (std::size_t qi = 0; qi < queries.size(); ++qi) {
    const float* q = queries.row(qi);
    std::uint32_t r = exact_knn(data, q, 1)[0].id;
    std::uint32_t cur = pick(rng);
    float cur_q = squared_euclidean(data.row(cur), q, dim);
    float cur_r = squared_euclidean(data.row(cur), data.row(r), dim);
    while (true) {
      // Counted steps require every out-edge of the current node to be
      // shorter than its distance to the query; nodes violating that sit in
      // the terminal neighborhood of the walk and are excluded.
      bool all_edges_shorter = true;
      std::uint32_t best = cur;
      float best_q = cur_q;
      bool found = false;
      auto nbrs = graph.neighbors(cur);
      auto edl = graph.has_distances() ? graph.edge_dists(cur) : std::span<const float>{};
      for (std::size_t j = 0; j < nbrs.size(); ++j) {
        std::uint32_t nb = nbrs[j];
        float edge = edl.empty() ? squared_euclidean(data.row(cur), data.row(nb), dim) : edl[j];
        if (edge >= cur_q) all_edges_shorter = false;
        float dq = squared_euclidean(data.row(nb), q, dim);
        if (dq < cur_q && (!found || dq < best_q || (dq == best_q && nb < best))) {
          best = nb;
          best_q = dq;
          found = true;
        }
      }
      if (!found) break;
      float best_r = squared_euclidean(data.row(best), data.row(r), dim);
      if (all_edges_shorter) {
        ++counted;
        if (best_q < cur_q && best_r < cur_r) ++both_monotonic;
      }
      cur = best;
      cur_q = best_q;
      cur_r = best_r;
    }
  }
  if (counted == 0) return 1.0;
  return static_cast<double>(both_monotonic) / static_cast<double>(counted);
}

}  // namespace ssg
