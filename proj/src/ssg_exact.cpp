#include "ssg/ssg_exact.hpp"

#include <algorithm>

#include "ssg/distance.hpp"
#include "ssg/parallel.hpp"

namespace ssg {

bool conflict(const float* base, const float* kept, const float* candidate,
              std::size_t dim, const AngleParam& alpha) {
  float bk = squared_euclidean(base, kept, dim);
  float bc = squared_euclidean(base, candidate, dim);
  float kc = squared_euclidean(kept, candidate, dim);
  return conflict(bk, bc, kc, alpha);
}

AdjacencyGraph build_ssg_exact(const DatasetMatrix& data, const AngleParam& alpha,
                               int threads) {
  const std::size_t n = data.size();
  if (n < 2) throw std::invalid_argument("build_ssg_exact: need n >= 2");
  const std::size_t dim = data.dim();
  const int nt = resolve_threads(threads);

  std::vector<std::vector<Neighbor>> rows(n);
#pragma omp parallel num_threads(nt)
  {
    std::vector<Neighbor> cands(n - 1);
#pragma omp for schedule(dynamic, 8)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) {
      const float* base = data.row(i);
      std::size_t w = 0;
      for (std::uint32_t j = 0; j < n; ++j) {
        if (j == static_cast<std::uint32_t>(i)) continue;
        cands[w++] = {j, squared_euclidean(base, data.row(j), dim)};
      }
      std::sort(cands.begin(), cands.end(), neighbor_less);

      auto& kept = rows[i];
      kept.clear();
      for (const Neighbor& cand : cands) {
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
    }
  }

  std::size_t cap = 0;
  for (const auto& row : rows) cap = std::max(cap, row.size());
  AdjacencyGraph graph(n, cap, true);
  for (std::uint32_t i = 0; i < n; ++i) graph.set_row(i, rows[i]);
  return graph;
}

AdjacencyGraph truncate(const AdjacencyGraph& graph, const DatasetMatrix& data,
                        std::uint32_t max_degree) {
  if (max_degree < 1) throw std::invalid_argument("truncate: need max_degree >= 1");
  const std::size_t n = graph.size();
  std::size_t cap = std::min<std::size_t>(graph.cap(), max_degree);
  AdjacencyGraph out(n, cap, true);
  std::vector<Neighbor> row;
  for (std::uint32_t u = 0; u < n; ++u) {
    auto ids = graph.neighbors(u);
    row.resize(ids.size());
    if (graph.has_distances()) {
      auto ds = graph.edge_dists(u);
      for (std::size_t j = 0; j < ids.size(); ++j) row[j] = {ids[j], ds[j]};
    } else {
      for (std::size_t j = 0; j < ids.size(); ++j)
        row[j] = {ids[j], squared_euclidean(data.row(u), data.row(ids[j]), data.dim())};
    }
    std::sort(row.begin(), row.end(), neighbor_less);
    if (row.size() > max_degree) row.resize(max_degree);
    out.set_row(u, row);
  }
  return out;
}

double edge_overlap(const AdjacencyGraph& a, const AdjacencyGraph& b) {
  if (a.size() != b.size()) throw std::invalid_argument("edge_overlap: size mismatch");
  std::size_t shared = 0;
  std::size_t total = a.edge_count();
  if (total == 0) return 0.0;
  std::vector<std::uint32_t> in_b;
  for (std::uint32_t u = 0; u < a.size(); ++u) {
    auto rb = b.neighbors(u);
    in_b.assign(rb.begin(), rb.end());
    std::sort(in_b.begin(), in_b.end());
    for (std::uint32_t v : a.neighbors(u))
      if (std::binary_search(in_b.begin(), in_b.end(), v)) ++shared;
  }
  return static_cast<double>(shared) / static_cast<double>(total);
}

}  // namespace ssg
