#include "ssg/adjacency.hpp"

#include <algorithm>
#include <stdexcept>

namespace ssg {

AdjacencyGraph::AdjacencyGraph(std::size_t n, std::size_t cap, bool with_distances)
    : n_(n), cap_(cap), ids_(n * cap, 0), degree_(n, 0) {
  if (with_distances) dists_.assign(n * cap, 0.0f);
}

void AdjacencyGraph::set_row(std::uint32_t u, std::span<const Neighbor> row) {
  if (row.size() > cap_) throw std::invalid_argument("set_row: row exceeds capacity");
  std::size_t base = static_cast<std::size_t>(u) * cap_;
  for (std::size_t i = 0; i < row.size(); ++i) {
    ids_[base + i] = row[i].id;
    if (!dists_.empty()) dists_[base + i] = row[i].dist;
  }
  degree_[u] = static_cast<std::uint32_t>(row.size());
}

bool AdjacencyGraph::insert_sorted(std::uint32_t u, Neighbor nn) {
  std::uint32_t deg = degree_[u];
  if (deg >= cap_) throw std::invalid_argument("insert_sorted: row full");
  std::size_t base = static_cast<std::size_t>(u) * cap_;
  std::uint32_t pos = deg;
  for (std::uint32_t i = 0; i < deg; ++i) {
    if (ids_[base + i] == nn.id) return false;
    Neighbor cur{ids_[base + i], dists_.empty() ? 0.0f : dists_[base + i]};
    if (pos == deg && neighbor_less(nn, cur)) pos = i;
  }
  for (std::uint32_t i = deg; i > pos; --i) {
    ids_[base + i] = ids_[base + i - 1];
    if (!dists_.empty()) dists_[base + i] = dists_[base + i - 1];
  }
  ids_[base + pos] = nn.id;
  if (!dists_.empty()) dists_[base + pos] = nn.dist;
  degree_[u] = deg + 1;
  return true;
}

void AdjacencyGraph::remove_at(std::uint32_t u, std::uint32_t slot) {
  std::uint32_t deg = degree_[u];
  if (slot >= deg) throw std::invalid_argument("remove_at: slot out of range");
  std::size_t base = static_cast<std::size_t>(u) * cap_;
  for (std::uint32_t i = slot; i + 1 < deg; ++i) {
    ids_[base + i] = ids_[base + i + 1];
    if (!dists_.empty()) dists_[base + i] = dists_[base + i + 1];
  }
  degree_[u] = deg - 1;
}

bool AdjacencyGraph::contains_edge(std::uint32_t u, std::uint32_t v) const {
  auto row = neighbors(u);
  return std::find(row.begin(), row.end(), v) != row.end();
}

double AdjacencyGraph::mean_out_degree() const {
  if (n_ == 0) return 0.0;
  std::size_t total = edge_count();
  return static_cast<double>(total) / static_cast<double>(n_);
}

std::uint32_t AdjacencyGraph::max_out_degree() const {
  std::uint32_t best = 0;
  for (std::uint32_t d : degree_) best = std::max(best, d);
  return best;
}

std::size_t AdjacencyGraph::edge_count() const {
  std::size_t total = 0;
  for (std::uint32_t d : degree_) total += d;
  return total;
}

}  // namespace ssg
