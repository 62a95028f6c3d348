#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace ssg {

struct Neighbor {
  std::uint32_t id = 0;
  float dist = 0.0f;

  Neighbor() = default;
  Neighbor(std::uint32_t i, float d) : id(i), dist(d) {}
};

// Global ordering rule: ascending (distance, id). Every sorted row, candidate
// pool and result list in this library uses it, which is what makes ties and
// therefore whole builds deterministic.
inline bool neighbor_less(const Neighbor& a, const Neighbor& b) {
  if (a.dist != b.dist) return a.dist < b.dist;
  return a.id < b.id;
}

// Fixed-width padded out-edge table: n rows of cap slots plus a per-row
// degree count. An optional parallel table keeps the squared edge lengths so
// pruning passes can reuse them without touching the vectors again.
class AdjacencyGraph {
 public:
  AdjacencyGraph() = default;
  AdjacencyGraph(std::size_t n, std::size_t cap, bool with_distances);

  std::size_t size() const { return n_; }
  std::size_t cap() const { return cap_; }
  bool has_distances() const { return !dists_.empty(); }

  std::uint32_t degree(std::uint32_t u) const { return degree_[u]; }
  std::span<const std::uint32_t> neighbors(std::uint32_t u) const {
    return {ids_.data() + static_cast<std::size_t>(u) * cap_, degree_[u]};
  }
  std::span<const float> edge_dists(std::uint32_t u) const {
    return {dists_.data() + static_cast<std::size_t>(u) * cap_, degree_[u]};
  }

  // Replaces row u. Callers are responsible for the (dist, id) sort order
  // where the consuming pass requires it.
  void set_row(std::uint32_t u, std::span<const Neighbor> row);

  // Sorted insert into row u. Returns false (and leaves the row unchanged)
  // if the id is already present. Overflow handling is up to the caller via
  // pop_back/remove_at.
  bool insert_sorted(std::uint32_t u, Neighbor nn);
  void remove_at(std::uint32_t u, std::uint32_t slot);
  Neighbor entry(std::uint32_t u, std::uint32_t slot) const {
    std::size_t at = static_cast<std::size_t>(u) * cap_ + slot;
    return {ids_[at], dists_.empty() ? 0.0f : dists_[at]};
  }

  bool contains_edge(std::uint32_t u, std::uint32_t v) const;

  double mean_out_degree() const;
  std::uint32_t max_out_degree() const;
  std::size_t edge_count() const;

 private:
  std::size_t n_ = 0;
  std::size_t cap_ = 0;
  std::vector<std::uint32_t> ids_;
  std::vector<float> dists_;
  std::vector<std::uint32_t> degree_;
};

}  // namespace ssg
