#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "ssg/adjacency.hpp"
#include "ssg/dataset.hpp"

namespace ssg {

// Minimum angle between out-edges, in degrees. The usable range is
// (0, 60]: 60 is the largest angle for which the pruned graph keeps its
// monotonic-search guarantee, and 0 would degenerate to the complete graph.
struct AngleParam {
  float degrees = 60.0f;
  double cos_alpha = 0.5;

  explicit AngleParam(float deg) : degrees(deg) {
    if (!(deg > 0.0f && deg <= 60.0f))
      throw std::invalid_argument("AngleParam: need 0 < alpha <= 60 degrees");
    cos_alpha = std::cos(static_cast<double>(deg) * std::acos(-1.0) / 180.0);
  }
};

// True iff the angle at the base point between the kept edge and the
// candidate edge is strictly below alpha. Computed from the three squared
// distances via the law of cosines; a zero-length edge (coincident points)
// always conflicts. The 1e-9 slack keeps the exact-alpha boundary (e.g. an
// equilateral triangle at alpha = 60) on the "no conflict" side.
inline bool conflict(float base_kept_sq, float base_cand_sq, float kept_cand_sq,
                     const AngleParam& alpha) {
  if (base_kept_sq == 0.0f || base_cand_sq == 0.0f) return true;
  double num = static_cast<double>(base_kept_sq) + static_cast<double>(base_cand_sq) -
               static_cast<double>(kept_cand_sq);
  double den = 2.0 * std::sqrt(static_cast<double>(base_kept_sq) *
                               static_cast<double>(base_cand_sq));
  double c = num / den;
  if (c > 1.0) c = 1.0;
  if (c < -1.0) c = -1.0;
  return c > alpha.cos_alpha + 1e-9;
}

// Point-row form of the predicate.
bool conflict(const float* base, const float* kept, const float* candidate,
              std::size_t dim, const AngleParam& alpha);

// Exact construction: per node, scan all other points in ascending
// (distance, id) order, always keep the nearest, and keep each further
// candidate iff it conflicts with no edge kept so far. Cubic-ish cost;
// intended for datasets up to ~20k points. Row capacity is sized to the
// observed max degree; rows carry squared edge lengths.
AdjacencyGraph build_ssg_exact(const DatasetMatrix& data, const AngleParam& alpha,
                               int threads = 0);

// Keeps each row's max_degree shortest edges (ties by id). Rows already
// shorter are unchanged.
AdjacencyGraph truncate(const AdjacencyGraph& graph, const DatasetMatrix& data,
                        std::uint32_t max_degree);

// Fraction of a's directed edges that also appear in b.
double edge_overlap(const AdjacencyGraph& a, const AdjacencyGraph& b);

}  // namespace ssg
