#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ssg/dataset.hpp"

namespace ssg {

struct KnnEntry {
  std::uint32_t id = 0;
  float dist = 0.0f;
  bool is_new = false;
};

// Approximate k-NN graph: exactly k slots per row, each row sorted by
// (distance, id) ascending with no self-loops and no duplicates.
struct KnnGraph {
  std::size_t n = 0;
  std::uint32_t k = 0;
  std::vector<KnnEntry> entries;  // n * k

  std::span<KnnEntry> row(std::uint32_t u) {
    return {entries.data() + static_cast<std::size_t>(u) * k, k};
  }
  std::span<const KnnEntry> row(std::uint32_t u) const {
    return {entries.data() + static_cast<std::size_t>(u) * k, k};
  }
};

struct NnDescentParams {
  std::uint32_t k = 50;
  float rho = 0.5f;
  std::uint32_t iters = 12;
  float delta = 0.001f;
  std::uint64_t seed = 0;
  // threads == 1 keeps the build fully deterministic for a fixed seed. The
  // parallel local join takes per-row locks and waives that guarantee.
  int threads = 1;
};

struct NnDescentStats {
  std::vector<double> mean_row_dist;   // after each completed iteration
  std::vector<std::uint64_t> updates;  // accepted row insertions per iteration
  std::uint32_t iterations_run = 0;
};

KnnGraph nn_descent(const DatasetMatrix& data, const NnDescentParams& params,
                    NnDescentStats* stats = nullptr);

// Exact k-NN graph from the brute-force oracle (self excluded).
KnnGraph exact_knn_graph(const DatasetMatrix& data, std::uint32_t k, int threads = 0);

// acc1: fraction of nodes whose true nearest neighbor appears in their row.
// acck: mean per-row overlap with the exact k-NN list.
std::pair<double, double> knn_accuracy(const KnnGraph& approx, const DatasetMatrix& data,
                                       int threads = 0);

// Rows as ivecs records (ids only); distances are recomputed on load.
void save_knn_ivecs(const KnnGraph& graph, const std::string& path);
KnnGraph load_knn_ivecs(const std::string& path, const DatasetMatrix& data);

// Throws if any row breaks the sorted/dedup/no-self-loop invariants.
void validate_knn_graph(const KnnGraph& graph);

}  // namespace ssg
