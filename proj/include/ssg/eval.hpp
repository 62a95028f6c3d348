#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "ssg/adjacency.hpp"
#include "ssg/dataset.hpp"
#include "ssg/nssg.hpp"
#include "ssg/oracle.hpp"
#include "ssg/search.hpp"

namespace ssg {

// |R intersect G| / |G|, pure set semantics.
double precision(std::span<const std::uint32_t> result, std::span<const std::uint32_t> truth);

struct EvalRecord {
  std::uint32_t l = 0;
  double precision = 0.0;
  double qps = 0.0;
  double mean_hops = 0.0;
  double mean_dist_comps = 0.0;
  int threads = 1;
};

// One record per pool size: all queries are run (single-threaded unless the
// parallel throughput mode is requested), wall time and mean stats recorded.
// A precision drop against the previous pool size is flagged on `warnings`,
// not asserted.
std::vector<EvalRecord> qps_curve(const NssgIndex& index, const DatasetMatrix& data,
                                  const DatasetMatrix& queries, const GroundTruth& truth,
                                  std::span<const std::uint32_t> pool_sizes, std::uint32_t k,
                                  int threads = 1, std::ostream* warnings = nullptr);

struct PathLengths {
  double l_indexed = 0.0;        // mean search-path length to indexed query nodes
  double l_unindexed = 0.0;      // mean search-path length to unindexed queries' answers
  double indexed_reached = 0.0;  // fraction of indexed searches whose top result is the query
};

// Indexed queries must be rows of the dataset (matched bit-exactly);
// unindexed queries must not appear in it. Search starts are seeded random;
// path lengths are search_path_length with the given pool.
PathLengths path_length_experiment(const AdjacencyGraph& graph, const DatasetMatrix& data,
                                   const DatasetMatrix& indexed_queries,
                                   const DatasetMatrix& unindexed_queries,
                                   std::uint64_t seed = 0, std::uint32_t walk_pool = 8);

struct AlphaSweepRow {
  float alpha_degrees = 0.0f;
  double mean_out_degree = 0.0;
  EvalRecord record;
};

// Builds one NSSG per angle over a shared candidate source and evaluates
// each over the given pool sizes.
std::vector<AlphaSweepRow> alpha_sweep(const DatasetMatrix& data,
                                       std::span<const float> alphas,
                                       const NssgParams& base_params,
                                       const CandidateSource& source,
                                       const DatasetMatrix& queries, const GroundTruth& truth,
                                       std::span<const std::uint32_t> pool_sizes,
                                       std::uint32_t k);

struct ScalingRow {
  std::size_t n = 0;
  double edge_selection_seconds = 0.0;  // excludes candidate-source construction
  std::uint32_t l = 0;                  // smallest tried pool reaching the target
  double precision = 0.0;
  double mean_hops = 0.0;
};

struct ScalingConfig {
  std::vector<std::size_t> sizes;  // ascending, each <= n
  NssgParams params;
  std::uint32_t knn_k = 20;
  std::uint32_t k = 10;
  double target_precision = 0.99;
  std::uint32_t repetitions = 3;  // median build time over repeats
  int threads = 0;  // thread count for the timed edge-selection stage only
};

// Per prefix size: build the candidate k-NN graph (untimed), time the edge
// selection stage, then grow the search pool until the target precision is
// reached and record the mean hop count there.
std::vector<ScalingRow> scaling_experiment(const DatasetMatrix& data,
                                           const DatasetMatrix& queries,
                                           const ScalingConfig& config);

// CSV emitters; fixed headers, deterministic row order.
void write_eval_csv(const std::vector<EvalRecord>& records, const std::string& path);
void write_stats_csv(const std::vector<SearchStats>& stats, const std::string& path);
void write_alpha_sweep_csv(const std::vector<AlphaSweepRow>& rows, const std::string& path);
void write_scaling_csv(const std::vector<ScalingRow>& rows, const std::string& path);
void write_path_lengths_csv(const PathLengths& lengths, const std::string& path);

}  // namespace ssg
