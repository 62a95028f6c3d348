#include "ssg/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <random>
#include <stdexcept>
#include <unordered_map>

#include "ssg/knn_graph.hpp"
#include "ssg/parallel.hpp"

namespace ssg {

double precision(std::span<const std::uint32_t> result, std::span<const std::uint32_t> truth) {
  if (truth.empty()) throw std::invalid_argument("precision: empty ground truth");
  std::vector<std::uint32_t> sorted(truth.begin(), truth.end());
  std::sort(sorted.begin(), sorted.end());
  std::size_t hits = 0;
  for (std::uint32_t id : result)
    if (std::binary_search(sorted.begin(), sorted.end(), id)) ++hits;
  return static_cast<double>(hits) / static_cast<double>(truth.size());
}

std::vector<EvalRecord> qps_curve(const NssgIndex& index, const DatasetMatrix& data,
                                  const DatasetMatrix& queries, const GroundTruth& truth,
                                  std::span<const std::uint32_t> pool_sizes, std::uint32_t k,
                                  int threads, std::ostream* warnings) {
  if (truth.ids.size() != queries.size())
    throw std::invalid_argument("qps_curve: ground truth / query count mismatch");
  if (k > truth.k) throw std::invalid_argument("qps_curve: k exceeds ground-truth k");

  std::vector<EvalRecord> records;
  double prev_precision = -1.0;
  for (std::uint32_t l : pool_sizes) {
    std::uint32_t eval_k = std::min(k, l);
    std::vector<SearchStats> stats;
    auto t0 = std::chrono::steady_clock::now();
    IdList results = batch_search(index, data, queries, l, eval_k, threads, &stats);
    auto t1 = std::chrono::steady_clock::now();
    double seconds = std::chrono::duration<double>(t1 - t0).count();

    double sum_precision = 0.0;
    double sum_hops = 0.0;
    double sum_comps = 0.0;
    for (std::size_t q = 0; q < queries.size(); ++q) {
      std::span<const std::uint32_t> g(truth.ids[q].data(), std::min<std::size_t>(k, truth.ids[q].size()));
      sum_precision += precision(results[q], g);
      sum_hops += stats[q].hops;
      sum_comps += stats[q].dist_comps;
    }
    EvalRecord rec;
    rec.l = l;
    rec.precision = sum_precision / static_cast<double>(queries.size());
    rec.qps = seconds > 0.0 ? static_cast<double>(queries.size()) / seconds : 0.0;
    rec.mean_hops = sum_hops / static_cast<double>(queries.size());
    rec.mean_dist_comps = sum_comps / static_cast<double>(queries.size());
    rec.threads = resolve_threads(threads);
    if (warnings && prev_precision > rec.precision + 1e-12)
      *warnings << "qps_curve: precision dropped from " << prev_precision << " to "
                << rec.precision << " at l=" << l << "\n";
    prev_precision = rec.precision;
    records.push_back(rec);
  }
  return records;
}

namespace {

struct RowKey {
  const float* p;
  std::size_t dim;
  bool operator==(const RowKey& other) const {
    return std::memcmp(p, other.p, dim * sizeof(float)) == 0;
  }
};

struct RowKeyHash {
  std::size_t operator()(const RowKey& key) const {
    return fnv1a64(key.p, key.dim * sizeof(float));
  }
};

}  // namespace

PathLengths path_length_experiment(const AdjacencyGraph& graph, const DatasetMatrix& data,
                                   const DatasetMatrix& indexed_queries,
                                   const DatasetMatrix& unindexed_queries,
                                   std::uint64_t seed, std::uint32_t walk_pool) {
  const std::size_t n = data.size();
  const std::size_t dim = data.dim();
  if (indexed_queries.dim() != dim || unindexed_queries.dim() != dim)
    throw std::invalid_argument("path_length_experiment: dimension mismatch");

  std::unordered_map<RowKey, std::uint32_t, RowKeyHash> row_ids;
  row_ids.reserve(n);
  for (std::uint32_t i = 0; i < n; ++i)
    row_ids.emplace(RowKey{data.row(i), dim}, i);

  std::vector<std::uint32_t> targets(indexed_queries.size());
  for (std::size_t q = 0; q < indexed_queries.size(); ++q) {
    auto it = row_ids.find(RowKey{indexed_queries.row(q), dim});
    if (it == row_ids.end())
      throw std::invalid_argument("path_length_experiment: indexed query not in dataset");
    targets[q] = it->second;
  }
  for (std::size_t q = 0; q < unindexed_queries.size(); ++q) {
    if (row_ids.count(RowKey{unindexed_queries.row(q), dim}))
      throw std::invalid_argument("path_length_experiment: unindexed query found in dataset");
  }

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::uint32_t> pick(0, static_cast<std::uint32_t>(n - 1));

  PathLengths out;
  std::uint64_t reached = 0;
  double hops = 0.0;
  for (std::size_t q = 0; q < indexed_queries.size(); ++q) {
    std::uint32_t top = 0;
    hops += search_path_length(graph, data, indexed_queries.row(q), pick(rng), walk_pool, &top);
    if (top == targets[q]) ++reached;
  }
  out.l_indexed = hops / static_cast<double>(indexed_queries.size());
  out.indexed_reached = static_cast<double>(reached) / static_cast<double>(indexed_queries.size());

  hops = 0.0;
  for (std::size_t q = 0; q < unindexed_queries.size(); ++q) {
    hops += search_path_length(graph, data, unindexed_queries.row(q), pick(rng), walk_pool);
  }
  out.l_unindexed = hops / static_cast<double>(unindexed_queries.size());
  return out;
}

std::vector<AlphaSweepRow> alpha_sweep(const DatasetMatrix& data,
                                       std::span<const float> alphas,
                                       const NssgParams& base_params,
                                       const CandidateSource& source,
                                       const DatasetMatrix& queries, const GroundTruth& truth,
                                       std::span<const std::uint32_t> pool_sizes,
                                       std::uint32_t k) {
  std::vector<AlphaSweepRow> rows;
  for (float alpha : alphas) {
    NssgParams params = base_params;
    params.alpha = AngleParam(alpha);
    NssgIndex index = build_nssg(data, source, params);
    auto records = qps_curve(index, data, queries, truth, pool_sizes, k);
    for (const EvalRecord& rec : records) {
      AlphaSweepRow row;
      row.alpha_degrees = alpha;
      row.mean_out_degree = index.graph.mean_out_degree();
      row.record = rec;
      rows.push_back(row);
    }
  }
  return rows;
}

std::vector<ScalingRow> scaling_experiment(const DatasetMatrix& data,
                                           const DatasetMatrix& queries,
                                           const ScalingConfig& config) {
  if (config.sizes.empty()) throw std::invalid_argument("scaling_experiment: no sizes");
  for (std::size_t i = 0; i < config.sizes.size(); ++i) {
    if (config.sizes[i] > data.size() || (i > 0 && config.sizes[i] <= config.sizes[i - 1]))
      throw std::invalid_argument("scaling_experiment: sizes must be ascending and <= n");
  }

  std::vector<ScalingRow> rows;
  for (std::size_t size : config.sizes) {
    DatasetMatrix prefix = data.prefix(size);
    // candidate-source construction sits outside the timed stage; let it use
    // all cores regardless of the timing thread count
    KnnGraph knn = exact_knn_graph(prefix, config.knn_k, 0);
    KnnPropagationSource source(knn, prefix);

    std::vector<double> times;
    NssgIndex index;
    for (std::uint32_t rep = 0; rep < std::max(1u, config.repetitions); ++rep) {
      auto t0 = std::chrono::steady_clock::now();
      NssgParams params = config.params;
      params.threads = config.threads;
      index = build_nssg(prefix, source, params);
      auto t1 = std::chrono::steady_clock::now();
      times.push_back(std::chrono::duration<double>(t1 - t0).count());
    }
    std::sort(times.begin(), times.end());

    ScalingRow row;
    row.n = size;
    row.edge_selection_seconds = times[times.size() / 2];

    GroundTruth truth = ground_truth(prefix, queries, config.k, 0);
    std::uint32_t l = std::max<std::uint32_t>(config.k, 10);
    while (true) {
      std::vector<SearchStats> stats;
      IdList results = batch_search(index, prefix, queries, l, config.k, 0, &stats);
      double sum_p = 0.0, sum_h = 0.0;
      for (std::size_t q = 0; q < queries.size(); ++q) {
        sum_p += precision(results[q], truth.ids[q]);
        sum_h += stats[q].hops;
      }
      row.precision = sum_p / static_cast<double>(queries.size());
      row.mean_hops = sum_h / static_cast<double>(queries.size());
      row.l = l;
      if (row.precision >= config.target_precision || l >= size) break;
      l = std::min<std::uint32_t>(static_cast<std::uint32_t>(l * 1.5) + 1,
                                  static_cast<std::uint32_t>(size));
    }
    rows.push_back(row);
  }
  return rows;
}

namespace {

std::ofstream open_csv(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << std::setprecision(6) << std::fixed;
  return out;
}

}  // namespace

void write_eval_csv(const std::vector<EvalRecord>& records, const std::string& path) {
  auto out = open_csv(path);
  out << "l,precision,qps,mean_hops,mean_dist_comps,threads\n";
  for (const EvalRecord& r : records)
    out << r.l << ',' << r.precision << ',' << r.qps << ',' << r.mean_hops << ','
        << r.mean_dist_comps << ',' << r.threads << '\n';
}

void write_stats_csv(const std::vector<SearchStats>& stats, const std::string& path) {
  auto out = open_csv(path);
  out << "query_id,hops,dist_comps,visited\n";
  for (std::size_t q = 0; q < stats.size(); ++q)
    out << q << ',' << stats[q].hops << ',' << stats[q].dist_comps << ','
        << stats[q].visited << '\n';
}

void write_alpha_sweep_csv(const std::vector<AlphaSweepRow>& rows, const std::string& path) {
  auto out = open_csv(path);
  out << "alpha_degrees,mean_out_degree,l,precision,qps,mean_hops,mean_dist_comps\n";
  for (const AlphaSweepRow& r : rows)
    out << r.alpha_degrees << ',' << r.mean_out_degree << ',' << r.record.l << ','
        << r.record.precision << ',' << r.record.qps << ',' << r.record.mean_hops << ','
        << r.record.mean_dist_comps << '\n';
}

void write_scaling_csv(const std::vector<ScalingRow>& rows, const std::string& path) {
  auto out = open_csv(path);
  out << "n,edge_selection_seconds,l,precision,mean_hops\n";
  for (const ScalingRow& r : rows)
    out << r.n << ',' << r.edge_selection_seconds << ',' << r.l << ',' << r.precision << ','
        << r.mean_hops << '\n';
}

void write_path_lengths_csv(const PathLengths& lengths, const std::string& path) {
  auto out = open_csv(path);
  out << "l_indexed,l_unindexed,indexed_reached\n";
  out << lengths.l_indexed << ',' << lengths.l_unindexed << ',' << lengths.indexed_reached
      << '\n';
}

}  // namespace ssg
