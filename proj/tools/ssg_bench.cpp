// Benchmark and indexing harness. Run `ssg-bench --help` for the subcommand
// list; every dataset and id-list file is fvecs/ivecs, indices use the NSSG
// binary format.

#include <CLI11.hpp>
#include <cstdio>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "ssg/dataset.hpp"
#include "ssg/eval.hpp"
#include "ssg/knn_graph.hpp"
#include "ssg/nssg.hpp"
#include "ssg/oracle.hpp"
#include "ssg/search.hpp"
#include "ssg/ssg_exact.hpp"

using namespace ssg;

namespace {

void verify_checksum(const NssgIndex& index, const DatasetMatrix& data,
                     const std::string& what) {
  if (index.meta.dataset_checksum != dataset_checksum(data))
    throw std::runtime_error(what + ": index was built from a different dataset "
                                    "(checksum mismatch)");
}

std::string shard_index_path(const std::string& prefix, std::uint32_t shard) {
  return prefix + ".shard" + std::to_string(shard) + ".nssg";
}
std::string shard_ids_path(const std::string& prefix, std::uint32_t shard) {
  return prefix + ".shard" + std::to_string(shard) + ".ids";
}

ShardedIndex load_sharded(const std::string& prefix, std::uint32_t shards,
                          const DatasetMatrix& data) {
  ShardedIndex sharded;
  sharded.total_n = data.size();
  for (std::uint32_t sh = 0; sh < shards; ++sh) {
    NssgIndex index = load_index(shard_index_path(prefix, sh));
    IdList ids = load_ivecs(shard_ids_path(prefix, sh));
    if (ids.size() != 1 || ids[0].size() != index.graph.size())
      throw std::runtime_error("sharded index: bad id map " + shard_ids_path(prefix, sh));
    DatasetMatrix shard_data = data.subset(ids[0]);
    verify_checksum(index, shard_data, shard_index_path(prefix, sh));
    sharded.shards.push_back(std::move(index));
    sharded.shard_data.push_back(std::move(shard_data));
    sharded.to_global.push_back(std::move(ids[0]));
  }
  validate_sharded(sharded);
  return sharded;
}

std::vector<std::uint32_t> parse_u32_list(const std::vector<std::string>& items) {
  std::vector<std::uint32_t> out;
  for (const auto& s : items) out.push_back(static_cast<std::uint32_t>(std::stoul(s)));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Satellite system graph indexing and search benchmark"};
  app.require_subcommand(1);

  // ---- gen-data ----------------------------------------------------------
  struct {
    SyntheticParams params;
    std::size_t nq = 0;
    float query_scale = 3.0f;
    std::string out;
    std::string query_out;
  } gen;
  {
    auto* cmd = app.add_subcommand("gen-data", "Generate a clustered synthetic dataset");
    cmd->add_option("--n", gen.params.n, "point count");
    cmd->add_option("--dim", gen.params.dim, "ambient dimension");
    cmd->add_option("--clusters", gen.params.clusters, "mixture components");
    cmd->add_option("--intrinsic", gen.params.intrinsic_dim, "intrinsic dimension (0 = dim)");
    cmd->add_option("--spread", gen.params.cluster_spread, "cluster spread");
    cmd->add_option("--seed", gen.params.seed, "rng seed");
    cmd->add_option("--out", gen.out, "output fvecs")->required();
    cmd->add_option("--nq", gen.nq, "held-out query count");
    cmd->add_option("--query-out", gen.query_out, "query output fvecs");
    cmd->add_option("--query-spread-scale", gen.query_scale,
                    "query draw widening factor");
    cmd->callback([&] {
      if (gen.nq > 0) {
        if (gen.query_out.empty())
          throw CLI::ValidationError("gen-data", "--query-out required with --nq");
        auto pair = generate_clustered_pair(gen.params, gen.nq, gen.query_scale);
        save_fvecs(pair.base, gen.out);
        save_fvecs(pair.queries, gen.query_out);
        std::cout << "wrote " << gen.out << " (" << pair.base.size() << "x"
                  << pair.base.dim() << ") and " << gen.query_out << " ("
                  << pair.queries.size() << " queries)\n";
      } else {
        DatasetMatrix data = generate_clustered(gen.params);
        save_fvecs(data, gen.out);
        std::cout << "wrote " << gen.out << " (" << data.size() << "x" << data.dim()
                  << ")\n";
      }
    });
  }

  // ---- gt ----------------------------------------------------------------
  struct {
    std::string data, query, out, dist_out;
    std::uint32_t k = 100;
    int threads = 0;
  } gt;
  {
    auto* cmd = app.add_subcommand("gt", "Exact ground truth via brute force");
    cmd->add_option("--data", gt.data)->required();
    cmd->add_option("--query", gt.query)->required();
    cmd->add_option("--k", gt.k);
    cmd->add_option("--out", gt.out, "ids ivecs")->required();
    cmd->add_option("--dist-out", gt.dist_out, "distances fvecs");
    cmd->add_option("--threads", gt.threads);
    cmd->callback([&] {
      DatasetMatrix data = load_fvecs(gt.data);
      DatasetMatrix queries = load_fvecs(gt.query);
      GroundTruth truth = ground_truth(data, queries, gt.k, gt.threads);
      save_ivecs(truth.id_lists(), gt.out);
      if (!gt.dist_out.empty()) {
        std::vector<float> flat;
        for (const auto& row : truth.dists) flat.insert(flat.end(), row.begin(), row.end());
        save_fvecs(DatasetMatrix(truth.dists.size(), gt.k, std::move(flat)), gt.dist_out);
      }
      std::cout << "wrote " << gt.out << " (" << queries.size() << " queries, k=" << gt.k
                << ")\n";
    });
  }

  // ---- build-knn ---------------------------------------------------------
  struct {
    std::string data, out;
    NnDescentParams params;
    bool exact = false;
    int threads = 1;
  } knn;
  {
    auto* cmd = app.add_subcommand("build-knn", "Approximate k-NN graph via nn-descent");
    cmd->add_option("--data", knn.data)->required();
    cmd->add_option("--k", knn.params.k);
    cmd->add_option("--rho", knn.params.rho);
    cmd->add_option("--iters", knn.params.iters);
    cmd->add_option("--delta", knn.params.delta);
    cmd->add_option("--seed", knn.params.seed);
    cmd->add_option("--threads", knn.threads);
    cmd->add_flag("--exact", knn.exact, "brute-force graph instead of nn-descent");
    cmd->add_option("--out", knn.out, "ivecs rows")->required();
    cmd->callback([&] {
      DatasetMatrix data = load_fvecs(knn.data);
      KnnGraph graph;
      if (knn.exact) {
        graph = exact_knn_graph(data, knn.params.k, knn.threads);
      } else {
        knn.params.threads = knn.threads;
        NnDescentStats stats;
        graph = nn_descent(data, knn.params, &stats);
        std::cout << "nn-descent: " << stats.iterations_run << " iterations\n";
      }
      save_knn_ivecs(graph, knn.out);
      std::cout << "wrote " << knn.out << " (k=" << graph.k << ")\n";
    });
  }

  // ---- build-ssg ---------------------------------------------------------
  struct {
    std::string data, out;
    float alpha = 60.0f;
    std::uint32_t max_degree = 0;
    int threads = 0;
  } bssg;
  {
    auto* cmd = app.add_subcommand("build-ssg", "Exact construction (cubic; desk scale)");
    cmd->add_option("--data", bssg.data)->required();
    cmd->add_option("--alpha", bssg.alpha, "angle in degrees");
    cmd->add_option("--max-degree", bssg.max_degree, "truncate rows after build");
    cmd->add_option("--threads", bssg.threads);
    cmd->add_option("--out", bssg.out, "index file (s=0)")->required();
    cmd->callback([&] {
      DatasetMatrix data = load_fvecs(bssg.data);
      AdjacencyGraph graph = build_ssg_exact(data, AngleParam(bssg.alpha), bssg.threads);
      if (bssg.max_degree > 0) graph = truncate(graph, data, bssg.max_degree);
      NssgIndex index;
      index.meta.alpha_degrees = bssg.alpha;
      index.meta.r = static_cast<std::uint32_t>(graph.cap());
      index.meta.dim = static_cast<std::uint32_t>(data.dim());
      index.meta.dataset_checksum = dataset_checksum(data);
      index.graph = std::move(graph);
      save_index(index, bssg.out);
      std::cout << "wrote " << bssg.out << " aod=" << index.graph.mean_out_degree()
                << " mod=" << index.graph.max_out_degree() << "\n";
    });
  }

  // ---- build-nssg --------------------------------------------------------
  struct {
    std::string data, knn_path, out;
    NssgParams params;
    float alpha = 60.0f;
    std::uint32_t shards = 0;
    std::uint32_t knn_k = 50;
    bool exact_source = false;
    int threads = 0;
  } bn;
  {
    auto* cmd = app.add_subcommand("build-nssg", "Practical index from a candidate source");
    cmd->add_option("--data", bn.data)->required();
    cmd->add_option("--knn", bn.knn_path, "prebuilt k-NN graph (ivecs)");
    cmd->add_flag("--exact-source", bn.exact_source, "use the brute-force source");
    cmd->add_option("--knn-k", bn.knn_k, "k for the internally built graph (sharded mode)");
    cmd->add_option("--l", bn.params.l);
    cmd->add_option("--r", bn.params.r);
    cmd->add_option("--s", bn.params.s);
    cmd->add_option("--alpha", bn.alpha);
    cmd->add_option("--seed", bn.params.seed);
    cmd->add_option("--threads", bn.threads);
    cmd->add_option("--shards", bn.shards, "build a sharded index");
    cmd->add_option("--out", bn.out, "index file, or prefix with --shards")->required();
    cmd->callback([&] {
      DatasetMatrix data = load_fvecs(bn.data);
      bn.params.alpha = AngleParam(bn.alpha);
      bn.params.threads = bn.threads;
      if (bn.shards > 0) {
        SourceFactory factory = [&](const DatasetMatrix& shard) -> std::unique_ptr<CandidateSource> {
          if (bn.exact_source) return std::make_unique<ExactOracleSource>(shard);
          NnDescentParams kp;
          kp.k = bn.knn_k;
          kp.seed = bn.params.seed;
          kp.threads = bn.threads;
          struct Owning : CandidateSource {
            KnnGraph knn;
            const DatasetMatrix* data;
            std::vector<Neighbor> candidates(std::uint32_t node, std::uint32_t l) const override {
              return gather_candidates(knn, *data, node, l);
            }
          };
          auto src = std::make_unique<Owning>();
          src->knn = nn_descent(shard, kp);
          src->data = &shard;
          return src;
        };
        ShardedIndex sharded = sharded_build(data, bn.shards, bn.params, factory,
                                             bn.params.seed);
        for (std::uint32_t sh = 0; sh < bn.shards; ++sh) {
          save_index(sharded.shards[sh], shard_index_path(bn.out, sh));
          save_ivecs({sharded.to_global[sh]}, shard_ids_path(bn.out, sh));
        }
        std::cout << "wrote " << bn.shards << " shards at " << bn.out << ".shard*\n";
        return;
      }
      std::unique_ptr<CandidateSource> source;
      KnnGraph knn_graph;
      if (!bn.knn_path.empty()) {
        knn_graph = load_knn_ivecs(bn.knn_path, data);
        source = std::make_unique<KnnPropagationSource>(knn_graph, data);
      } else if (bn.exact_source) {
        source = std::make_unique<ExactOracleSource>(data);
      } else {
        throw CLI::ValidationError("build-nssg", "need --knn or --exact-source");
      }
      NssgBuildReport report;
      NssgIndex index = build_nssg(data, *source, bn.params, &report);
      save_index(index, bn.out);
      std::cout << "wrote " << bn.out << " aod=" << index.graph.mean_out_degree()
                << " mod=" << index.graph.max_out_degree()
                << " spanning_edges=" << report.spanning_edges.size() << "\n";
    });
  }

  // ---- search ------------------------------------------------------------
  struct {
    std::string data, query, index, out, stats_out;
    std::uint32_t pool = 100, k = 10, shards = 0;
    int threads = 1;
  } se;
  {
    auto* cmd = app.add_subcommand("search", "Greedy best-first k-NN search");
    cmd->add_option("--data", se.data)->required();
    cmd->add_option("--query", se.query)->required();
    cmd->add_option("--index", se.index)->required();
    cmd->add_option("--pool", se.pool);
    cmd->add_option("--k", se.k);
    cmd->add_option("--shards", se.shards);
    cmd->add_option("--threads", se.threads);
    cmd->add_option("--out", se.out, "result ids ivecs")->required();
    cmd->add_option("--stats-out", se.stats_out, "per-query stats CSV");
    cmd->callback([&] {
      DatasetMatrix data = load_fvecs(se.data);
      DatasetMatrix queries = load_fvecs(se.query);
      IdList results(queries.size());
      std::vector<SearchStats> stats(queries.size());
      if (se.shards > 0) {
        ShardedIndex sharded = load_sharded(se.index, se.shards, data);
        for (std::size_t q = 0; q < queries.size(); ++q) {
          auto [nn, st] = sharded_search(sharded, queries.row(q), se.pool, se.k, se.threads);
          for (const Neighbor& e : nn) results[q].push_back(e.id);
          stats[q] = st;
        }
      } else {
        NssgIndex index = load_index(se.index);
        verify_checksum(index, data, se.index);
        results = batch_search(index, data, queries, se.pool, se.k, se.threads, &stats);
      }
      save_ivecs(results, se.out);
      if (!se.stats_out.empty()) write_stats_csv(stats, se.stats_out);
      std::cout << "wrote " << se.out << " (" << queries.size() << " queries)\n";
    });
  }

  // ---- eval --------------------------------------------------------------
  struct {
    std::string data, query, gt_path, index, out;
    std::vector<std::string> pools{"10", "20", "50", "100", "200"};
    std::uint32_t k = 10;
    int threads = 1;
  } ev;
  {
    auto* cmd = app.add_subcommand("eval", "Precision / QPS curve over pool sizes");
    cmd->add_option("--data", ev.data)->required();
    cmd->add_option("--query", ev.query)->required();
    cmd->add_option("--gt", ev.gt_path)->required();
    cmd->add_option("--index", ev.index)->required();
    cmd->add_option("--pool", ev.pools, "pool sizes");
    cmd->add_option("--k", ev.k);
    cmd->add_option("--threads", ev.threads, "search threads (1 = timing mode)");
    cmd->add_option("--out", ev.out, "CSV")->required();
    cmd->callback([&] {
      DatasetMatrix data = load_fvecs(ev.data);
      DatasetMatrix queries = load_fvecs(ev.query);
      IdList gt_ids = load_ivecs(ev.gt_path);
      NssgIndex index = load_index(ev.index);
      verify_checksum(index, data, ev.index);
      GroundTruth truth;
      truth.k = gt_ids.empty() ? 0 : static_cast<std::uint32_t>(gt_ids[0].size());
      truth.ids = std::move(gt_ids);
      auto pools = parse_u32_list(ev.pools);
      auto records = qps_curve(index, data, queries, truth, pools, ev.k, ev.threads,
                               &std::cerr);
      write_eval_csv(records, ev.out);
      for (const EvalRecord& rec : records)
        std::cout << "l=" << rec.l << " precision=" << rec.precision << " qps=" << rec.qps
                  << "\n";
    });
  }

  // ---- path-lengths ------------------------------------------------------
  struct {
    std::string data, query, index, out;
    std::uint32_t nq_indexed = 200, walk_pool = 8;
    std::uint64_t seed = 0;
  } pla;
  {
    auto* cmd = app.add_subcommand(
        "path-lengths", "Mean search path length for indexed vs unindexed queries");
    cmd->add_option("--data", pla.data)->required();
    cmd->add_option("--query", pla.query, "unindexed query fvecs")->required();
    cmd->add_option("--index", pla.index)->required();
    cmd->add_option("--nq-indexed", pla.nq_indexed, "indexed queries sampled from data");
    cmd->add_option("--walk-pool", pla.walk_pool);
    cmd->add_option("--seed", pla.seed);
    cmd->add_option("--out", pla.out, "CSV");
    cmd->callback([&] {
      DatasetMatrix data = load_fvecs(pla.data);
      DatasetMatrix queries = load_fvecs(pla.query);
      NssgIndex index = load_index(pla.index);
      verify_checksum(index, data, pla.index);
      auto ids = select_navigating(data.size(),
                                   std::min<std::uint32_t>(pla.nq_indexed,
                                                           static_cast<std::uint32_t>(data.size())),
                                   pla.seed + 1);
      DatasetMatrix indexed = data.subset(ids);
      PathLengths lengths =
          path_length_experiment(index.graph, data, indexed, queries, pla.seed, pla.walk_pool);
      if (!pla.out.empty()) write_path_lengths_csv(lengths, pla.out);
      std::cout << "l_indexed=" << lengths.l_indexed
                << " l_unindexed=" << lengths.l_unindexed
                << " indexed_reached=" << lengths.indexed_reached << "\n";
    });
  }

  // ---- alpha-sweep -------------------------------------------------------
  struct {
    std::string data, query, gt_path, knn_path, out;
    std::vector<std::string> alphas{"30", "45", "60"};
    std::vector<std::string> pools{"20", "50", "100"};
    NssgParams params;
    std::uint32_t k = 10;
  } as;
  {
    auto* cmd = app.add_subcommand("alpha-sweep", "Build and evaluate one index per angle");
    cmd->add_option("--data", as.data)->required();
    cmd->add_option("--query", as.query)->required();
    cmd->add_option("--gt", as.gt_path)->required();
    cmd->add_option("--knn", as.knn_path, "shared k-NN graph (ivecs)")->required();
    cmd->add_option("--alphas", as.alphas);
    cmd->add_option("--pool", as.pools);
    cmd->add_option("--l", as.params.l);
    cmd->add_option("--r", as.params.r);
    cmd->add_option("--s", as.params.s);
    cmd->add_option("--seed", as.params.seed);
    cmd->add_option("--k", as.k);
    cmd->add_option("--out", as.out, "CSV")->required();
    cmd->callback([&] {
      DatasetMatrix data = load_fvecs(as.data);
      DatasetMatrix queries = load_fvecs(as.query);
      IdList gt_ids = load_ivecs(as.gt_path);
      GroundTruth truth;
      truth.k = gt_ids.empty() ? 0 : static_cast<std::uint32_t>(gt_ids[0].size());
      truth.ids = std::move(gt_ids);
      KnnGraph knn_graph = load_knn_ivecs(as.knn_path, data);
      KnnPropagationSource source(knn_graph, data);
      std::vector<float> alphas;
      for (const auto& a : as.alphas) alphas.push_back(std::stof(a));
      auto rows = alpha_sweep(data, alphas, as.params, source, queries, truth,
                              parse_u32_list(as.pools), as.k);
      write_alpha_sweep_csv(rows, as.out);
      std::cout << "wrote " << as.out << " (" << rows.size() << " rows)\n";
    });
  }

  // ---- scaling -----------------------------------------------------------
  struct {
    std::string data, query, out;
    std::vector<std::string> sizes{"1000", "2000", "4000", "8000"};
    ScalingConfig config;
  } sc;
  {
    auto* cmd = app.add_subcommand(
        "scaling", "Edge-selection time and hops-at-target-precision per prefix size");
    cmd->add_option("--data", sc.data)->required();
    cmd->add_option("--query", sc.query)->required();
    cmd->add_option("--sizes", sc.sizes);
    cmd->add_option("--knn-k", sc.config.knn_k);
    cmd->add_option("--l", sc.config.params.l);
    cmd->add_option("--r", sc.config.params.r);
    cmd->add_option("--s", sc.config.params.s);
    cmd->add_option("--k", sc.config.k);
    cmd->add_option("--target", sc.config.target_precision);
    cmd->add_option("--reps", sc.config.repetitions);
    cmd->add_option("--threads", sc.config.threads);
    cmd->add_option("--out", sc.out, "CSV")->required();
    cmd->callback([&] {
      DatasetMatrix data = load_fvecs(sc.data);
      DatasetMatrix queries = load_fvecs(sc.query);
      for (const auto& s : sc.sizes) sc.config.sizes.push_back(std::stoul(s));
      auto rows = scaling_experiment(data, queries, sc.config);
      write_scaling_csv(rows, sc.out);
      for (const ScalingRow& row : rows)
        std::cout << "n=" << row.n << " edge_selection=" << row.edge_selection_seconds
                  << "s l=" << row.l << " hops=" << row.mean_hops << "\n";
    });
  }

  // ---- overlap -----------------------------------------------------------
  struct {
    std::string index_a, index_b;
  } ov;
  {
    auto* cmd = app.add_subcommand("overlap",
                                   "Directed edge overlap |E(a) & E(b)| / |E(a)|");
    cmd->add_option("--index", ov.index_a, "numerator-base index (a)")->required();
    cmd->add_option("--index-b", ov.index_b)->required();
    cmd->callback([&] {
      NssgIndex a = load_index(ov.index_a);
      NssgIndex b = load_index(ov.index_b);
      std::cout << "overlap=" << edge_overlap(a.graph, b.graph) << "\n";
    });
  }

  // ---- verify-monotonic --------------------------------------------------
  struct {
    std::string data, index;
    std::uint64_t pairs = 100000;
    std::uint64_t seed = 0;
    int threads = 0;
  } vm;
  {
    auto* cmd = app.add_subcommand("verify-monotonic",
                                   "Greedy-walk monotonicity audit over node pairs");
    cmd->add_option("--data", vm.data)->required();
    cmd->add_option("--index", vm.index)->required();
    cmd->add_option("--pairs", vm.pairs);
    cmd->add_option("--seed", vm.seed);
    cmd->add_option("--threads", vm.threads);
    cmd->callback([&] {
      DatasetMatrix data = load_fvecs(vm.data);
      NssgIndex index = load_index(vm.index);
      verify_checksum(index, data, vm.index);
      auto report = verify_monotonic(index.graph, data, vm.pairs, vm.seed, vm.threads);
      std::cout << "pairs=" << report.pairs_checked << " failures=" << report.failures
                << "\n";
      for (std::size_t i = 0; i < report.failing_pairs.size() && i < 20; ++i) {
        const auto& f = report.failing_pairs[i];
        std::cout << "  stuck: start=" << f.start << " target=" << f.target
                  << " at=" << f.stuck << "\n";
      }
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
