// Serial vs OpenMP timing for the hot kernels. Every parallel kernel here
// has a serial reference path (threads = 1) that the test suites compare
// against for equality; this target reports the speedup side.

#include <chrono>
#include <cstdio>
#include <string>

#include "ssg/dataset.hpp"
#include "ssg/eval.hpp"
#include "ssg/knn_graph.hpp"
#include "ssg/nssg.hpp"
#include "ssg/oracle.hpp"
#include "ssg/parallel.hpp"
#include "ssg/search.hpp"
#include "ssg/ssg_exact.hpp"

using namespace ssg;
using clk = std::chrono::steady_clock;

namespace {

template <typename F>
double time_once(F&& fn) {
  auto t0 = clk::now();
  fn();
  return std::chrono::duration<double>(clk::now() - t0).count();
}

void report(const std::string& name, double serial, double parallel) {
  std::printf("%-22s serial %8.3fs   parallel %8.3fs   speedup %.2fx\n", name.c_str(),
              serial, parallel, serial / parallel);
}

}  // namespace

int main(int argc, char** argv) {
  std::size_t n = argc > 1 ? std::stoul(argv[1]) : 6000;
  int threads = resolve_threads(0);
  std::printf("n=%zu dim=128 threads=%d\n", n, threads);

  SyntheticParams gen;
  gen.n = n;
  gen.dim = 128;
  gen.intrinsic_dim = 8;
  gen.clusters = 100;
  gen.seed = 7;
  auto [data, queries] = generate_clustered_pair(gen, 500, 1.0f);

  {
    double serial = time_once([&] { ground_truth(data, queries, 100, 1); });
    double parallel = time_once([&] { ground_truth(data, queries, 100, threads); });
    report("ground-truth", serial, parallel);
  }

  DatasetMatrix small = data.prefix(std::min<std::size_t>(n, 2000));
  {
    double serial = time_once([&] { build_ssg_exact(small, AngleParam(60.0f), 1); });
    double parallel = time_once([&] { build_ssg_exact(small, AngleParam(60.0f), threads); });
    report("exact-ssg-build", serial, parallel);
  }

  KnnGraph knn = exact_knn_graph(data, 50, threads);
  KnnPropagationSource source(knn, data);
  NssgParams params;
  params.l = 100;
  params.r = 50;
  params.s = 10;
  {
    params.threads = 1;
    double serial = time_once([&] { build_nssg(data, source, params); });
    params.threads = threads;
    double parallel = time_once([&] { build_nssg(data, source, params); });
    report("nssg-edge-selection", serial, parallel);
  }

  {
    NnDescentParams kp;
    kp.k = 30;
    kp.seed = 3;
    kp.threads = 1;
    double serial = time_once([&] { nn_descent(data, kp); });
    kp.threads = threads;
    double parallel = time_once([&] { nn_descent(data, kp); });
    report("nn-descent", serial, parallel);
  }

  {
    params.threads = threads;
    NssgIndex index = build_nssg(data, source, params);
    double serial = time_once([&] { batch_search(index, data, queries, 100, 10, 1); });
    double parallel =
        time_once([&] { batch_search(index, data, queries, 100, 10, threads); });
    report("batch-search", serial, parallel);
  }
  return 0;
}
