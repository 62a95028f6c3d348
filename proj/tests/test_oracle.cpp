#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>

#include "ssg/dataset.hpp"
#include "ssg/distance.hpp"
#include "ssg/oracle.hpp"
#include "ssg/ssg_exact.hpp"
#include "test_helpers.hpp"

using namespace ssg;

namespace {

DatasetMatrix matrix_1d(std::vector<float> values) {
  std::size_t n = values.size();
  return DatasetMatrix(n, 1, std::move(values));
}

AdjacencyGraph complete_graph(const DatasetMatrix& data) {
  std::size_t n = data.size();
  AdjacencyGraph graph(n, n - 1, true);
  std::vector<Neighbor> row;
  for (std::uint32_t u = 0; u < n; ++u) {
    row.clear();
    for (std::uint32_t v = 0; v < n; ++v) {
      if (v == u) continue;
      row.emplace_back(v, squared_euclidean(data.row(u), data.row(v), data.dim()));
    }
    std::sort(row.begin(), row.end(), neighbor_less);
    graph.set_row(u, row);
  }
  return graph;
}

}  // namespace

TEST_CASE("exact_knn trivial cases") {
  auto data = matrix_1d({0.0f, 1.0f, 2.0f});
  auto nn = exact_knn(data, std::vector<float>{0.9f}.data(), 1);
  CHECK(nn[0].id == 1);

  // query equal to an indexed point
  nn = exact_knn(data, data.row(2), 1);
  CHECK(nn[0].id == 2);
  CHECK(nn[0].dist == 0.0f);

  CHECK_THROWS(exact_knn(data, data.row(0), 4));
}

TEST_CASE("exact_knn with k=n is a distance-sorted permutation") {
  auto data = ssg_test::random_matrix(200, 6, 31);
  auto nn = exact_knn(data, data.row(17), 200);
  std::vector<char> seen(200, 0);
  for (std::size_t i = 0; i < nn.size(); ++i) {
    CHECK(!seen[nn[i].id]);
    seen[nn[i].id] = 1;
    if (i > 0) CHECK(nn[i - 1].dist <= nn[i].dist);
  }
}

TEST_CASE("exact_knn agrees with the full-sort oracle on all self-queries") {
  auto data = ssg_test::random_matrix(1000, 16, 77);
  for (std::size_t q = 0; q < data.size(); ++q) {
    auto got = exact_knn(data, data.row(q), 10);
    auto expect = ssg_test::full_sort_knn(data, data.row(q), 10);
    for (std::size_t i = 0; i < 10; ++i) CHECK(got[i].id == expect[i]);
  }
}

TEST_CASE("ground_truth self queries and exhaustive case") {
  auto data = ssg_test::random_matrix(120, 5, 3);
  GroundTruth gt = ground_truth(data, data, 1);
  for (std::size_t q = 0; q < data.size(); ++q) CHECK(gt.ids[q][0] == q);

  auto one = data.subset(std::vector<std::uint32_t>{7});
  GroundTruth full = ground_truth(data, one, static_cast<std::uint32_t>(data.size()));
  std::vector<char> seen(data.size(), 0);
  for (std::uint32_t id : full.ids[0]) seen[id] = 1;
  for (char c : seen) CHECK(c == 1);
}

TEST_CASE("ground_truth is deterministic across runs") {
  auto data = ssg_test::random_matrix(2000, 12, 5);
  auto queries = ssg_test::random_matrix(100, 12, 6);
  GroundTruth a = ground_truth(data, queries, 100, 2);
  GroundTruth b = ground_truth(data, queries, 100, 2);
  save_ivecs(a.id_lists(), "/tmp/ssg_test_gt_a.ivecs");
  save_ivecs(b.id_lists(), "/tmp/ssg_test_gt_b.ivecs");
  std::ifstream fa("/tmp/ssg_test_gt_a.ivecs", std::ios::binary);
  std::ifstream fb("/tmp/ssg_test_gt_b.ivecs", std::ios::binary);
  std::vector<char> ba{std::istreambuf_iterator<char>(fa), std::istreambuf_iterator<char>()};
  std::vector<char> bb{std::istreambuf_iterator<char>(fb), std::istreambuf_iterator<char>()};
  CHECK(ba == bb);

  auto wrong_dim = ssg_test::random_matrix(4, 5, 1);
  CHECK_THROWS(ground_truth(data, wrong_dim, 1));
}

TEST_CASE("verify_monotonic passes on a complete graph") {
  auto data = ssg_test::random_matrix(60, 3, 15);
  auto graph = complete_graph(data);
  auto report = verify_monotonic(graph, data, 60ull * 59ull, 0);
  CHECK(report.pairs_checked == 60ull * 59ull);
  CHECK(report.failures == 0);
}

TEST_CASE("verify_monotonic reports stuck pairs on a directed chain without looping") {
  // a(0) -> b(10) -> c(1): several pairs have no strictly-closer step.
  auto data = matrix_1d({0.0f, 10.0f, 1.0f});
  AdjacencyGraph graph(3, 1, true);
  graph.set_row(0, std::vector<Neighbor>{{1, 100.0f}});
  graph.set_row(1, std::vector<Neighbor>{{2, 81.0f}});
  auto report = verify_monotonic(graph, data, 6, 0);
  CHECK(report.pairs_checked == 6);
  CHECK(report.failures == 4);
  bool found = false;
  for (const auto& f : report.failing_pairs)
    if (f.start == 0 && f.target == 2 && f.stuck == 0) found = true;
  CHECK(found);
}

TEST_CASE("verify_monotonic on a small exact construction reports zero failures") {
  auto data = ssg_test::random_matrix(200, 2, 123);
  auto graph = build_ssg_exact(data, AngleParam(60.0f));
  auto report = verify_monotonic(graph, data, 200ull * 199ull, 0);
  CHECK(report.failures == 0);
}

TEST_CASE("greedy walk terminates within n hops (property)") {
  auto data = ssg_test::random_matrix(150, 2, 9);
  auto graph = build_ssg_exact(data, AngleParam(45.0f));
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<std::uint32_t> pick(0, 149);
  for (int t = 0; t < 300; ++t) {
    std::uint32_t s = pick(rng), q = pick(rng);
    if (s == q) continue;
    auto walk = greedy_walk(graph, data, s, data.row(q), q);
    CHECK(walk.hops <= 150);
    CHECK(walk.reached);
  }
}

TEST_CASE("unindexed_monotonic_rate on a complete graph is 1.0") {
  auto data = ssg_test::random_matrix(80, 2, 21);
  auto queries = ssg_test::random_matrix(20, 2, 22, 2.0f, 3.0f);
  auto graph = complete_graph(data);
  CHECK(unindexed_monotonic_rate(graph, data, queries) == 1.0);
}

TEST_CASE("unindexed_monotonic_rate rejects queries present in the dataset") {
  auto data = ssg_test::random_matrix(30, 2, 2);
  auto dup = data.subset(std::vector<std::uint32_t>{5});
  auto graph = complete_graph(data);
  CHECK_THROWS(unindexed_monotonic_rate(graph, data, dup));
}
