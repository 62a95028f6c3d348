#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <memory>
#include <set>

#include "ssg/knn_graph.hpp"
#include "ssg/oracle.hpp"
#include "ssg/search.hpp"
#include "ssg/ssg_exact.hpp"
#include "test_helpers.hpp"

using namespace ssg;

namespace {

NssgIndex small_index(const DatasetMatrix& data, std::uint32_t l, std::uint32_t r,
                      std::uint32_t s, std::uint64_t seed = 0) {
  ExactOracleSource source(data);
  NssgParams params;
  params.l = l;
  params.r = r;
  params.s = s;
  params.seed = seed;
  return build_nssg(data, source, params);
}

}  // namespace

TEST_CASE("two-node search returns the nearer node in one hop") {
  DatasetMatrix data(2, 1, std::vector<float>{0.0f, 1.0f});
  NssgIndex index = small_index(data, 1, 1, 1);
  SearchStats stats;
  float q = 0.9f;
  auto nn = search_on_graph(index, data, &q, 4, 1, &stats);
  REQUIRE(nn.size() == 1);
  CHECK(nn[0].id == 1);
  CHECK(stats.hops >= 1);
}

TEST_CASE("exhaustive pool equals the oracle on every query") {
  auto data = ssg_test::random_matrix(500, 8, 11);
  auto queries = ssg_test::random_matrix(50, 8, 12);
  NssgIndex index = small_index(data, 60, 20, 5);
  for (std::size_t q = 0; q < queries.size(); ++q) {
    auto got = search_on_graph(index, data, queries.row(q), 500, 10);
    auto expect = exact_knn(data, queries.row(q), 10);
    REQUIRE(got.size() == 10);
    for (std::size_t i = 0; i < 10; ++i) {
      CHECK(got[i].id == expect[i].id);
      CHECK(got[i].dist == expect[i].dist);
    }
  }
}

TEST_CASE("self-queries return themselves at rank 1") {
  auto data = ssg_test::random_matrix(1000, 6, 13);
  NssgIndex index = small_index(data, 50, 16, 8);
  for (std::uint32_t i = 0; i < 1000; i += 7) {
    auto nn = search_on_graph(index, data, data.row(i), 16, 1);
    REQUIRE(!nn.empty());
    CHECK(nn[0].id == i);
  }
}

TEST_CASE("results are ranked and stats satisfy their invariants") {
  auto data = ssg_test::random_matrix(800, 10, 17);
  auto queries = ssg_test::random_matrix(60, 10, 18);
  NssgIndex index = small_index(data, 40, 14, 6);
  SearchScratch scratch;
  for (std::size_t q = 0; q < queries.size(); ++q) {
    SearchStats stats;
    auto nn = search_on_graph(index, data, queries.row(q), 24, 10, &stats, &scratch);
    REQUIRE(nn.size() == 10);
    std::set<std::uint32_t> distinct;
    for (std::size_t i = 0; i < nn.size(); ++i) {
      distinct.insert(nn[i].id);
      if (i > 0) CHECK(nn[i - 1].dist <= nn[i].dist);
    }
    CHECK(distinct.size() == nn.size());
    CHECK(stats.visited >= stats.hops);
    CHECK(stats.dist_comps >= stats.visited - 1);
  }
}

TEST_CASE("search rejects k > l") {
  auto data = ssg_test::random_matrix(50, 4, 19);
  NssgIndex index = small_index(data, 10, 5, 2);
  CHECK_THROWS(search_on_graph(index, data, data.row(0), 5, 6));
}

TEST_CASE("batch search is identical across thread counts") {
  auto data = ssg_test::random_matrix(700, 8, 23);
  auto queries = ssg_test::random_matrix(80, 8, 24);
  NssgIndex index = small_index(data, 40, 14, 5);
  IdList serial = batch_search(index, data, queries, 30, 10, 1);
  IdList parallel = batch_search(index, data, queries, 30, 10, 2);
  CHECK(serial == parallel);
}

TEST_CASE("graph-search candidate source feeds a build") {
  auto data = ssg_test::random_matrix(400, 6, 29);
  NssgIndex bootstrap = small_index(data, 40, 14, 4);
  GraphSearchSource source(bootstrap, data, 80);

  auto pool = source.candidates(7, 30);
  CHECK(pool.size() == 30);
  for (std::size_t i = 1; i < pool.size(); ++i) CHECK(!neighbor_less(pool[i], pool[i - 1]));
  for (const Neighbor& e : pool) CHECK(e.id != 7);

  NssgParams params;
  params.l = 30;
  params.r = 12;
  params.s = 4;
  NssgIndex rebuilt = build_nssg(data, source, params);
  for (std::uint32_t root : rebuilt.navigating)
    CHECK(ssg_test::bfs_reachable_count(rebuilt.graph, root) == 400);
}

TEST_CASE("sharded build partitions into near-equal shards") {
  auto data = ssg_test::random_matrix(1000, 5, 31);
  NssgParams params;
  params.l = 20;
  params.r = 10;
  params.s = 3;
  SourceFactory factory = [](const DatasetMatrix& shard) {
    return std::make_unique<ExactOracleSource>(shard);
  };
  ShardedIndex sharded = sharded_build(data, 4, params, factory, 77);
  validate_sharded(sharded);
  REQUIRE(sharded.shards.size() == 4);
  for (const auto& shard : sharded.shards) {
    CHECK(shard.graph.size() >= 250);
    CHECK(shard.graph.size() <= 250);
  }

  ShardedIndex uneven = sharded_build(data, 3, params, factory, 77);
  std::vector<std::size_t> sizes;
  for (const auto& shard : uneven.shards) sizes.push_back(shard.graph.size());
  CHECK(*std::max_element(sizes.begin(), sizes.end()) -
            *std::min_element(sizes.begin(), sizes.end()) <=
        1);
}

TEST_CASE("one shard reproduces the plain build and search") {
  auto data = ssg_test::random_matrix(300, 4, 37);
  NssgParams params;
  params.l = 25;
  params.r = 10;
  params.s = 3;
  params.seed = 5;
  SourceFactory factory = [](const DatasetMatrix& shard) {
    return std::make_unique<ExactOracleSource>(shard);
  };
  ShardedIndex sharded = sharded_build(data, 1, params, factory, 1);
  ExactOracleSource source(data);
  NssgIndex plain = build_nssg(data, source, params);
  CHECK(index_equals(sharded.shards[0], plain));

  auto queries = ssg_test::random_matrix(20, 4, 38);
  for (std::size_t q = 0; q < queries.size(); ++q) {
    auto [merged, stats] = sharded_search(sharded, queries.row(q), 20, 5);
    auto direct = search_on_graph(plain, data, queries.row(q), 20, 5);
    REQUIRE(merged.size() == direct.size());
    for (std::size_t i = 0; i < merged.size(); ++i) CHECK(merged[i].id == direct[i].id);
  }
}

TEST_CASE("sharded self-queries find their own shard's point") {
  auto data = ssg_test::random_matrix(600, 6, 41);
  NssgParams params;
  params.l = 25;
  params.r = 12;
  params.s = 3;
  SourceFactory factory = [](const DatasetMatrix& shard) {
    return std::make_unique<ExactOracleSource>(shard);
  };
  ShardedIndex sharded = sharded_build(data, 4, params, factory, 3);
  for (std::uint32_t i = 0; i < 600; i += 13) {
    auto [nn, stats] = sharded_search(sharded, data.row(i), 16, 1);
    REQUIRE(!nn.empty());
    CHECK(nn[0].id == i);
  }
}

TEST_CASE("sharded results carry k distinct global ids") {
  auto data = ssg_test::random_matrix(500, 5, 43);
  NssgParams params;
  params.l = 20;
  params.r = 10;
  params.s = 2;
  SourceFactory factory = [](const DatasetMatrix& shard) {
    return std::make_unique<ExactOracleSource>(shard);
  };
  ShardedIndex sharded = sharded_build(data, 4, params, factory, 9);
  auto queries = ssg_test::random_matrix(30, 5, 44);
  for (std::size_t q = 0; q < queries.size(); ++q) {
    auto [nn, stats] = sharded_search(sharded, queries.row(q), 20, 10);
    std::set<std::uint32_t> distinct;
    for (const Neighbor& e : nn) {
      CHECK(e.id < 500);
      distinct.insert(e.id);
    }
    CHECK(distinct.size() == nn.size());
    CHECK(nn.size() == 10);
  }
}
