#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "nsm/neighbors.hpp"
#include "nsm/parallel.hpp"
#include "nsm/stability.hpp"
#include "nsm/synth.hpp"
#include "test_support.hpp"

using namespace nsm;
using namespace testsupport;

TEST_SUITE_BEGIN("stability");

TEST_CASE("set-NSM on the line fixture") {
  const auto nn = exact_knn(x_line(), 1);
  const std::vector<std::uint32_t> pair{0, 1};
  CHECK(set_nsm(nn, pair) == doctest::Approx(1.0));
  const std::vector<std::uint32_t> split{1, 2};
  CHECK(set_nsm(nn, split) == doctest::Approx(0.0));
  const std::vector<std::uint32_t> triple{0, 1, 2};
  CHECK(set_nsm(nn, triple) == doctest::Approx(2.0 / 3.0));

  CHECK_THROWS_AS(set_nsm(nn, std::vector<std::uint32_t>{}), Error);
  CHECK_THROWS_AS(set_nsm(nn, std::vector<std::uint32_t>{9}), Error);
}

TEST_CASE("clustering-NSM on the line fixture") {
  const auto nn = exact_knn(x_line(), 1);
  CHECK(clustering_nsm(nn, Clustering::from_assignment({0, 0, 1, 1}, 2)) ==
        doctest::Approx(1.0));
  CHECK(clustering_nsm(nn, Clustering::from_assignment({0, 1, 0, 1}, 2)) ==
        doctest::Approx(0.0));
  // {{0,1,2},{3}} with size weights: (3 * 2/3 + 1 * 0) / 4.
  CHECK(clustering_nsm(nn, Clustering::from_assignment({0, 0, 0, 1}, 2)) ==
        doctest::Approx(0.5));
}

TEST_CASE("point-NSM on the six-point fixture") {
  const auto data = x6();
  const auto nn = exact_knn(data, 3);
  CHECK(point_nsm(nn, 0, 3) == doctest::Approx(1.0));
  CHECK(point_nsm(nn, 2, 2) == doctest::Approx(0.5));
  // Mutual pair: point 0 and its NN 1 are each other's nearest.
  CHECK(point_nsm(nn, 0, 2) == doctest::Approx(1.0));
  CHECK_THROWS_AS(point_nsm(nn, 0, 5), Error);
  CHECK_THROWS_AS(point_nsm(nn, 0, 1), Error);
}

TEST_CASE("point-NSM values are multiples of 1/r in [0,1]") {
  const Dataset data(random_gaussian(80, 4, 21), Metric::euclidean);
  const auto nn = exact_knn(data, 7);
  for (const std::uint32_t r : {2u, 4u, 8u}) {
    for (std::uint32_t u = 0; u < data.size(); ++u) {
      const double value = point_nsm(nn, u, r);
      CHECK(value >= 0.0);
      CHECK(value <= 1.0);
      const double scaled = value * r;
      CHECK(std::abs(scaled - std::round(scaled)) < 1e-12);
    }
  }
}

TEST_CASE("distribution with full sampling equals the per-point oracle") {
  const auto data = x6();
  const auto nn = exact_knn(data, 2);
  const auto dist = point_nsm_distribution(nn, 3, 1.0, 7);
  REQUIRE(dist.values.size() == 6);
  double expect = 0.0;
  for (std::uint32_t u = 0; u < 6; ++u) expect += point_nsm(nn, u, 3);
  CHECK(dist.mean == doctest::Approx(expect / 6.0));
  CHECK(dist.quantiles.count(0.1) == 1);
}

TEST_CASE("isolated blobs have point-NSM 1 everywhere") {
  const auto data = synth_ball_cover({4, 3, 2, 6.0}, 11);
  const auto nn = exact_knn(data, 2);
  const auto dist = point_nsm_distribution(nn, 3, 1.0, 0);
  for (double v : dist.values) CHECK(v == doctest::Approx(1.0));
}

TEST_CASE("distribution sampling is deterministic across worker counts") {
  const Dataset data(random_gaussian(120, 4, 3), Metric::euclidean);
  const auto nn = exact_knn(data, 7);
  set_thread_override(1);
  const auto a = point_nsm_distribution(nn, 8, 0.25, 99);
  set_thread_override(6);
  const auto b = point_nsm_distribution(nn, 8, 0.25, 99);
  set_thread_override(0);
  CHECK(a.ids == b.ids);
  CHECK(a.values == b.values);
  CHECK(a.mean == b.mean);
}

TEST_CASE("tail bound closed form") {
  // 0.8 - sqrt(ln(100) / 100), evaluated independently.
  const double expect = 0.8 - std::sqrt(std::log(100.0) / 100.0);
  CHECK(clusterability_tail_bound(0.8, 50, 0.01) == doctest::Approx(expect));
  CHECK(expect == doctest::Approx(0.58539).epsilon(1e-4));

  CHECK(clusterability_tail_bound(0.8, 50, 1.0) == doctest::Approx(0.8));

  double previous = -1e9;
  for (const std::size_t L : {1u, 5u, 50u, 500u, 50000u}) {
    const double bound = clusterability_tail_bound(0.8, L, 0.05);
    CHECK(bound > previous);
    previous = bound;
  }
  CHECK(clusterability_tail_bound(0.8, 100000000, 0.05) ==
        doctest::Approx(0.8).epsilon(1e-3));
}

TEST_CASE("ball cover enumeration on the line fixture") {
  const auto nn = exact_knn(synth_line(std::vector<double>{0, 1, 2, 3}), 1);
  const auto covers = enumerate_ball_covers(nn, 4, 2);
  REQUIRE(covers.size() == 2);
  std::set<std::vector<std::uint32_t>> centers;
  for (const auto& cover : covers) {
    centers.insert(cover.centers);
    // Both covers induce the partition {{0,1},{2,3}}.
    std::set<std::vector<std::uint32_t>> clusters(cover.clusters.begin(),
                                                  cover.clusters.end());
    CHECK(clusters ==
          std::set<std::vector<std::uint32_t>>{{0, 1}, {2, 3}});
  }
  CHECK(centers == std::set<std::vector<std::uint32_t>>{{0, 3}, {1, 3}});
}

TEST_CASE("ball cover enumeration on isolated blobs") {
  const auto data = synth_ball_cover({3, 3, 2, 6.0}, 2);
  const auto nn = exact_knn(data, 2);
  const auto covers = enumerate_ball_covers(nn, 9, 3);
  CHECK(covers.size() == 27);  // r^L center selections
}

TEST_CASE("ball cover preconditions") {
  const auto data = x6();
  const auto nn = exact_knn(data, 1);
  CHECK_THROWS_AS(enumerate_ball_covers(nn, 6, 4), Error);  // r does not divide m
  const Dataset big(random_gaussian(30, 2, 1), Metric::euclidean);
  const auto big_nn = exact_knn(big, 1);
  CHECK_THROWS_AS(enumerate_ball_covers(big_nn, 30, 2), Error);  // m > 24
}

TEST_CASE("cover expectation matches mean point-NSM on the fixture") {
  const auto data = synth_line(std::vector<double>{0, 1, 2, 3});
  const auto nn = exact_knn(data, 1);
  const auto report = analyze_ball_covers(nn, 4, 2);
  CHECK(report.num_covers == 2);
  CHECK(report.mean_point_nsm == doctest::Approx(0.75));
  CHECK(report.expected_cover_nsm == doctest::Approx(0.75));
  CHECK(std::abs(report.gap) < 1e-15);
  CHECK(report.bound_holds);
}

TEST_CASE("cover expectation is exact on decomposable instances") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto data = synth_ball_cover({4, 3, 1, 5.0}, seed);
    const auto nn = exact_knn(data, 2);
    REQUIRE(ball_covers_decomposable(nn, 12, 3));
    const auto report = analyze_ball_covers(nn, 12, 3);
    CHECK(std::abs(report.gap) <= 1e-12);
  }
}

TEST_CASE("grouped covers dominate the mean point-NSM") {
  // Two 1-D runs {0,1,2,3} and {10,11,12,13}: grouping mixes stable and
  // unstable pairs, and the grouped expectation exceeds the point mean.
  const auto data =
      synth_line(std::vector<double>{0, 1, 2, 3, 10, 11, 12, 13});
  const auto nn = exact_knn(data, 1);
  const auto report = analyze_ball_covers(nn, 8, 2, 2);
  CHECK(report.num_covers == 4);
  CHECK(report.num_clusterings == 12);
  CHECK(report.mean_point_nsm == doctest::Approx(0.75));
  CHECK(report.expected_cover_nsm == doctest::Approx(2.5 / 3.0));
  CHECK(report.bound_holds);
}

TEST_CASE("cover sampling: decomposable fast path") {
  const auto data = synth_ball_cover({5, 2, 2, 8.0}, 4);
  const auto nn = exact_knn(data, 1);
  REQUIRE(ball_covers_decomposable(nn, 10, 2));
  const auto samples = sample_ball_covers(nn, 10, 2, 50, 123);
  REQUIRE(samples.size() == 50);
  for (const auto& cover : samples) {
    REQUIRE(cover.centers.size() == 5);
    std::set<std::uint32_t> covered;
    for (const auto& cluster : cover.clusters)
      covered.insert(cluster.begin(), cluster.end());
    CHECK(covered.size() == 10);
  }
  // Same seed, same draw.
  const auto again = sample_ball_covers(nn, 10, 2, 50, 123);
  for (std::size_t i = 0; i < samples.size(); ++i)
    CHECK(samples[i].centers == again[i].centers);
}

TEST_CASE("cover sampling: enumeration fallback") {
  const auto data = synth_line(std::vector<double>{0, 1, 2, 3});
  const auto nn = exact_knn(data, 1);
  REQUIRE(!ball_covers_decomposable(nn, 4, 2));
  const auto samples = sample_ball_covers(nn, 4, 2, 40, 5);
  REQUIRE(samples.size() == 40);
  for (const auto& cover : samples) {
    const bool known = cover.centers == std::vector<std::uint32_t>{0, 3} ||
                       cover.centers == std::vector<std::uint32_t>{1, 3};
    CHECK(known);
  }
}

TEST_CASE("singleton and whole-set clusterings bracket the measure") {
  const Dataset data(random_gaussian(40, 3, 17), Metric::euclidean);
  const auto nn = exact_knn(data, 1);

  std::vector<std::uint32_t> singletons(40);
  for (std::uint32_t u = 0; u < 40; ++u) singletons[u] = u;
  CHECK(clustering_nsm(nn, Clustering::from_assignment(singletons, 40)) ==
        doctest::Approx(0.0));

  CHECK(clustering_nsm(nn, Clustering::from_assignment(
                               std::vector<std::uint32_t>(40, 0), 1)) ==
        doctest::Approx(1.0));
}

TEST_CASE("consistency under C-consistent perturbations") {
  Rng rng(29);
  for (int trial = 0; trial < 25; ++trial) {
    const std::size_t m = 8 + rng.uniform_index(6);
    std::vector<double> base(m * m, 0.0);
    for (std::size_t u = 0; u < m; ++u)
      for (std::size_t v = 0; v < m; ++v)
        if (u != v) base[u * m + v] = 0.5 + rng.uniform01();

    const std::uint32_t L = 2 + static_cast<std::uint32_t>(rng.uniform_index(3));
    std::vector<std::uint32_t> assignment(m);
    for (auto& a : assignment) a = static_cast<std::uint32_t>(rng.uniform_index(L));
    const auto clustering = Clustering::from_assignment(assignment, L);

    // delta': scale intra-cluster entries down, inter-cluster entries up.
    std::vector<double> perturbed = base;
    for (std::size_t u = 0; u < m; ++u)
      for (std::size_t v = 0; v < m; ++v) {
        if (u == v) continue;
        const bool together = assignment[u] == assignment[v];
        const double factor =
            together ? 0.3 + 0.7 * rng.uniform01() : 1.0 + rng.uniform01();
        perturbed[u * m + v] = base[u * m + v] * factor;
      }

    const auto before = knn_from_matrix(DistanceMatrixOracle(m, base), 1);
    const auto after = knn_from_matrix(DistanceMatrixOracle(m, perturbed), 1);
    CHECK(clustering_nsm(after, clustering) >=
          clustering_nsm(before, clustering) - 1e-15);
  }
}

TEST_CASE("empty clusters are skipped with zero weight") {
  const auto nn = exact_knn(x_line(), 1);
  // Cluster 2 is empty; the remaining pair clusters still score 1.
  const auto c = Clustering::from_assignment({0, 0, 1, 1}, 3);
  CHECK(clustering_nsm(nn, c) == doctest::Approx(1.0));
}

TEST_CASE("clustering-NSM does linear work") {
  const Dataset small(random_gaussian(200, 3, 1), Metric::euclidean);
  const Dataset large(random_gaussian(400, 3, 2), Metric::euclidean);
  const auto nn_small = exact_knn(small, 1);
  const auto nn_large = exact_knn(large, 1);
  const auto c_small = Clustering::from_assignment(
      [] {
        std::vector<std::uint32_t> a(200);
        for (std::size_t i = 0; i < a.size(); ++i)
          a[i] = static_cast<std::uint32_t>(i % 10);
        return a;
      }(),
      10);
  const auto c_large = Clustering::from_assignment(
      [] {
        std::vector<std::uint32_t> a(400);
        for (std::size_t i = 0; i < a.size(); ++i)
          a[i] = static_cast<std::uint32_t>(i % 10);
        return a;
      }(),
      10);

  NsmOpCounter ops_small, ops_large;
  clustering_nsm(nn_small, c_small, &ops_small);
  clustering_nsm(nn_large, c_large, &ops_large);
  CHECK(ops_small.ops == 200 + 10);
  CHECK(ops_large.ops == 400 + 10);  // exactly m + L elementary steps
}

TEST_SUITE_END();
