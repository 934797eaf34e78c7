#include <doctest.h>

#include "nsm/kmeans.hpp"
#include "nsm/neighbors.hpp"
#include "nsm/parallel.hpp"
#include "nsm/protocol.hpp"
#include "nsm/quality.hpp"
#include "nsm/synth.hpp"
#include "test_support.hpp"

using namespace nsm;
using namespace testsupport;

TEST_SUITE_BEGIN("protocol");

namespace {

ProtocolConfig small_config() {
  ProtocolConfig cfg;
  cfg.seed = 7;
  cfg.iteration_grid = {2, 3, 5, 8};
  cfg.k_values = {5, 10};
  cfg.nprobe_values = {1, 2};
  cfg.fallback_queries = 100;
  return cfg;
}

}  // namespace

TEST_CASE("protocol shape: 8 runs, correlations per measure and grid cell") {
  const auto labeled = synth_gaussian_mixture({16, 60, 8, 1.0, 2.0}, 7);
  const auto result = run_protocol(labeled.data, nullptr, small_config());

  CHECK(result.runs.size() == 8);
  CHECK(result.clusterings.size() == 8);
  CHECK(result.num_queries == 100);
  CHECK(result.num_clusters == default_num_clusters(labeled.data.size()));
  // 4 measures x 2 k x 2 nprobe.
  CHECK(result.correlations.size() == 16);
  for (const auto& run : result.runs) {
    for (const auto& per_k : run.accuracy)
      for (double acc : per_k) {
        CHECK(acc >= 0.0);
        CHECK(acc <= 1.0);
      }
    CHECK(run.nsm >= 0.0);
    CHECK(run.nsm <= 1.0);
    CHECK(run.dunn >= 0.0);
    CHECK(run.db > 0.0);
  }
  for (const auto& row : result.correlations) {
    CHECK(row.n == 8);
    CHECK(row.p_method == "exact-permutation");
    if (!std::isnan(row.rho)) {
      CHECK(row.rho >= -1.0 - 1e-12);
      CHECK(row.rho <= 1.0 + 1e-12);
    }
  }
}

TEST_CASE("protocol accuracy is monotone in nprobe") {
  const auto labeled = synth_gaussian_mixture({12, 50, 6, 1.0, 1.5}, 9);
  auto cfg = small_config();
  cfg.seed = 9;
  cfg.nprobe_values = {1, 2, 4, 8};
  const auto result = run_protocol(labeled.data, nullptr, cfg);
  for (const auto& run : result.runs)
    for (const auto& per_k : run.accuracy)
      for (std::size_t j = 1; j < per_k.size(); ++j)
        CHECK(per_k[j] >= per_k[j - 1] - 1e-12);
}

TEST_CASE("protocol is reproducible and thread-count independent") {
  const auto labeled = synth_gaussian_mixture({10, 40, 5, 1.0, 2.0}, 11);
  auto cfg = small_config();
  cfg.iteration_grid = {2, 4};
  cfg.fallback_queries = 50;
  set_thread_override(1);
  const auto a = run_protocol(labeled.data, nullptr, cfg);
  set_thread_override(4);
  const auto b = run_protocol(labeled.data, nullptr, cfg);
  set_thread_override(0);
  REQUIRE(a.runs.size() == b.runs.size());
  for (std::size_t r = 0; r < a.runs.size(); ++r) {
    CHECK(a.runs[r].nsm == b.runs[r].nsm);
    CHECK(a.runs[r].dunn == b.runs[r].dunn);
    CHECK(a.runs[r].db == b.runs[r].db);
    CHECK(a.runs[r].accuracy == b.runs[r].accuracy);
    CHECK(a.clusterings[r].assignment == b.clusterings[r].assignment);
  }
  for (std::size_t i = 0; i < a.correlations.size(); ++i) {
    CHECK(a.correlations[i].rho == b.correlations[i].rho);
    CHECK(a.correlations[i].p_value == b.correlations[i].p_value);
  }
}

TEST_CASE("quality report selection") {
  const auto labeled = synth_gaussian_mixture({4, 30, 4, 0.3, 5.0}, 13);
  const auto nn = exact_knn(labeled.data, 1);
  KMeansConfig km;
  km.num_clusters = 4;
  km.iterations = 5;
  km.seed = 13;
  const auto fitted = kmeans(labeled.data, km);

  const auto all = compute_quality(labeled.data, &nn, fitted.clustering);
  CHECK(all.nsm.has_value());
  CHECK(all.dunn.has_value());
  CHECK(all.db.has_value());
  CHECK(all.db_weighted.has_value());
  CHECK(all.empty_clusters.empty());

  const auto selection = QualitySelection::parse("nsm,db");
  const auto some = compute_quality(labeled.data, &nn, fitted.clustering, selection);
  CHECK(some.nsm.has_value());
  CHECK(!some.dunn.has_value());
  CHECK(some.db.has_value());
  CHECK(!some.db_weighted.has_value());

  CHECK_THROWS_AS(QualitySelection::parse("nsm,bogus"), Error);
  CHECK_THROWS_AS(
      compute_quality(labeled.data, nullptr, fitted.clustering, selection), Error);
}

TEST_SUITE_END();
