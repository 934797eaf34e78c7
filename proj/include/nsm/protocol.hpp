#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nsm/baselines.hpp"
#include "nsm/kmeans.hpp"
#include "nsm/stats.hpp"
#include "nsm/types.hpp"

namespace nsm {

/// The correlation experiment: an ensemble of standard and spherical
/// KMeans clusterings at several iteration budgets, every internal
/// quality measure per clustering, IVF accuracy per (k, nprobe), and
/// Spearman correlations between accuracy and each measure.
struct ProtocolConfig {
  std::uint64_t seed = 0;
  std::uint32_t num_clusters = 0;  // 0 -> round(sqrt(m))
  std::vector<std::uint32_t> iteration_grid{5, 10, 20, 40};
  std::vector<std::uint32_t> k_values{5, 10};
  std::vector<std::uint32_t> nprobe_values{1};
  /// Queries used when the caller supplies none: a seeded sample of the
  /// dataset itself.
  std::size_t fallback_queries = 1000;
  /// Compute NSM from the approximate neighbor table (4*sqrt(m) shards,
  /// 10 probes) instead of the exact one.
  bool approximate_nn = false;
  DunnOptions dunn;
};

struct ProtocolRun {
  std::string algo;  // "kmeans" | "spherical"
  std::uint32_t iterations = 0;
  std::uint32_t iterations_run = 0;
  double nsm = 0.0;
  double dunn = 0.0;
  bool dunn_subsampled = false;
  double db = 0.0;
  double db_weighted = 0.0;
  /// accuracy[i][j] for k_values[i] x nprobe_values[j].
  std::vector<std::vector<double>> accuracy;
};

struct CorrelationRow {
  std::string measure;
  std::uint32_t k = 0;
  std::uint32_t nprobe = 0;
  double rho = 0.0;  // sign-adjusted for lower-is-better measures
  double p_value = 1.0;
  std::size_t n = 0;
  std::string p_method;
};

struct ProtocolResult {
  std::uint32_t num_clusters = 0;
  std::size_t num_queries = 0;
  std::vector<ProtocolRun> runs;
  std::vector<Clustering> clusterings;  // aligned with runs
  std::vector<CorrelationRow> correlations;
  NeighborTable nn;  // the one table reused for every clustering's NSM
};

/// `queries` may be null; a seeded subsample of the data is used then.
ProtocolResult run_protocol(const Dataset& data, const FloatMatrix* queries,
                            const ProtocolConfig& cfg);

}  // namespace nsm
