#pragma once

#include <cstdint>

#include "nsm/types.hpp"

namespace nsm {

struct DunnOptions {
  /// Pairwise-distance work cap; datasets beyond it are evaluated on a
  /// seeded uniform subsample of this size.
  std::size_t max_points = 200000;
  std::uint64_t seed = 0;
};

struct DunnResult {
  double value = 0.0;
  bool subsampled = false;
  std::size_t points_used = 0;
};

/// Classical Dunn: minimal single-linkage inter-cluster distance divided
/// by the maximal cluster diameter, in true Euclidean distance. Needs at
/// least two nonempty clusters and one cluster of diameter > 0.
DunnResult dunn_index(const Dataset& data, const Clustering& c,
                      const DunnOptions& opts = {});

enum class DbWeighting { uniform, by_size };

/// Davies-Bouldin with cluster weights:
///   DB = sum_i w_i max_{j != i} (s_i + s_j) / d(mu_i, mu_j) / sum_i w_i
/// where mu_i is the arithmetic mean, s_i the mean member distance to
/// mu_i, and d true Euclidean regardless of the dataset metric. Uniform
/// weights recover the original definition. Smaller is better.
double db_index(const Dataset& data, const Clustering& c, DbWeighting weighting);

}  // namespace nsm
