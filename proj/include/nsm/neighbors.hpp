#pragma once

#include <cstdint>
#include <vector>

#include "nsm/types.hpp"

namespace nsm {

/// Arbitrary-distance oracle: D[u][v] = delta(u, v). No symmetry or
/// nonnegativity is assumed; the diagonal is ignored by neighbor queries.
struct DistanceMatrixOracle {
  std::size_t n = 0;
  std::vector<double> values;  // n * n row-major

  DistanceMatrixOracle() = default;
  DistanceMatrixOracle(std::size_t size, std::vector<double> entries);

  double at(std::size_t u, std::size_t v) const { return values[u * n + v]; }
  double& at(std::size_t u, std::size_t v) { return values[u * n + v]; }
};

/// Brute-force k nearest neighbors of every dataset point within the
/// dataset itself. Row u excludes u; ties break toward the lower id.
/// Requires 1 <= k <= min(m - 1, table cap).
NeighborTable exact_knn(const Dataset& data, std::size_t k);

/// Brute-force k nearest dataset points for external queries (a query
/// identical to a stored point does match that point). 1 <= k <= m.
NeighborTable exact_knn(const Dataset& data, const FloatMatrix& queries,
                        std::size_t k);

/// Row-wise k minimizers of D[u][.], u excluded, same tie rule.
NeighborTable knn_from_matrix(const DistanceMatrixOracle& oracle, std::size_t k);

struct ApproxNnResult {
  NeighborTable table;  // k = 1, source = approximate
  /// Rows whose probed shards held no candidate besides the point itself;
  /// those rows fall back to an exhaustive scan.
  std::vector<std::uint32_t> expanded_rows;
};

/// Approximate 1-NN by clustering into `clusters` shards (default
/// ceil(4*sqrt(m))) and scanning the `probes` nearest shards per point.
/// The internal clustering is 10 iterations of kmeans++-seeded KMeans,
/// spherical for cosine/inner-product data and standard for euclidean.
ApproxNnResult approximate_1nn(const Dataset& data, std::size_t clusters = 0,
                               std::size_t probes = 10,
                               std::uint64_t seed = 0);

}  // namespace nsm
