#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "nsm/types.hpp"

namespace nsm {

enum class KMeansVariant { standard, spherical };
enum class KMeansInit { random_points, kmeans_pp };

const char* kmeans_variant_name(KMeansVariant v) noexcept;

struct KMeansConfig {
  KMeansVariant variant = KMeansVariant::standard;
  std::uint32_t num_clusters = 1;
  std::uint32_t iterations = 10;
  std::uint64_t seed = 0;
  KMeansInit init = KMeansInit::kmeans_pp;
  /// When set, used verbatim instead of seeded initialization.
  std::optional<FloatMatrix> initial_centroids;
};

struct KMeansResult {
  Clustering clustering;  // centroids attached, weights = cluster sizes
  std::uint32_t iterations_run = 0;
  /// Objective after each completed round: sum over points of the
  /// variant's comparator against the assigned centroid (squared L2 for
  /// standard, -dot for spherical). Non-increasing.
  std::vector<double> objective_history;
};

/// Lloyd iterations. Runs exactly cfg.iterations assignment/update
/// rounds, stopping early when an assignment round changes nothing.
/// Standard: squared-L2 assignment, arithmetic-mean update. Spherical:
/// dot-product assignment against unit centroids, normalized-mean
/// update; rejects zero-norm points. Clusters emptied by an update are
/// reseeded with the point farthest from its current centroid.
KMeansResult kmeans(const Dataset& data, const KMeansConfig& cfg);

/// max(1, round(t * sqrt(m))) for the shard-count rules t in {1/4, 1/2, 1}.
std::uint32_t default_num_clusters(std::size_t m, double t = 1.0);

}  // namespace nsm
