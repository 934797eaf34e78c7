#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nsm/error.hpp"

namespace nsm {

// ---------------------------------------------------------------------------
// Metric

/// Distance/similarity family. Every metric is exposed through a single
/// comparator where smaller means nearer:
///   euclidean      -> squared L2
///   cosine         -> 1 - <u,v> / (|u||v|)   (undefined for zero vectors)
///   inner_product  -> -<u,v>                 (nearest = max inner product)
enum class Metric { euclidean, cosine, inner_product };

Metric parse_metric(std::string_view name);  // "l2" | "cos" | "ip" (+ long forms)
const char* metric_name(Metric metric) noexcept;

// ---------------------------------------------------------------------------
// Matrices

/// Row-major float32 matrix. Plain storage shared by datasets, centroids
/// and query sets.
struct FloatMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<float> values;

  FloatMatrix() = default;
  FloatMatrix(std::size_t r, std::size_t c)
      : rows(r), cols(c), values(r * c, 0.0f) {}

  std::span<const float> row(std::size_t i) const {
    return {values.data() + i * cols, cols};
  }
  float* row_data(std::size_t i) { return values.data() + i * cols; }
  const float* row_data(std::size_t i) const { return values.data() + i * cols; }
  bool operator==(const FloatMatrix&) const = default;
};

/// Row-major int32 table (assignments, neighbor ids, ground truth).
struct IntTable {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::int32_t> values;

  IntTable() = default;
  IntTable(std::size_t r, std::size_t c) : rows(r), cols(c), values(r * c, 0) {}

  std::span<const std::int32_t> row(std::size_t i) const {
    return {values.data() + i * cols, cols};
  }
  std::int32_t* row_data(std::size_t i) { return values.data() + i * cols; }
  bool operator==(const IntTable&) const = default;
};

// ---------------------------------------------------------------------------
// Dataset

/// The universe (X, delta): an immutable m x d float32 matrix plus the
/// metric it is searched under. Point ids are row indices.
class Dataset {
 public:
  Dataset(FloatMatrix points, Metric metric);

  std::size_t size() const noexcept { return points_.rows; }
  std::size_t dim() const noexcept { return points_.cols; }
  Metric metric() const noexcept { return metric_; }
  std::span<const float> point(std::size_t id) const { return points_.row(id); }
  const FloatMatrix& points() const noexcept { return points_; }

 private:
  FloatMatrix points_;
  Metric metric_;
};

/// Comparator value for (u, v) under `metric`; smaller means nearer.
/// float32 operands, float64 accumulation.
double comparator_value(Metric metric, std::span<const float> u,
                        std::span<const float> v);

// ---------------------------------------------------------------------------
// Clustering

/// Total assignment of m points to L clusters. Empty clusters are legal
/// here; measures that need omega_i > 0 skip or reject them. Weights
/// default to cluster sizes.
struct Clustering {
  std::vector<std::uint32_t> assignment;
  std::uint32_t num_clusters = 0;
  std::vector<double> weights;
  std::optional<FloatMatrix> centroids;

  static Clustering from_assignment(std::vector<std::uint32_t> assignment,
                                    std::uint32_t num_clusters);

  std::size_t size() const noexcept { return assignment.size(); }
};

std::vector<std::size_t> cluster_sizes(const Clustering& c);
/// Member ids per cluster, ascending within each cluster.
std::vector<std::vector<std::uint32_t>> cluster_members(const Clustering& c);

// ---------------------------------------------------------------------------
// NeighborTable

enum class NeighborSource { exact, approximate, imported };

const char* neighbor_source_name(NeighborSource source) noexcept;

/// Ranked neighbor lists: ids[u] holds the k nearest ids of point u,
/// sorted by (comparator value, id) ascending, never containing u in
/// self mode. Column 0 is NN(u).
struct NeighborTable {
  std::size_t num_points = 0;
  std::size_t k = 0;
  std::vector<std::uint32_t> ids;
  std::vector<double> values;  // empty, or num_points * k comparator values
  NeighborSource source = NeighborSource::exact;

  std::span<const std::uint32_t> row(std::size_t u) const {
    return {ids.data() + u * k, k};
  }
  std::uint32_t neighbor(std::size_t u, std::size_t j) const {
    return ids[u * k + j];
  }
  std::uint32_t nn(std::size_t u) const { return ids[u * k]; }
  bool has_values() const noexcept { return !values.empty(); }
};

/// Per-table cap on stored neighbors (memory bound of m*k entries).
inline constexpr std::size_t kMaxNeighborsPerTable = 4096;

}  // namespace nsm
