#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "nsm/types.hpp"

namespace nsm {

/// Inverted-file index over a clustering: one posting list per shard,
/// queries routed to the shards with the nearest centroids. The dataset
/// must outlive the index. In-shard search is an exact scan.
class IvfIndex {
 public:
  /// Postings mirror the assignment exactly. Centroids are taken from
  /// the clustering; when absent they are computed as cluster means
  /// (normalized means for cosine/inner-product datasets). Empty
  /// clusters keep an empty posting list and stay routable.
  static IvfIndex build(const Dataset& data, const Clustering& clustering);

  /// The nprobe cluster ids whose centroids are nearest the query under
  /// the dataset comparator, ties toward the lower cluster id. Zero-norm
  /// centroids under cosine rank last instead of erroring.
  std::vector<std::uint32_t> route(std::span<const float> query,
                                   std::size_t nprobe) const;

  struct SearchResult {
    std::vector<std::uint32_t> ids;  // ranked (comparator, id)
    bool short_result = false;       // probed shards held fewer than k points
  };

  /// Exact top-k among the union of the nprobe probed posting lists.
  SearchResult search(std::span<const float> query, std::size_t k,
                      std::size_t nprobe) const;

  std::size_t num_clusters() const noexcept { return postings_.size(); }
  const FloatMatrix& centroids() const noexcept { return centroids_; }
  const std::vector<std::vector<std::uint32_t>>& postings() const noexcept {
    return postings_;
  }
  const Dataset& data() const noexcept { return *data_; }

 private:
  IvfIndex() = default;

  const Dataset* data_ = nullptr;
  FloatMatrix centroids_;
  std::vector<std::vector<std::uint32_t>> postings_;
};

/// Mean over queries of |results ∩ ground truth| / k, matching by id.
/// Rows shorter than k (flagged short results) simply miss. Ground truth
/// rows must hold at least k entries.
double accuracy(const std::vector<std::vector<std::uint32_t>>& results,
                const std::vector<std::vector<std::uint32_t>>& ground_truth,
                std::size_t k);

}  // namespace nsm
