#include "nsm/ivf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_set>

namespace nsm {

namespace {

struct Ranked {
  double value;
  std::uint32_t id;
};

inline bool better(const Ranked& a, const Ranked& b) {
  if (a.value != b.value) return a.value < b.value;
  return a.id < b.id;
}

// Comparator against a centroid; cosine with a zero-norm centroid (an
// empty cluster's computed mean) ranks last rather than erroring.
double routing_value(Metric metric, std::span<const float> q,
                     std::span<const float> centroid) {
  if (metric == Metric::cosine) {
    double sq = 0.0;
    for (float v : centroid) sq += static_cast<double>(v) * v;
    if (sq == 0.0) return std::numeric_limits<double>::infinity();
  }
  return comparator_value(metric, q, centroid);
}

}  // namespace

IvfIndex IvfIndex::build(const Dataset& data, const Clustering& clustering) {
  if (clustering.assignment.size() != data.size())
    raise(errc::bad_params, "assignment length does not match dataset size");

  IvfIndex index;
  index.data_ = &data;
  index.postings_.assign(clustering.num_clusters, {});
  for (std::uint32_t u = 0; u < clustering.assignment.size(); ++u)
    index.postings_[clustering.assignment[u]].push_back(u);

  if (clustering.centroids) {
    if (clustering.centroids->rows != clustering.num_clusters ||
        clustering.centroids->cols != data.dim())
      raise(errc::bad_params, "centroid matrix shape mismatch");
    index.centroids_ = *clustering.centroids;
  } else {
    const std::size_t d = data.dim();
    index.centroids_ = FloatMatrix(clustering.num_clusters, d);
    std::vector<double> acc(d);
    for (std::uint32_t cid = 0; cid < clustering.num_clusters; ++cid) {
      const auto& members = index.postings_[cid];
      if (members.empty()) continue;  // zero row: routable but fruitless
      std::fill(acc.begin(), acc.end(), 0.0);
      for (std::uint32_t u : members) {
        const float* p = data.points().row_data(u);
        for (std::size_t t = 0; t < d; ++t) acc[t] += p[t];
      }
      for (std::size_t t = 0; t < d; ++t) acc[t] /= static_cast<double>(members.size());
      if (data.metric() != Metric::euclidean) {
        double sq = 0.0;
        for (double v : acc) sq += v * v;
        if (sq > 0.0) {
          const double inv = 1.0 / std::sqrt(sq);
          for (double& v : acc) v *= inv;
        }
      }
      float* row = index.centroids_.row_data(cid);
      for (std::size_t t = 0; t < d; ++t) row[t] = static_cast<float>(acc[t]);
    }
  }
  return index;
}

std::vector<std::uint32_t> IvfIndex::route(std::span<const float> query,
                                           std::size_t nprobe) const {
  const std::size_t L = num_clusters();
  if (nprobe < 1 || nprobe > L)
    raise(errc::bad_probe_count, "nprobe=" + std::to_string(nprobe) +
                                     " outside [1, " + std::to_string(L) + "]");
  std::vector<Ranked> ranked(L);
  for (std::uint32_t c = 0; c < L; ++c)
    ranked[c] = {routing_value(data_->metric(), query, centroids_.row(c)), c};
  std::partial_sort(ranked.begin(), ranked.begin() + nprobe, ranked.end(), better);
  std::vector<std::uint32_t> out(nprobe);
  for (std::size_t i = 0; i < nprobe; ++i) out[i] = ranked[i].id;
  return out;
}

IvfIndex::SearchResult IvfIndex::search(std::span<const float> query,
                                        std::size_t k, std::size_t nprobe) const {
  if (k < 1) raise(errc::bad_params, "k must be at least 1");
  const auto probed = route(query, nprobe);

  std::vector<Ranked> candidates;
  for (std::uint32_t shard : probed)
    for (std::uint32_t u : postings_[shard])
      candidates.push_back(
          {comparator_value(data_->metric(), query, data_->point(u)), u});

  SearchResult result;
  result.short_result = candidates.size() < k;
  const std::size_t take = std::min(k, candidates.size());
  std::partial_sort(candidates.begin(), candidates.begin() + take,
                    candidates.end(), better);
  result.ids.resize(take);
  for (std::size_t i = 0; i < take; ++i) result.ids[i] = candidates[i].id;
  return result;
}

double accuracy(const std::vector<std::vector<std::uint32_t>>& results,
                const std::vector<std::vector<std::uint32_t>>& ground_truth,
                std::size_t k) {
  if (k < 1) raise(errc::bad_params, "k must be at least 1");
  if (results.size() != ground_truth.size())
    raise(errc::length_mismatch,
          "results cover " + std::to_string(results.size()) + " queries, ground truth " +
              std::to_string(ground_truth.size()));
  if (results.empty()) raise(errc::empty_input, "no queries to score");

  double total = 0.0;
  for (std::size_t q = 0; q < results.size(); ++q) {
    if (ground_truth[q].size() < k)
      raise(errc::length_mismatch,
            "ground truth row " + std::to_string(q) + " has fewer than k entries");
    std::unordered_set<std::uint32_t> truth(ground_truth[q].begin(),
                                            ground_truth[q].begin() + k);
    const std::size_t take = std::min(k, results[q].size());
    std::size_t hits = 0;
    for (std::size_t i = 0; i < take; ++i) hits += truth.count(results[q][i]);
    total += static_cast<double>(hits) / static_cast<double>(k);
  }
  return total / static_cast<double>(results.size());
}

}  // namespace nsm
