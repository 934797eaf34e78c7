#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "nsm/types.hpp"

namespace nsm {

/// Optional instrumentation: counts elementary steps so tests can pin the
/// linear-time contract of clustering_nsm.
struct NsmOpCounter {
  std::size_t ops = 0;
};

/// Fraction of members whose global 1-NN (table column 0) also lies in
/// the set. The table must be a self-mode table over the full universe.
double set_nsm(const NeighborTable& nn, std::span<const std::uint32_t> members);

/// Weighted mean of set_nsm over clusters: sum(w_i * nsm_i) / sum(w_i).
/// Empty clusters contribute nothing (weight ignored). O(m + L).
double clustering_nsm(const NeighborTable& nn, const Clustering& c,
                      NsmOpCounter* counter = nullptr);

/// set_nsm of {u} union (r-1)-NN(u); requires radius >= 2 and
/// nn.k >= radius - 1. Always a multiple of 1/radius.
double point_nsm(const NeighborTable& nn, std::uint32_t u, std::uint32_t radius);

struct PointNsmDistribution {
  std::uint32_t radius = 0;
  std::vector<std::uint32_t> ids;  // sampled point ids, ascending
  std::vector<double> values;      // point_nsm per sampled id
  double mean = 0.0;
  std::map<double, double> quantiles;  // alpha -> lower empirical quantile
};

/// Point-NSM values for a seeded uniform sample (without replacement,
/// at least one point). Summary always includes the mean and the
/// 0.1-quantile plus any extra requested quantiles.
PointNsmDistribution point_nsm_distribution(
    const NeighborTable& nn, std::uint32_t radius, double sample_fraction,
    std::uint64_t seed, std::span<const double> extra_quantiles = {});

/// Lower tail threshold mean - sqrt(log(1/epsilon) / (2L)); a clustering
/// built from L sampled balls falls below it with probability <= epsilon.
double clusterability_tail_bound(double mean_point_nsm, std::size_t num_clusters,
                                 double epsilon);

/// A partition of X into balls B_r(u) = {u} union (r-1)-NN(u), keyed by
/// the chosen centers.
struct BallCover {
  std::vector<std::uint32_t> centers;                // ascending
  std::vector<std::vector<std::uint32_t>> clusters;  // clusters[i] = ball of centers[i]
};

/// Every center set whose balls are pairwise disjoint and cover all m
/// points. Exponential-time test oracle; requires m <= 24 and r | m.
/// Returns an empty list when no cover exists.
std::vector<BallCover> enumerate_ball_covers(const NeighborTable& nn,
                                             std::size_t m, std::uint32_t radius);

/// Uniform sample over valid center selections. Fast path when every
/// ball equals the ball of each of its members (the balls then form a
/// fixed partition and centers are chosen independently per ball);
/// otherwise falls back to enumeration (m <= 24).
std::vector<BallCover> sample_ball_covers(const NeighborTable& nn, std::size_t m,
                                          std::uint32_t radius, std::size_t count,
                                          std::uint64_t seed);

/// True when B_r(u) is the same set for every member u of that set, i.e.
/// the balls form a partition and every center selection is valid.
bool ball_covers_decomposable(const NeighborTable& nn, std::size_t m,
                              std::uint32_t radius);

struct BallCoverReport {
  double mean_point_nsm = 0.0;     // mean over all m points
  double expected_cover_nsm = 0.0; // mean clustering-NSM over the cover ensemble
  double gap = 0.0;                // expected_cover_nsm - mean_point_nsm
  std::size_t num_covers = 0;
  std::size_t num_clusterings = 0; // covers x groupings when group_size > 1
  bool bound_holds = false;        // expected_cover_nsm >= mean_point_nsm - 1e-12
};

/// Compares the expected clustering-NSM over enumerated ball covers
/// (uniform over center selections, uniform weights) against the mean
/// point-NSM. With group_size > 1, clusters are unions of `group_size`
/// balls and every grouping of every cover enters the expectation; the
/// expectation then dominates the mean point-NSM instead of matching it.
BallCoverReport analyze_ball_covers(const NeighborTable& nn, std::size_t m,
                                    std::uint32_t radius,
                                    std::uint32_t group_size = 1);

}  // namespace nsm
