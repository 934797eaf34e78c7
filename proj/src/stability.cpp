#include "nsm/stability.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "nsm/parallel.hpp"
#include "nsm/rng.hpp"

namespace nsm {

namespace {

void check_table_covers(const NeighborTable& nn, std::size_t needed,
                        const char* what) {
  if (nn.num_points < needed)
    raise(errc::missing_rows, std::string(what) + " needs rows for " +
                                  std::to_string(needed) + " points, table has " +
                                  std::to_string(nn.num_points));
  if (nn.k < 1) raise(errc::missing_rows, "neighbor table has k = 0");
}

// Ball B_r(u) as a sorted id list: u plus its first r-1 neighbors.
std::vector<std::uint32_t> ball_of(const NeighborTable& nn, std::uint32_t u,
                                   std::uint32_t radius) {
  std::vector<std::uint32_t> ball;
  ball.reserve(radius);
  ball.push_back(u);
  for (std::uint32_t j = 0; j + 1 < radius; ++j) ball.push_back(nn.neighbor(u, j));
  std::sort(ball.begin(), ball.end());
  return ball;
}

void check_cover_inputs(const NeighborTable& nn, std::size_t m,
                        std::uint32_t radius) {
  if (m > 24)
    raise(errc::too_large,
          "ball cover enumeration is limited to m <= 24, got " + std::to_string(m));
  if (radius < 2) raise(errc::bad_params, "radius must be at least 2");
  if (m == 0 || m % radius != 0)
    raise(errc::bad_params, "radius " + std::to_string(radius) +
                                " does not divide m = " + std::to_string(m));
  check_table_covers(nn, m, "cover enumeration");
  if (nn.k + 1 < radius)
    raise(errc::radius_too_large, "table k = " + std::to_string(nn.k) +
                                      " cannot form balls of radius " +
                                      std::to_string(radius));
}

double cover_nsm(const NeighborTable& nn, const BallCover& cover) {
  // Equal ball sizes, uniform weights: plain mean of per-ball set-NSM.
  double total = 0.0;
  for (const auto& cluster : cover.clusters) total += set_nsm(nn, cluster);
  return total / static_cast<double>(cover.clusters.size());
}

// All ways to split `items` into unordered groups of `group_size`,
// invoking fn once per complete grouping. Each group anchors on the
// smallest remaining item so no grouping repeats.
template <typename Fn>
void for_each_grouping(const std::vector<std::uint32_t>& items,
                       std::uint32_t group_size,
                       std::vector<std::vector<std::uint32_t>>& groups, Fn&& fn) {
  if (items.empty()) {
    fn(groups);
    return;
  }
  const std::uint32_t anchor = items[0];
  const std::size_t need = group_size - 1;
  std::vector<std::size_t> picked;  // indices into items[1..] joining anchor
  auto choose = [&](auto&& self, std::size_t start) -> void {
    if (picked.size() == need) {
      std::vector<std::uint32_t> group{anchor};
      std::vector<std::uint32_t> remaining;
      std::size_t next = 0;
      for (std::size_t i = 1; i < items.size(); ++i) {
        if (next < picked.size() && picked[next] == i) {
          group.push_back(items[i]);
          ++next;
        } else {
          remaining.push_back(items[i]);
        }
      }
      groups.push_back(std::move(group));
      for_each_grouping(remaining, group_size, groups, fn);
      groups.pop_back();
      return;
    }
    for (std::size_t i = start; i < items.size(); ++i) {
      picked.push_back(i);
      self(self, i + 1);
      picked.pop_back();
    }
  };
  choose(choose, 1);
}

}  // namespace

double set_nsm(const NeighborTable& nn, std::span<const std::uint32_t> members) {
  if (members.empty()) raise(errc::empty_set, "set_nsm of an empty set");
  std::unordered_set<std::uint32_t> in_set(members.begin(), members.end());
  std::size_t stable = 0;
  for (std::uint32_t u : in_set) {  // unique members; duplicates count once
    if (u >= nn.num_points)
      raise(errc::missing_rows,
            "member " + std::to_string(u) + " has no neighbor row");
    if (in_set.count(nn.nn(u))) ++stable;
  }
  return static_cast<double>(stable) / static_cast<double>(in_set.size());
}

double clustering_nsm(const NeighborTable& nn, const Clustering& c,
                      NsmOpCounter* counter) {
  const std::size_t m = c.assignment.size();
  if (m == 0) raise(errc::all_clusters_empty, "clustering covers no points");
  check_table_covers(nn, m, "clustering_nsm");
  if (c.weights.size() != c.num_clusters)
    raise(errc::bad_params, "weight count does not match cluster count");

  std::vector<std::size_t> stable(c.num_clusters, 0);
  std::vector<std::size_t> sizes(c.num_clusters, 0);
  for (std::size_t u = 0; u < m; ++u) {
    const std::uint32_t cluster = c.assignment[u];
    ++sizes[cluster];
    if (c.assignment[nn.nn(u)] == cluster) ++stable[cluster];
    if (counter) ++counter->ops;
  }

  double weighted = 0.0, total_weight = 0.0;
  for (std::uint32_t i = 0; i < c.num_clusters; ++i) {
    if (counter) ++counter->ops;
    if (sizes[i] == 0) continue;  // empty clusters carry no weight
    const double w = c.weights[i];
    if (w <= 0.0)
      raise(errc::bad_params,
            "nonempty cluster " + std::to_string(i) + " has weight <= 0");
    weighted += w * (static_cast<double>(stable[i]) / static_cast<double>(sizes[i]));
    total_weight += w;
  }
  if (total_weight == 0.0)
    raise(errc::all_clusters_empty, "every cluster is empty");
  return weighted / total_weight;
}

double point_nsm(const NeighborTable& nn, std::uint32_t u, std::uint32_t radius) {
  if (radius < 2) raise(errc::bad_params, "point-NSM radius must be >= 2");
  if (nn.k + 1 < radius)
    raise(errc::radius_too_large, "radius " + std::to_string(radius) +
                                      " needs k >= " + std::to_string(radius - 1) +
                                      ", table has k = " + std::to_string(nn.k));
  if (u >= nn.num_points)
    raise(errc::missing_rows, "point " + std::to_string(u) + " has no neighbor row");
  std::vector<std::uint32_t> members;
  members.reserve(radius);
  members.push_back(u);
  for (std::uint32_t j = 0; j + 1 < radius; ++j) members.push_back(nn.neighbor(u, j));
  return set_nsm(nn, members);
}

PointNsmDistribution point_nsm_distribution(const NeighborTable& nn,
                                            std::uint32_t radius,
                                            double sample_fraction,
                                            std::uint64_t seed,
                                            std::span<const double> extra_quantiles) {
  if (!(sample_fraction > 0.0) || sample_fraction > 1.0)
    raise(errc::bad_params, "sample_fraction must lie in (0, 1]");
  if (radius < 2) raise(errc::bad_params, "point-NSM radius must be >= 2");
  if (nn.k + 1 < radius)
    raise(errc::radius_too_large,
          "radius " + std::to_string(radius) + " exceeds table k + 1");

  const std::size_t m = nn.num_points;
  const std::size_t count = std::max<std::size_t>(
      1, static_cast<std::size_t>(
             std::ceil(sample_fraction * static_cast<double>(m))));

  PointNsmDistribution dist;
  dist.radius = radius;
  Rng rng(mix_seed(seed, 0x706e736dULL));
  dist.ids = sample_without_replacement(m, std::min(count, m), rng);
  dist.values.resize(dist.ids.size());

  parallel_for_chunks(dist.ids.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i)
      dist.values[i] = point_nsm(nn, dist.ids[i], radius);
  });

  double total = 0.0;
  for (double v : dist.values) total += v;
  dist.mean = total / static_cast<double>(dist.values.size());

  std::vector<double> sorted = dist.values;
  std::sort(sorted.begin(), sorted.end());
  auto lower_quantile = [&](double alpha) {
    const std::size_t n = sorted.size();
    std::size_t rank = static_cast<std::size_t>(
        std::ceil(alpha * static_cast<double>(n)));
    rank = std::clamp<std::size_t>(rank, 1, n);
    return sorted[rank - 1];
  };
  dist.quantiles[0.1] = lower_quantile(0.1);
  for (double alpha : extra_quantiles) {
    if (!(alpha > 0.0) || alpha > 1.0)
      raise(errc::bad_params, "quantile must lie in (0, 1]");
    dist.quantiles[alpha] = lower_quantile(alpha);
  }
  return dist;
}

double clusterability_tail_bound(double mean_point_nsm, std::size_t num_clusters,
                                 double epsilon) {
  if (num_clusters < 1) raise(errc::bad_params, "tail bound needs L >= 1");
  if (!(epsilon > 0.0) || epsilon > 1.0)
    raise(errc::bad_params, "epsilon must lie in (0, 1]");
  return mean_point_nsm -
         std::sqrt(std::log(1.0 / epsilon) /
                   (2.0 * static_cast<double>(num_clusters)));
}

std::vector<BallCover> enumerate_ball_covers(const NeighborTable& nn,
                                             std::size_t m, std::uint32_t radius) {
  check_cover_inputs(nn, m, radius);

  std::vector<std::uint32_t> ball_masks(m, 0);
  for (std::size_t u = 0; u < m; ++u) {
    std::uint32_t mask = 0;
    for (std::uint32_t v : ball_of(nn, static_cast<std::uint32_t>(u), radius))
      mask |= (1u << v);
    ball_masks[u] = mask;
  }

  const std::uint32_t full = (1u << m) - 1u;  // m <= 24 checked above
  std::vector<BallCover> covers;
  std::vector<std::uint32_t> chosen;

  // Recurse on the lowest uncovered point; the ball covering it is unique
  // within any cover, so every valid center set is produced exactly once.
  auto recurse = [&](auto&& self, std::uint32_t covered) -> void {
    if (covered == full) {
      BallCover cover;
      cover.centers = chosen;
      std::sort(cover.centers.begin(), cover.centers.end());
      for (std::uint32_t center : cover.centers)
        cover.clusters.push_back(ball_of(nn, center, radius));
      covers.push_back(std::move(cover));
      return;
    }
    std::uint32_t lowest = 0;
    while (covered & (1u << lowest)) ++lowest;
    for (std::uint32_t c = 0; c < m; ++c) {
      const std::uint32_t mask = ball_masks[c];
      if (!(mask & (1u << lowest))) continue;
      if (mask & covered) continue;
      chosen.push_back(c);
      self(self, covered | mask);
      chosen.pop_back();
    }
  };
  recurse(recurse, 0);
  return covers;
}

bool ball_covers_decomposable(const NeighborTable& nn, std::size_t m,
                              std::uint32_t radius) {
  if (radius < 2 || m % radius != 0) return false;
  if (nn.k + 1 < radius || nn.num_points < m) return false;
  for (std::size_t u = 0; u < m; ++u) {
    const auto ball = ball_of(nn, static_cast<std::uint32_t>(u), radius);
    for (std::uint32_t v : ball) {
      if (v == u) continue;
      if (ball_of(nn, v, radius) != ball) return false;
    }
  }
  return true;
}

std::vector<BallCover> sample_ball_covers(const NeighborTable& nn, std::size_t m,
                                          std::uint32_t radius, std::size_t count,
                                          std::uint64_t seed) {
  if (radius < 2) raise(errc::bad_params, "radius must be at least 2");
  if (m == 0 || m % radius != 0)
    raise(errc::bad_params, "radius does not divide m");
  check_table_covers(nn, m, "cover sampling");
  if (nn.k + 1 < radius)
    raise(errc::radius_too_large, "table k too small for the requested radius");

  std::vector<BallCover> samples;
  samples.reserve(count);
  Rng rng(mix_seed(seed, 0x636f766572ULL));

  if (ball_covers_decomposable(nn, m, radius)) {
    // Balls form a fixed partition; a cover is an independent uniform
    // center choice per ball.
    std::vector<std::vector<std::uint32_t>> parts;
    std::vector<bool> seen(m, false);
    for (std::size_t u = 0; u < m; ++u) {
      if (seen[u]) continue;
      auto ball = ball_of(nn, static_cast<std::uint32_t>(u), radius);
      for (std::uint32_t v : ball) seen[v] = true;
      parts.push_back(std::move(ball));
    }
    for (std::size_t s = 0; s < count; ++s) {
      BallCover cover;
      for (const auto& part : parts) {
        cover.centers.push_back(part[rng.uniform_index(part.size())]);
        cover.clusters.push_back(part);
      }
      samples.push_back(std::move(cover));
    }
    return samples;
  }

  const auto all = enumerate_ball_covers(nn, m, radius);
  if (all.empty()) return samples;
  for (std::size_t s = 0; s < count; ++s)
    samples.push_back(all[rng.uniform_index(all.size())]);
  return samples;
}

BallCoverReport analyze_ball_covers(const NeighborTable& nn, std::size_t m,
                                    std::uint32_t radius, std::uint32_t group_size) {
  if (group_size < 1) raise(errc::bad_params, "group_size must be >= 1");
  if (group_size > 1 && m % (static_cast<std::size_t>(radius) * group_size) != 0)
    raise(errc::bad_params, "m must be divisible by radius * group_size");
  const auto covers = enumerate_ball_covers(nn, m, radius);

  BallCoverReport report;
  report.num_covers = covers.size();

  double total_point = 0.0;
  for (std::size_t u = 0; u < m; ++u)
    total_point += point_nsm(nn, static_cast<std::uint32_t>(u), radius);
  report.mean_point_nsm = total_point / static_cast<double>(m);

  if (covers.empty()) return report;

  double total = 0.0;
  std::size_t clusterings = 0;
  if (group_size == 1) {
    for (const auto& cover : covers) total += cover_nsm(nn, cover);
    clusterings = covers.size();
  } else {
    for (const auto& cover : covers) {
      std::vector<std::uint32_t> ball_ids(cover.clusters.size());
      for (std::uint32_t i = 0; i < ball_ids.size(); ++i) ball_ids[i] = i;
      std::vector<std::vector<std::uint32_t>> groups;
      for_each_grouping(ball_ids, group_size, groups,
                        [&](const std::vector<std::vector<std::uint32_t>>& gs) {
                          double sum = 0.0;
                          for (const auto& g : gs) {
                            std::vector<std::uint32_t> merged;
                            for (std::uint32_t ball : g)
                              merged.insert(merged.end(),
                                            cover.clusters[ball].begin(),
                                            cover.clusters[ball].end());
                            sum += set_nsm(nn, merged);
                          }
                          total += sum / static_cast<double>(gs.size());
                          ++clusterings;
                        });
    }
  }
  report.num_clusterings = clusterings;
  report.expected_cover_nsm = total / static_cast<double>(clusterings);
  report.gap = report.expected_cover_nsm - report.mean_point_nsm;
  report.bound_holds = report.expected_cover_nsm >= report.mean_point_nsm - 1e-12;
  return report;
}

}  // namespace nsm
