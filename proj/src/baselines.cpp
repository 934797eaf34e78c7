#include "nsm/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "nsm/parallel.hpp"
#include "nsm/rng.hpp"

namespace nsm {

namespace {

double euclidean(const float* a, const float* b, std::size_t d) {
  double sum = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    const double diff = static_cast<double>(a[i]) - static_cast<double>(b[i]);
    sum += diff * diff;
  }
  return std::sqrt(sum);
}

std::size_t count_nonempty(const std::vector<std::size_t>& sizes) {
  std::size_t n = 0;
  for (std::size_t s : sizes) n += (s > 0);
  return n;
}

}  // namespace

DunnResult dunn_index(const Dataset& data, const Clustering& c,
                      const DunnOptions& opts) {
  if (c.assignment.size() != data.size())
    raise(errc::bad_params, "assignment length does not match dataset size");

  // Work on all points, or a seeded subsample past the O(m^2) cap.
  std::vector<std::uint32_t> points;
  DunnResult result;
  if (data.size() > opts.max_points) {
    Rng rng(mix_seed(opts.seed, 0x64756e6eULL));
    points = sample_without_replacement(data.size(), opts.max_points, rng);
    result.subsampled = true;
  } else {
    points.resize(data.size());
    for (std::size_t u = 0; u < data.size(); ++u)
      points[u] = static_cast<std::uint32_t>(u);
  }
  result.points_used = points.size();

  std::vector<std::size_t> sizes(c.num_clusters, 0);
  for (std::uint32_t u : points) ++sizes[c.assignment[u]];
  if (count_nonempty(sizes) < 2)
    raise(errc::fewer_than_two_clusters, "Dunn needs >= 2 nonempty clusters");

  const std::size_t n = points.size();
  const std::size_t d = data.dim();
  const std::size_t workers = std::max<std::size_t>(1, thread_count());
  std::vector<double> worker_inter(workers, std::numeric_limits<double>::infinity());
  std::vector<std::vector<double>> worker_diam(workers,
                                               std::vector<double>(c.num_clusters, 0.0));

  // Pair (i, j), i < j, partitioned over i; min/max merge is exact so the
  // result is independent of the worker count.
  const std::size_t chunk = (n + workers - 1) / workers;
  parallel_for_chunks(workers, [&](std::size_t wb, std::size_t we) {
    for (std::size_t w = wb; w < we; ++w) {
      const std::size_t begin = w * chunk;
      const std::size_t end = std::min(n, begin + chunk);
      double inter = worker_inter[w];
      auto& diam = worker_diam[w];
      for (std::size_t i = begin; i < end; ++i) {
        const std::uint32_t u = points[i];
        const float* pu = data.points().row_data(u);
        const std::uint32_t cu = c.assignment[u];
        for (std::size_t j = i + 1; j < n; ++j) {
          const std::uint32_t v = points[j];
          const std::uint32_t cv = c.assignment[v];
          if (cu == cv) {
            const double dist = euclidean(pu, data.points().row_data(v), d);
            if (dist > diam[cu]) diam[cu] = dist;
          } else {
            // Squared distance with early abandon against the running min.
            double sum = 0.0;
            const float* pv = data.points().row_data(v);
            const double bound = inter * inter;
            std::size_t t = 0;
            bool dropped = false;
            while (t < d) {
              const std::size_t stop = std::min(d, t + 8);
              for (; t < stop; ++t) {
                const double diff =
                    static_cast<double>(pu[t]) - static_cast<double>(pv[t]);
                sum += diff * diff;
              }
              if (sum > bound) {
                dropped = true;
                break;
              }
            }
            if (!dropped) inter = std::min(inter, std::sqrt(sum));
          }
        }
      }
      worker_inter[w] = inter;
    }
  });

  double min_inter = std::numeric_limits<double>::infinity();
  std::vector<double> diameter(c.num_clusters, 0.0);
  for (std::size_t w = 0; w < workers; ++w) {
    min_inter = std::min(min_inter, worker_inter[w]);
    for (std::uint32_t i = 0; i < c.num_clusters; ++i)
      diameter[i] = std::max(diameter[i], worker_diam[w][i]);
  }

  double max_diameter = 0.0;
  for (std::uint32_t i = 0; i < c.num_clusters; ++i)
    if (sizes[i] > 0) max_diameter = std::max(max_diameter, diameter[i]);
  if (max_diameter == 0.0)
    raise(errc::degenerate_diameter_zero,
          "every cluster has diameter 0; Dunn is undefined");

  result.value = min_inter / max_diameter;
  return result;
}

double db_index(const Dataset& data, const Clustering& c, DbWeighting weighting) {
  if (c.assignment.size() != data.size())
    raise(errc::bad_params, "assignment length does not match dataset size");
  const auto sizes = cluster_sizes(c);
  if (count_nonempty(sizes) < 2)
    raise(errc::fewer_than_two_clusters, "DB needs >= 2 nonempty clusters");

  const std::size_t d = data.dim();
  const std::uint32_t L = c.num_clusters;

  // Means and mean member distance to the mean, in double.
  std::vector<double> means(static_cast<std::size_t>(L) * d, 0.0);
  for (std::size_t u = 0; u < data.size(); ++u) {
    const float* p = data.points().row_data(u);
    double* mu = means.data() + static_cast<std::size_t>(c.assignment[u]) * d;
    for (std::size_t i = 0; i < d; ++i) mu[i] += p[i];
  }
  for (std::uint32_t i = 0; i < L; ++i) {
    if (sizes[i] == 0) continue;
    double* mu = means.data() + static_cast<std::size_t>(i) * d;
    for (std::size_t t = 0; t < d; ++t) mu[t] /= static_cast<double>(sizes[i]);
  }
  std::vector<double> spread(L, 0.0);
  for (std::size_t u = 0; u < data.size(); ++u) {
    const float* p = data.points().row_data(u);
    const double* mu = means.data() + static_cast<std::size_t>(c.assignment[u]) * d;
    double sum = 0.0;
    for (std::size_t t = 0; t < d; ++t) {
      const double diff = static_cast<double>(p[t]) - mu[t];
      sum += diff * diff;
    }
    spread[c.assignment[u]] += std::sqrt(sum);
  }
  for (std::uint32_t i = 0; i < L; ++i)
    if (sizes[i] > 0) spread[i] /= static_cast<double>(sizes[i]);

  auto mean_distance = [&](std::uint32_t i, std::uint32_t j) {
    const double* a = means.data() + static_cast<std::size_t>(i) * d;
    const double* b = means.data() + static_cast<std::size_t>(j) * d;
    double sum = 0.0;
    for (std::size_t t = 0; t < d; ++t) {
      const double diff = a[t] - b[t];
      sum += diff * diff;
    }
    return std::sqrt(sum);
  };

  double total_weight = 0.0;
  for (std::uint32_t i = 0; i < L; ++i) {
    if (sizes[i] == 0) continue;
    total_weight +=
        weighting == DbWeighting::uniform ? 1.0 : static_cast<double>(sizes[i]);
  }

  // Accumulate normalized weights; equal-size clusters then reduce to the
  // same w_i / total quotient under either weighting, bit for bit.
  double weighted = 0.0;
  for (std::uint32_t i = 0; i < L; ++i) {
    if (sizes[i] == 0) continue;
    double worst = 0.0;
    for (std::uint32_t j = 0; j < L; ++j) {
      if (j == i || sizes[j] == 0) continue;
      const double dist = mean_distance(i, j);
      if (dist == 0.0)
        raise(errc::coincident_centroids,
              "clusters " + std::to_string(i) + " and " + std::to_string(j) +
                  " have coincident means");
      worst = std::max(worst, (spread[i] + spread[j]) / dist);
    }
    const double w =
        weighting == DbWeighting::uniform ? 1.0 : static_cast<double>(sizes[i]);
    weighted += (w / total_weight) * worst;
  }
  return weighted;
}

}  // namespace nsm
