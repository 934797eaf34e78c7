#include "nsm/kmeans.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nsm/parallel.hpp"
#include "nsm/rng.hpp"

namespace nsm {

namespace {

double dot64(const float* a, const float* b, std::size_t d) {
  double sum = 0.0;
  for (std::size_t i = 0; i < d; ++i)
    sum += static_cast<double>(a[i]) * static_cast<double>(b[i]);
  return sum;
}

double squared_l2(const float* a, const float* b, std::size_t d) {
  double sum = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    const double diff = static_cast<double>(a[i]) - static_cast<double>(b[i]);
    sum += diff * diff;
  }
  return sum;
}

// Same accumulation order, abandoning once the partial sum passes `bound`
// (a centroid that can no longer win; the returned value is then only
// used to reject it, so the result is exact).
double squared_l2_bounded(const float* a, const float* b, std::size_t d,
                          double bound) {
  double sum = 0.0;
  std::size_t i = 0;
  while (i < d) {
    const std::size_t stop = std::min(d, i + 8);
    for (; i < stop; ++i) {
      const double diff = static_cast<double>(a[i]) - static_cast<double>(b[i]);
      sum += diff * diff;
    }
    if (sum > bound) return sum;
  }
  return sum;
}

// Assignment comparator: squared L2 for standard, -dot for spherical.
double assign_value(KMeansVariant variant, const float* point,
                    const float* centroid, std::size_t d) {
  return variant == KMeansVariant::standard ? squared_l2(point, centroid, d)
                                            : -dot64(point, centroid, d);
}

void normalize_row(float* row, std::size_t d) {
  const double sq = dot64(row, row, d);
  if (sq == 0.0) return;  // caller handles zero-norm centroids
  const double inv = 1.0 / std::sqrt(sq);
  for (std::size_t i = 0; i < d; ++i)
    row[i] = static_cast<float>(row[i] * inv);
}

// Seeding weight: squared L2 to the nearest chosen centroid, computed on
// unit-normalized copies for the spherical variant.
FloatMatrix seeding_points(const Dataset& data, KMeansVariant variant) {
  FloatMatrix pts = data.points();
  if (variant == KMeansVariant::spherical)
    for (std::size_t i = 0; i < pts.rows; ++i) normalize_row(pts.row_data(i), pts.cols);
  return pts;
}

FloatMatrix init_kmeans_pp(const Dataset& data, KMeansVariant variant,
                           std::uint32_t L, Rng& rng) {
  const FloatMatrix pts = seeding_points(data, variant);
  const std::size_t m = pts.rows, d = pts.cols;
  FloatMatrix centroids(L, d);
  std::vector<double> dist(m, std::numeric_limits<double>::infinity());
  std::vector<std::uint32_t> chosen;
  chosen.reserve(L);

  std::uint32_t first = static_cast<std::uint32_t>(rng.uniform_index(m));
  chosen.push_back(first);
  for (std::uint32_t c = 0; c < L; ++c) {
    const std::uint32_t pick = chosen[c];
    std::copy_n(data.points().row_data(pick), d, centroids.row_data(c));
    if (c + 1 == L) break;

    const float* latest = pts.row_data(pick);
    double total = 0.0;
    for (std::size_t u = 0; u < m; ++u) {
      dist[u] = std::min(dist[u], squared_l2(pts.row_data(u), latest, d));
      total += dist[u];
    }
    std::uint32_t next = 0;
    if (total > 0.0) {
      double target = rng.uniform01() * total;
      std::size_t u = 0;
      for (; u + 1 < m; ++u) {
        target -= dist[u];
        if (target <= 0.0) break;
      }
      next = static_cast<std::uint32_t>(u);
      if (dist[next] == 0.0) {
        // Landed on an already-covered point through rounding; take the
        // lowest id with positive weight instead.
        for (std::size_t w = 0; w < m; ++w)
          if (dist[w] > 0.0) { next = static_cast<std::uint32_t>(w); break; }
      }
    } else {
      // All remaining points duplicate a centroid; pick the lowest unused id.
      std::vector<bool> used(m, false);
      for (std::uint32_t id : chosen) used[id] = true;
      for (std::size_t w = 0; w < m; ++w)
        if (!used[w]) { next = static_cast<std::uint32_t>(w); break; }
    }
    chosen.push_back(next);
  }
  return centroids;
}

FloatMatrix init_random_points(const Dataset& data, std::uint32_t L, Rng& rng) {
  const auto ids = sample_without_replacement(data.size(), L, rng);
  FloatMatrix centroids(L, data.dim());
  for (std::uint32_t c = 0; c < L; ++c)
    std::copy_n(data.points().row_data(ids[c]), data.dim(), centroids.row_data(c));
  return centroids;
}

}  // namespace

const char* kmeans_variant_name(KMeansVariant v) noexcept {
  return v == KMeansVariant::standard ? "kmeans" : "spherical";
}

std::uint32_t default_num_clusters(std::size_t m, double t) {
  if (m < 4) raise(errc::bad_params, "default_num_clusters needs m >= 4");
  const long long L = std::llround(t * std::sqrt(static_cast<double>(m)));
  return static_cast<std::uint32_t>(std::max(1LL, L));
}

KMeansResult kmeans(const Dataset& data, const KMeansConfig& cfg) {
  const std::size_t m = data.size();
  const std::size_t d = data.dim();
  const std::uint32_t L = cfg.num_clusters;
  if (L < 1) raise(errc::bad_params, "num_clusters must be at least 1");
  if (L > m)
    raise(errc::too_many_clusters, "L=" + std::to_string(L) + " exceeds m=" +
                                       std::to_string(m));
  if (cfg.iterations < 1) raise(errc::bad_params, "iterations must be at least 1");

  if (cfg.variant == KMeansVariant::spherical) {
    for (std::size_t u = 0; u < m; ++u)
      if (dot64(data.points().row_data(u), data.points().row_data(u), d) == 0.0)
        raise(errc::zero_vector,
              "point " + std::to_string(u) + " has zero norm (spherical)");
  }

  Rng rng(mix_seed(cfg.seed, 0x6b6d65616e73ULL));
  FloatMatrix centroids;
  if (cfg.initial_centroids) {
    centroids = *cfg.initial_centroids;
    if (centroids.rows != L || centroids.cols != d)
      raise(errc::bad_params, "initial centroids shape mismatch");
  } else if (cfg.init == KMeansInit::kmeans_pp) {
    centroids = init_kmeans_pp(data, cfg.variant, L, rng);
  } else {
    centroids = init_random_points(data, L, rng);
  }
  if (cfg.variant == KMeansVariant::spherical)
    for (std::uint32_t c = 0; c < L; ++c) normalize_row(centroids.row_data(c), d);

  std::vector<std::uint32_t> assignment(m, 0);
  std::vector<std::uint32_t> previous;
  std::vector<double> objective_history;
  std::uint32_t rounds = 0;

  for (std::uint32_t iter = 0; iter < cfg.iterations; ++iter) {
    // Assignment: best (value, cluster id) per point.
    parallel_for_chunks(m, [&](std::size_t begin, std::size_t end) {
      for (std::size_t u = begin; u < end; ++u) {
        const float* point = data.points().row_data(u);
        double best = std::numeric_limits<double>::infinity();
        std::uint32_t best_c = 0;
        for (std::uint32_t c = 0; c < L; ++c) {
          const double value =
              cfg.variant == KMeansVariant::standard
                  ? squared_l2_bounded(point, centroids.row_data(c), d, best)
                  : -dot64(point, centroids.row_data(c), d);
          if (value < best) {
            best = value;
            best_c = c;
          }
        }
        assignment[u] = best_c;
      }
    });
    if (!previous.empty() && assignment == previous) break;
    previous = assignment;
    ++rounds;

    // Update: per-cluster means accumulated in ascending point id order.
    std::vector<std::vector<std::uint32_t>> members(L);
    for (std::size_t u = 0; u < m; ++u)
      members[assignment[u]].push_back(static_cast<std::uint32_t>(u));
    std::vector<double> sums(static_cast<std::size_t>(L) * d);
    parallel_for_chunks(L, [&](std::size_t begin, std::size_t end) {
      for (std::size_t c = begin; c < end; ++c) {
        double* acc = sums.data() + c * d;
        for (std::uint32_t u : members[c]) {
          const float* point = data.points().row_data(u);
          for (std::size_t i = 0; i < d; ++i) acc[i] += point[i];
        }
        if (!members[c].empty()) {
          const double inv = 1.0 / static_cast<double>(members[c].size());
          float* row = centroids.row_data(c);
          for (std::size_t i = 0; i < d; ++i)
            row[i] = static_cast<float>(acc[i] * inv);
          if (cfg.variant == KMeansVariant::spherical)
            normalize_row(centroids.row_data(c), d);
        }
      }
    });

    // Reseed clusters that came out empty (or, for spherical, whose mean
    // collapsed to zero norm): steal the point farthest from its current
    // centroid, ties toward the lower id.
    for (;;) {
      std::vector<std::size_t> sizes(L, 0);
      for (std::uint32_t a : assignment) ++sizes[a];
      std::uint32_t hole = L;
      for (std::uint32_t c = 0; c < L; ++c) {
        const bool degenerate =
            cfg.variant == KMeansVariant::spherical && sizes[c] > 0 &&
            dot64(centroids.row_data(c), centroids.row_data(c), d) == 0.0;
        if (sizes[c] == 0 || degenerate) {
          hole = c;
          break;
        }
      }
      if (hole == L) break;
      double worst = -std::numeric_limits<double>::infinity();
      std::uint32_t worst_u = m;
      for (std::size_t u = 0; u < m; ++u) {
        if (sizes[assignment[u]] < 2) continue;
        const double value = assign_value(cfg.variant, data.points().row_data(u),
                                          centroids.row_data(assignment[u]), d);
        if (value > worst) {
          worst = value;
          worst_u = static_cast<std::uint32_t>(u);
        }
      }
      if (worst_u == m) break;  // nothing stealable
      std::copy_n(data.points().row_data(worst_u), d, centroids.row_data(hole));
      if (cfg.variant == KMeansVariant::spherical)
        normalize_row(centroids.row_data(hole), d);
      assignment[worst_u] = hole;
    }

    double objective = 0.0;
    for (std::size_t u = 0; u < m; ++u)
      objective += assign_value(cfg.variant, data.points().row_data(u),
                                centroids.row_data(assignment[u]), d);
    objective_history.push_back(objective);
  }

  KMeansResult result;
  result.clustering = Clustering::from_assignment(std::move(assignment), L);
  result.clustering.centroids = std::move(centroids);
  result.iterations_run = rounds;
  result.objective_history = std::move(objective_history);
  return result;
}

}  // namespace nsm
