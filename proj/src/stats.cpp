#include "nsm/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_map>

#include "nsm/parallel.hpp"
#include "nsm/rng.hpp"

namespace nsm {

namespace {

// Pearson numerator of centered vectors; denominators are precomputed.
double dot_centered(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
  return sum;
}

std::vector<double> centered(std::span<const double> ranks) {
  double mean = 0.0;
  for (double r : ranks) mean += r;
  mean /= static_cast<double>(ranks.size());
  std::vector<double> out(ranks.size());
  for (std::size_t i = 0; i < ranks.size(); ++i) out[i] = ranks[i] - mean;
  return out;
}

}  // namespace

std::vector<double> fractional_ranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double shared = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = shared;
    i = j + 1;
  }
  return ranks;
}

SpearmanResult spearman(std::span<const double> x, std::span<const double> y,
                        const SpearmanOptions& opts) {
  if (x.size() != y.size())
    raise(errc::length_mismatch, "x has " + std::to_string(x.size()) +
                                     " entries, y has " + std::to_string(y.size()));
  const std::size_t n = x.size();
  if (n < 3) raise(errc::too_short, "Spearman needs at least 3 pairs");

  const auto rx = centered(fractional_ranks(x));
  const auto ry = centered(fractional_ranks(y));
  const double sx = dot_centered(rx, rx);
  const double sy = dot_centered(ry, ry);

  SpearmanResult result;
  if (sx == 0.0 || sy == 0.0) {
    result.rho = std::numeric_limits<double>::quiet_NaN();
    result.p_value = std::numeric_limits<double>::quiet_NaN();
    result.p_method = "degenerate";
    return result;
  }

  const double scale = std::sqrt(sx * sy);
  const double observed = dot_centered(rx, ry);
  result.rho = observed / scale;

  // Two-sided permutation test on the rank dot product (the denominator
  // is permutation-invariant). The tiny tolerance keeps rank-tie
  // arithmetic from flipping exact equality.
  const double threshold = std::abs(observed) - 1e-9 * scale;

  if (n <= opts.exact_limit) {
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::size_t extreme = 0, total = 0;
    std::vector<double> permuted(n);
    do {
      double dot = 0.0;
      for (std::size_t i = 0; i < n; ++i) dot += rx[i] * ry[perm[i]];
      if (std::abs(dot) >= threshold) ++extreme;
      ++total;
    } while (std::next_permutation(perm.begin(), perm.end()));
    result.p_value = static_cast<double>(extreme) / static_cast<double>(total);
    result.p_method = "exact-permutation";
    return result;
  }

  // Counter-based seeding: draw i depends only on (seed, i), so any
  // parallel split counts the same permutations.
  const std::size_t draws = opts.mc_draws;
  const std::size_t workers = std::max<std::size_t>(1, thread_count());
  std::vector<std::size_t> counts(workers, 0);
  const std::size_t chunk = (draws + workers - 1) / workers;
  parallel_for_chunks(workers, [&](std::size_t wb, std::size_t we) {
    for (std::size_t w = wb; w < we; ++w) {
      const std::size_t begin = w * chunk;
      const std::size_t end = std::min(draws, begin + chunk);
      std::size_t extreme = 0;
      std::vector<std::uint32_t> perm(n);
      for (std::size_t i = begin; i < end; ++i) {
        Rng rng(mix_seed(opts.mc_seed, 0x7370726dULL + i));
        for (std::size_t t = 0; t < n; ++t) perm[t] = static_cast<std::uint32_t>(t);
        for (std::size_t t = 0; t < n; ++t) {
          const std::size_t j = t + rng.uniform_index(n - t);
          std::swap(perm[t], perm[j]);
        }
        double dot = 0.0;
        for (std::size_t t = 0; t < n; ++t) dot += rx[t] * ry[perm[t]];
        if (std::abs(dot) >= threshold) ++extreme;
      }
      counts[w] = extreme;
    }
  });
  std::size_t extreme = 0;
  for (std::size_t c : counts) extreme += c;
  result.p_value = static_cast<double>(extreme + 1) / static_cast<double>(draws + 1);
  result.p_method = "monte-carlo";
  return result;
}

bool lower_is_better(std::string_view measure) {
  if (measure == "db" || measure == "db-weighted") return true;
  if (measure == "nsm" || measure == "dunn" || measure == "accuracy" ||
      measure == "point-nsm-mean" || measure == "point-nsm-q0.1" ||
      measure == "mutual-information" || measure == "homogeneity")
    return false;
  raise(errc::unknown_measure, "unknown measure '" + std::string(measure) + "'");
}

double negate_for_lower_better(std::string_view measure, double rho) {
  return lower_is_better(measure) ? -rho : rho;
}

namespace {

double entropy_nats(const std::unordered_map<std::int32_t, std::size_t>& counts,
                    std::size_t n) {
  double h = 0.0;
  for (const auto& [_, count] : counts) {
    if (count == 0) continue;
    const double p = static_cast<double>(count) / static_cast<double>(n);
    h -= p * std::log(p);
  }
  return h;
}

void check_label_args(std::span<const std::int32_t> labels,
                      std::span<const std::int32_t> clusters) {
  if (labels.size() != clusters.size())
    raise(errc::length_mismatch, "labels and clusters differ in length");
  if (labels.empty()) raise(errc::empty_input, "no labeled points");
}

}  // namespace

double mutual_information(std::span<const std::int32_t> labels,
                          std::span<const std::int32_t> clusters) {
  check_label_args(labels, clusters);
  const std::size_t n = labels.size();
  std::unordered_map<std::int32_t, std::size_t> label_counts, cluster_counts;
  std::unordered_map<std::int64_t, std::size_t> joint;
  for (std::size_t i = 0; i < n; ++i) {
    ++label_counts[labels[i]];
    ++cluster_counts[clusters[i]];
    ++joint[(static_cast<std::int64_t>(labels[i]) << 32) ^
            static_cast<std::uint32_t>(clusters[i])];
  }
  double mi = 0.0;
  for (const auto& [key, count] : joint) {
    const std::int32_t label = static_cast<std::int32_t>(key >> 32);
    const std::int32_t cluster = static_cast<std::int32_t>(key & 0xffffffff);
    const double p = static_cast<double>(count) / static_cast<double>(n);
    const double pl = static_cast<double>(label_counts[label]) / static_cast<double>(n);
    const double pc =
        static_cast<double>(cluster_counts[cluster]) / static_cast<double>(n);
    mi += p * std::log(p / (pl * pc));
  }
  return std::max(0.0, mi);
}

double homogeneity(std::span<const std::int32_t> labels,
                   std::span<const std::int32_t> clusters) {
  check_label_args(labels, clusters);
  const std::size_t n = labels.size();
  std::unordered_map<std::int32_t, std::size_t> label_counts;
  std::unordered_map<std::int32_t, std::unordered_map<std::int32_t, std::size_t>>
      per_cluster;
  std::unordered_map<std::int32_t, std::size_t> cluster_counts;
  for (std::size_t i = 0; i < n; ++i) {
    ++label_counts[labels[i]];
    ++cluster_counts[clusters[i]];
    ++per_cluster[clusters[i]][labels[i]];
  }
  const double h_label = entropy_nats(label_counts, n);
  if (h_label == 0.0) return 1.0;
  double h_conditional = 0.0;
  for (const auto& [cluster, counts] : per_cluster) {
    const double weight =
        static_cast<double>(cluster_counts[cluster]) / static_cast<double>(n);
    h_conditional += weight * entropy_nats(counts, cluster_counts[cluster]);
  }
  return std::clamp(1.0 - h_conditional / h_label, 0.0, 1.0);
}

double lower_quantile(std::span<const double> values, double alpha) {
  if (values.empty()) raise(errc::empty_input, "quantile of an empty list");
  if (!(alpha > 0.0) || alpha > 1.0)
    raise(errc::bad_params, "quantile level must lie in (0, 1]");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  std::size_t rank = static_cast<std::size_t>(
      std::ceil(alpha * static_cast<double>(sorted.size())));
  rank = std::clamp<std::size_t>(rank, 1, sorted.size());
  return sorted[rank - 1];
}

Summary summarize(std::span<const double> values,
                  std::span<const double> quantile_levels) {
  if (values.empty()) raise(errc::empty_input, "summarize of an empty list");
  Summary s;
  double total = 0.0;
  for (double v : values) total += v;
  s.mean = total / static_cast<double>(values.size());
  for (double alpha : quantile_levels) s.quantiles[alpha] = lower_quantile(values, alpha);
  return s;
}

}  // namespace nsm
