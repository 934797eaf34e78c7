#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nsm/types.hpp"

namespace nsm {

/// Average ("fractional") ranks, 1-based; tied values share the mean of
/// their positions.
std::vector<double> fractional_ranks(std::span<const double> values);

struct SpearmanOptions {
  /// Exact permutation p-value up to this n; Monte-Carlo beyond.
  std::size_t exact_limit = 8;
  std::size_t mc_draws = 100000;
  std::uint64_t mc_seed = 0;
};

struct SpearmanResult {
  double rho = 0.0;
  double p_value = 1.0;
  const char* p_method = "exact-permutation";  // or "monte-carlo"
};

/// Spearman's rank correlation (Pearson over fractional ranks) with a
/// two-sided permutation p-value. Needs n >= 3; ties allowed. Degenerate
/// inputs (a constant list) yield NaN.
SpearmanResult spearman(std::span<const double> x, std::span<const double> y,
                        const SpearmanOptions& opts = {});

/// True when smaller values of the named measure indicate better
/// clustering (db, db-weighted). Unknown names are an error.
bool lower_is_better(std::string_view measure);

/// Flips the sign of rho exactly for lower-is-better measures so that
/// reported coefficients are comparable across measures.
double negate_for_lower_better(std::string_view measure, double rho);

/// Mutual information of the empirical joint label/cluster distribution,
/// in nats.
double mutual_information(std::span<const std::int32_t> labels,
                          std::span<const std::int32_t> clusters);

/// 1 - H(label | cluster) / H(label); 1.0 when H(label) = 0.
double homogeneity(std::span<const std::int32_t> labels,
                   std::span<const std::int32_t> clusters);

struct Summary {
  double mean = 0.0;
  std::map<double, double> quantiles;
};

/// Mean plus the requested lower empirical quantiles (order statistic at
/// ceil(alpha * n), 1-indexed).
Summary summarize(std::span<const double> values,
                  std::span<const double> quantile_levels);

double lower_quantile(std::span<const double> values, double alpha);

}  // namespace nsm
