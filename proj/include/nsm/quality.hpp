#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nsm/baselines.hpp"
#include "nsm/stability.hpp"
#include "nsm/types.hpp"

namespace nsm {

/// Named quality measures for one clustering. Measures that were not
/// requested stay empty.
struct QualityReport {
  std::optional<double> nsm;
  std::optional<DunnResult> dunn;
  std::optional<double> db;
  std::optional<double> db_weighted;
  std::vector<std::uint32_t> empty_clusters;  // skipped with zero weight
  std::string weight_scheme = "by_size";
  /// Dunn comes in several flavors; this build ships the classical one
  /// and reports are tagged with it for comparability.
  std::string dunn_flavor = "single-linkage/complete-diameter";
};

struct QualitySelection {
  bool nsm = true;
  bool dunn = true;
  bool db = true;
  bool db_weighted = true;

  static QualitySelection parse(const std::string& csv);  // "nsm,dunn,db,db-weighted"
};

/// The neighbor table is only required when NSM is selected.
QualityReport compute_quality(const Dataset& data, const NeighborTable* nn,
                              const Clustering& clustering,
                              const QualitySelection& selection = {},
                              const DunnOptions& dunn_opts = {});

}  // namespace nsm
