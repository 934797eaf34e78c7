#include "nsm/quality.hpp"

#include <sstream>

namespace nsm {

QualitySelection QualitySelection::parse(const std::string& csv) {
  QualitySelection sel;
  sel.nsm = sel.dunn = sel.db = sel.db_weighted = false;
  std::istringstream in(csv);
  std::string name;
  bool any = false;
  while (std::getline(in, name, ',')) {
    if (name.empty()) continue;
    any = true;
    if (name == "nsm") sel.nsm = true;
    else if (name == "dunn") sel.dunn = true;
    else if (name == "db") sel.db = true;
    else if (name == "db-weighted") sel.db_weighted = true;
    else raise(errc::unknown_measure, "unknown measure '" + name + "'");
  }
  if (!any) raise(errc::bad_params, "no measures selected");
  return sel;
}

QualityReport compute_quality(const Dataset& data, const NeighborTable* nn,
                              const Clustering& clustering,
                              const QualitySelection& selection,
                              const DunnOptions& dunn_opts) {
  QualityReport report;
  const auto sizes = cluster_sizes(clustering);
  for (std::uint32_t i = 0; i < clustering.num_clusters; ++i)
    if (sizes[i] == 0) report.empty_clusters.push_back(i);

  if (selection.nsm) {
    if (!nn)
      raise(errc::bad_params, "NSM requested without a neighbor table");
    report.nsm = clustering_nsm(*nn, clustering);
  }
  if (selection.dunn) report.dunn = dunn_index(data, clustering, dunn_opts);
  if (selection.db) report.db = db_index(data, clustering, DbWeighting::uniform);
  if (selection.db_weighted)
    report.db_weighted = db_index(data, clustering, DbWeighting::by_size);
  return report;
}

}  // namespace nsm
