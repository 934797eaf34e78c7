#include "nsm/protocol.hpp"

#include <algorithm>

#include "nsm/ivf.hpp"
#include "nsm/neighbors.hpp"
#include "nsm/parallel.hpp"
#include "nsm/rng.hpp"
#include "nsm/stability.hpp"

namespace nsm {

namespace {

FloatMatrix sampled_queries(const Dataset& data, std::size_t count,
                            std::uint64_t seed) {
  count = std::min(count, data.size());
  if (count == 0) raise(errc::bad_params, "query sample must be nonempty");
  Rng rng(mix_seed(seed, 0x71756572ULL));
  const auto ids = sample_without_replacement(data.size(), count, rng);
  FloatMatrix queries(ids.size(), data.dim());
  for (std::size_t i = 0; i < ids.size(); ++i)
    std::copy_n(data.points().row_data(ids[i]), data.dim(), queries.row_data(i));
  return queries;
}

std::vector<std::vector<std::uint32_t>> table_rows(const NeighborTable& table,
                                                   std::size_t k) {
  std::vector<std::vector<std::uint32_t>> rows(table.num_points);
  for (std::size_t q = 0; q < table.num_points; ++q) {
    const auto row = table.row(q);
    rows[q].assign(row.begin(), row.begin() + std::min(k, row.size()));
  }
  return rows;
}

}  // namespace

ProtocolResult run_protocol(const Dataset& data, const FloatMatrix* queries,
                            const ProtocolConfig& cfg) {
  if (cfg.iteration_grid.empty() || cfg.k_values.empty() || cfg.nprobe_values.empty())
    raise(errc::bad_params, "protocol grids must be nonempty");

  ProtocolResult result;
  result.num_clusters = cfg.num_clusters > 0 ? cfg.num_clusters
                                             : default_num_clusters(data.size());
  for (std::uint32_t np : cfg.nprobe_values)
    if (np < 1 || np > result.num_clusters)
      raise(errc::bad_probe_count, "nprobe " + std::to_string(np) +
                                       " outside [1, L=" +
                                       std::to_string(result.num_clusters) + "]");

  const FloatMatrix query_matrix =
      queries ? *queries : sampled_queries(data, cfg.fallback_queries, cfg.seed);
  result.num_queries = query_matrix.rows;

  // One neighbor table per dataset, reused for every clustering.
  result.nn = cfg.approximate_nn
                  ? approximate_1nn(data, 0, 10, cfg.seed).table
                  : exact_knn(data, 1);

  const std::uint32_t max_k =
      *std::max_element(cfg.k_values.begin(), cfg.k_values.end());
  const NeighborTable gt_table = exact_knn(data, query_matrix, max_k);

  for (const char* algo : {"kmeans", "spherical"}) {
    const bool spherical = std::string_view(algo) == "spherical";
    for (std::uint32_t iters : cfg.iteration_grid) {
      KMeansConfig km;
      km.variant = spherical ? KMeansVariant::spherical : KMeansVariant::standard;
      km.num_clusters = result.num_clusters;
      km.iterations = iters;
      km.seed = cfg.seed;
      km.init = KMeansInit::kmeans_pp;
      KMeansResult fitted = kmeans(data, km);

      ProtocolRun run;
      run.algo = algo;
      run.iterations = iters;
      run.iterations_run = fitted.iterations_run;
      run.nsm = clustering_nsm(result.nn, fitted.clustering);
      DunnOptions dunn_opts = cfg.dunn;
      dunn_opts.seed = cfg.seed;
      const DunnResult dunn = dunn_index(data, fitted.clustering, dunn_opts);
      run.dunn = dunn.value;
      run.dunn_subsampled = dunn.subsampled;
      run.db = db_index(data, fitted.clustering, DbWeighting::uniform);
      run.db_weighted = db_index(data, fitted.clustering, DbWeighting::by_size);

      const IvfIndex index = IvfIndex::build(data, fitted.clustering);
      run.accuracy.assign(cfg.k_values.size(),
                          std::vector<double>(cfg.nprobe_values.size(), 0.0));
      for (std::size_t ji = 0; ji < cfg.nprobe_values.size(); ++ji) {
        const std::uint32_t nprobe = cfg.nprobe_values[ji];
        // Search once at the largest k; smaller k values are prefixes of
        // the same ranked result.
        std::vector<std::vector<std::uint32_t>> found(query_matrix.rows);
        parallel_for_chunks(query_matrix.rows, [&](std::size_t b, std::size_t e) {
          for (std::size_t q = b; q < e; ++q)
            found[q] = index.search(query_matrix.row(q), max_k, nprobe).ids;
        });
        for (std::size_t ki = 0; ki < cfg.k_values.size(); ++ki) {
          const std::uint32_t k = cfg.k_values[ki];
          std::vector<std::vector<std::uint32_t>> truncated(found.size());
          for (std::size_t q = 0; q < found.size(); ++q)
            truncated[q].assign(found[q].begin(),
                                found[q].begin() +
                                    std::min<std::size_t>(k, found[q].size()));
          run.accuracy[ki][ji] =
              accuracy(truncated, table_rows(gt_table, k), k);
        }
      }

      result.runs.push_back(std::move(run));
      result.clusterings.push_back(std::move(fitted.clustering));
    }
  }

  // Spearman between accuracy and each measure over the clustering
  // ensemble, per (measure, k, nprobe); DB coefficients are negated.
  const std::size_t n_runs = result.runs.size();
  for (const char* measure : {"nsm", "dunn", "db", "db-weighted"}) {
    std::vector<double> quality(n_runs);
    for (std::size_t r = 0; r < n_runs; ++r) {
      const ProtocolRun& run = result.runs[r];
      if (std::string_view(measure) == "nsm") quality[r] = run.nsm;
      else if (std::string_view(measure) == "dunn") quality[r] = run.dunn;
      else if (std::string_view(measure) == "db") quality[r] = run.db;
      else quality[r] = run.db_weighted;
    }
    for (std::size_t ki = 0; ki < cfg.k_values.size(); ++ki) {
      for (std::size_t ji = 0; ji < cfg.nprobe_values.size(); ++ji) {
        std::vector<double> acc(n_runs);
        for (std::size_t r = 0; r < n_runs; ++r)
          acc[r] = result.runs[r].accuracy[ki][ji];
        SpearmanOptions sp;
        sp.mc_seed = cfg.seed;
        const SpearmanResult s = spearman(acc, quality, sp);
        CorrelationRow row;
        row.measure = measure;
        row.k = cfg.k_values[ki];
        row.nprobe = cfg.nprobe_values[ji];
        row.rho = negate_for_lower_better(measure, s.rho);
        row.p_value = s.p_value;
        row.n = n_runs;
        row.p_method = s.p_method;
        result.correlations.push_back(std::move(row));
      }
    }
  }
  return result;
}

}  // namespace nsm
