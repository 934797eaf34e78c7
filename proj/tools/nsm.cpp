// nsm: neighborhood-stability toolkit for clustering-based nearest
// neighbor search. Subcommands cover dataset synthesis, neighbor tables,
// clustering, quality measures, IVF evaluation and rank correlation.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "nsm/baselines.hpp"
#include "nsm/io.hpp"
#include "nsm/ivf.hpp"
#include "nsm/kmeans.hpp"
#include "nsm/neighbors.hpp"
#include "nsm/parallel.hpp"
#include "nsm/protocol.hpp"
#include "nsm/quality.hpp"
#include "nsm/stability.hpp"
#include "nsm/stats.hpp"
#include "nsm/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

constexpr int kExitUsage = 2;
constexpr int kExitFormat = 3;
constexpr int kExitDegenerate = 4;

// "1,2,4" and "1..8" (inclusive), or a mix.
std::vector<std::uint32_t> parse_uint_list(const std::string& text) {
  std::vector<std::uint32_t> out;
  std::istringstream in(text);
  std::string token;
  while (std::getline(in, token, ',')) {
    if (token.empty()) continue;
    const auto dots = token.find("..");
    if (dots == std::string::npos) {
      out.push_back(static_cast<std::uint32_t>(std::stoul(token)));
    } else {
      const auto lo = std::stoul(token.substr(0, dots));
      const auto hi = std::stoul(token.substr(dots + 2));
      if (hi < lo) nsm::raise(nsm::errc::bad_params, "bad range '" + token + "'");
      for (auto v = lo; v <= hi; ++v) out.push_back(static_cast<std::uint32_t>(v));
    }
  }
  if (out.empty()) nsm::raise(nsm::errc::bad_params, "empty list '" + text + "'");
  return out;
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::istringstream in(text);
  std::string token;
  while (std::getline(in, token, ',')) {
    if (!token.empty()) out.push_back(std::stod(token));
  }
  if (out.empty()) nsm::raise(nsm::errc::bad_params, "empty list '" + text + "'");
  return out;
}

nsm::Dataset load_dataset(const std::string& path, const std::string& metric) {
  return nsm::Dataset(nsm::read_fvecs(path), nsm::parse_metric(metric));
}

nsm::Clustering load_clustering(const std::string& assign_path,
                                const std::string& centroid_path,
                                std::uint32_t num_clusters) {
  const auto assignment = nsm::assignment_from_table(nsm::read_ivecs(assign_path));
  std::uint32_t L = num_clusters;
  if (L == 0) {
    for (std::uint32_t id : assignment) L = std::max(L, id + 1);
  }
  auto clustering = nsm::Clustering::from_assignment(assignment, L);
  if (!centroid_path.empty()) {
    auto centroids = nsm::read_fvecs(centroid_path);
    if (centroids.rows != L)
      nsm::raise(nsm::errc::bad_params,
                 "centroid file has " + std::to_string(centroids.rows) +
                     " rows for L=" + std::to_string(L));
    clustering.centroids = std::move(centroids);
  }
  return clustering;
}

void write_json(const fs::path& path, const json& value) {
  nsm::atomic_write_file(path, [&](std::ostream& out) { out << value.dump(2) << '\n'; });
}

json base_metadata(std::uint64_t seed) {
  json meta;
  meta["tool"] = "nsm";
  meta["version"] = kVersion;
  meta["seed"] = seed;
  meta["threads_affect_output"] = false;
  return meta;
}

std::string dataset_name(const std::string& data_path) {
  return fs::path(data_path).stem().string();
}

// ---------------------------------------------------------------------------
// Subcommands

struct SynthArgs {
  std::string kind, metric = "l2", out, labels_out, positions;
  std::uint64_t seed = 0;
  std::uint32_t components = 8, per = 100, dim = 16, groups = 4, group_size = 4;
  std::uint32_t count = 1000;
  double sigma = 1.0, sep = 4.0;
};

void run_synth(const SynthArgs& a) {
  json meta = base_metadata(a.seed);
  meta["command"] = "synth";
  meta["kind"] = a.kind;
  meta["metric"] = a.metric;
  const nsm::Metric metric = nsm::parse_metric(a.metric);
  if (a.kind == "gaussian_mixture") {
    nsm::GaussianMixtureParams p{a.components, a.per, a.dim, a.sigma, a.sep};
    const auto labeled = nsm::synth_gaussian_mixture(p, a.seed, metric);
    nsm::write_fvecs(a.out, labeled.data.points());
    if (!a.labels_out.empty()) {
      nsm::IntTable labels(labeled.labels.size(), 1);
      for (std::size_t i = 0; i < labeled.labels.size(); ++i)
        labels.values[i] = labeled.labels[i];
      nsm::write_ivecs(a.labels_out, labels);
    }
    meta["params"] = {{"components", p.components}, {"per", p.per_component},
                      {"dim", p.dim},               {"sigma", p.sigma},
                      {"separation", p.separation}};
  } else if (a.kind == "ball_cover") {
    nsm::BallCoverPatternParams p{a.groups, a.group_size, a.dim, a.sep};
    nsm::write_fvecs(a.out, nsm::synth_ball_cover(p, a.seed, metric).points());
    meta["params"] = {{"groups", p.groups}, {"group_size", p.group_size},
                      {"dim", p.dim},       {"separation", p.separation}};
  } else if (a.kind == "line") {
    const auto positions = parse_double_list(a.positions);
    nsm::write_fvecs(a.out, nsm::synth_line(positions, metric).points());
    meta["params"] = {{"positions", positions}};
  } else if (a.kind == "uniform") {
    nsm::write_fvecs(a.out,
                     nsm::synth_uniform_noise(a.count, a.dim, a.seed, metric).points());
    meta["params"] = {{"m", a.count}, {"dim", a.dim}};
  } else {
    nsm::raise(nsm::errc::bad_params, "unknown synth kind '" + a.kind + "'");
  }
  write_json(a.out + ".meta.json", meta);
}

struct KnnArgs {
  std::string data, metric = "l2", queries, out;
  std::size_t k = 1;
  bool approx = false;
  std::size_t clusters = 0, probes = 10;
  std::uint64_t seed = 0;
};

void run_knn(const KnnArgs& a) {
  const auto data = load_dataset(a.data, a.metric);
  json meta = base_metadata(a.seed);
  meta["command"] = "knn";
  meta["data"] = a.data;
  meta["metric"] = a.metric;
  meta["k"] = a.k;

  nsm::NeighborTable table;
  if (a.approx) {
    if (!a.queries.empty())
      nsm::raise(nsm::errc::bad_params, "--approx only supports self mode");
    if (a.k != 1)
      nsm::raise(nsm::errc::bad_params, "--approx computes k = 1 tables");
    auto result = nsm::approximate_1nn(data, a.clusters, a.probes, a.seed);
    table = std::move(result.table);
    meta["source"] = "approximate";
    meta["expanded_rows"] = result.expanded_rows.size();
    meta["probes"] = a.probes;
  } else if (!a.queries.empty()) {
    table = nsm::exact_knn(data, nsm::read_fvecs(a.queries), a.k);
    meta["source"] = "exact";
    meta["queries"] = a.queries;
  } else {
    table = nsm::exact_knn(data, a.k);
    meta["source"] = "exact";
  }
  nsm::write_ivecs(a.out, nsm::neighbor_ids_table(table));
  write_json(a.out + ".meta.json", meta);
}

struct ClusterArgs {
  std::string data, metric = "l2", algo = "kmeans", out, centroids_out, init = "kmeans++";
  std::uint32_t clusters = 0, iters = 10;
  double t = 0.0;
  std::uint64_t seed = 0;
};

void run_cluster(const ClusterArgs& a) {
  const auto data = load_dataset(a.data, a.metric);
  nsm::KMeansConfig cfg;
  if (a.algo == "kmeans") cfg.variant = nsm::KMeansVariant::standard;
  else if (a.algo == "spherical") cfg.variant = nsm::KMeansVariant::spherical;
  else nsm::raise(nsm::errc::bad_params, "unknown algo '" + a.algo + "'");

  if (a.clusters > 0) {
    cfg.num_clusters = a.clusters;
  } else if (a.t > 0.0) {
    if (a.t != 0.25 && a.t != 0.5 && a.t != 1.0)
      nsm::raise(nsm::errc::bad_params, "--t must be 0.25, 0.5 or 1");
    cfg.num_clusters = nsm::default_num_clusters(data.size(), a.t);
  } else {
    cfg.num_clusters = nsm::default_num_clusters(data.size());
  }
  cfg.iterations = a.iters;
  cfg.seed = a.seed;
  if (a.init == "kmeans++") cfg.init = nsm::KMeansInit::kmeans_pp;
  else if (a.init == "random") cfg.init = nsm::KMeansInit::random_points;
  else nsm::raise(nsm::errc::bad_params, "unknown init '" + a.init + "'");

  const auto result = nsm::kmeans(data, cfg);
  nsm::write_ivecs(a.out, nsm::assignment_table(result.clustering.assignment));
  if (!a.centroids_out.empty())
    nsm::write_fvecs(a.centroids_out, *result.clustering.centroids);

  json meta = base_metadata(a.seed);
  meta["command"] = "cluster";
  meta["data"] = a.data;
  meta["metric"] = a.metric;
  meta["algo"] = a.algo;
  meta["num_clusters"] = cfg.num_clusters;
  meta["iterations"] = a.iters;
  meta["iterations_run"] = result.iterations_run;
  meta["init"] = a.init;
  if (!result.objective_history.empty())
    meta["objective"] = result.objective_history.back();
  write_json(a.out + ".meta.json", meta);
}

struct QualityArgs {
  std::string data, metric = "l2", assign, centroids, nn,
      measures = "nsm,dunn,db,db-weighted", out;
  std::uint32_t clusters = 0;
  std::size_t dunn_cap = 200000;
  std::uint64_t seed = 0;
};

void run_quality(const QualityArgs& a) {
  const auto data = load_dataset(a.data, a.metric);
  const auto clustering = load_clustering(a.assign, a.centroids, a.clusters);
  const auto selection = nsm::QualitySelection::parse(a.measures);

  std::optional<nsm::NeighborTable> table;
  if (selection.nsm) {
    if (a.nn.empty())
      nsm::raise(nsm::errc::bad_params, "--nn is required for the nsm measure");
    table = nsm::neighbor_table_from_ids(nsm::read_ivecs(a.nn));
  }
  nsm::DunnOptions dunn_opts;
  dunn_opts.max_points = a.dunn_cap;
  dunn_opts.seed = a.seed;
  const auto report = nsm::compute_quality(data, table ? &*table : nullptr,
                                           clustering, selection, dunn_opts);

  json out = base_metadata(a.seed);
  out["command"] = "quality";
  out["dataset"] = dataset_name(a.data);
  out["metric"] = a.metric;
  out["num_clusters"] = clustering.num_clusters;
  out["weight_scheme"] = report.weight_scheme;
  json measures = json::object();
  if (report.nsm) measures["nsm"] = *report.nsm;
  if (report.dunn) {
    measures["dunn"] = report.dunn->value;
    out["dunn_flavor"] = report.dunn_flavor;
    out["dunn_subsampled"] = report.dunn->subsampled;
    out["dunn_points_used"] = report.dunn->points_used;
  }
  if (report.db) measures["db"] = *report.db;
  if (report.db_weighted) measures["db-weighted"] = *report.db_weighted;
  out["measures"] = measures;
  out["empty_clusters"] = report.empty_clusters;
  if (!report.empty_clusters.empty())
    out["warnings"] = {"empty clusters were skipped with zero weight"};
  write_json(a.out, out);
}

struct PointNsmArgs {
  std::string data, metric = "l2", nn, stats = "mean,q0.1", out;
  std::uint32_t radius = 2;
  double sample = 0.05;
  std::uint64_t seed = 0;
};

void run_point_nsm(const PointNsmArgs& a) {
  const auto data = load_dataset(a.data, a.metric);
  const auto table = nsm::neighbor_table_from_ids(nsm::read_ivecs(a.nn));
  if (table.num_points != data.size())
    nsm::raise(nsm::errc::missing_rows,
               "neighbor table rows do not match the dataset size");

  std::vector<double> quantiles;
  bool want_mean = false;
  {
    std::istringstream in(a.stats);
    std::string token;
    while (std::getline(in, token, ',')) {
      if (token == "mean") want_mean = true;
      else if (token.size() > 1 && token[0] == 'q')
        quantiles.push_back(std::stod(token.substr(1)));
      else if (!token.empty())
        nsm::raise(nsm::errc::bad_params, "unknown stat '" + token + "'");
    }
  }

  const auto dist =
      nsm::point_nsm_distribution(table, a.radius, a.sample, a.seed, quantiles);

  nsm::CsvTable csv;
  csv.header = {"point_id", "point_nsm"};
  for (std::size_t i = 0; i < dist.ids.size(); ++i)
    csv.rows.push_back(
        {std::to_string(dist.ids[i]), nsm::format_double(dist.values[i])});
  nsm::write_csv(a.out, csv);

  json meta = base_metadata(a.seed);
  meta["command"] = "point-nsm";
  meta["dataset"] = dataset_name(a.data);
  meta["radius"] = a.radius;
  meta["sample_fraction"] = a.sample;
  meta["samples"] = dist.ids.size();
  json summary = json::object();
  if (want_mean) summary["mean"] = dist.mean;
  for (const auto& [alpha, value] : dist.quantiles)
    summary["q" + nsm::format_double(alpha)] = value;
  meta["summary"] = summary;
  write_json(fs::path(a.out).replace_extension(".summary.json"), meta);
}

struct IvfEvalArgs {
  std::string data, metric = "l2", queries, gt, assign, centroids, out;
  std::string k_list = "5,10", nprobe_list = "1";
  std::uint32_t clusters = 0;
};

void run_ivf_eval(const IvfEvalArgs& a) {
  const auto data = load_dataset(a.data, a.metric);
  const auto query_matrix = nsm::read_fvecs(a.queries);
  const auto gt = nsm::read_ivecs(a.gt);
  if (gt.rows != query_matrix.rows)
    nsm::raise(nsm::errc::length_mismatch,
               "ground truth rows do not match the query count");
  const auto clustering = load_clustering(a.assign, a.centroids, a.clusters);
  const auto index = nsm::IvfIndex::build(data, clustering);

  const auto k_values = parse_uint_list(a.k_list);
  const auto nprobe_values = parse_uint_list(a.nprobe_list);
  const std::uint32_t max_k = *std::max_element(k_values.begin(), k_values.end());
  if (gt.cols < max_k)
    nsm::raise(nsm::errc::length_mismatch, "ground truth has fewer than k columns");

  std::vector<std::vector<std::uint32_t>> truth(gt.rows);
  for (std::size_t q = 0; q < gt.rows; ++q) {
    const auto row = gt.row(q);
    truth[q].reserve(row.size());
    for (std::int32_t v : row) truth[q].push_back(static_cast<std::uint32_t>(v));
  }

  nsm::CsvTable csv;
  csv.header = {"dataset", "k", "nprobe", "accuracy", "queries", "short_results"};
  const std::string name = dataset_name(a.data);
  for (const std::uint32_t nprobe : nprobe_values) {
    std::vector<std::vector<std::uint32_t>> found(query_matrix.rows);
    std::size_t short_results = 0;
    for (std::size_t q = 0; q < query_matrix.rows; ++q) {
      auto result = index.search(query_matrix.row(q), max_k, nprobe);
      short_results += result.short_result;
      found[q] = std::move(result.ids);
    }
    for (const std::uint32_t k : k_values) {
      std::vector<std::vector<std::uint32_t>> trimmed(found.size());
      for (std::size_t q = 0; q < found.size(); ++q)
        trimmed[q].assign(found[q].begin(),
                          found[q].begin() + std::min<std::size_t>(k, found[q].size()));
      const double acc = nsm::accuracy(trimmed, truth, k);
      csv.rows.push_back({name, std::to_string(k), std::to_string(nprobe),
                          nsm::format_double(acc), std::to_string(found.size()),
                          std::to_string(short_results)});
    }
  }
  nsm::write_csv(a.out, csv);
}

struct CorrelateArgs {
  std::string table, x, y, out;
  std::uint64_t seed = 0;
};

void run_correlate(const CorrelateArgs& a) {
  const auto table = nsm::read_csv(a.table);
  auto column = [&](const std::string& name) -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < table.header.size(); ++i)
      if (table.header[i] == name) return i;
    return std::nullopt;
  };
  const auto x_col = column(a.x);
  const auto y_col = column(a.y);
  if (!x_col) nsm::raise(nsm::errc::bad_params, "no column '" + a.x + "'");
  if (!y_col) nsm::raise(nsm::errc::bad_params, "no column '" + a.y + "'");
  nsm::lower_is_better(a.y);  // rejects unregistered measures up front

  const auto dataset_col = column("dataset");
  const auto k_col = column("k");
  const auto nprobe_col = column("nprobe");

  // Group rows by (dataset, k, nprobe) when those columns exist.
  std::map<std::tuple<std::string, std::string, std::string>,
           std::pair<std::vector<double>, std::vector<double>>>
      groups;
  for (const auto& row : table.rows) {
    const auto key = std::make_tuple(dataset_col ? row[*dataset_col] : "",
                                     k_col ? row[*k_col] : "",
                                     nprobe_col ? row[*nprobe_col] : "");
    groups[key].first.push_back(std::stod(row[*x_col]));
    groups[key].second.push_back(std::stod(row[*y_col]));
  }

  nsm::CsvTable out;
  out.header = {"dataset", "measure", "k", "nprobe", "rho", "p", "n", "p_method"};
  for (const auto& [key, xy] : groups) {
    nsm::SpearmanOptions opts;
    opts.mc_seed = a.seed;
    const auto result = nsm::spearman(xy.first, xy.second, opts);
    const double rho = nsm::negate_for_lower_better(a.y, result.rho);
    out.rows.push_back({std::get<0>(key), a.y, std::get<1>(key), std::get<2>(key),
                        nsm::format_double(rho), nsm::format_double(result.p_value),
                        std::to_string(xy.first.size()), result.p_method});
  }
  nsm::write_csv(a.out, out);
}

struct ProtocolArgs {
  std::string data, metric = "l2", queries, out_dir;
  std::string iters = "5,10,20,40", k_list = "5,10", nprobe_list = "1";
  std::uint32_t clusters = 0;
  double t = 0.0;
  std::size_t query_count = 1000;
  bool approx_nn = false;
  std::size_t dunn_cap = 200000;
  std::uint64_t seed = 0;
};

void run_protocol_cmd(const ProtocolArgs& a) {
  const auto data = load_dataset(a.data, a.metric);
  std::optional<nsm::FloatMatrix> queries;
  if (!a.queries.empty()) queries = nsm::read_fvecs(a.queries);

  nsm::ProtocolConfig cfg;
  cfg.seed = a.seed;
  if (a.clusters > 0) cfg.num_clusters = a.clusters;
  else if (a.t > 0.0) cfg.num_clusters = nsm::default_num_clusters(data.size(), a.t);
  cfg.iteration_grid = parse_uint_list(a.iters);
  cfg.k_values = parse_uint_list(a.k_list);
  cfg.nprobe_values = parse_uint_list(a.nprobe_list);
  cfg.fallback_queries = a.query_count;
  cfg.approximate_nn = a.approx_nn;
  cfg.dunn.max_points = a.dunn_cap;

  const auto result = nsm::run_protocol(data, queries ? &*queries : nullptr, cfg);

  fs::create_directories(a.out_dir);
  const fs::path dir(a.out_dir);
  const std::string name = dataset_name(a.data);

  nsm::write_ivecs(dir / "nn.ivecs", nsm::neighbor_ids_table(result.nn));

  nsm::CsvTable runs;
  runs.header = {"dataset", "algo", "iterations", "iterations_run", "k",
                 "nprobe",  "accuracy", "nsm", "dunn", "db", "db-weighted"};
  for (std::size_t r = 0; r < result.runs.size(); ++r) {
    const auto& run = result.runs[r];
    const std::string tag = run.algo + "_" + std::to_string(run.iterations);
    nsm::write_ivecs(dir / ("assign_" + tag + ".ivecs"),
                     nsm::assignment_table(result.clusterings[r].assignment));
    nsm::write_fvecs(dir / ("centroids_" + tag + ".fvecs"),
                     *result.clusterings[r].centroids);
    for (std::size_t ki = 0; ki < cfg.k_values.size(); ++ki)
      for (std::size_t ji = 0; ji < cfg.nprobe_values.size(); ++ji)
        runs.rows.push_back({name, run.algo, std::to_string(run.iterations),
                             std::to_string(run.iterations_run),
                             std::to_string(cfg.k_values[ki]),
                             std::to_string(cfg.nprobe_values[ji]),
                             nsm::format_double(run.accuracy[ki][ji]),
                             nsm::format_double(run.nsm),
                             nsm::format_double(run.dunn),
                             nsm::format_double(run.db),
                             nsm::format_double(run.db_weighted)});
  }
  nsm::write_csv(dir / "runs.csv", runs);

  nsm::CsvTable corr;
  corr.header = {"dataset", "measure", "k", "nprobe", "rho", "p", "n", "p_method"};
  for (const auto& row : result.correlations)
    corr.rows.push_back({name, row.measure, std::to_string(row.k),
                         std::to_string(row.nprobe), nsm::format_double(row.rho),
                         nsm::format_double(row.p_value), std::to_string(row.n),
                         row.p_method});
  nsm::write_csv(dir / "correlations.csv", corr);

  json meta = base_metadata(a.seed);
  meta["command"] = "protocol";
  meta["dataset"] = name;
  meta["data"] = a.data;
  meta["metric"] = a.metric;
  meta["num_clusters"] = result.num_clusters;
  meta["num_queries"] = result.num_queries;
  meta["queries"] = a.queries.empty() ? json("sampled-from-data") : json(a.queries);
  meta["iterations"] = cfg.iteration_grid;
  meta["k"] = cfg.k_values;
  meta["nprobe"] = cfg.nprobe_values;
  meta["nn_source"] = a.approx_nn ? "approximate" : "exact";
  meta["dunn_flavor"] = "single-linkage/complete-diameter";
  json per_run = json::array();
  for (const auto& run : result.runs)
    per_run.push_back({{"algo", run.algo},
                       {"iterations", run.iterations},
                       {"iterations_run", run.iterations_run},
                       {"dunn_subsampled", run.dunn_subsampled}});
  meta["runs"] = per_run;
  write_json(dir / "metadata.json", meta);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"neighborhood-stability toolkit for clustering-based ANN"};
  app.require_subcommand(1);
  std::size_t threads = 0;
  app.add_option("--threads", threads,
                 "worker threads (default: NSM_THREADS env or hardware)");

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic dataset");
  synth_cmd->add_option("--kind", synth.kind,
                        "gaussian_mixture | ball_cover | line | uniform")
      ->required();
  synth_cmd->add_option("--metric", synth.metric, "l2 | cos | ip");
  synth_cmd->add_option("--seed", synth.seed, "rng seed");
  synth_cmd->add_option("--out", synth.out, "output fvecs")->required();
  synth_cmd->add_option("--labels-out", synth.labels_out,
                        "labels ivecs (gaussian_mixture)");
  synth_cmd->add_option("--components", synth.components);
  synth_cmd->add_option("--per", synth.per, "points per component");
  synth_cmd->add_option("--dim", synth.dim);
  synth_cmd->add_option("--sigma", synth.sigma);
  synth_cmd->add_option("--sep", synth.sep);
  synth_cmd->add_option("--groups", synth.groups);
  synth_cmd->add_option("--group-size", synth.group_size);
  synth_cmd->add_option("--m", synth.count, "point count (uniform)");
  synth_cmd->add_option("--positions", synth.positions, "comma list (line)");

  KnnArgs knn;
  auto* knn_cmd = app.add_subcommand("knn", "exact or approximate neighbor tables");
  knn_cmd->add_option("--data", knn.data)->required();
  knn_cmd->add_option("--metric", knn.metric, "l2 | cos | ip");
  knn_cmd->add_option("--k", knn.k)->required();
  knn_cmd->add_option("--queries", knn.queries, "query fvecs (default: self mode)");
  knn_cmd->add_flag("--approx", knn.approx,
                    "approximate 1-NN (4*sqrt(m) shards, 10 probes)");
  knn_cmd->add_option("--clusters", knn.clusters, "shard count override for --approx");
  knn_cmd->add_option("--probes", knn.probes, "probe count for --approx");
  knn_cmd->add_option("--seed", knn.seed);
  knn_cmd->add_option("--out", knn.out, "output ivecs")->required();

  ClusterArgs cluster;
  auto* cluster_cmd = app.add_subcommand("cluster", "standard or spherical KMeans");
  cluster_cmd->add_option("--data", cluster.data)->required();
  cluster_cmd->add_option("--metric", cluster.metric);
  cluster_cmd->add_option("--algo", cluster.algo, "kmeans | spherical");
  cluster_cmd->add_option("--clusters", cluster.clusters, "explicit L");
  cluster_cmd->add_option("--t", cluster.t, "L = t * sqrt(m), t in {0.25, 0.5, 1}");
  cluster_cmd->add_option("--iters", cluster.iters)->required();
  cluster_cmd->add_option("--seed", cluster.seed);
  cluster_cmd->add_option("--init", cluster.init, "kmeans++ | random");
  cluster_cmd->add_option("--out", cluster.out, "assignment ivecs")->required();
  cluster_cmd->add_option("--centroids", cluster.centroids_out, "centroid fvecs");

  QualityArgs quality;
  auto* quality_cmd =
      app.add_subcommand("quality", "quality measures for one clustering");
  quality_cmd->add_option("--data", quality.data)->required();
  quality_cmd->add_option("--metric", quality.metric);
  quality_cmd->add_option("--assign", quality.assign)->required();
  quality_cmd->add_option("--centroids", quality.centroids);
  quality_cmd->add_option("--clusters", quality.clusters,
                          "L override (trailing empty clusters)");
  quality_cmd->add_option("--nn", quality.nn, "neighbor table ivecs (for nsm)");
  quality_cmd->add_option("--measures", quality.measures);
  quality_cmd->add_option("--dunn-cap", quality.dunn_cap);
  quality_cmd->add_option("--seed", quality.seed);
  quality_cmd->add_option("--out", quality.out, "report json")->required();

  PointNsmArgs pnsm;
  auto* pnsm_cmd = app.add_subcommand("point-nsm", "sampled point-NSM distribution");
  pnsm_cmd->add_option("--data", pnsm.data)->required();
  pnsm_cmd->add_option("--metric", pnsm.metric);
  pnsm_cmd->add_option("--nn", pnsm.nn, "neighbor table with k >= radius - 1")
      ->required();
  pnsm_cmd->add_option("--radius", pnsm.radius)->required();
  pnsm_cmd->add_option("--sample", pnsm.sample, "sample fraction");
  pnsm_cmd->add_option("--seed", pnsm.seed);
  pnsm_cmd->add_option("--stats", pnsm.stats, "mean,q0.1,...");
  pnsm_cmd->add_option("--out", pnsm.out, "distribution csv")->required();

  IvfEvalArgs ivf;
  auto* ivf_cmd = app.add_subcommand("ivf-eval", "IVF accuracy over a (k, nprobe) grid");
  ivf_cmd->add_option("--data", ivf.data)->required();
  ivf_cmd->add_option("--metric", ivf.metric);
  ivf_cmd->add_option("--queries", ivf.queries)->required();
  ivf_cmd->add_option("--gt", ivf.gt, "ground truth ivecs")->required();
  ivf_cmd->add_option("--assign", ivf.assign)->required();
  ivf_cmd->add_option("--centroids", ivf.centroids);
  ivf_cmd->add_option("--clusters", ivf.clusters);
  ivf_cmd->add_option("--k", ivf.k_list, "comma list");
  ivf_cmd->add_option("--nprobe", ivf.nprobe_list, "comma list or lo..hi");
  ivf_cmd->add_option("--out", ivf.out, "accuracy csv")->required();

  CorrelateArgs correlate;
  auto* corr_cmd =
      app.add_subcommand("correlate", "Spearman correlation from a runs table");
  corr_cmd->add_option("--table", correlate.table)->required();
  corr_cmd->add_option("--x", correlate.x, "x column (e.g. accuracy)")->required();
  corr_cmd->add_option("--y", correlate.y, "y measure column (sign-adjusted)")
      ->required();
  corr_cmd->add_option("--seed", correlate.seed, "Monte-Carlo seed (n > 8)");
  corr_cmd->add_option("--out", correlate.out, "correlation csv")->required();

  ProtocolArgs protocol;
  auto* protocol_cmd = app.add_subcommand(
      "protocol", "full pipeline: ensemble, measures, accuracy, correlations");
  protocol_cmd->add_option("--data", protocol.data)->required();
  protocol_cmd->add_option("--metric", protocol.metric);
  protocol_cmd->add_option("--queries", protocol.queries,
                           "query fvecs (default: sampled from the data)");
  protocol_cmd->add_option("--query-count", protocol.query_count);
  protocol_cmd->add_option("--clusters", protocol.clusters, "explicit L");
  protocol_cmd->add_option("--t", protocol.t, "L = t * sqrt(m)");
  protocol_cmd->add_option("--iters", protocol.iters);
  protocol_cmd->add_option("--k", protocol.k_list);
  protocol_cmd->add_option("--nprobe", protocol.nprobe_list);
  protocol_cmd->add_flag("--approx-nn", protocol.approx_nn,
                         "NSM from the approximate table");
  protocol_cmd->add_option("--dunn-cap", protocol.dunn_cap);
  protocol_cmd->add_option("--seed", protocol.seed);
  protocol_cmd->add_option("--out", protocol.out_dir, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (threads > 0) nsm::set_thread_override(threads);
    if (*synth_cmd) run_synth(synth);
    else if (*knn_cmd) run_knn(knn);
    else if (*cluster_cmd) run_cluster(cluster);
    else if (*quality_cmd) run_quality(quality);
    else if (*pnsm_cmd) run_point_nsm(pnsm);
    else if (*ivf_cmd) run_ivf_eval(ivf);
    else if (*corr_cmd) run_correlate(correlate);
    else if (*protocol_cmd) run_protocol_cmd(protocol);
  } catch (const nsm::Error& e) {
    const int code = nsm::is_format_error(e.code()) ? kExitFormat : kExitDegenerate;
    std::cerr << "error code=" << e.code_name() << " exit=" << code << ": "
              << e.what() << "\n";
    return code;
  } catch (const std::exception& e) {
    std::cerr << "error code=internal exit=1: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
