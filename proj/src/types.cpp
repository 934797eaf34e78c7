#include "nsm/types.hpp"

#include <cmath>

namespace nsm {

Metric parse_metric(std::string_view name) {
  if (name == "l2" || name == "euclidean") return Metric::euclidean;
  if (name == "cos" || name == "cosine") return Metric::cosine;
  if (name == "ip" || name == "inner_product") return Metric::inner_product;
  raise(errc::bad_params, "unknown metric '" + std::string(name) +
                              "' (expected l2, cos or ip)");
}

const char* metric_name(Metric metric) noexcept {
  switch (metric) {
    case Metric::euclidean: return "l2";
    case Metric::cosine: return "cos";
    case Metric::inner_product: return "ip";
  }
  return "?";
}

const char* neighbor_source_name(NeighborSource source) noexcept {
  switch (source) {
    case NeighborSource::exact: return "exact";
    case NeighborSource::approximate: return "approximate";
    case NeighborSource::imported: return "imported";
  }
  return "?";
}

Dataset::Dataset(FloatMatrix points, Metric metric)
    : points_(std::move(points)), metric_(metric) {
  if (points_.rows < 2)
    raise(errc::invalid_dataset, "dataset needs at least 2 points, got " +
                                     std::to_string(points_.rows));
  if (points_.cols < 1)
    raise(errc::invalid_dataset, "dataset needs at least 1 dimension");
  if (points_.values.size() != points_.rows * points_.cols)
    raise(errc::invalid_dataset, "matrix storage does not match its shape");
  for (float v : points_.values) {
    if (!std::isfinite(v))
      raise(errc::invalid_dataset, "dataset contains a non-finite coordinate");
  }
}

double comparator_value(Metric metric, std::span<const float> u,
                        std::span<const float> v) {
  if (u.size() != v.size())
    raise(errc::dim_mismatch, "operand dims " + std::to_string(u.size()) +
                                  " vs " + std::to_string(v.size()));
  const std::size_t d = u.size();
  switch (metric) {
    case Metric::euclidean: {
      double sum = 0.0;
      for (std::size_t i = 0; i < d; ++i) {
        const double diff = static_cast<double>(u[i]) - static_cast<double>(v[i]);
        sum += diff * diff;
      }
      return sum;
    }
    case Metric::cosine: {
      double dot = 0.0, nu = 0.0, nv = 0.0;
      for (std::size_t i = 0; i < d; ++i) {
        const double a = u[i], b = v[i];
        dot += a * b;
        nu += a * a;
        nv += b * b;
      }
      if (nu == 0.0 || nv == 0.0)
        raise(errc::zero_vector, "cosine comparator on a zero-norm vector");
      return 1.0 - dot / (std::sqrt(nu) * std::sqrt(nv));
    }
    case Metric::inner_product: {
      double dot = 0.0;
      for (std::size_t i = 0; i < d; ++i)
        dot += static_cast<double>(u[i]) * static_cast<double>(v[i]);
      return -dot;
    }
  }
  raise(errc::bad_params, "unknown metric");
}

Clustering Clustering::from_assignment(std::vector<std::uint32_t> assignment,
                                       std::uint32_t num_clusters) {
  if (num_clusters == 0)
    raise(errc::bad_params, "clustering needs at least one cluster");
  Clustering c;
  c.assignment = std::move(assignment);
  c.num_clusters = num_clusters;
  std::vector<std::size_t> sizes(num_clusters, 0);
  for (std::uint32_t id : c.assignment) {
    if (id >= num_clusters)
      raise(errc::bad_params,
            "cluster id " + std::to_string(id) + " out of range (L=" +
                std::to_string(num_clusters) + ")");
    ++sizes[id];
  }
  c.weights.resize(num_clusters);
  for (std::uint32_t i = 0; i < num_clusters; ++i)
    c.weights[i] = static_cast<double>(sizes[i]);
  return c;
}

std::vector<std::size_t> cluster_sizes(const Clustering& c) {
  std::vector<std::size_t> sizes(c.num_clusters, 0);
  for (std::uint32_t id : c.assignment) ++sizes[id];
  return sizes;
}

std::vector<std::vector<std::uint32_t>> cluster_members(const Clustering& c) {
  std::vector<std::vector<std::uint32_t>> members(c.num_clusters);
  const auto sizes = cluster_sizes(c);
  for (std::uint32_t i = 0; i < c.num_clusters; ++i) members[i].reserve(sizes[i]);
  for (std::uint32_t u = 0; u < c.assignment.size(); ++u)
    members[c.assignment[u]].push_back(u);
  return members;
}

}  // namespace nsm
