#include "nsm/neighbors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nsm/ivf.hpp"
#include "nsm/kmeans.hpp"
#include "nsm/parallel.hpp"

namespace nsm {

namespace {

struct Candidate {
  double value;
  std::uint32_t id;
};

// (value, id) lexicographic; true when a ranks strictly worse than b.
inline bool worse(const Candidate& a, const Candidate& b) {
  if (a.value != b.value) return a.value > b.value;
  return a.id > b.id;
}

// Bounded best-k accumulator; the heap keeps the current worst on top.
class TopK {
 public:
  explicit TopK(std::size_t k) : k_(k) { heap_.reserve(k); }

  double bound() const {
    return heap_.size() < k_ ? std::numeric_limits<double>::infinity()
                             : heap_.front().value;
  }

  void offer(double value, std::uint32_t id) {
    const Candidate c{value, id};
    if (heap_.size() < k_) {
      heap_.push_back(c);
      std::push_heap(heap_.begin(), heap_.end(),
                     [](const Candidate& a, const Candidate& b) { return worse(b, a); });
      return;
    }
    if (!worse(c, heap_.front())) {
      std::pop_heap(heap_.begin(), heap_.end(),
                    [](const Candidate& a, const Candidate& b) { return worse(b, a); });
      heap_.back() = c;
      std::push_heap(heap_.begin(), heap_.end(),
                     [](const Candidate& a, const Candidate& b) { return worse(b, a); });
    }
  }

  // Ascending (value, id).
  std::vector<Candidate> take_sorted() {
    std::sort(heap_.begin(), heap_.end(),
              [](const Candidate& a, const Candidate& b) { return worse(b, a); });
    return std::move(heap_);
  }

  std::size_t count() const { return heap_.size(); }

 private:
  std::vector<Candidate> heap_;
  std::size_t k_;
};

// Squared L2 with the same left-to-right accumulation order as
// comparator_value; abandons once the partial sum exceeds `bound`
// (partial sums are monotone, so an abandoned pair can never rank).
inline double squared_l2_bounded(const float* a, const float* b, std::size_t d,
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

inline double dot_f32(const float* a, const float* b, std::size_t d) {
  double sum = 0.0;
  for (std::size_t i = 0; i < d; ++i)
    sum += static_cast<double>(a[i]) * static_cast<double>(b[i]);
  return sum;
}

std::vector<double> l2_norms_checked(const FloatMatrix& points,
                                     const char* what) {
  std::vector<double> norms(points.rows);
  for (std::size_t i = 0; i < points.rows; ++i) {
    const double sq = dot_f32(points.row_data(i), points.row_data(i), points.cols);
    if (sq == 0.0)
      raise(errc::zero_vector, std::string(what) + " " + std::to_string(i) +
                                   " has zero norm under cosine");
    norms[i] = std::sqrt(sq);
  }
  return norms;
}

void check_k(std::size_t k, std::size_t limit, const char* mode) {
  if (k < 1) raise(errc::bad_params, "k must be at least 1");
  if (k > limit)
    raise(errc::k_too_large, std::string("k=") + std::to_string(k) + " exceeds " +
                                 std::to_string(limit) + " in " + mode + " mode");
  if (k > kMaxNeighborsPerTable)
    raise(errc::k_too_large, "k exceeds the per-table cap of " +
                                 std::to_string(kMaxNeighborsPerTable));
}

// Shared row kernel for both self and query mode. `self` is the id to
// exclude, or >= m for none.
void knn_row(const Dataset& data, std::span<const float> q, double q_norm,
             const std::vector<double>& data_norms, std::size_t self,
             std::size_t k, std::uint32_t* out_ids, double* out_values) {
  const std::size_t m = data.size();
  const std::size_t d = data.dim();
  const Metric metric = data.metric();
  const float* qp = q.data();
  TopK top(k);
  switch (metric) {
    case Metric::euclidean:
      for (std::size_t v = 0; v < m; ++v) {
        if (v == self) continue;
        const double value =
            squared_l2_bounded(qp, data.points().row_data(v), d, top.bound());
        if (value <= top.bound()) top.offer(value, static_cast<std::uint32_t>(v));
      }
      break;
    case Metric::cosine:
      for (std::size_t v = 0; v < m; ++v) {
        if (v == self) continue;
        const double dot = dot_f32(qp, data.points().row_data(v), d);
        top.offer(1.0 - dot / (q_norm * data_norms[v]),
                  static_cast<std::uint32_t>(v));
      }
      break;
    case Metric::inner_product:
      for (std::size_t v = 0; v < m; ++v) {
        if (v == self) continue;
        top.offer(-dot_f32(qp, data.points().row_data(v), d),
                  static_cast<std::uint32_t>(v));
      }
      break;
  }
  auto ranked = top.take_sorted();
  for (std::size_t j = 0; j < k; ++j) {
    out_ids[j] = ranked[j].id;
    out_values[j] = ranked[j].value;
  }
}

NeighborTable knn_impl(const Dataset& data, const FloatMatrix& queries,
                       bool self_mode, std::size_t k) {
  const std::size_t m = data.size();
  check_k(k, self_mode ? m - 1 : m, self_mode ? "self" : "query");
  if (!self_mode && queries.cols != data.dim())
    raise(errc::dim_mismatch, "query dim " + std::to_string(queries.cols) +
                                  " vs dataset dim " + std::to_string(data.dim()));

  std::vector<double> data_norms;
  std::vector<double> query_norms;
  if (data.metric() == Metric::cosine) {
    data_norms = l2_norms_checked(data.points(), "point");
    query_norms = self_mode ? data_norms : l2_norms_checked(queries, "query");
  }

  const std::size_t rows = self_mode ? m : queries.rows;
  NeighborTable table;
  table.num_points = rows;
  table.k = k;
  table.ids.resize(rows * k);
  table.values.resize(rows * k);
  table.source = NeighborSource::exact;

  const FloatMatrix& q_matrix = self_mode ? data.points() : queries;
  parallel_for_chunks(rows, [&](std::size_t begin, std::size_t end) {
    for (std::size_t u = begin; u < end; ++u) {
      const double q_norm =
          data.metric() == Metric::cosine ? query_norms[u] : 0.0;
      knn_row(data, q_matrix.row(u), q_norm, data_norms,
              self_mode ? u : m, k, table.ids.data() + u * k,
              table.values.data() + u * k);
    }
  });
  return table;
}

}  // namespace

DistanceMatrixOracle::DistanceMatrixOracle(std::size_t size,
                                           std::vector<double> entries)
    : n(size), values(std::move(entries)) {
  if (values.size() != n * n)
    raise(errc::bad_params, "distance matrix must be square");
  for (double v : values)
    if (!std::isfinite(v))
      raise(errc::bad_params, "distance matrix entry is not finite");
}

NeighborTable exact_knn(const Dataset& data, std::size_t k) {
  return knn_impl(data, data.points(), /*self_mode=*/true, k);
}

NeighborTable exact_knn(const Dataset& data, const FloatMatrix& queries,
                        std::size_t k) {
  if (queries.rows == 0) raise(errc::bad_params, "empty query set");
  return knn_impl(data, queries, /*self_mode=*/false, k);
}

NeighborTable knn_from_matrix(const DistanceMatrixOracle& oracle, std::size_t k) {
  const std::size_t m = oracle.n;
  if (m < 2) raise(errc::bad_params, "oracle needs at least 2 points");
  check_k(k, m - 1, "matrix");

  NeighborTable table;
  table.num_points = m;
  table.k = k;
  table.ids.resize(m * k);
  table.values.resize(m * k);
  table.source = NeighborSource::exact;

  parallel_for_chunks(m, [&](std::size_t begin, std::size_t end) {
    for (std::size_t u = begin; u < end; ++u) {
      TopK top(k);
      for (std::size_t v = 0; v < m; ++v) {
        if (v == u) continue;
        top.offer(oracle.at(u, v), static_cast<std::uint32_t>(v));
      }
      auto ranked = top.take_sorted();
      for (std::size_t j = 0; j < k; ++j) {
        table.ids[u * k + j] = ranked[j].id;
        table.values[u * k + j] = ranked[j].value;
      }
    }
  });
  return table;
}

ApproxNnResult approximate_1nn(const Dataset& data, std::size_t clusters,
                               std::size_t probes, std::uint64_t seed) {
  const std::size_t m = data.size();
  if (clusters == 0)
    clusters = static_cast<std::size_t>(
        std::ceil(4.0 * std::sqrt(static_cast<double>(m))));
  clusters = std::min(clusters, m);
  if (probes < 1) raise(errc::bad_params, "probes must be at least 1");
  if (probes > clusters)
    raise(errc::bad_params, "dataset too small: " + std::to_string(clusters) +
                                " clusters < " + std::to_string(probes) +
                                " probes");

  KMeansConfig cfg;
  cfg.variant = data.metric() == Metric::euclidean ? KMeansVariant::standard
                                                   : KMeansVariant::spherical;
  cfg.num_clusters = static_cast<std::uint32_t>(clusters);
  cfg.iterations = 10;
  cfg.seed = seed;
  cfg.init = KMeansInit::kmeans_pp;
  const KMeansResult km = kmeans(data, cfg);
  const IvfIndex index = IvfIndex::build(data, km.clustering);

  NeighborTable table;
  table.num_points = m;
  table.k = 1;
  table.ids.resize(m);
  table.values.resize(m);
  table.source = NeighborSource::approximate;

  std::vector<std::uint8_t> expanded(m, 0);
  parallel_for_chunks(m, [&](std::size_t begin, std::size_t end) {
    for (std::size_t u = begin; u < end; ++u) {
      const auto q = data.point(u);
      const auto routed = index.route(q, probes);
      bool found = false;
      Candidate best{std::numeric_limits<double>::infinity(), 0};
      for (std::uint32_t shard : routed) {
        for (std::uint32_t v : index.postings()[shard]) {
          if (v == u) continue;
          const Candidate c{comparator_value(data.metric(), q, data.point(v)), v};
          if (!found || worse(best, c)) best = c;
          found = true;
        }
      }
      if (!found) {
        // Every probed shard held only the point itself; fall back to a
        // full scan so the row still has a valid neighbor.
        expanded[u] = 1;
        for (std::size_t v = 0; v < m; ++v) {
          if (v == u) continue;
          const Candidate c{comparator_value(data.metric(), q, data.point(v)),
                            static_cast<std::uint32_t>(v)};
          if (!found || worse(best, c)) best = c;
          found = true;
        }
      }
      table.ids[u] = best.id;
      table.values[u] = best.value;
    }
  });

  ApproxNnResult result;
  result.table = std::move(table);
  for (std::size_t u = 0; u < m; ++u)
    if (expanded[u]) result.expanded_rows.push_back(static_cast<std::uint32_t>(u));
  return result;
}

}  // namespace nsm
