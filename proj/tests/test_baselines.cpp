#include <doctest.h>

#include <cmath>
#include <vector>

#include "nsm/baselines.hpp"
#include "test_support.hpp"

using namespace nsm;
using namespace testsupport;

namespace {

// Random rotation via Gram-Schmidt on a seeded Gaussian matrix.
FloatMatrix apply_rigid_motion(const FloatMatrix& points, std::uint64_t seed) {
  const std::size_t d = points.cols;
  Rng rng(seed);
  std::vector<std::vector<double>> basis(d, std::vector<double>(d));
  for (auto& row : basis)
    for (auto& v : row) v = rng.normal();
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      double dot = 0.0;
      for (std::size_t t = 0; t < d; ++t) dot += basis[i][t] * basis[j][t];
      for (std::size_t t = 0; t < d; ++t) basis[i][t] -= dot * basis[j][t];
    }
    double norm = 0.0;
    for (double v : basis[i]) norm += v * v;
    norm = std::sqrt(norm);
    for (auto& v : basis[i]) v /= norm;
  }
  std::vector<double> shift(d);
  for (auto& v : shift) v = 3.0 * rng.normal();

  FloatMatrix out(points.rows, d);
  for (std::size_t r = 0; r < points.rows; ++r) {
    for (std::size_t i = 0; i < d; ++i) {
      double acc = shift[i];
      for (std::size_t t = 0; t < d; ++t) acc += basis[i][t] * points.row(r)[t];
      out.row_data(r)[i] = static_cast<float>(acc);
    }
  }
  return out;
}

}  // namespace

TEST_SUITE_BEGIN("baselines");

TEST_CASE("Dunn on the line fixture") {
  const auto data = x_line();
  auto paired = Clustering::from_assignment({0, 0, 1, 1}, 2);
  CHECK(dunn_index(data, paired).value == doctest::Approx(9.0));

  auto crossed = Clustering::from_assignment({0, 1, 0, 1}, 2);
  CHECK(dunn_index(data, crossed).value == doctest::Approx(0.1));
}

TEST_CASE("Dunn with coincident points across clusters") {
  const auto points =
      make_matrix({{0.0f}, {1.0f}, {0.0f}, {1.0f}});  // duplicated pair
  const Dataset data(points, Metric::euclidean);
  const auto c = Clustering::from_assignment({0, 0, 1, 1}, 2);
  CHECK(dunn_index(data, c).value == doctest::Approx(0.0));
}

TEST_CASE("Dunn degenerate cases") {
  const auto data = x_line();
  auto singletons = Clustering::from_assignment({0, 1, 2, 3}, 4);
  try {
    dunn_index(data, singletons);
    FAIL("expected degenerate_diameter_zero");
  } catch (const Error& e) {
    CHECK(e.code() == errc::degenerate_diameter_zero);
  }
  auto single = Clustering::from_assignment({0, 0, 0, 0}, 1);
  try {
    dunn_index(data, single);
    FAIL("expected fewer_than_two_clusters");
  } catch (const Error& e) {
    CHECK(e.code() == errc::fewer_than_two_clusters);
  }
}

TEST_CASE("Dunn subsampling beyond the cap") {
  const Dataset data(random_gaussian(300, 2, 8), Metric::euclidean);
  std::vector<std::uint32_t> assignment(300);
  for (std::size_t i = 0; i < 300; ++i)
    assignment[i] = data.point(i)[0] > 0 ? 1 : 0;
  const auto c = Clustering::from_assignment(assignment, 2);
  DunnOptions opts;
  opts.max_points = 100;
  opts.seed = 3;
  const auto result = dunn_index(data, c, opts);
  CHECK(result.subsampled);
  CHECK(result.points_used == 100);
  CHECK(result.value >= 0.0);
}

TEST_CASE("DB hand example: equal pair clusters") {
  // {0,2} and {10,12}: mu=(1,11), sigma=(1,1) -> 2/10 everywhere.
  const auto points = make_matrix({{0.0f}, {2.0f}, {10.0f}, {12.0f}});
  const Dataset data(points, Metric::euclidean);
  const auto c = Clustering::from_assignment({0, 0, 1, 1}, 2);
  CHECK(db_index(data, c, DbWeighting::uniform) == doctest::Approx(0.2));
  CHECK(db_index(data, c, DbWeighting::by_size) == doctest::Approx(0.2));
}

TEST_CASE("DB hand example: unequal sizes with equal ratios") {
  // {0,2} and {10,12,14}: both ratios are 7/33, so weighting is inert.
  const auto points = make_matrix({{0.0f}, {2.0f}, {10.0f}, {12.0f}, {14.0f}});
  const Dataset data(points, Metric::euclidean);
  const auto c = Clustering::from_assignment({0, 0, 1, 1, 1}, 2);
  CHECK(db_index(data, c, DbWeighting::uniform) == doctest::Approx(7.0 / 33.0));
  CHECK(db_index(data, c, DbWeighting::by_size) == doctest::Approx(7.0 / 33.0));
}

TEST_CASE("DB with a singleton cluster stays finite") {
  const auto points = make_matrix({{0.0f}, {2.0f}, {5.0f}});
  const Dataset data(points, Metric::euclidean);
  const auto c = Clustering::from_assignment({0, 0, 1}, 2);
  // sigma = (1, 0), centroid distance 4 -> DB = 1/4.
  CHECK(db_index(data, c, DbWeighting::uniform) == doctest::Approx(0.25));
}

TEST_CASE("DB errors") {
  const auto points = make_matrix({{0.0f}, {0.0f}, {1.0f}, {-1.0f}});
  const Dataset data(points, Metric::euclidean);
  // Means coincide at 0.
  const auto c = Clustering::from_assignment({0, 0, 1, 1}, 2);
  try {
    db_index(data, c, DbWeighting::uniform);
    FAIL("expected coincident_centroids");
  } catch (const Error& e) {
    CHECK(e.code() == errc::coincident_centroids);
  }
  const auto single = Clustering::from_assignment({0, 0, 0, 0}, 1);
  CHECK_THROWS_AS(db_index(data, single, DbWeighting::uniform), Error);
}

TEST_CASE("uniform equals by_size on equal-size clusters") {
  const Dataset data(random_gaussian(60, 3, 5), Metric::euclidean);
  std::vector<std::uint32_t> assignment(60);
  for (std::size_t i = 0; i < 60; ++i) assignment[i] = i % 4;
  const auto c = Clustering::from_assignment(assignment, 4);
  CHECK(db_index(data, c, DbWeighting::uniform) ==
        db_index(data, c, DbWeighting::by_size));
}

TEST_CASE("rigid motions leave Dunn and DB unchanged") {
  const auto base = random_gaussian(50, 4, 12);
  const Dataset data(base, Metric::euclidean);
  std::vector<std::uint32_t> assignment(50);
  for (std::size_t i = 0; i < 50; ++i) assignment[i] = i % 3;
  const auto c = Clustering::from_assignment(assignment, 3);
  const double dunn0 = dunn_index(data, c).value;
  const double db0 = db_index(data, c, DbWeighting::by_size);
  // float32 storage rounds each rotated coordinate (~1e-7 relative), so
  // invariance holds to that precision rather than exactly.
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Dataset moved(apply_rigid_motion(base, seed), Metric::euclidean);
    CHECK(dunn_index(moved, c).value == doctest::Approx(dunn0).epsilon(1e-6));
    CHECK(db_index(moved, c, DbWeighting::by_size) ==
          doctest::Approx(db0).epsilon(1e-6));
  }
}

TEST_CASE("pulling clusters apart improves both baselines") {
  double previous_db = 1e300, previous_dunn = -1.0;
  for (const double stretch : {1.0, 2.0, 4.0, 8.0}) {
    FloatMatrix points(8, 1);
    const float left[4] = {0.0f, 0.5f, 1.0f, 1.5f};
    for (int i = 0; i < 4; ++i) points.values[i] = left[i];
    for (int i = 0; i < 4; ++i)
      points.values[4 + i] = left[i] + static_cast<float>(10.0 * stretch);
    const Dataset data(points, Metric::euclidean);
    const auto c = Clustering::from_assignment({0, 0, 0, 0, 1, 1, 1, 1}, 2);
    const double db = db_index(data, c, DbWeighting::uniform);
    const double dunn = dunn_index(data, c).value;
    CHECK(db < previous_db);
    CHECK(dunn > previous_dunn);
    previous_db = db;
    previous_dunn = dunn;
  }
}

TEST_SUITE_END();
