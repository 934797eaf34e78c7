#include <doctest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "nsm/parallel.hpp"
#include "nsm/stats.hpp"
#include "test_support.hpp"

using namespace nsm;

namespace {

// d^2 formula for untied data: 1 - 6 sum d_i^2 / (n (n^2 - 1)).
double spearman_d2(const std::vector<double>& x, const std::vector<double>& y) {
  const auto rx = fractional_ranks(x);
  const auto ry = fractional_ranks(y);
  double d2 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
    d2 += (rx[i] - ry[i]) * (rx[i] - ry[i]);
  const double n = static_cast<double>(x.size());
  return 1.0 - 6.0 * d2 / (n * (n * n - 1.0));
}

// Tie-corrected closed form: (Sx + Sy - sum d^2) / (2 sqrt(Sx Sy)) with
// S = (n^3 - n)/12 - sum (t^3 - t)/12 over tie groups.
double spearman_tied(const std::vector<double>& x, const std::vector<double>& y) {
  auto tie_term = [](const std::vector<double>& v) {
    std::vector<double> sorted = v;
    std::sort(sorted.begin(), sorted.end());
    double total = 0.0;
    std::size_t i = 0;
    while (i < sorted.size()) {
      std::size_t j = i;
      while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) ++j;
      const double t = static_cast<double>(j - i + 1);
      total += (t * t * t - t) / 12.0;
      i = j + 1;
    }
    return total;
  };
  const double n = static_cast<double>(x.size());
  const double sx = (n * n * n - n) / 12.0 - tie_term(x);
  const double sy = (n * n * n - n) / 12.0 - tie_term(y);
  const auto rx = fractional_ranks(x);
  const auto ry = fractional_ranks(y);
  double d2 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
    d2 += (rx[i] - ry[i]) * (rx[i] - ry[i]);
  return (sx + sy - d2) / (2.0 * std::sqrt(sx * sy));
}

}  // namespace

TEST_SUITE_BEGIN("stats");

TEST_CASE("spearman examples") {
  CHECK(spearman(std::vector<double>{1, 2, 3, 4},
                 std::vector<double>{2, 4, 6, 8})
            .rho == doctest::Approx(1.0));
  CHECK(spearman(std::vector<double>{1, 2, 3, 4},
                 std::vector<double>{1, 3, 2, 4})
            .rho == doctest::Approx(0.8));
  CHECK(spearman(std::vector<double>{1, 2, 3},
                 std::vector<double>{3, 2, 1})
            .rho == doctest::Approx(-1.0));
}

TEST_CASE("spearman errors and degenerate inputs") {
  CHECK_THROWS_AS(
      spearman(std::vector<double>{1, 2}, std::vector<double>{1, 2}), Error);
  CHECK_THROWS_AS(
      spearman(std::vector<double>{1, 2, 3}, std::vector<double>{1, 2}), Error);
  const auto result =
      spearman(std::vector<double>{1, 1, 1}, std::vector<double>{1, 2, 3});
  CHECK(std::isnan(result.rho));
}

TEST_CASE("spearman is invariant under strictly increasing transforms") {
  Rng rng(41);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> x(10), y(10);
    for (auto& v : x) v = rng.normal();
    for (auto& v : y) v = rng.normal();
    const double rho = spearman(x, y).rho;
    std::vector<double> tx(10), ty(10);
    for (std::size_t i = 0; i < 10; ++i) {
      tx[i] = std::exp(x[i]);
      ty[i] = 2.0 * y[i] + 7.0;
    }
    CHECK(spearman(tx, ty).rho == doctest::Approx(rho).epsilon(1e-12));
  }
}

TEST_CASE("spearman matches the closed forms") {
  Rng rng(43);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 4 + rng.uniform_index(12);
    std::vector<double> x(n), y(n);
    for (auto& v : x) v = rng.normal();
    for (auto& v : y) v = rng.normal();
    CHECK(spearman(x, y).rho == doctest::Approx(spearman_d2(x, y)).epsilon(1e-12));

    // Inject ties and compare against the tie-corrected form.
    std::vector<double> xt = x, yt = y;
    xt[0] = xt[n / 2];
    yt[1] = yt[n - 1];
    CHECK(spearman(xt, yt).rho ==
          doctest::Approx(spearman_tied(xt, yt)).epsilon(1e-12));
  }
}

TEST_CASE("exact permutation p-value agrees with Monte-Carlo") {
  Rng rng(47);
  std::vector<double> x(8), y(8);
  for (auto& v : x) v = rng.normal();
  for (auto& v : y) v = rng.normal();

  SpearmanOptions exact_opts;
  const auto exact = spearman(x, y, exact_opts);
  CHECK(exact.p_method == std::string("exact-permutation"));

  SpearmanOptions mc_opts;
  mc_opts.exact_limit = 3;  // force the Monte-Carlo path
  mc_opts.mc_draws = 100000;
  mc_opts.mc_seed = 5;
  const auto mc = spearman(x, y, mc_opts);
  CHECK(mc.p_method == std::string("monte-carlo"));

  const double se =
      std::sqrt(exact.p_value * (1.0 - exact.p_value) / mc_opts.mc_draws);
  CHECK(std::abs(mc.p_value - exact.p_value) <= 3.0 * se + 1e-9);
}

TEST_CASE("Monte-Carlo p-values are worker-count independent") {
  Rng rng(53);
  std::vector<double> x(12), y(12);
  for (auto& v : x) v = rng.normal();
  for (auto& v : y) v = rng.normal();
  SpearmanOptions opts;
  opts.mc_draws = 20000;
  opts.mc_seed = 9;
  set_thread_override(1);
  const auto serial = spearman(x, y, opts);
  set_thread_override(5);
  const auto threaded = spearman(x, y, opts);
  set_thread_override(0);
  CHECK(serial.p_value == threaded.p_value);
  CHECK(serial.rho == threaded.rho);
}

TEST_CASE("perfectly monotone pairs get the smallest p") {
  std::vector<double> x{1, 2, 3, 4, 5, 6, 7, 8};
  const auto up = spearman(x, x);
  CHECK(up.rho == doctest::Approx(1.0));
  // Both orientations of a perfect correlation are equally extreme.
  CHECK(up.p_value == doctest::Approx(2.0 / 40320.0));
}

TEST_CASE("lower-is-better negation") {
  CHECK(negate_for_lower_better("db", -0.7) == doctest::Approx(0.7));
  CHECK(negate_for_lower_better("db-weighted", -0.4) == doctest::Approx(0.4));
  CHECK(negate_for_lower_better("nsm", 0.9) == doctest::Approx(0.9));
  CHECK(negate_for_lower_better("dunn", 0.3) == doctest::Approx(0.3));
  CHECK_THROWS_AS(negate_for_lower_better("mystery", 0.5), Error);
}

TEST_CASE("mutual information") {
  const std::vector<std::int32_t> balanced{0, 0, 1, 1};
  CHECK(mutual_information(balanced, balanced) ==
        doctest::Approx(std::log(2.0)));
  CHECK(mutual_information(balanced, std::vector<std::int32_t>{0, 0, 0, 0}) ==
        doctest::Approx(0.0));
  CHECK(mutual_information(balanced, std::vector<std::int32_t>{0, 1, 0, 1}) ==
        doctest::Approx(0.0));
  // Relabeling clusters changes nothing.
  CHECK(mutual_information(balanced, std::vector<std::int32_t>{7, 7, 3, 3}) ==
        doctest::Approx(std::log(2.0)));
  CHECK_THROWS_AS(
      mutual_information(balanced, std::vector<std::int32_t>{0, 1}), Error);
}

TEST_CASE("homogeneity") {
  const std::vector<std::int32_t> labels{0, 0, 1, 1};
  CHECK(homogeneity(labels, std::vector<std::int32_t>{0, 0, 1, 1}) ==
        doctest::Approx(1.0));
  CHECK(homogeneity(labels, std::vector<std::int32_t>{2, 2, 5, 5}) ==
        doctest::Approx(1.0));
  CHECK(homogeneity(labels, std::vector<std::int32_t>{0, 0, 0, 0}) ==
        doctest::Approx(0.0));
  // Hand-evaluated entropy expression for clusters {0,0,0},{1}.
  const double h13 = std::log(3.0) - (2.0 / 3.0) * std::log(2.0);
  const double expect = 1.0 - (0.75 * h13) / std::log(2.0);
  CHECK(homogeneity(labels, std::vector<std::int32_t>{0, 0, 0, 1}) ==
        doctest::Approx(expect));
  CHECK(expect == doctest::Approx(0.3113).epsilon(1e-3));
  // Single class: defined as 1 regardless of the clustering.
  CHECK(homogeneity(std::vector<std::int32_t>{3, 3, 3},
                    std::vector<std::int32_t>{0, 1, 2}) == doctest::Approx(1.0));
}

TEST_CASE("summaries") {
  const std::vector<double> pair{0.0, 1.0};
  const std::vector<double> levels{0.5};
  CHECK(summarize(pair, levels).mean == doctest::Approx(0.5));

  std::vector<double> ten(10);
  for (int i = 0; i < 10; ++i) ten[i] = 0.1 * i;
  CHECK(lower_quantile(ten, 0.1) == doctest::Approx(0.0));
  CHECK(lower_quantile(ten, 1.0) == doctest::Approx(0.9));

  const std::vector<double> constant{2.5, 2.5, 2.5};
  const auto s = summarize(constant, levels);
  CHECK(s.mean == doctest::Approx(2.5));
  CHECK(s.quantiles.at(0.5) == doctest::Approx(2.5));

  CHECK_THROWS_AS(summarize(std::vector<double>{}, levels), Error);
}

TEST_SUITE_END();
