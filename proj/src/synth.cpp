#include "nsm/synth.hpp"

#include <cmath>

#include "nsm/rng.hpp"

namespace nsm {

LabeledDataset synth_gaussian_mixture(const GaussianMixtureParams& params,
                                      std::uint64_t seed, Metric metric) {
  if (params.components < 1 || params.per_component < 1 || params.dim < 1)
    raise(errc::bad_params, "gaussian mixture counts must be >= 1");
  if (!(params.sigma >= 0.0) || !(params.separation >= 0.0))
    raise(errc::bad_params, "sigma and separation must be >= 0");
  const std::size_t m =
      static_cast<std::size_t>(params.components) * params.per_component;
  if (m < 2) raise(errc::bad_params, "mixture must produce at least 2 points");

  Rng rng(mix_seed(seed, 0x676d6978ULL));
  FloatMatrix centers(params.components, params.dim);
  for (auto& v : centers.values)
    v = static_cast<float>(params.separation * rng.normal());

  FloatMatrix points(m, params.dim);
  std::vector<std::int32_t> labels(m);
  std::size_t row = 0;
  for (std::uint32_t c = 0; c < params.components; ++c) {
    for (std::uint32_t i = 0; i < params.per_component; ++i, ++row) {
      float* out = points.row_data(row);
      const float* center = centers.row_data(c);
      for (std::uint32_t t = 0; t < params.dim; ++t)
        out[t] = center[t] + static_cast<float>(params.sigma * rng.normal());
      labels[row] = static_cast<std::int32_t>(c);
    }
  }
  return {Dataset(std::move(points), metric), std::move(labels)};
}

Dataset synth_ball_cover(const BallCoverPatternParams& params, std::uint64_t seed,
                         Metric metric) {
  if (params.groups < 1 || params.group_size < 1 || params.dim < 1)
    raise(errc::bad_params, "ball cover counts must be >= 1");
  if (!(params.separation >= 0.0))
    raise(errc::bad_params, "separation must be >= 0");
  const std::size_t m =
      static_cast<std::size_t>(params.groups) * params.group_size;
  if (m < 2) raise(errc::bad_params, "ball cover must produce at least 2 points");

  Rng rng(mix_seed(seed, 0x62636f76ULL));
  // Jitter first, then pick the axis spacing from the realized radius so
  // the separation guarantee holds exactly.
  std::vector<double> jitter(m * params.dim);
  for (auto& v : jitter) v = rng.normal();
  double max_radius = 0.0;
  for (std::size_t p = 0; p < m; ++p) {
    double sq = 0.0;
    for (std::uint32_t t = 0; t < params.dim; ++t) {
      const double v = jitter[p * params.dim + t];
      sq += v * v;
    }
    max_radius = std::max(max_radius, std::sqrt(sq));
  }
  if (max_radius == 0.0) max_radius = 1.0;
  const double spacing = (params.separation + 2.0) * max_radius;

  FloatMatrix points(m, params.dim);
  std::size_t row = 0;
  for (std::uint32_t g = 0; g < params.groups; ++g) {
    for (std::uint32_t i = 0; i < params.group_size; ++i, ++row) {
      float* out = points.row_data(row);
      for (std::uint32_t t = 0; t < params.dim; ++t)
        out[t] = static_cast<float>(jitter[row * params.dim + t]);
      out[0] += static_cast<float>(static_cast<double>(g) * spacing);
    }
  }
  return Dataset(std::move(points), metric);
}

Dataset synth_line(std::span<const double> positions, Metric metric) {
  if (positions.size() < 2)
    raise(errc::bad_params, "line dataset needs at least 2 positions");
  FloatMatrix points(positions.size(), 1);
  for (std::size_t i = 0; i < positions.size(); ++i)
    points.values[i] = static_cast<float>(positions[i]);
  return Dataset(std::move(points), metric);
}

Dataset synth_uniform_noise(std::size_t count, std::size_t dim, std::uint64_t seed,
                            Metric metric) {
  if (count < 2 || dim < 1)
    raise(errc::bad_params, "uniform noise needs count >= 2 and dim >= 1");
  Rng rng(mix_seed(seed, 0x756e6966ULL));
  FloatMatrix points(count, dim);
  for (auto& v : points.values) v = static_cast<float>(rng.uniform01());
  return Dataset(std::move(points), metric);
}

}  // namespace nsm
