#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "nsm/types.hpp"

namespace nsm {

struct GaussianMixtureParams {
  std::uint32_t components = 1;
  std::uint32_t per_component = 2;
  std::uint32_t dim = 2;
  double sigma = 1.0;       // within-component standard deviation
  double separation = 1.0;  // component centers drawn from N(0, separation^2 I)
};

struct LabeledDataset {
  Dataset data;
  std::vector<std::int32_t> labels;  // generating component per point
};

LabeledDataset synth_gaussian_mixture(const GaussianMixtureParams& params,
                                      std::uint64_t seed,
                                      Metric metric = Metric::euclidean);

struct BallCoverPatternParams {
  std::uint32_t groups = 2;
  std::uint32_t group_size = 2;  // exactly r points per group
  std::uint32_t dim = 1;
  /// Minimal inter-group point distance as a multiple of the largest
  /// intra-group radius; > 2 keeps every group's (r-1)-NN inside it.
  double separation = 4.0;
};

/// `groups` far-separated blobs of exactly `group_size` points each, laid
/// out along the first axis with seeded jitter.
Dataset synth_ball_cover(const BallCoverPatternParams& params, std::uint64_t seed,
                         Metric metric = Metric::euclidean);

/// 1-D dataset at the given coordinates (fixtures like {0, 1, 10, 11}).
Dataset synth_line(std::span<const double> positions,
                   Metric metric = Metric::euclidean);

Dataset synth_uniform_noise(std::size_t count, std::size_t dim, std::uint64_t seed,
                            Metric metric = Metric::euclidean);

}  // namespace nsm
