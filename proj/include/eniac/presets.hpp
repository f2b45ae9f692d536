#pragma once

#include <string>

#include "eniac/experiment.hpp"

namespace eniac {

/// Combination lock H=15, delta=0.01, gamma=0.97 with the tabular class and
/// exact thresholded widths; `algorithm` is eniac or zero-bonus.
RunConfig lock_benchmark(const std::string& algorithm);

/// Three-armed bandit solved with exact critics for T iterations.
RunConfig bandit_benchmark(std::size_t iterations);

/// Mountain car in experiment mode with the given network preset.
RunConfig mountain_car_benchmark(const std::string& algorithm, std::size_t layers = 2);

/// 2-D ring fixture for the neural width: buffer points on a thin ring of
/// radius 1, a query set uniform on [-2, 2]^2, and probes near the center and
/// beyond the ring. A single action.
struct RingFixture {
  std::shared_ptr<MlpClass> arch;
  Dataset buffer;
  Dataset query_set;
  Dataset buffer_probes;
  Dataset far_probes;
};

RingFixture make_ring_fixture(Rng& rng, std::size_t buffer_size = 2000,
                              std::size_t query_set_size = 20000, std::size_t probes = 100);

}  // namespace eniac
