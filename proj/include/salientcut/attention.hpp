#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>

#include "salientcut/pixel_grid.hpp"
#include "salientcut/saliency.hpp"

namespace salientcut {

/// Per-pixel Gaussian belief over saliency.
struct StochasticSaliencyMap {
  PixelGrid mean;
  PixelGrid variance;  // > 0 everywhere
  std::size_t frame_index = 0;
};

/// Eye-focusing density: nonnegative, sums to 1 over the frame.
struct Efdm {
  PixelGrid density;
};

/// Scalar random-walk Kalman filter applied independently at every pixel.
/// Without `prev` the state is initialized to (obs, r_var).
StochasticSaliencyMap kalman_update_saliency(const StochasticSaliencyMap* prev, const SaliencyMap& obs,
                                             double q_var, double r_var);

inline constexpr int kEfdmDecimation = 4;

/// Monte-Carlo estimate of Pr[pixel x holds the frame-wide maximum] under
/// independent per-pixel Gaussians, on a grid decimated by `decimation`
/// (block mean of the means, block max of the variances). Returns nullopt when
/// every mean is equal and every variance is zero.
std::optional<Efdm> compute_efdm(const StochasticSaliencyMap& ssm, std::size_t samples, std::uint64_t seed,
                                 int decimation = kEfdmDecimation);

/// Uniform density over a w x h frame.
Efdm uniform_efdm(int width, int height);

}  // namespace salientcut
