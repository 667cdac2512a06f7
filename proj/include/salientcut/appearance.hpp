#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "salientcut/pixel_grid.hpp"

namespace salientcut {

using Rgb = std::array<double, 3>;

struct GaussianComponent {
  double weight = 0.0;
  Rgb mean{};
  std::array<double, 9> cov{};  // row-major 3x3, SPD
};

/// RGB Gaussian mixture p(C_x | A_x).
struct GmmModel {
  std::vector<GaussianComponent> components;

  double log_density(const Rgb& c) const;
};

/// Density floor applied before taking logs.
inline constexpr double kDensityFloor = 1e-12;
/// Lower bound on every eigenvalue of a fitted color covariance.
inline constexpr double kColorRidge = 1e-6;
/// Upper bound on EM samples drawn from one frame.
inline constexpr std::size_t kMaxColorSamples = 20000;

struct LikelihoodMaps {
  PixelGrid obj_nll;  // -log p(C_x | A_x = 1)
  PixelGrid bkg_nll;  // -log p(C_x | A_x = 0)
};

struct EmTrace {
  std::vector<double> log_likelihood;  // weight-normalized, one per E-step
};

/// Weighted EM with weighted k-means++ / k-means initialization. Samples are
/// sorted into a canonical order first, so the result does not depend on the
/// order in which they are supplied.
GmmModel fit_weighted_gmm(std::span<const Rgb> pixels, std::span<const double> weights, int components,
                          std::uint64_t seed, EmTrace* trace = nullptr);

LikelihoodMaps nll_maps(const PixelGrid& frame, const GmmModel& obj, const GmmModel& bkg);

/// Number of EM samples used for a frame of `pixels` pixels.
std::size_t color_sample_budget(std::size_t pixels);

/// Object model weighted by the prior, background model by 1 - prior. Each
/// fit runs on a deterministic systematic resample of at most
/// color_sample_budget() pixels.
std::pair<GmmModel, GmmModel> build_models(const PixelGrid& frame, const PixelGrid& prior, int components,
                                           std::uint64_t seed);

}  // namespace salientcut
