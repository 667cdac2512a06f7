#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "salientcut/attention.hpp"
#include "salientcut/pixel_grid.hpp"

namespace salientcut {

/// Probability clamp for every prior grid.
inline constexpr double kPriorEpsilon = 1e-6;

enum class KalmanConvention {
  direct,    // weight sigma1^2 / (sigma1^2 + sigma2^2 + v) on the smoothed mask
  standard,  // sigma1 and sigma2 roles exchanged (textbook corrector)
};

struct UpdateParams {
  double sigma1 = 0.03;
  double sigma2 = 0.035;
  int smoothing_radius = 8;
  int edge_band = 8;
  double prior_scale_max = 0.95;
  // Ridge added to every spatial covariance, as a fraction of min(W, H) in
  // standard-deviation units.
  double spatial_sigma_frac = 0.04;
  KalmanConvention convention = KalmanConvention::direct;
};

struct PriorState {
  PixelGrid prior;  // p(A_x = 1), every value in [kPriorEpsilon, 1 - kPriorEpsilon]
  double xi_variance = 0.0;
  std::size_t frame_index = 0;
};

/// Fusion weights of one update step; weight_mask + weight_saliency == 1.
struct FusionWeights {
  double weight_mask;
  double weight_saliency;
  double next_variance;
};

FusionWeights fusion_weights(double sigma1, double sigma2, double xi_variance,
                             KalmanConvention convention = KalmanConvention::direct);

/// Positive root of v^2 + s2 v - s1 s2 = 0 (s = sigma^2): the limit of the
/// xi-variance recursion.
double xi_variance_fixed_point(double sigma1, double sigma2);

/// 2-D spatial GMM over the EFDM mass, rescaled so its peak equals
/// prior_scale_max, with the frame-edge band forced to kPriorEpsilon.
PixelGrid saliency_prior(const Efdm& efdm, int components, const UpdateParams& params, std::uint64_t seed);

/// f(A, x): Gaussian smoothing of the mask with std = radius / 2.
PixelGrid mask_to_gray(const LabelField& mask, int radius);

PriorState update_prior(const PriorState& prev_state, const LabelField& prev_mask, const PixelGrid& saliency_prior,
                        const UpdateParams& params);

struct Seed {
  int x;
  int y;
  int label;  // 0 background, 1 object
};

PixelGrid manual_prior(const std::vector<Seed>& seeds, int width, int height);

/// Parses `x y label` lines; blank lines and lines starting with '#' are skipped.
std::vector<Seed> read_seed_file(const std::filesystem::path& path);
void write_seed_file(const std::vector<Seed>& seeds, const std::filesystem::path& path);

/// Clamp every value into [kPriorEpsilon, 1 - kPriorEpsilon].
void clamp_probability(PixelGrid& grid);

}  // namespace salientcut
