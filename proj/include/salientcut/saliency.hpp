#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <vector>

#include "salientcut/pixel_grid.hpp"

namespace salientcut {

/// Single-channel saliency in [0,1]; max is 1 unless the map is identically 0.
struct SaliencyMap {
  PixelGrid values;
  std::size_t frame_index = 0;
};

/// Per-frame feature channels, all single-channel and frame-sized.
struct ChannelSet {
  PixelGrid intensity;
  PixelGrid red_green;
  PixelGrid blue_yellow;
  std::array<PixelGrid, 4> orientation;  // 0, 45, 90, 135 degrees
  PixelGrid motion;
};

struct SaliencyParams {
  std::vector<int> center_levels{2, 3, 4};
  std::vector<int> deltas{3, 4};
  int local_max_radius = 7;
  // intensity, color, orientation, motion
  std::array<double, 4> class_weights{0.25, 0.25, 0.25, 0.25};
};

/// Intensity below which the color opponents are forced to zero.
inline constexpr double kOpponentIntensityFloor = 0.1;

/// 9x9 odd Gabor kernels at 0/45/90/135 degrees. The 90 and 135 degree
/// kernels are exact index rotations of the 0 and 45 degree ones.
const std::array<FilterKernel, 4>& orientation_kernels();

ChannelSet extract_channels(const PixelGrid& frame, const PixelGrid* prev_frame = nullptr);

/// |upsample(level c+d) - level c| for every center c and delta d, ordered
/// center-major. Throws when the pyramid is too shallow.
std::vector<PixelGrid> center_surround(const Pyramid& pyramid, const std::vector<int>& centers,
                                       const std::vector<int>& deltas);

/// Rescale to [0,1] and weight by (1 - mean of other local maxima)^2.
PixelGrid normalize_map(const PixelGrid& map, int local_max_radius = 7);

/// Center/delta scales that fit a w x h frame: the configured scales shifted
/// toward finer levels when the pyramid would be too shallow.
std::pair<std::vector<int>, std::vector<int>> effective_scales(int width, int height, const SaliencyParams& params);

SaliencyMap compute_saliency(const PixelGrid& frame, const PixelGrid* prev_frame = nullptr,
                             const SaliencyParams& params = {}, std::size_t frame_index = 0);

}  // namespace salientcut
