#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "salientcut/pixel_grid.hpp"
#include "salientcut/prior.hpp"

namespace salientcut {

/// Moving bright disk over a textured background with a static textured
/// distractor. Values are quantized to 8 bits so clips round-trip through PNG.
struct ClipSpec {
  int width = 352;
  int height = 288;
  int frames = 60;
  double radius = 20.0;
  double start_x = 90.0;
  double start_y = 100.0;
  double velocity_x = 7.0;
  double velocity_y = 4.0;
  int occlusion_start = -1;  // first frame with the disk hidden; < 0 disables
  int occlusion_length = 5;
  double noise = 0.02;  // per-frame uniform noise amplitude
  bool distractor = true;
  std::uint64_t seed = 7;
};

struct SyntheticClip {
  std::vector<PixelGrid> frames;
  std::vector<LabelField> truth;
  std::vector<Seed> seeds;  // first-frame scribbles for the manual strategy
};

SyntheticClip make_clip(const ClipSpec& spec);

/// Writes <dir>/frames/frame_*.png, <dir>/truth/frame_*.png and <dir>/seeds.txt.
void write_clip(const SyntheticClip& clip, const std::filesystem::path& dir);

}  // namespace salientcut
