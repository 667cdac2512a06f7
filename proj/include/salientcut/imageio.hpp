#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "salientcut/pixel_grid.hpp"

namespace salientcut {

/// Block size (pixels per block) of the tree-structured extrema reduction.
inline constexpr std::size_t kExtremaBlock = 256;

/// Loads an 8-bit gray or RGB PNG; values scaled to [0,1].
PixelGrid load_frame(const std::filesystem::path& path);

/// Writes an 8-bit gray PNG (object = 255, background = 0).
void save_mask(const LabelField& mask, const std::filesystem::path& path);

/// Loads a mask PNG, thresholding the first channel at 0.5.
LabelField load_mask(const std::filesystem::path& path);

/// Writes a single-channel grid as gray PNG; values clamped to [0,1].
void save_gray(const PixelGrid& image, const std::filesystem::path& path);

/// Writes an RGB grid as PNG; values clamped to [0,1].
void save_rgb(const PixelGrid& image, const std::filesystem::path& path);

/// `frame_%06d.png`
std::string frame_filename(std::size_t index);

/// Contiguous frame_000000.png ... sequence in `dir`. Throws IoError when the
/// directory is missing or indices have a gap.
std::vector<std::filesystem::path> list_frames(const std::filesystem::path& dir);

/// Correlation with edge-clamp borders:
/// out(x,y) = sum_r sum_c k(r,c) * in(x + c - cols/2, y + r - rows/2).
PixelGrid convolve(const PixelGrid& image, const FilterKernel& kernel);

/// Same as convolve() with an outer-product kernel, evaluated in two 1-D passes.
PixelGrid convolve_separable(const PixelGrid& image, std::span<const double> vertical,
                             std::span<const double> horizontal);

/// Normalized 1-D Gaussian taps with half-width ceil(3 sigma); sigma <= 0 gives {1}.
std::vector<double> gaussian_taps(double sigma);

Pyramid build_pyramid(const PixelGrid& image, int levels);

/// Largest level count accepted by build_pyramid for a w x h image.
int max_pyramid_levels(int width, int height);

/// Global (min, max) by repeated block-wise reduction.
std::pair<double, double> parallel_extrema(const PixelGrid& image);

/// Bilinear resampling with pixel-center alignment and clamped borders.
PixelGrid resize_bilinear(const PixelGrid& image, int width, int height);

/// Affine rescale to [0,1]; near-constant maps become all zeros.
PixelGrid rescale_unit(const PixelGrid& image);

}  // namespace salientcut
