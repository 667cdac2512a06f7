#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace salientcut {

/// Raised when a caller violates an operation's documented precondition.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised on filesystem / codec failures.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// W x H raster of doubles, row-major with interleaved channels.
class PixelGrid {
 public:
  PixelGrid() = default;
  PixelGrid(int width, int height, int channels = 1, double fill = 0.0);

  int width() const { return width_; }
  int height() const { return height_; }
  int channels() const { return channels_; }
  std::size_t pixel_count() const { return static_cast<std::size_t>(width_) * height_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& at(int x, int y, int c = 0) { return data_[index(x, y, c)]; }
  double at(int x, int y, int c = 0) const { return data_[index(x, y, c)]; }

  // Edge-clamped read.
  double clamped(int x, int y, int c = 0) const;

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }
  double* row(int y) { return data_.data() + static_cast<std::size_t>(y) * width_ * channels_; }
  const double* row(int y) const {
    return data_.data() + static_cast<std::size_t>(y) * width_ * channels_;
  }

  PixelGrid channel(int c) const;
  bool same_shape(const PixelGrid& other) const {
    return width_ == other.width_ && height_ == other.height_ && channels_ == other.channels_;
  }
  bool same_size(int w, int h) const { return width_ == w && height_ == h; }

  bool operator==(const PixelGrid&) const = default;

 private:
  std::size_t index(int x, int y, int c) const {
    return (static_cast<std::size_t>(y) * width_ + x) * channels_ + c;
  }

  int width_ = 0;
  int height_ = 0;
  int channels_ = 0;
  std::vector<double> data_;
};

/// Binary per-pixel configuration: 1 = object, 0 = background.
struct LabelField {
  int width = 0;
  int height = 0;
  std::size_t frame_index = 0;
  std::vector<std::uint8_t> labels;

  LabelField() = default;
  LabelField(int w, int h, std::uint8_t fill = 0, std::size_t frame = 0);

  std::uint8_t& at(int x, int y) { return labels[static_cast<std::size_t>(y) * width + x]; }
  std::uint8_t at(int x, int y) const { return labels[static_cast<std::size_t>(y) * width + x]; }
  std::size_t pixel_count() const { return labels.size(); }
  std::size_t object_count() const;
  bool same_size(const LabelField& o) const { return width == o.width && height == o.height; }

  PixelGrid to_grid() const;
  bool operator==(const LabelField&) const = default;
};

/// Odd-sized correlation kernel; weights(r, c) with r in [0, rows).
class FilterKernel {
 public:
  FilterKernel(int rows, int cols, std::vector<double> weights);
  static FilterKernel separable(std::span<const double> vertical, std::span<const double> horizontal);
  static FilterKernel identity(int size = 3);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  double operator()(int r, int c) const { return weights_[static_cast<std::size_t>(r) * cols_ + c]; }
  std::span<const double> weights() const { return weights_; }

 private:
  int rows_;
  int cols_;
  std::vector<double> weights_;
};

/// Gaussian pyramid; level 0 is full resolution.
struct Pyramid {
  std::vector<PixelGrid> levels;
  std::size_t depth() const { return levels.size(); }
  const PixelGrid& operator[](std::size_t k) const { return levels[k]; }
};

}  // namespace salientcut
