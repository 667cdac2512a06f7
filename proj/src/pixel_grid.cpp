#include "salientcut/pixel_grid.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace salientcut {

PixelGrid::PixelGrid(int width, int height, int channels, double fill)
    : width_(width), height_(height), channels_(channels) {
  if (width < 0 || height < 0 || channels < 1) throw InvalidArgument("PixelGrid: bad dimensions");
  data_.assign(static_cast<std::size_t>(width) * height * channels, fill);
}

double PixelGrid::clamped(int x, int y, int c) const {
  x = std::clamp(x, 0, width_ - 1);
  y = std::clamp(y, 0, height_ - 1);
  return data_[index(x, y, c)];
}

PixelGrid PixelGrid::channel(int c) const {
  if (c < 0 || c >= channels_) throw InvalidArgument("PixelGrid::channel: index out of range");
  PixelGrid out(width_, height_, 1);
  const std::size_t n = pixel_count();
  for (std::size_t i = 0; i < n; ++i) out[i] = data_[i * channels_ + c];
  return out;
}

LabelField::LabelField(int w, int h, std::uint8_t fill, std::size_t frame)
    : width(w), height(h), frame_index(frame) {
  if (w < 0 || h < 0) throw InvalidArgument("LabelField: bad dimensions");
  labels.assign(static_cast<std::size_t>(w) * h, fill);
}

std::size_t LabelField::object_count() const {
  return static_cast<std::size_t>(std::count_if(labels.begin(), labels.end(), [](auto v) { return v != 0; }));
}

PixelGrid LabelField::to_grid() const {
  PixelGrid g(width, height, 1);
  for (std::size_t i = 0; i < labels.size(); ++i) g[i] = labels[i] ? 1.0 : 0.0;
  return g;
}

FilterKernel::FilterKernel(int rows, int cols, std::vector<double> weights)
    : rows_(rows), cols_(cols), weights_(std::move(weights)) {
  if (rows < 1 || cols < 1 || rows % 2 == 0 || cols % 2 == 0)
    throw InvalidArgument("FilterKernel: dimensions must be odd, got " + std::to_string(rows) + "x" +
                          std::to_string(cols));
  if (weights_.size() != static_cast<std::size_t>(rows) * cols)
    throw InvalidArgument("FilterKernel: weight count does not match dimensions");
  for (double w : weights_)
    if (!std::isfinite(w)) throw InvalidArgument("FilterKernel: non-finite weight");
}

FilterKernel FilterKernel::separable(std::span<const double> vertical, std::span<const double> horizontal) {
  std::vector<double> w;
  w.reserve(vertical.size() * horizontal.size());
  for (double v : vertical)
    for (double h : horizontal) w.push_back(v * h);
  return FilterKernel(static_cast<int>(vertical.size()), static_cast<int>(horizontal.size()), std::move(w));
}

FilterKernel FilterKernel::identity(int size) {
  std::vector<double> w(static_cast<std::size_t>(size) * size, 0.0);
  w[static_cast<std::size_t>(size / 2) * size + size / 2] = 1.0;
  return FilterKernel(size, size, std::move(w));
}

}  // namespace salientcut
