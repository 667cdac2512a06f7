#include "salientcut/saliency.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "salientcut/imageio.hpp"
#include "salientcut/parallel.hpp"

namespace salientcut {

namespace {

constexpr int kGaborSize = 9;
constexpr double kGaborSigma = 2.5;
constexpr double kGaborWavelength = 7.0;

FilterKernel make_gabor(double theta) {
  const int half = kGaborSize / 2;
  std::vector<double> w(kGaborSize * kGaborSize);
  double positive = 0.0;
  for (int r = 0; r < kGaborSize; ++r) {
    for (int c = 0; c < kGaborSize; ++c) {
      const double dx = c - half, dy = r - half;
      const double u = dx * std::cos(theta) + dy * std::sin(theta);
      const double v = -dx * std::sin(theta) + dy * std::cos(theta);
      const double g = std::exp(-(u * u + v * v) / (2 * kGaborSigma * kGaborSigma)) *
                       std::sin(2 * std::numbers::pi * u / kGaborWavelength);
      w[r * kGaborSize + c] = g;
      if (g > 0) positive += g;
    }
  }
  for (double& x : w) x /= positive;
  // odd symmetry: force exact antisymmetry about the center
  for (int i = 0; i < kGaborSize * kGaborSize / 2; ++i) {
    const double a = 0.5 * (w[i] - w[kGaborSize * kGaborSize - 1 - i]);
    w[i] = a;
    w[kGaborSize * kGaborSize - 1 - i] = -a;
  }
  w[kGaborSize * kGaborSize / 2] = 0.0;
  return FilterKernel(kGaborSize, kGaborSize, std::move(w));
}

// K'(r, c) = K(n-1-c, r): the kernel turned by a quarter turn.
FilterKernel quarter_turn(const FilterKernel& k) {
  const int n = k.rows();
  std::vector<double> w(static_cast<std::size_t>(n) * n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) w[static_cast<std::size_t>(r) * n + c] = k(n - 1 - c, r);
  return FilterKernel(n, n, std::move(w));
}

PixelGrid abs_grid(PixelGrid g) {
  for (double& v : g.values()) v = std::abs(v);
  return g;
}

std::vector<double> window_max(const PixelGrid& m, int radius) {
  const int w = m.width(), h = m.height();
  std::vector<double> tmp(m.size()), out(m.size());
  for (int y = 0; y < h; ++y) {
    const double* row = m.row(y);
    for (int x = 0; x < w; ++x) {
      double mx = row[x];
      for (int k = std::max(0, x - radius); k <= std::min(w - 1, x + radius); ++k) mx = std::max(mx, row[k]);
      tmp[static_cast<std::size_t>(y) * w + x] = mx;
    }
  }
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double mx = tmp[static_cast<std::size_t>(y) * w + x];
      for (int k = std::max(0, y - radius); k <= std::min(h - 1, y + radius); ++k)
        mx = std::max(mx, tmp[static_cast<std::size_t>(k) * w + x]);
      out[static_cast<std::size_t>(y) * w + x] = mx;
    }
  }
  return out;
}

}  // namespace

const std::array<FilterKernel, 4>& orientation_kernels() {
  static const std::array<FilterKernel, 4> kernels = [] {
    const FilterKernel k0 = make_gabor(0.0);
    const FilterKernel k45 = make_gabor(std::numbers::pi / 4);
    return std::array<FilterKernel, 4>{k0, k45, quarter_turn(k0), quarter_turn(k45)};
  }();
  return kernels;
}

ChannelSet extract_channels(const PixelGrid& frame, const PixelGrid* prev_frame) {
  if (frame.channels() != 3) throw InvalidArgument("extract_channels: frame must be RGB");
  if (prev_frame && !prev_frame->same_shape(frame))
    throw InvalidArgument("extract_channels: previous frame size does not match");
  const int w = frame.width(), h = frame.height();
  ChannelSet ch;
  ch.intensity = PixelGrid(w, h);
  ch.red_green = PixelGrid(w, h);
  ch.blue_yellow = PixelGrid(w, h);
  ch.motion = PixelGrid(w, h);
  const std::size_t n = frame.pixel_count();
  for (std::size_t i = 0; i < n; ++i) {
    const double r = frame[3 * i], g = frame[3 * i + 1], b = frame[3 * i + 2];
    const double in = (r + g + b) / 3.0;
    ch.intensity[i] = in;
    if (in >= kOpponentIntensityFloor) {
      ch.red_green[i] = (r - g) / in;
      ch.blue_yellow[i] = (b - 0.5 * (r + g)) / in;
    }
    if (prev_frame) {
      const PixelGrid& p = *prev_frame;
      const double pin = (p[3 * i] + p[3 * i + 1] + p[3 * i + 2]) / 3.0;
      ch.motion[i] = std::abs(in - pin);
    }
  }
  const auto& kernels = orientation_kernels();
  for (std::size_t k = 0; k < 4; ++k) ch.orientation[k] = abs_grid(convolve(ch.intensity, kernels[k]));
  return ch;
}

std::vector<PixelGrid> center_surround(const Pyramid& pyramid, const std::vector<int>& centers,
                                       const std::vector<int>& deltas) {
  if (centers.empty() || deltas.empty()) throw InvalidArgument("center_surround: empty scale set");
  const int max_c = *std::max_element(centers.begin(), centers.end());
  const int max_d = *std::max_element(deltas.begin(), deltas.end());
  for (int c : centers)
    if (c < 0) throw InvalidArgument("center_surround: negative center level");
  for (int d : deltas)
    if (d < 1) throw InvalidArgument("center_surround: deltas must be >= 1");
  if (static_cast<std::size_t>(max_c + max_d) >= pyramid.depth())
    throw InvalidArgument("center_surround: pyramid has " + std::to_string(pyramid.depth()) +
                          " levels, need " + std::to_string(max_c + max_d + 1));
  std::vector<PixelGrid> maps;
  maps.reserve(centers.size() * deltas.size());
  for (int c : centers) {
    const PixelGrid& center = pyramid[static_cast<std::size_t>(c)];
    for (int d : deltas) {
      PixelGrid surround =
          resize_bilinear(pyramid[static_cast<std::size_t>(c + d)], center.width(), center.height());
      for (std::size_t i = 0; i < surround.size(); ++i) surround[i] = std::abs(surround[i] - center[i]);
      maps.push_back(std::move(surround));
    }
  }
  return maps;
}

PixelGrid normalize_map(const PixelGrid& map, int local_max_radius) {
  if (map.channels() != 1) throw InvalidArgument("normalize_map: expected a single-channel map");
  PixelGrid out = rescale_unit(map);
  if (out.empty()) return out;
  const auto [mn, mx] = parallel_extrema(out);
  if (mx <= 0.0) return out;
  (void)mn;

  const int w = out.width(), h = out.height(), r = std::max(0, local_max_radius);
  const std::vector<double> wmax = window_max(out, r);
  // A plateau of equal maxima counts once: the first pixel in raster order.
  double sum = 0.0;
  std::size_t count = 0;
  bool skipped_global = false;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      const double v = out[i];
      if (v <= 0.0 || v != wmax[i]) continue;
      bool earlier_tie = false;
      for (int yy = std::max(0, y - r); yy <= y && !earlier_tie; ++yy) {
        const int xend = yy == y ? x - 1 : std::min(w - 1, x + r);
        for (int xx = std::max(0, x - r); xx <= xend; ++xx) {
          if (out.at(xx, yy) == v) {
            earlier_tie = true;
            break;
          }
        }
      }
      if (earlier_tie) continue;
      if (!skipped_global && v == mx) {
        skipped_global = true;
        continue;
      }
      sum += v;
      ++count;
    }
  }
  const double mean_others = count ? sum / static_cast<double>(count) : 0.0;
  const double factor = (mx - mean_others) * (mx - mean_others);
  for (double& v : out.values()) v *= factor;
  return out;
}

std::pair<std::vector<int>, std::vector<int>> effective_scales(int width, int height,
                                                                const SaliencyParams& params) {
  if (params.center_levels.empty() || params.deltas.empty())
    throw InvalidArgument("saliency: empty center/delta scale set");
  const int available = max_pyramid_levels(width, height);
  const int max_c = *std::max_element(params.center_levels.begin(), params.center_levels.end());
  const int max_d = *std::max_element(params.deltas.begin(), params.deltas.end());
  const int shift = std::max(0, max_c + max_d + 1 - available);
  std::vector<int> centers;
  for (int c : params.center_levels)
    if (c - shift >= 0) centers.push_back(c - shift);
  if (centers.empty() || max_d + 1 > available)
    throw InvalidArgument("saliency: frame " + std::to_string(width) + "x" + std::to_string(height) +
                          " is too small for the configured center-surround scales");
  return {centers, params.deltas};
}

SaliencyMap compute_saliency(const PixelGrid& frame, const PixelGrid* prev_frame, const SaliencyParams& params,
                             std::size_t frame_index) {
  const ChannelSet ch = extract_channels(frame, prev_frame);
  const auto [centers, deltas] = effective_scales(frame.width(), frame.height(), params);
  const int levels = *std::max_element(centers.begin(), centers.end()) +
                     *std::max_element(deltas.begin(), deltas.end()) + 1;
  const int base = *std::min_element(centers.begin(), centers.end());

  // Feature channel -> class: 0 intensity, 1 color, 2 orientation, 3 motion.
  struct Feature {
    const PixelGrid* map;
    int cls;
  };
  std::vector<Feature> features = {{&ch.intensity, 0}, {&ch.red_green, 1}, {&ch.blue_yellow, 1}};
  for (const auto& o : ch.orientation) features.push_back({&o, 2});
  if (prev_frame) features.push_back({&ch.motion, 3});

  int bw = frame.width(), bh = frame.height();
  for (int k = 0; k < base; ++k) {
    bw = std::max(1, bw / 2);
    bh = std::max(1, bh / 2);
  }

  std::vector<PixelGrid> per_feature(features.size());
  parallel_for(0, features.size(), 1, [&](std::size_t f0, std::size_t f1) {
    for (std::size_t f = f0; f < f1; ++f) {
      const Pyramid pyr = build_pyramid(*features[f].map, levels);
      PixelGrid acc(bw, bh);
      for (const PixelGrid& fm : center_surround(pyr, centers, deltas)) {
        const PixelGrid resized = resize_bilinear(normalize_map(fm, params.local_max_radius), bw, bh);
        for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += resized[i];
      }
      per_feature[f] = std::move(acc);
    }
  });

  std::array<PixelGrid, 4> classes;
  for (auto& c : classes) c = PixelGrid(bw, bh);
  for (std::size_t f = 0; f < features.size(); ++f) {
    PixelGrid& dst = classes[static_cast<std::size_t>(features[f].cls)];
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += per_feature[f][i];
  }

  double weight_sum = 0.0;
  for (double wgt : params.class_weights) weight_sum += wgt;
  if (!(weight_sum > 0.0)) throw InvalidArgument("saliency: class weights must have a positive sum");
  PixelGrid combined(bw, bh);
  for (std::size_t k = 0; k < 4; ++k) {
    if (params.class_weights[k] == 0.0) continue;
    const PixelGrid norm = normalize_map(classes[k], params.local_max_radius);
    const double wk = params.class_weights[k] / weight_sum;
    for (std::size_t i = 0; i < combined.size(); ++i) combined[i] += wk * norm[i];
  }

  SaliencyMap out;
  out.frame_index = frame_index;
  out.values = rescale_unit(resize_bilinear(combined, frame.width(), frame.height()));
  return out;
}

}  // namespace salientcut
