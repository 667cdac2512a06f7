#include "salientcut/imageio.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>

#include "salientcut/parallel.hpp"

namespace salientcut {

namespace fs = std::filesystem;

namespace {

constexpr std::size_t kRowGrain = 16;

std::uint8_t to_byte(double v) {
  if (!(v > 0.0)) return 0;
  if (v >= 1.0) return 255;
  return static_cast<std::uint8_t>(std::lround(v * 255.0));
}

void write_png(const fs::path& path, int width, int height, std::uint32_t format,
               const std::vector<std::uint8_t>& buffer) {
  if (width <= 0 || height <= 0) throw InvalidArgument("PNG write: dimensions must be positive");
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(width);
  image.height = static_cast<png_uint_32>(height);
  image.format = format;
  if (!png_image_write_to_file(&image, path.c_str(), 0, buffer.data(), 0, nullptr)) {
    std::string msg = image.message;
    png_image_free(&image);
    throw IoError("cannot write " + path.string() + ": " + msg);
  }
}

}  // namespace

PixelGrid load_frame(const fs::path& path) {
  if (!fs::exists(path)) throw IoError("no such file: " + path.string());
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.c_str())) {
    std::string msg = image.message;
    png_image_free(&image);
    throw IoError("cannot read " + path.string() + ": " + msg);
  }
  if (image.format & PNG_FORMAT_FLAG_LINEAR) {
    png_image_free(&image);
    throw IoError(path.string() + ": unsupported bit depth (only 8-bit PNG is accepted)");
  }
  if (image.format & PNG_FORMAT_FLAG_ALPHA) {
    png_image_free(&image);
    throw IoError(path.string() + ": unsupported format (alpha channel)");
  }
  const bool color = (image.format & PNG_FORMAT_FLAG_COLOR) != 0;
  const int channels = color ? 3 : 1;
  image.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  std::vector<std::uint8_t> buffer(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, buffer.data(), 0, nullptr)) {
    std::string msg = image.message;
    png_image_free(&image);
    throw IoError("cannot decode " + path.string() + ": " + msg);
  }
  PixelGrid grid(static_cast<int>(image.width), static_cast<int>(image.height), channels);
  for (std::size_t i = 0; i < buffer.size(); ++i) grid[i] = buffer[i] / 255.0;
  return grid;
}

void save_mask(const LabelField& mask, const fs::path& path) {
  std::vector<std::uint8_t> buffer(mask.labels.size());
  for (std::size_t i = 0; i < buffer.size(); ++i) buffer[i] = mask.labels[i] ? 255 : 0;
  write_png(path, mask.width, mask.height, PNG_FORMAT_GRAY, buffer);
}

LabelField load_mask(const fs::path& path) {
  const PixelGrid g = load_frame(path);
  LabelField mask(g.width(), g.height());
  for (std::size_t i = 0; i < mask.labels.size(); ++i)
    mask.labels[i] = g[i * g.channels()] >= 0.5 ? 1 : 0;
  return mask;
}

void save_gray(const PixelGrid& image, const fs::path& path) {
  if (image.channels() != 1) throw InvalidArgument("save_gray: expected a single-channel grid");
  std::vector<std::uint8_t> buffer(image.size());
  for (std::size_t i = 0; i < buffer.size(); ++i) buffer[i] = to_byte(image[i]);
  write_png(path, image.width(), image.height(), PNG_FORMAT_GRAY, buffer);
}

void save_rgb(const PixelGrid& image, const fs::path& path) {
  if (image.channels() != 3) throw InvalidArgument("save_rgb: expected a 3-channel grid");
  std::vector<std::uint8_t> buffer(image.size());
  for (std::size_t i = 0; i < buffer.size(); ++i) buffer[i] = to_byte(image[i]);
  write_png(path, image.width(), image.height(), PNG_FORMAT_RGB, buffer);
}

std::string frame_filename(std::size_t index) {
  char name[32];
  std::snprintf(name, sizeof(name), "frame_%06zu.png", index);
  return name;
}

std::vector<fs::path> list_frames(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw IoError("not a directory: " + dir.string());
  std::size_t count = 0;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (name.size() == 16 && name.starts_with("frame_") && name.ends_with(".png")) ++count;
  }
  std::vector<fs::path> frames;
  frames.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    fs::path p = dir / frame_filename(i);
    if (!fs::exists(p)) throw IoError("frame sequence in " + dir.string() + " is not contiguous: missing " +
                                      p.filename().string());
    frames.push_back(std::move(p));
  }
  return frames;
}

PixelGrid convolve(const PixelGrid& image, const FilterKernel& kernel) {
  if (image.channels() != 1) throw InvalidArgument("convolve: expected a single-channel image");
  const int w = image.width(), h = image.height();
  const int kr = kernel.rows(), kc = kernel.cols();
  const int oy = kr / 2, ox = kc / 2;
  PixelGrid out(w, h, 1);
  if (w == 0 || h == 0) return out;
  parallel_for(0, static_cast<std::size_t>(h), kRowGrain, [&](std::size_t y0, std::size_t y1) {
    std::vector<int> xs(static_cast<std::size_t>(w) * kc);
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < kc; ++c) xs[static_cast<std::size_t>(x) * kc + c] = std::clamp(x + c - ox, 0, w - 1);
    for (std::size_t yy = y0; yy < y1; ++yy) {
      const int y = static_cast<int>(yy);
      double* dst = out.row(y);
      for (int x = 0; x < w; ++x) {
        const int* cols = &xs[static_cast<std::size_t>(x) * kc];
        double acc = 0.0;
        for (int r = 0; r < kr; ++r) {
          const double* src = image.row(std::clamp(y + r - oy, 0, h - 1));
          for (int c = 0; c < kc; ++c) acc += kernel(r, c) * src[cols[c]];
        }
        dst[x] = acc;
      }
    }
  });
  return out;
}

PixelGrid convolve_separable(const PixelGrid& image, std::span<const double> vertical,
                             std::span<const double> horizontal) {
  if (image.channels() != 1) throw InvalidArgument("convolve_separable: expected a single-channel image");
  if (vertical.size() % 2 == 0 || horizontal.size() % 2 == 0)
    throw InvalidArgument("convolve_separable: kernel lengths must be odd");
  const int w = image.width(), h = image.height();
  PixelGrid tmp(w, h, 1), out(w, h, 1);
  if (w == 0 || h == 0) return out;
  const int kh = static_cast<int>(horizontal.size()), kv = static_cast<int>(vertical.size());
  const int oh = kh / 2, ov = kv / 2;
  parallel_for(0, static_cast<std::size_t>(h), kRowGrain, [&](std::size_t y0, std::size_t y1) {
    for (std::size_t yy = y0; yy < y1; ++yy) {
      const double* src = image.row(static_cast<int>(yy));
      double* dst = tmp.row(static_cast<int>(yy));
      for (int x = 0; x < w; ++x) {
        double acc = 0.0;
        if (x >= oh && x + oh < w) {
          const double* s = src + x - oh;
          for (int c = 0; c < kh; ++c) acc += horizontal[c] * s[c];
        } else {
          for (int c = 0; c < kh; ++c) acc += horizontal[c] * src[std::clamp(x + c - oh, 0, w - 1)];
        }
        dst[x] = acc;
      }
    }
  });
  parallel_for(0, static_cast<std::size_t>(h), kRowGrain, [&](std::size_t y0, std::size_t y1) {
    std::vector<double> acc(static_cast<std::size_t>(w));
    for (std::size_t yy = y0; yy < y1; ++yy) {
      const int y = static_cast<int>(yy);
      std::fill(acc.begin(), acc.end(), 0.0);
      for (int r = 0; r < kv; ++r) {
        const double wv = vertical[r];
        const double* src = tmp.row(std::clamp(y + r - ov, 0, h - 1));
        for (int x = 0; x < w; ++x) acc[x] += wv * src[x];
      }
      std::copy(acc.begin(), acc.end(), out.row(y));
    }
  });
  return out;
}

std::vector<double> gaussian_taps(double sigma) {
  if (!(sigma > 0.0)) return {1.0};
  const int half = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> taps(2 * static_cast<std::size_t>(half) + 1);
  double sum = 0.0;
  for (int i = -half; i <= half; ++i) {
    taps[i + half] = std::exp(-0.5 * (i * i) / (sigma * sigma));
    sum += taps[i + half];
  }
  for (double& t : taps) t /= sum;
  return taps;
}

int max_pyramid_levels(int width, int height) {
  const int m = std::min(width, height);
  if (m < 1) return 0;
  return static_cast<int>(std::floor(std::log2(static_cast<double>(m)))) + 1;
}

Pyramid build_pyramid(const PixelGrid& image, int levels) {
  if (image.channels() != 1) throw InvalidArgument("build_pyramid: expected a single-channel image");
  if (levels < 1) throw InvalidArgument("build_pyramid: levels must be >= 1");
  const int limit = max_pyramid_levels(image.width(), image.height());
  if (levels > limit)
    throw InvalidArgument("build_pyramid: " + std::to_string(levels) + " levels requested but a " +
                          std::to_string(image.width()) + "x" + std::to_string(image.height()) +
                          " image supports at most " + std::to_string(limit));
  static constexpr double kBinomial[5] = {1.0 / 16, 4.0 / 16, 6.0 / 16, 4.0 / 16, 1.0 / 16};
  Pyramid pyr;
  pyr.levels.reserve(static_cast<std::size_t>(levels));
  pyr.levels.push_back(image);
  for (int k = 1; k < levels; ++k) {
    const PixelGrid& prev = pyr.levels.back();
    const PixelGrid smooth = convolve_separable(prev, kBinomial, kBinomial);
    const int pw = prev.width(), ph = prev.height();
    const int w = std::max(1, pw / 2), h = std::max(1, ph / 2);
    PixelGrid next(w, h, 1);
    // 2x2 block mean keeps the sample lattice centred on the parent lattice.
    for (int y = 0; y < h; ++y) {
      const double* r0 = smooth.row(std::min(2 * y, ph - 1));
      const double* r1 = smooth.row(std::min(2 * y + 1, ph - 1));
      for (int x = 0; x < w; ++x) {
        const int x0 = std::min(2 * x, pw - 1), x1 = std::min(2 * x + 1, pw - 1);
        next.at(x, y) = 0.25 * ((r0[x0] + r0[x1]) + (r1[x0] + r1[x1]));
      }
    }
    pyr.levels.push_back(std::move(next));
  }
  return pyr;
}

std::pair<double, double> parallel_extrema(const PixelGrid& image) {
  if (image.channels() != 1 || image.empty())
    throw InvalidArgument("parallel_extrema: expected a nonempty single-channel image");
  auto vals = image.values();
  std::vector<double> mins, maxs;
  const std::size_t blocks = (vals.size() + kExtremaBlock - 1) / kExtremaBlock;
  mins.resize(blocks);
  maxs.resize(blocks);
  parallel_for(0, blocks, 4, [&](std::size_t b0, std::size_t b1) {
    for (std::size_t b = b0; b < b1; ++b) {
      const std::size_t lo = b * kExtremaBlock, hi = std::min(vals.size(), lo + kExtremaBlock);
      double mn = vals[lo], mx = vals[lo];
      for (std::size_t i = lo + 1; i < hi; ++i) {
        mn = std::min(mn, vals[i]);
        mx = std::max(mx, vals[i]);
      }
      mins[b] = mn;
      maxs[b] = mx;
    }
  });
  // Reduce the per-block image until a single pixel remains.
  while (mins.size() > 1) {
    const std::size_t n = (mins.size() + kExtremaBlock - 1) / kExtremaBlock;
    std::vector<double> nmin(n), nmax(n);
    parallel_for(0, n, 4, [&](std::size_t b0, std::size_t b1) {
      for (std::size_t b = b0; b < b1; ++b) {
        const std::size_t lo = b * kExtremaBlock, hi = std::min(mins.size(), lo + kExtremaBlock);
        double mn = mins[lo], mx = maxs[lo];
        for (std::size_t i = lo + 1; i < hi; ++i) {
          mn = std::min(mn, mins[i]);
          mx = std::max(mx, maxs[i]);
        }
        nmin[b] = mn;
        nmax[b] = mx;
      }
    });
    mins = std::move(nmin);
    maxs = std::move(nmax);
  }
  return {mins[0], maxs[0]};
}

PixelGrid resize_bilinear(const PixelGrid& image, int width, int height) {
  if (width < 1 || height < 1) throw InvalidArgument("resize_bilinear: target size must be positive");
  const int sw = image.width(), sh = image.height(), ch = image.channels();
  if (sw == width && sh == height) return image;
  PixelGrid out(width, height, ch);
  const double sx = static_cast<double>(sw) / width, sy = static_cast<double>(sh) / height;
  std::vector<int> x0(width), x1(width);
  std::vector<double> fx(width);
  for (int x = 0; x < width; ++x) {
    const double u = std::clamp((x + 0.5) * sx - 0.5, 0.0, static_cast<double>(sw - 1));
    x0[x] = static_cast<int>(std::floor(u));
    x1[x] = std::min(x0[x] + 1, sw - 1);
    fx[x] = u - x0[x];
  }
  parallel_for(0, static_cast<std::size_t>(height), kRowGrain, [&](std::size_t y0s, std::size_t y1s) {
    for (std::size_t yy = y0s; yy < y1s; ++yy) {
      const int y = static_cast<int>(yy);
      const double v = std::clamp((y + 0.5) * sy - 0.5, 0.0, static_cast<double>(sh - 1));
      const int ya = static_cast<int>(std::floor(v));
      const int yb = std::min(ya + 1, sh - 1);
      const double fy = v - ya;
      const double* ra = image.row(ya);
      const double* rb = image.row(yb);
      double* dst = out.row(y);
      for (int x = 0; x < width; ++x) {
        for (int c = 0; c < ch; ++c) {
          const double top = ra[x0[x] * ch + c] + fx[x] * (ra[x1[x] * ch + c] - ra[x0[x] * ch + c]);
          const double bot = rb[x0[x] * ch + c] + fx[x] * (rb[x1[x] * ch + c] - rb[x0[x] * ch + c]);
          dst[x * ch + c] = top + fy * (bot - top);
        }
      }
    }
  });
  return out;
}

PixelGrid rescale_unit(const PixelGrid& image) {
  PixelGrid out(image.width(), image.height(), image.channels());
  if (image.empty()) return out;
  auto [mn, mx] = parallel_extrema(image.channels() == 1 ? image : image.channel(0));
  if (image.channels() != 1) {
    for (double v : image.values()) {
      mn = std::min(mn, v);
      mx = std::max(mx, v);
    }
  }
  const double range = mx - mn;
  if (!(range > 1e-9 * std::max(1.0, std::abs(mx)))) return out;
  for (std::size_t i = 0; i < image.size(); ++i) out[i] = std::clamp((image[i] - mn) / range, 0.0, 1.0);
  return out;
}

}  // namespace salientcut
