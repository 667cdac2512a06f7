#include "salientcut/synthetic.hpp"

#include <algorithm>
#include <cmath>

#include "salientcut/imageio.hpp"
#include "salientcut/random.hpp"

namespace salientcut {

namespace {

double quantize(double v) { return std::round(std::clamp(v, 0.0, 1.0) * 255.0) / 255.0; }

struct Sign {
  int x0, y0, x1, y1;
  bool contains(int x, int y) const { return x >= x0 && x < x1 && y >= y0 && y < y1; }
};

// Disk center at frame t, reflecting off the frame borders.
std::pair<double, double> disk_center(const ClipSpec& s, int t) {
  auto bounce = [](double start, double v, int t, double lo, double hi) {
    const double span = hi - lo;
    if (span <= 0) return lo;
    double p = std::fmod(start - lo + v * t, 2.0 * span);
    if (p < 0) p += 2.0 * span;
    return lo + (p <= span ? p : 2.0 * span - p);
  };
  const double m = s.radius + 10.0;
  return {bounce(s.start_x, s.velocity_x, t, m, s.width - 1 - m), bounce(s.start_y, s.velocity_y, t, m, s.height - 1 - m)};
}

}  // namespace

SyntheticClip make_clip(const ClipSpec& s) {
  if (s.width < 16 || s.height < 16 || s.frames < 1 || !(s.radius > 0))
    throw InvalidArgument("make_clip: clip must be at least 16x16 with one frame and a positive radius");
  const int w = s.width, h = s.height;
  const Sign sign{w * 3 / 4 - w / 10, h / 8, w * 3 / 4 + w / 10, h / 8 + h / 6};

  // Static background: smooth color waves plus fixed per-pixel grain.
  PixelGrid base(w, h, 3);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double wave = 0.05 * std::sin(x * 0.11 + 0.7 * std::sin(y * 0.05)) + 0.04 * std::cos(y * 0.09 - x * 0.03);
      if (s.distractor && sign.contains(x, y)) {
        // Stripes at the two extremes of the background's own color wave.
        const bool stripe = ((x - sign.x0) / 6 + (y - sign.y0) / 6) % 2 == 0;
        wave = stripe ? 0.09 : -0.09;
      }
      const double grain = 0.06 * (unit_double(counter_hash(s.seed, 1, static_cast<std::uint64_t>(y) * w + x)) - 0.5);
      const double rgb[3] = {0.22 + wave + grain, 0.30 + 0.8 * wave + grain, 0.26 - 0.5 * wave + grain};
      for (int c = 0; c < 3; ++c) base.at(x, y, c) = rgb[c];
    }

  SyntheticClip clip;
  for (int t = 0; t < s.frames; ++t) {
    const bool hidden = s.occlusion_start >= 0 && t >= s.occlusion_start && t < s.occlusion_start + s.occlusion_length;
    const auto [cx, cy] = disk_center(s, t);
    PixelGrid f(w, h, 3);
    LabelField truth(w, h, 0, static_cast<std::size_t>(t));
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        const double dx = x - cx, dy = y - cy;
        const bool inside = !hidden && dx * dx + dy * dy <= s.radius * s.radius;
        truth.at(x, y) = inside;
        const std::uint64_t key = (static_cast<std::uint64_t>(t) << 32) | (static_cast<std::uint64_t>(y) * w + x);
        for (int c = 0; c < 3; ++c) {
          double v = base.at(x, y, c);
          if (inside) {
            const double shade = 0.06 * (dx + dy) / s.radius;
            static constexpr double kDisk[3] = {0.96, 0.84, 0.30};
            v = kDisk[c] - shade;
          }
          v += s.noise * (2.0 * unit_double(counter_hash(s.seed, 2 + c, key)) - 1.0);
          f.at(x, y, c) = quantize(v);
        }
      }
    clip.frames.push_back(std::move(f));
    clip.truth.push_back(std::move(truth));
  }

  // Scribbles on frame 0: a lattice inside the disk and a sparse one outside.
  const auto [cx, cy] = disk_center(s, 0);
  for (int y = 0; y < h; y += 4)
    for (int x = 0; x < w; x += 4) {
      const double d = std::hypot(x - cx, y - cy);
      if (d <= 0.6 * s.radius)
        clip.seeds.push_back({x, y, 1});
      else if (x % 16 == 0 && y % 16 == 0 && d > s.radius + 6.0)
        clip.seeds.push_back({x, y, 0});
    }
  return clip;
}

void write_clip(const SyntheticClip& clip, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir / "frames", ec);
  std::filesystem::create_directories(dir / "truth", ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  for (std::size_t t = 0; t < clip.frames.size(); ++t) {
    save_rgb(clip.frames[t], dir / "frames" / frame_filename(t));
    save_mask(clip.truth[t], dir / "truth" / frame_filename(t));
  }
  write_seed_file(clip.seeds, dir / "seeds.txt");
}

}  // namespace salientcut
