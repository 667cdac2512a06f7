#include <random>

#include "doctest.h"
#include "salientcut/imageio.hpp"
#include "salientcut/parallel.hpp"
#include "salientcut/saliency.hpp"

using namespace salientcut;

namespace {

PixelGrid square_frame(int size, int x0, int y0, int side, double fg = 1.0) {
  PixelGrid f(size, size, 3);
  for (int y = y0; y < y0 + side; ++y)
    for (int x = x0; x < x0 + side; ++x)
      for (int c = 0; c < 3; ++c) f.at(x, y, c) = fg;
  return f;
}

// Quarter turn: out(x, y) = in(y, W - 1 - x) maps a W x H grid to H x W.
PixelGrid rotate90(const PixelGrid& g) {
  PixelGrid out(g.height(), g.width(), g.channels());
  for (int y = 0; y < out.height(); ++y)
    for (int x = 0; x < out.width(); ++x)
      for (int c = 0; c < g.channels(); ++c) out.at(x, y, c) = g.at(g.width() - 1 - y, x, c);
  return out;
}

}  // namespace

TEST_CASE("opponent channels vanish on gray frames and motion on repeated frames") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0, 1);
  PixelGrid gray(20, 12, 3);
  for (int y = 0; y < 12; ++y)
    for (int x = 0; x < 20; ++x) {
      const double v = u(rng);
      for (int c = 0; c < 3; ++c) gray.at(x, y, c) = v;
    }
  const ChannelSet ch = extract_channels(gray, &gray);
  for (double v : ch.red_green.values()) CHECK(v == 0.0);
  for (double v : ch.blue_yellow.values()) CHECK(v == 0.0);
  for (double v : ch.motion.values()) CHECK(v == 0.0);
  const ChannelSet still = extract_channels(gray);
  for (double v : still.motion.values()) CHECK(v == 0.0);
}

TEST_CASE("opponent formula on a pure red pixel") {
  PixelGrid f(1, 1, 3);
  f.at(0, 0, 0) = 1.0;
  const ChannelSet ch = extract_channels(f);
  const double intensity = 1.0 / 3.0;
  CHECK(ch.intensity[0] == doctest::Approx(intensity));
  CHECK(ch.red_green[0] * intensity == doctest::Approx(1.0));
  CHECK(ch.blue_yellow[0] * intensity == doctest::Approx(-0.5));

  PixelGrid dark(1, 1, 3, 0.05);
  dark.at(0, 0, 0) = 0.1;
  const ChannelSet dc = extract_channels(dark);
  CHECK(dc.red_green[0] == 0.0);
  CHECK(dc.blue_yellow[0] == 0.0);

  PixelGrid other(2, 1, 3);
  CHECK_THROWS_AS(extract_channels(f, &other), InvalidArgument);
}

TEST_CASE("orientation kernels are exact quarter turns of each other") {
  const auto& k = orientation_kernels();
  for (int pair = 0; pair < 2; ++pair) {
    const FilterKernel& a = k[static_cast<std::size_t>(pair)];
    const FilterKernel& b = k[static_cast<std::size_t>(pair + 2)];
    REQUIRE(a.rows() == 9);
    REQUIRE(a.cols() == 9);
    double sum = 0;
    for (int r = 0; r < 9; ++r)
      for (int c = 0; c < 9; ++c) {
        // Responses are used in magnitude, so the turn direction is immaterial.
        CHECK(b(r, c) == a(8 - c, r));
        sum += a(r, c);
      }
    CHECK(std::abs(sum) < 1e-12);
  }
}

TEST_CASE("center_surround: counts, constants and the two-scale difference") {
  const Pyramid flat = build_pyramid(PixelGrid(64, 64, 1, 0.4), 6);
  const auto maps = center_surround(flat, {1}, {3, 4});
  CHECK(maps.size() == 2);
  for (const auto& m : maps)
    for (double v : m.values()) CHECK(v == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(center_surround(flat, {0, 1}, {3, 4}).size() == 4);
  CHECK_THROWS_AS(center_surround(flat, {2}, {4}), InvalidArgument);

  PixelGrid sq(128, 128);
  for (int y = 60; y < 68; ++y)
    for (int x = 60; x < 68; ++x) sq.at(x, y) = 1.0;
  const Pyramid pyr = build_pyramid(sq, 6);
  const auto cs = center_surround(pyr, {2}, {3});
  REQUIRE(cs.size() == 1);
  const PixelGrid& m = cs[0];
  const PixelGrid up = resize_bilinear(pyr[5], pyr[2].width(), pyr[2].height());
  double best = -1;
  int bx = 0, by = 0;
  for (int y = 0; y < m.height(); ++y)
    for (int x = 0; x < m.width(); ++x) {
      CHECK(m.at(x, y) == doctest::Approx(std::abs(up.at(x, y) - pyr[2].at(x, y))).epsilon(1e-12));
      if (m.at(x, y) > best) {
        best = m.at(x, y);
        bx = x;
        by = y;
      }
    }
  // Square occupies level-2 pixels 15..16; the response peaks on it.
  CHECK(bx >= 14);
  CHECK(bx <= 17);
  CHECK(by >= 14);
  CHECK(by <= 17);
}

TEST_CASE("normalize_map promotes single peaks and suppresses ties") {
  const PixelGrid flat = normalize_map(PixelGrid(30, 30, 1, 2.0));
  for (double v : flat.values()) CHECK(v == 0.0);

  PixelGrid single(40, 40);
  single.at(20, 20) = 5.0;
  const PixelGrid s = normalize_map(single);
  CHECK(s.at(20, 20) == doctest::Approx(1.0));

  PixelGrid two(40, 40);
  two.at(5, 5) = 1.0;
  two.at(30, 30) = 1.0;
  const PixelGrid tied = normalize_map(two);
  for (double v : tied.values()) CHECK(v == 0.0);

  PixelGrid three(60, 20);
  three.at(5, 10) = 1.0;
  three.at(25, 10) = 0.5;
  three.at(45, 10) = 0.5;
  const PixelGrid t = normalize_map(three);
  CHECK(t.at(5, 10) == doctest::Approx(0.25));  // (1 - 0.5)^2
}

TEST_CASE("compute_saliency: flat frames, static and moving squares") {
  const SaliencyMap flat = compute_saliency(PixelGrid(64, 64, 3, 0.5));
  for (double v : flat.values.values()) CHECK(v == 0.0);

  const PixelGrid still = square_frame(64, 20, 24, 12);
  const SaliencyMap s = compute_saliency(still);
  double best = -1;
  int bx = 0, by = 0;
  for (int y = 0; y < 64; ++y)
    for (int x = 0; x < 64; ++x) {
      const double v = s.values.at(x, y);
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
      if (v > best) {
        best = v;
        bx = x;
        by = y;
      }
    }
  CHECK(best == 1.0);
  const auto [centers, deltas] = effective_scales(64, 64, SaliencyParams{});
  const int reach = 1 << (*std::max_element(centers.begin(), centers.end()) +
                          *std::max_element(deltas.begin(), deltas.end()));
  CHECK(bx >= 20 - reach);
  CHECK(bx < 32 + reach);
  CHECK(by >= 24 - reach);
  CHECK(by < 36 + reach);
  // Tighter than the contract: the peak sits on the square itself.
  CHECK(bx >= 16);
  CHECK(bx < 36);
  CHECK(by >= 20);
  CHECK(by < 40);

  // Paired runs with the same frame: static vs. displaced previous frame.
  const PixelGrid before = square_frame(64, 16, 24, 12);
  const SaliencyMap moving = compute_saliency(still, &before);
  const SaliencyMap steady = compute_saliency(still, &still);
  double sum_moving = 0, sum_steady = 0;
  for (int y = 24; y < 36; ++y)
    for (int x = 20; x < 32; ++x) {
      sum_moving += moving.values.at(x, y);
      sum_steady += steady.values.at(x, y);
    }
  CHECK(sum_moving > sum_steady);
}

TEST_CASE("compute_saliency commutes with quarter turns") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0, 1);
  PixelGrid f(64, 64, 3), prev(64, 64, 3);
  for (double& v : f.values()) v = u(rng) * 0.3;
  for (int y = 10; y < 26; ++y)
    for (int x = 36; x < 50; ++x) f.at(x, y, 0) = 0.9;
  for (std::size_t i = 0; i < prev.size(); ++i) prev[i] = f[i] * 0.9;
  const SaliencyMap a = compute_saliency(rotate90(f), nullptr);
  const PixelGrid b = rotate90(compute_saliency(f, nullptr).values);
  const PixelGrid prev_turned = rotate90(prev);
  const SaliencyMap am = compute_saliency(rotate90(f), &prev_turned);
  const PixelGrid bm = rotate90(compute_saliency(f, &prev).values);
  for (std::size_t i = 0; i < b.size(); ++i) {
    CHECK(std::abs(a.values[i] - b[i]) <= 1e-6);
    CHECK(std::abs(am.values[i] - bm[i]) <= 1e-6);
  }
}

TEST_CASE("compute_saliency is identical across worker counts") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0, 1);
  PixelGrid f(96, 80, 3), prev(96, 80, 3);
  for (double& v : f.values()) v = u(rng);
  for (double& v : prev.values()) v = u(rng);
  set_worker_count(1);
  const SaliencyMap one = compute_saliency(f, &prev);
  set_worker_count(8);
  const SaliencyMap eight = compute_saliency(f, &prev);
  set_worker_count(1);
  CHECK(one.values == eight.values);
}
