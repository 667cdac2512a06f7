#include <random>

#include "doctest.h"
#include "oracle_values.hpp"
#include "salientcut/attention.hpp"
#include "salientcut/parallel.hpp"

using namespace salientcut;

namespace {

SaliencyMap observation(int w, int h, double v) { return SaliencyMap{PixelGrid(w, h, 1, v), 0}; }

StochasticSaliencyMap state(const PixelGrid& mean, double var) {
  return StochasticSaliencyMap{mean, PixelGrid(mean.width(), mean.height(), 1, var), 0};
}

std::size_t argmax(const PixelGrid& g) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < g.size(); ++i)
    if (g[i] > g[best]) best = i;
  return best;
}

}  // namespace

TEST_CASE("kalman: first observation initializes the state") {
  const StochasticSaliencyMap s = kalman_update_saliency(nullptr, observation(3, 2, 0.7), 1e-4, 1e-2);
  for (double v : s.mean.values()) CHECK(v == 0.7);
  for (double v : s.variance.values()) CHECK(v == 1e-2);
  CHECK_THROWS_AS(kalman_update_saliency(nullptr, observation(3, 2, 0.7), 0.0, 1e-2), InvalidArgument);
  CHECK_THROWS_AS(kalman_update_saliency(&s, observation(2, 2, 0.7), 1e-4, 1e-2), InvalidArgument);
}

TEST_CASE("kalman: zero innovation keeps the mean and shrinks the variance") {
  StochasticSaliencyMap s = kalman_update_saliency(nullptr, observation(4, 4, 0.3), 1e-4, 1e-2);
  for (int t = 0; t < 5; ++t) {
    const StochasticSaliencyMap n = kalman_update_saliency(&s, observation(4, 4, 0.3), 1e-4, 1e-2);
    for (std::size_t i = 0; i < n.mean.size(); ++i) {
      CHECK(n.mean[i] == doctest::Approx(0.3).epsilon(1e-15));
      CHECK(n.variance[i] < s.variance[i] + 1e-4);
      CHECK(n.variance[i] > 0.0);
    }
    s = n;
  }
}

TEST_CASE("kalman: variance converges to the Riccati limit") {
  StochasticSaliencyMap s = kalman_update_saliency(nullptr, observation(2, 2, 0.0), 1e-4, 1e-2);
  for (int t = 0; t < 2000; ++t) s = kalman_update_saliency(&s, observation(2, 2, 0.0), 1e-4, 1e-2);
  for (double v : s.variance.values()) CHECK(std::abs(v - oracle::kKalmanVarianceLimit) < 1e-10);
}

TEST_CASE("kalman: mean stays between the previous mean and the observation") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0, 1);
  PixelGrid m(10, 10), z(10, 10);
  for (double& v : m.values()) v = u(rng);
  for (double& v : z.values()) v = u(rng);
  const StochasticSaliencyMap prev = state(m, 0.02);
  const StochasticSaliencyMap n = kalman_update_saliency(&prev, SaliencyMap{z, 1}, 1e-3, 1e-2);
  for (std::size_t i = 0; i < m.size(); ++i) {
    CHECK(n.mean[i] >= std::min(m[i], z[i]) - 1e-15);
    CHECK(n.mean[i] <= std::max(m[i], z[i]) + 1e-15);
  }
}

TEST_CASE("efdm: density is a distribution") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 10; ++trial) {
    const int w = 5 + static_cast<int>(rng() % 60), h = 5 + static_cast<int>(rng() % 60);
    PixelGrid m(w, h);
    for (double& v : m.values()) v = u(rng);
    const auto e = compute_efdm(state(m, 0.01 * u(rng) + 1e-4), 256, trial, 1 + trial % 4);
    REQUIRE(e.has_value());
    CHECK(e->density.width() == w);
    CHECK(e->density.height() == h);
    double sum = 0.0;
    for (double v : e->density.values()) {
      CHECK(v >= 0.0);
      sum += v;
    }
    CHECK(std::abs(sum - 1.0) <= 1e-6);
  }
  const Efdm uni = uniform_efdm(4, 5);
  for (double v : uni.density.values()) CHECK(v == doctest::Approx(0.05));
}

TEST_CASE("efdm: two-pixel win probability") {
  PixelGrid m(2, 1);
  m[0] = 0.6;
  m[1] = 0.4;
  const auto e = compute_efdm(state(m, 0.01), 100000, 99, 1);
  REQUIRE(e.has_value());
  CHECK(std::abs(e->density[0] - oracle::kTwoPixelWinProbability) <= 0.01);
}

TEST_CASE("efdm: a constant shift leaves the density unchanged") {
  std::mt19937_64 rng(5);
  PixelGrid m(32, 24), shifted(32, 24);
  // Multiples of 1/64 so that adding 0.25 is exact.
  for (std::size_t i = 0; i < m.size(); ++i) {
    m[i] = static_cast<double>(rng() % 64) / 64.0;
    shifted[i] = m[i] + 0.25;
  }
  const auto a = compute_efdm(state(m, 0.003), 512, 17, 2);
  const auto b = compute_efdm(state(shifted, 0.003), 512, 17, 2);
  REQUIRE(a.has_value());
  REQUIRE(b.has_value());
  CHECK(argmax(a->density) == argmax(b->density));
  CHECK(a->density == b->density);
}

TEST_CASE("efdm: seeded determinism across worker counts") {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0, 1);
  PixelGrid m(40, 30);
  for (double& v : m.values()) v = u(rng);
  set_worker_count(1);
  const auto a = compute_efdm(state(m, 0.01), 300, 5);
  set_worker_count(8);
  const auto b = compute_efdm(state(m, 0.01), 300, 5);
  set_worker_count(1);
  REQUIRE(a.has_value());
  REQUIRE(b.has_value());
  CHECK(a->density == b->density);
  const auto c = compute_efdm(state(m, 0.01), 300, 6);
  CHECK(c->density != a->density);
}

TEST_CASE("efdm: a dominant pixel takes the mass") {
  PixelGrid m(9, 7);
  m.at(6, 2) = 1.0;
  const auto e = compute_efdm(state(m, 1e-4), 200, 1, 1);
  REQUIRE(e.has_value());
  CHECK(e->density.at(6, 2) == doctest::Approx(1.0));
}

TEST_CASE("efdm: degenerate states and bad arguments") {
  CHECK_FALSE(compute_efdm(state(PixelGrid(6, 6, 1, 0.4), 0.0), 64, 1).has_value());
  CHECK(compute_efdm(state(PixelGrid(6, 6, 1, 0.4), 0.01), 64, 1).has_value());
  CHECK_THROWS_AS(compute_efdm(state(PixelGrid(6, 6), 0.01), 0, 1), InvalidArgument);
  CHECK_THROWS_AS(compute_efdm(state(PixelGrid(6, 6), 0.01), 8, 1, 0), InvalidArgument);
}
