#include "salientcut/attention.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "salientcut/imageio.hpp"
#include "salientcut/parallel.hpp"
#include "salientcut/random.hpp"

namespace salientcut {

StochasticSaliencyMap kalman_update_saliency(const StochasticSaliencyMap* prev, const SaliencyMap& obs,
                                             double q_var, double r_var) {
  if (!(q_var > 0.0) || !(r_var > 0.0))
    throw InvalidArgument("kalman_update_saliency: q_var and r_var must be positive");
  const PixelGrid& z = obs.values;
  StochasticSaliencyMap out;
  out.frame_index = obs.frame_index;
  if (prev == nullptr) {
    out.mean = z;
    out.variance = PixelGrid(z.width(), z.height(), 1, r_var);
    return out;
  }
  if (!prev->mean.same_shape(z) || !prev->variance.same_shape(z))
    throw InvalidArgument("kalman_update_saliency: state and observation sizes differ");
  out.mean = PixelGrid(z.width(), z.height());
  out.variance = PixelGrid(z.width(), z.height());
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double p_pred = prev->variance[i] + q_var;
    const double gain = p_pred / (p_pred + r_var);
    out.mean[i] = prev->mean[i] + gain * (z[i] - prev->mean[i]);
    out.variance[i] = (1.0 - gain) * p_pred;
  }
  return out;
}

Efdm uniform_efdm(int width, int height) {
  const double v = 1.0 / (static_cast<double>(width) * height);
  return Efdm{PixelGrid(width, height, 1, v)};
}

std::optional<Efdm> compute_efdm(const StochasticSaliencyMap& ssm, std::size_t samples, std::uint64_t seed,
                                 int decimation) {
  if (samples < 1) throw InvalidArgument("compute_efdm: samples must be >= 1");
  if (decimation < 1) throw InvalidArgument("compute_efdm: decimation must be >= 1");
  if (!ssm.mean.same_shape(ssm.variance) || ssm.mean.channels() != 1 || ssm.mean.empty())
    throw InvalidArgument("compute_efdm: malformed stochastic saliency map");
  const int w = ssm.mean.width(), h = ssm.mean.height();
  const int gw = (w + decimation - 1) / decimation, gh = (h + decimation - 1) / decimation;
  const std::size_t cells = static_cast<std::size_t>(gw) * gh;

  std::vector<double> mean(cells, 0.0), sd(cells, 0.0);
  for (int gy = 0; gy < gh; ++gy) {
    for (int gx = 0; gx < gw; ++gx) {
      double sum = 0.0, vmax = 0.0;
      int n = 0;
      for (int y = gy * decimation; y < std::min(h, (gy + 1) * decimation); ++y)
        for (int x = gx * decimation; x < std::min(w, (gx + 1) * decimation); ++x) {
          sum += ssm.mean.at(x, y);
          vmax = std::max(vmax, ssm.variance.at(x, y));
          ++n;
        }
      const std::size_t c = static_cast<std::size_t>(gy) * gw + gx;
      mean[c] = sum / n;
      sd[c] = std::sqrt(vmax);
    }
  }
  // Degenerate on the undecimated input: block means of a constant field can
  // differ in the last bit.
  const auto means = ssm.mean.values();
  const auto vars = ssm.variance.values();
  const bool flat = std::all_of(means.begin(), means.end(), [&](double m) { return m == means[0]; });
  if (flat && std::all_of(vars.begin(), vars.end(), [](double v) { return v == 0.0; })) return std::nullopt;
  const double top = *std::max_element(mean.begin(), mean.end());
  // Centre on the top mean so a common offset cancels before sampling.
  for (double& m : mean) m -= top;

  constexpr std::size_t kDrawGrain = 8;
  const std::size_t chunks = (samples + kDrawGrain - 1) / kDrawGrain;
  std::vector<std::vector<std::uint32_t>> wins(chunks);
  parallel_for(0, chunks, 1, [&](std::size_t c0, std::size_t c1) {
    for (std::size_t ck = c0; ck < c1; ++ck) {
      std::vector<std::uint32_t> local(cells, 0);
      const std::size_t d_end = std::min(samples, (ck + 1) * kDrawGrain);
      for (std::size_t d = ck * kDrawGrain; d < d_end; ++d) {
        double best = -INFINITY;
        std::size_t arg = 0;
        for (std::size_t i = 0; i < cells; i += 2) {
          const auto [z0, z1] = normal_pair(seed, d, i);
          const double s0 = mean[i] + sd[i] * z0;
          if (s0 > best) {
            best = s0;
            arg = i;
          }
          if (i + 1 < cells) {
            const double s1 = mean[i + 1] + sd[i + 1] * z1;
            if (s1 > best) {
              best = s1;
              arg = i + 1;
            }
          }
        }
        ++local[arg];
      }
      wins[ck] = std::move(local);
    }
  });

  PixelGrid coarse(gw, gh);
  for (const auto& local : wins)
    for (std::size_t i = 0; i < cells; ++i) coarse[i] += local[i];
  for (double& v : coarse.values()) v /= static_cast<double>(samples);

  Efdm out{resize_bilinear(coarse, w, h)};
  double total = 0.0;
  for (double v : out.density.values()) total += v;
  for (double& v : out.density.values()) v /= total;
  return out;
}

}  // namespace salientcut
