#include "salientcut/prior.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "gmm_impl.hpp"
#include "salientcut/imageio.hpp"
#include "salientcut/parallel.hpp"

namespace salientcut {

namespace {

constexpr std::size_t kMaxSpatialSamples = 4096;

struct MassPoint {
  double x, y, m;
};

std::vector<MassPoint> positive_mass(const PixelGrid& density) {
  std::vector<MassPoint> pts;
  for (int y = 0; y < density.height(); ++y)
    for (int x = 0; x < density.width(); ++x)
      if (const double m = density.at(x, y); m > 0.0) pts.push_back({double(x), double(y), m});
  return pts;
}

// Merge the mass inside b x b blocks into one point at its centroid.
std::vector<MassPoint> aggregate(const PixelGrid& density, int block) {
  const int w = density.width(), h = density.height();
  const int gw = (w + block - 1) / block, gh = (h + block - 1) / block;
  std::vector<MassPoint> acc(static_cast<std::size_t>(gw) * gh, MassPoint{0, 0, 0});
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const double m = density.at(x, y);
      if (m <= 0.0) continue;
      auto& p = acc[static_cast<std::size_t>(y / block) * gw + x / block];
      p.x += m * x;
      p.y += m * y;
      p.m += m;
    }
  std::vector<MassPoint> pts;
  for (const auto& p : acc)
    if (p.m > 0.0) pts.push_back({p.x / p.m, p.y / p.m, p.m});
  return pts;
}

}  // namespace

void clamp_probability(PixelGrid& grid) {
  for (double& v : grid.values()) v = std::clamp(v, kPriorEpsilon, 1.0 - kPriorEpsilon);
}

FusionWeights fusion_weights(double sigma1, double sigma2, double xi_variance, KalmanConvention convention) {
  double s1 = sigma1 * sigma1, s2 = sigma2 * sigma2;
  if (convention == KalmanConvention::standard) std::swap(s1, s2);
  const double denom = s1 + s2 + xi_variance;
  FusionWeights fw;
  fw.weight_mask = s1 / denom;
  fw.weight_saliency = 1.0 - fw.weight_mask;
  fw.next_variance = s1 * (s2 + xi_variance) / denom;
  return fw;
}

double xi_variance_fixed_point(double sigma1, double sigma2) {
  const double s1 = sigma1 * sigma1, s2 = sigma2 * sigma2;
  // v = 2 s1 s2 / (s2 + sqrt(s2^2 + 4 s1 s2)): cancellation-free form of the root
  return 2.0 * s1 * s2 / (s2 + std::sqrt(s2 * s2 + 4.0 * s1 * s2));
}

PixelGrid saliency_prior(const Efdm& efdm, int components, const UpdateParams& params, std::uint64_t seed) {
  if (components < 1) throw InvalidArgument("saliency_prior: components must be >= 1");
  const PixelGrid& d = efdm.density;
  if (d.channels() != 1 || d.empty()) throw InvalidArgument("saliency_prior: malformed EFDM");
  const int w = d.width(), h = d.height();

  std::vector<MassPoint> pts = positive_mass(d);
  for (int block = 2; pts.size() > kMaxSpatialSamples; block *= 2) pts = aggregate(d, block);
  if (pts.empty()) throw InvalidArgument("saliency_prior: EFDM carries no mass");

  std::vector<gmm::Vec<2>> xs;
  std::vector<double> ws;
  xs.reserve(pts.size());
  ws.reserve(pts.size());
  for (const auto& p : pts) {
    xs.emplace_back(p.x, p.y);
    ws.push_back(p.m);
  }
  const double floor_sd = params.spatial_sigma_frac * std::min(w, h);
  gmm::FitOptions opt;
  opt.ridge = std::max(floor_sd * floor_sd, 1e-6);
  const gmm::Mixture<2> mix = gmm::fit<2>(xs, std::move(ws), components, seed, opt);
  const gmm::Evaluator<2> ev(mix);

  PixelGrid prior(w, h);
  parallel_for(0, static_cast<std::size_t>(h), 8, [&](std::size_t y0, std::size_t y1) {
    for (std::size_t y = y0; y < y1; ++y)
      for (int x = 0; x < w; ++x) prior.at(x, static_cast<int>(y)) = std::exp(ev.log_density({double(x), double(y)}));
  });
  double peak = 0.0;
  for (double v : prior.values()) peak = std::max(peak, v);
  if (peak > 0.0) {
    const double s = params.prior_scale_max / peak;
    for (double& v : prior.values()) v *= s;
  }
  const int band = std::max(0, params.edge_band);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      if (x < band || y < band || x >= w - band || y >= h - band) prior.at(x, y) = kPriorEpsilon;
  clamp_probability(prior);
  return prior;
}

PixelGrid mask_to_gray(const LabelField& mask, int radius) {
  if (radius < 0) throw InvalidArgument("mask_to_gray: radius must be >= 0");
  PixelGrid g = mask.to_grid();
  if (radius == 0) return g;
  const std::vector<double> taps = gaussian_taps(radius / 2.0);
  PixelGrid out = convolve_separable(g, taps, taps);
  for (double& v : out.values()) v = std::clamp(v, 0.0, 1.0);
  return out;
}

PriorState update_prior(const PriorState& prev_state, const LabelField& prev_mask, const PixelGrid& q,
                        const UpdateParams& params) {
  if (!(params.sigma1 > 0.0) || !(params.sigma2 > 0.0))
    throw InvalidArgument("update_prior: sigma1 and sigma2 must be positive");
  if (!(prev_state.xi_variance >= 0.0) || !std::isfinite(prev_state.xi_variance))
    throw InvalidArgument("update_prior: xi_variance must be finite and >= 0");
  if (q.channels() != 1 || !q.same_size(prev_mask.width, prev_mask.height) ||
      (!prev_state.prior.empty() && !prev_state.prior.same_shape(q)))
    throw InvalidArgument("update_prior: grid sizes differ");
  const PixelGrid f = mask_to_gray(prev_mask, params.smoothing_radius);
  const FusionWeights fw = fusion_weights(params.sigma1, params.sigma2, prev_state.xi_variance, params.convention);
  PriorState next;
  next.frame_index = prev_state.frame_index + 1;
  next.xi_variance = fw.next_variance;
  next.prior = PixelGrid(q.width(), q.height());
  for (std::size_t i = 0; i < q.size(); ++i) next.prior[i] = fw.weight_mask * f[i] + fw.weight_saliency * q[i];
  clamp_probability(next.prior);
  return next;
}

PixelGrid manual_prior(const std::vector<Seed>& seeds, int width, int height) {
  if (width < 1 || height < 1) throw InvalidArgument("manual_prior: shape must be positive");
  PixelGrid p(width, height, 1, 0.5);
  for (const auto& s : seeds) {
    if (s.x < 0 || s.y < 0 || s.x >= width || s.y >= height)
      throw InvalidArgument("manual_prior: seed (" + std::to_string(s.x) + "," + std::to_string(s.y) +
                            ") outside " + std::to_string(width) + "x" + std::to_string(height));
    if (s.label != 0 && s.label != 1) throw InvalidArgument("manual_prior: seed label must be 0 or 1");
    p.at(s.x, s.y) = s.label == 1 ? 1.0 - kPriorEpsilon : kPriorEpsilon;
  }
  return p;
}

std::vector<Seed> read_seed_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open seed file " + path.string());
  std::vector<Seed> seeds;
  std::string line;
  for (int lineno = 1; std::getline(in, line); ++lineno) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ss(line);
    Seed s{};
    std::string extra;
    if (!(ss >> s.x >> s.y >> s.label) || (ss >> extra) || (s.label != 0 && s.label != 1))
      throw InvalidArgument(path.string() + ":" + std::to_string(lineno) + ": expected `x y label` with label 0 or 1");
    seeds.push_back(s);
  }
  return seeds;
}

void write_seed_file(const std::vector<Seed>& seeds, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write seed file " + path.string());
  for (const auto& s : seeds) out << s.x << ' ' << s.y << ' ' << s.label << '\n';
}

}  // namespace salientcut
