#include "salientcut/appearance.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gmm_impl.hpp"
#include "salientcut/parallel.hpp"
#include "salientcut/random.hpp"

namespace salientcut {

namespace {

gmm::Mixture<3> to_mixture(const GmmModel& m) {
  gmm::Mixture<3> mix;
  for (const auto& c : m.components) {
    gmm::Component<3> g;
    g.weight = c.weight;
    g.mean = gmm::Vec<3>(c.mean[0], c.mean[1], c.mean[2]);
    for (int r = 0; r < 3; ++r)
      for (int k = 0; k < 3; ++k) g.cov(r, k) = c.cov[static_cast<std::size_t>(r * 3 + k)];
    mix.components.push_back(g);
  }
  return mix;
}

GmmModel from_mixture(const gmm::Mixture<3>& mix) {
  GmmModel m;
  for (const auto& g : mix.components) {
    GaussianComponent c;
    c.weight = g.weight;
    for (int r = 0; r < 3; ++r) {
      c.mean[static_cast<std::size_t>(r)] = g.mean(r);
      for (int k = 0; k < 3; ++k) c.cov[static_cast<std::size_t>(r * 3 + k)] = g.cov(r, k);
    }
    m.components.push_back(c);
  }
  return m;
}

struct WeightedSamples {
  std::vector<Rgb> colors;
  std::vector<double> weights;
};

// Systematic resampling proportional to weight; repeated picks of the same
// pixel are merged into one sample whose weight is the pick count.
WeightedSamples resample(const PixelGrid& frame, const std::vector<double>& w, std::size_t budget,
                         std::uint64_t seed) {
  WeightedSamples out;
  const std::size_t n = w.size();
  std::size_t positive = 0;
  for (double v : w) positive += v > 0.0;
  if (positive <= budget) {
    for (std::size_t i = 0; i < n; ++i)
      if (w[i] > 0.0) {
        out.colors.push_back({frame[3 * i], frame[3 * i + 1], frame[3 * i + 2]});
        out.weights.push_back(w[i]);
      }
    return out;
  }
  double total = 0.0;
  for (double v : w) total += v;
  const double step = total / static_cast<double>(budget);
  double pos = unit_double(mix64(seed)) * step;
  double run = 0.0;
  std::size_t picked = 0;
  for (std::size_t i = 0; i < n && picked < budget; ++i) {
    run += w[i];
    std::size_t count = 0;
    while (picked < budget && pos < run) {
      ++count;
      ++picked;
      pos = (static_cast<double>(picked) + unit_double(mix64(seed))) * step;
    }
    if (count) {
      out.colors.push_back({frame[3 * i], frame[3 * i + 1], frame[3 * i + 2]});
      out.weights.push_back(static_cast<double>(count));
    }
  }
  return out;
}

}  // namespace

double GmmModel::log_density(const Rgb& c) const {
  const gmm::Evaluator<3> ev(to_mixture(*this));
  return ev.log_density(gmm::Vec<3>(c[0], c[1], c[2]));
}

GmmModel fit_weighted_gmm(std::span<const Rgb> pixels, std::span<const double> weights, int components,
                          std::uint64_t seed, EmTrace* trace) {
  if (pixels.size() != weights.size())
    throw InvalidArgument("fit_weighted_gmm: pixel and weight counts differ");
  if (components < 1) throw InvalidArgument("fit_weighted_gmm: M must be >= 1");
  std::size_t positive = 0;
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw InvalidArgument("fit_weighted_gmm: weights must be finite and >= 0");
    positive += w > 0.0;
    total += w;
  }
  if (!(total > 0.0)) throw InvalidArgument("fit_weighted_gmm: all weights are zero");
  if (static_cast<std::size_t>(components) > positive)
    throw InvalidArgument("fit_weighted_gmm: M = " + std::to_string(components) + " exceeds the " +
                          std::to_string(positive) + " samples with positive weight");

  std::vector<std::size_t> order;
  order.reserve(positive);
  for (std::size_t i = 0; i < weights.size(); ++i)
    if (weights[i] > 0.0) order.push_back(i);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (pixels[a] != pixels[b]) return pixels[a] < pixels[b];
    return weights[a] < weights[b];
  });
  std::vector<gmm::Vec<3>> xs;
  std::vector<double> ws;
  xs.reserve(order.size());
  ws.reserve(order.size());
  for (std::size_t i : order) {
    xs.emplace_back(pixels[i][0], pixels[i][1], pixels[i][2]);
    ws.push_back(weights[i]);
  }
  gmm::FitOptions opt;
  opt.ridge = kColorRidge;
  opt.ridge_as_floor = true;
  gmm::FitTrace ft;
  const gmm::Mixture<3> mix = gmm::fit<3>(xs, std::move(ws), components, seed, opt, &ft);
  if (trace) trace->log_likelihood = std::move(ft.log_likelihood);
  return from_mixture(mix);
}

LikelihoodMaps nll_maps(const PixelGrid& frame, const GmmModel& obj, const GmmModel& bkg) {
  if (frame.channels() != 3) throw InvalidArgument("nll_maps: frame must be RGB");
  const gmm::Evaluator<3> eo(to_mixture(obj)), eb(to_mixture(bkg));
  const double cap = -std::log(kDensityFloor);
  LikelihoodMaps out{PixelGrid(frame.width(), frame.height()), PixelGrid(frame.width(), frame.height())};
  parallel_for(0, frame.pixel_count(), 4096, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      const gmm::Vec<3> c(frame[3 * i], frame[3 * i + 1], frame[3 * i + 2]);
      const double lo_obj = eo.log_density(c), lo_bkg = eb.log_density(c);
      out.obj_nll[i] = std::isfinite(lo_obj) ? std::min(cap, -lo_obj) : cap;
      out.bkg_nll[i] = std::isfinite(lo_bkg) ? std::min(cap, -lo_bkg) : cap;
    }
  });
  return out;
}

std::size_t color_sample_budget(std::size_t pixels) {
  return std::min(pixels, std::clamp<std::size_t>(pixels / 16, 2000, kMaxColorSamples));
}

std::pair<GmmModel, GmmModel> build_models(const PixelGrid& frame, const PixelGrid& prior, int components,
                                           std::uint64_t seed) {
  if (frame.channels() != 3) throw InvalidArgument("build_models: frame must be RGB");
  if (prior.channels() != 1 || !prior.same_size(frame.width(), frame.height()))
    throw InvalidArgument("build_models: prior and frame sizes differ");
  const std::size_t n = frame.pixel_count();
  const std::size_t budget = color_sample_budget(n);
  std::vector<double> wo(n), wb(n);
  for (std::size_t i = 0; i < n; ++i) {
    wo[i] = prior[i];
    wb[i] = 1.0 - prior[i];
  }
  const WeightedSamples so = resample(frame, wo, budget, counter_hash(seed, 1, 0));
  const WeightedSamples sb = resample(frame, wb, budget, counter_hash(seed, 2, 0));
  const auto fit_count = [&](const WeightedSamples& s) {
    return std::min(components, static_cast<int>(s.colors.size()));
  };
  GmmModel obj = fit_weighted_gmm(so.colors, so.weights, fit_count(so), counter_hash(seed, 1, 1));
  GmmModel bkg = fit_weighted_gmm(sb.colors, sb.weights, fit_count(sb), counter_hash(seed, 2, 1));
  return {std::move(obj), std::move(bkg)};
}

}  // namespace salientcut
