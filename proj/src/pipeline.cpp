#include "salientcut/pipeline.hpp"

#include <chrono>

#include "salientcut/appearance.hpp"
#include "salientcut/mrf.hpp"
#include "salientcut/random.hpp"
#include "salientcut/saliency.hpp"

namespace salientcut {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

enum Stream : std::uint64_t { kEfdmStream = 1, kSpatialStream = 2, kColorStream = 3 };

}  // namespace

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::manual: return "manual";
    case Strategy::non_update: return "non-update";
    case Strategy::update: return "update";
  }
  return "update";
}

Strategy parse_strategy(std::string_view name) {
  if (name == "manual") return Strategy::manual;
  if (name == "non-update" || name == "non_update") return Strategy::non_update;
  if (name == "update") return Strategy::update;
  throw InvalidArgument("unknown strategy '" + std::string(name) + "' (expected manual, non-update or update)");
}

Segmenter::Segmenter(SegConfig cfg, Strategy strategy, std::vector<Seed> seeds)
    : cfg_(std::move(cfg)), strategy_(strategy), seeds_(std::move(seeds)) {
  validate(cfg_);
  if (strategy_ == Strategy::manual && seeds_.empty())
    throw InvalidArgument("manual strategy requires seeds");
}

FrameResult Segmenter::process(const PixelGrid& frame) {
  if (frame.channels() != 3 || frame.empty()) throw InvalidArgument("Segmenter: frame must be a non-empty RGB grid");
  if (prev_frame_ && !prev_frame_->same_shape(frame))
    throw InvalidArgument("Segmenter: frame size changed mid-sequence");
  const auto t_start = Clock::now();
  const int w = frame.width(), h = frame.height();
  const UpdateParams up = cfg_.update_params();
  FrameResult res;
  PixelGrid prior;
  // Manual first frame: color models come from the seed pixels alone.
  std::optional<std::pair<GmmModel, GmmModel>> models;

  if (strategy_ == Strategy::manual) {
    auto t0 = Clock::now();
    if (t_ == 0) {
      prior = manual_prior(seeds_, w, h);
      std::vector<Rgb> obj_px, bkg_px;
      for (const auto& s : seeds_) {
        const Rgb c{frame.at(s.x, s.y, 0), frame.at(s.x, s.y, 1), frame.at(s.x, s.y, 2)};
        (s.label ? obj_px : bkg_px).push_back(c);
      }
      if (obj_px.empty() || bkg_px.empty())
        throw InvalidArgument("manual strategy needs at least one object and one background seed");
      const std::uint64_t cs = frame_seed(cfg_.seed, t_, kColorStream);
      const std::vector<double> wo(obj_px.size(), 1.0), wb(bkg_px.size(), 1.0);
      const int mo = std::min<int>(cfg_.M, static_cast<int>(obj_px.size()));
      const int mb = std::min<int>(cfg_.M, static_cast<int>(bkg_px.size()));
      models.emplace(fit_weighted_gmm(obj_px, wo, mo, counter_hash(cs, 1, 1)),
                     fit_weighted_gmm(bkg_px, wb, mb, counter_hash(cs, 2, 1)));
    } else {
      prior = mask_to_gray(*prev_mask_, cfg_.smoothing_radius);
      clamp_probability(prior);
    }
    res.times.priors = ms_since(t0);
  } else {
    auto t0 = Clock::now();
    const SaliencyMap sal =
        compute_saliency(frame, prev_frame_ ? &*prev_frame_ : nullptr, cfg_.saliency_params(), t_);
    ssm_ = kalman_update_saliency(ssm_ ? &*ssm_ : nullptr, sal, cfg_.q_var, cfg_.r_var);
    std::optional<Efdm> efdm =
        compute_efdm(*ssm_, cfg_.efdm_samples, frame_seed(cfg_.seed, t_, kEfdmStream), cfg_.efdm_decimation);
    if (!efdm) efdm = uniform_efdm(w, h);
    res.times.va = ms_since(t0);

    t0 = Clock::now();
    PixelGrid q = saliency_prior(*efdm, cfg_.prior_components, up, frame_seed(cfg_.seed, t_, kSpatialStream));
    if (strategy_ == Strategy::update && state_ && prev_mask_) {
      state_ = update_prior(*state_, *prev_mask_, q, up);
    } else {
      state_ = PriorState{std::move(q), 0.0, t_};
    }
    prior = state_->prior;
    res.times.priors = ms_since(t0);
  }

  auto t0 = Clock::now();
  if (!models) models = build_models(frame, prior, cfg_.M, frame_seed(cfg_.seed, t_, kColorStream));
  const LikelihoodMaps lik = nll_maps(frame, models->first, models->second);
  const EnergyModel em = build_energy(frame, prior, lik, cfg_);
  res.times.tlink = ms_since(t0);

  t0 = Clock::now();
  LabelField mask = minimize_energy(em);
  mask.frame_index = t_;
  res.times.graphcuts = ms_since(t0);

  prev_mask_ = mask;
  prev_frame_ = frame;
  res.mask = std::move(mask);
  res.prior = std::move(prior);
  ++t_;
  res.times.total = ms_since(t_start);
  res.times.misc =
      std::max(0.0, res.times.total - res.times.va - res.times.priors - res.times.tlink - res.times.graphcuts);
  return res;
}

}  // namespace salientcut
