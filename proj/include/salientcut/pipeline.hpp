#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "salientcut/attention.hpp"
#include "salientcut/config.hpp"
#include "salientcut/pixel_grid.hpp"
#include "salientcut/prior.hpp"

namespace salientcut {

enum class Strategy { manual, non_update, update };

std::string_view to_string(Strategy s);
/// Accepts "manual", "non-update", "non_update", "update".
Strategy parse_strategy(std::string_view name);

/// Wall-clock milliseconds spent in each stage of one frame.
struct StageTimes {
  double va = 0.0;         // saliency, stochastic saliency, EFDM
  double priors = 0.0;     // spatial prior and fusion
  double tlink = 0.0;      // color models, likelihoods, energy terms
  double graphcuts = 0.0;  // graph construction and max-flow
  double misc = 0.0;       // everything else
  double total = 0.0;
};

struct FrameResult {
  LabelField mask;
  PixelGrid prior;
  StageTimes times;
};

/// Frame-sequential segmentation for one strategy. Holds the temporal state
/// (previous frame, stochastic saliency, fused prior, previous mask).
class Segmenter {
 public:
  Segmenter(SegConfig cfg, Strategy strategy, std::vector<Seed> seeds = {});

  FrameResult process(const PixelGrid& frame);
  std::size_t frames_processed() const { return t_; }
  const SegConfig& config() const { return cfg_; }

 private:
  SegConfig cfg_;
  Strategy strategy_;
  std::vector<Seed> seeds_;
  std::size_t t_ = 0;
  std::optional<PixelGrid> prev_frame_;
  std::optional<StochasticSaliencyMap> ssm_;
  std::optional<PriorState> state_;
  std::optional<LabelField> prev_mask_;
};

}  // namespace salientcut
