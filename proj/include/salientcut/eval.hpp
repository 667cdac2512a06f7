#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "salientcut/config.hpp"
#include "salientcut/pipeline.hpp"
#include "salientcut/pixel_grid.hpp"

namespace salientcut {

struct Confusion {
  std::uint64_t tp = 0, tn = 0, fp = 0, fn = 0;
  double error = 0.0, recall = 1.0, precision = 1.0, f_value = 1.0;
};

/// Pooled counts over all frames plus the same metrics per frame.
struct MetricsReport : Confusion {
  std::vector<Confusion> per_frame;
};

/// Fills the derived ratios from the four counts. Recall is 1 when there are
/// no positives, precision is 1 when nothing is predicted, F is 0 when
/// recall + precision is 0. An empty confusion has error 0.
void finish_metrics(Confusion& c);

MetricsReport score(const std::vector<LabelField>& predicted, const std::vector<LabelField>& truth);

/// Mean fraction of pixels that change label between consecutive masks.
double stability(const std::vector<LabelField>& masks);

/// |a & b| / |a | b|; 1 when both are empty.
double iou(const LabelField& a, const LabelField& b);

std::string to_json(const MetricsReport& report);
/// Header plus one row per frame.
std::string to_csv(const MetricsReport& report);

/// Runs one strategy over a frame sequence. `seeds` is required (non-empty)
/// iff strategy == manual. When `times` is given, per-frame stage times are
/// appended to it.
std::vector<LabelField> run_strategy(const std::vector<PixelGrid>& frames, Strategy strategy, const SegConfig& cfg,
                                     const std::vector<Seed>* seeds = nullptr,
                                     std::vector<StageTimes>* times = nullptr);

}  // namespace salientcut
