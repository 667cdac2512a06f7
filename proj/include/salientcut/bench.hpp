#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "salientcut/config.hpp"
#include "salientcut/pipeline.hpp"

namespace salientcut {

struct StageStats {
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
};

/// Per-frame timing summary in milliseconds.
struct BenchReport {
  static constexpr std::array<std::string_view, 5> kStageNames{"VA", "priors", "t-link", "graphcuts", "misc"};

  int width = 0;
  int height = 0;
  std::size_t frames = 0;  // measured frames (after warmup)
  std::size_t workers = 0;
  std::array<StageStats, 5> stages{};  // in kStageNames order
  StageStats total;

  double frames_per_second() const { return total.mean > 0 ? 1000.0 / total.mean : 0.0; }
  double ms_per_pixel(std::size_t stage) const {
    return stages[stage].mean / (static_cast<double>(width) * static_cast<double>(height));
  }
};

BenchReport summarize_times(const std::vector<StageTimes>& times, int width, int height, std::size_t workers);

/// Runs the `update` pipeline over `frames`, discarding the first `warmup`
/// frames from the statistics.
BenchReport run_bench(const std::vector<PixelGrid>& frames, const SegConfig& cfg, std::size_t warmup);

std::string to_json(const std::vector<BenchReport>& reports);

}  // namespace salientcut
