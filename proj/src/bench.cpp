#include "salientcut/bench.hpp"

#include <algorithm>
#include <limits>

#include "json.hpp"
#include "salientcut/parallel.hpp"

namespace salientcut {

BenchReport summarize_times(const std::vector<StageTimes>& times, int width, int height, std::size_t workers) {
  BenchReport r;
  r.width = width;
  r.height = height;
  r.frames = times.size();
  r.workers = workers;
  if (times.empty()) return r;
  auto stats = [&](auto get) {
    StageStats s{0.0, std::numeric_limits<double>::infinity(), 0.0};
    for (const auto& t : times) {
      const double v = get(t);
      s.mean += v;
      s.min = std::min(s.min, v);
      s.max = std::max(s.max, v);
    }
    s.mean /= static_cast<double>(times.size());
    return s;
  };
  r.stages[0] = stats([](const StageTimes& t) { return t.va; });
  r.stages[1] = stats([](const StageTimes& t) { return t.priors; });
  r.stages[2] = stats([](const StageTimes& t) { return t.tlink; });
  r.stages[3] = stats([](const StageTimes& t) { return t.graphcuts; });
  r.stages[4] = stats([](const StageTimes& t) { return t.misc; });
  r.total = stats([](const StageTimes& t) { return t.total; });
  return r;
}

BenchReport run_bench(const std::vector<PixelGrid>& frames, const SegConfig& cfg, std::size_t warmup) {
  if (frames.empty()) throw InvalidArgument("run_bench: no frames");
  if (warmup >= frames.size()) throw InvalidArgument("run_bench: warmup leaves no measured frames");
  Segmenter seg(cfg, Strategy::update);
  std::vector<StageTimes> times;
  for (std::size_t t = 0; t < frames.size(); ++t) {
    const FrameResult r = seg.process(frames[t]);
    if (t >= warmup) times.push_back(r.times);
  }
  return summarize_times(times, frames.front().width(), frames.front().height(), worker_count());
}

std::string to_json(const std::vector<BenchReport>& reports) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : reports) {
    nlohmann::json j;
    j["resolution"] = {r.width, r.height};
    j["frames"] = r.frames;
    j["workers"] = r.workers;
    j["fps"] = r.frames_per_second();
    nlohmann::json stages;
    for (std::size_t k = 0; k < r.stages.size(); ++k) {
      const auto& s = r.stages[k];
      stages[std::string(BenchReport::kStageNames[k])] = {
          {"mean_ms", s.mean}, {"min_ms", s.min}, {"max_ms", s.max}, {"ms_per_pixel", r.ms_per_pixel(k)}};
    }
    j["stages"] = stages;
    j["total"] = {{"mean_ms", r.total.mean}, {"min_ms", r.total.min}, {"max_ms", r.total.max}};
    arr.push_back(j);
  }
  return arr.dump(2);
}

}  // namespace salientcut
