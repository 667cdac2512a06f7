#include <random>

#include "doctest.h"
#include "json.hpp"
#include "oracle_values.hpp"
#include "salientcut/eval.hpp"
#include "salientcut/synthetic.hpp"

using namespace salientcut;

namespace {

LabelField mask_from(int w, int h, std::vector<std::uint8_t> labels) {
  LabelField m(w, h);
  m.labels = std::move(labels);
  return m;
}

ClipSpec small_clip(int frames) {
  ClipSpec s;
  s.width = 96;
  s.height = 80;
  s.frames = frames;
  s.radius = 10;
  s.start_x = 40;
  s.start_y = 40;
  s.velocity_x = 2;
  s.velocity_y = 1;
  s.distractor = false;
  return s;
}

}  // namespace

TEST_CASE("score counts and ratios") {
  const LabelField p = mask_from(4, 1, {1, 1, 0, 0}), t = mask_from(4, 1, {1, 0, 1, 0});
  const MetricsReport r = score({p}, {t});
  CHECK(r.tp == 1);
  CHECK(r.fp == 1);
  CHECK(r.fn == 1);
  CHECK(r.tn == 1);
  CHECK(r.error == 0.5);
  CHECK(r.recall == 0.5);
  CHECK(r.precision == 0.5);
  CHECK(r.f_value == 0.5);

  // 100 pixels: 50 TP, 5 FP, 5 FN.
  std::vector<std::uint8_t> pl(100, 0), tl(100, 0);
  for (int i = 0; i < 55; ++i) pl[static_cast<std::size_t>(i)] = 1;
  for (int i = 0; i < 50; ++i) tl[static_cast<std::size_t>(i)] = 1;
  for (int i = 55; i < 60; ++i) tl[static_cast<std::size_t>(i)] = 1;
  const MetricsReport q = score({mask_from(10, 10, pl)}, {mask_from(10, 10, tl)});
  CHECK(q.error == oracle::kMetricsError);
  CHECK(q.recall == doctest::Approx(oracle::kMetricsRatio).epsilon(1e-15));
  CHECK(q.precision == doctest::Approx(oracle::kMetricsRatio).epsilon(1e-15));
}

TEST_CASE("degenerate conventions") {
  const LabelField empty = mask_from(3, 1, {0, 0, 0}), full = mask_from(3, 1, {1, 1, 1});
  const MetricsReport both_empty = score({empty}, {empty});
  CHECK(both_empty.recall == 1.0);
  CHECK(both_empty.precision == 1.0);
  CHECK(both_empty.f_value == 1.0);
  CHECK(both_empty.error == 0.0);
  const MetricsReport missed = score({empty}, {full});
  CHECK(missed.recall == 0.0);
  CHECK(missed.precision == 1.0);
  CHECK(missed.f_value == 0.0);
  const MetricsReport spurious = score({full}, {empty});
  CHECK(spurious.recall == 1.0);
  CHECK(spurious.precision == 0.0);
  CHECK(spurious.f_value == 0.0);
  CHECK(spurious.error == 1.0);
  const MetricsReport none = score({}, {});
  CHECK(none.error == 0.0);
  CHECK(none.per_frame.empty());
  CHECK_THROWS_AS(score({empty}, {}), InvalidArgument);
  CHECK_THROWS_AS(score({empty}, {mask_from(1, 3, {0, 0, 0})}), InvalidArgument);
}

TEST_CASE("swapping labels in both masks permutes the counts") {
  std::mt19937_64 rng(61);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<LabelField> p, t, ps, ts;
    for (int f = 0; f < 3; ++f) {
      LabelField a(7, 5), b(7, 5);
      for (auto& v : a.labels) v = rng() & 1;
      for (auto& v : b.labels) v = rng() & 1;
      LabelField as = a, bs = b;
      for (auto& v : as.labels) v ^= 1;
      for (auto& v : bs.labels) v ^= 1;
      p.push_back(a);
      t.push_back(b);
      ps.push_back(as);
      ts.push_back(bs);
    }
    const MetricsReport r = score(p, t), s = score(ps, ts);
    CHECK(r.tp == s.tn);
    CHECK(r.tn == s.tp);
    CHECK(r.fp == s.fn);
    CHECK(r.fn == s.fp);
    CHECK(r.error == s.error);
  }
}

TEST_CASE("pooled counts are the sum of per-frame counts") {
  const MetricsReport r = score({mask_from(2, 1, {1, 0}), mask_from(2, 1, {1, 1})},
                                {mask_from(2, 1, {1, 1}), mask_from(2, 1, {0, 1})});
  REQUIRE(r.per_frame.size() == 2);
  CHECK(r.tp == r.per_frame[0].tp + r.per_frame[1].tp);
  CHECK(r.fn == 1);
  CHECK(r.fp == 1);
  CHECK(r.per_frame[1].precision == 0.5);
  const auto j = nlohmann::json::parse(to_json(r));
  CHECK(j["tp"] == 2);
  CHECK(j["per_frame"].size() == 2);
  const std::string csv = to_csv(r);
  CHECK(csv.rfind("frame,tp,tn,fp,fn,error,recall,precision,f_value\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
}

TEST_CASE("stability and iou") {
  const LabelField a = mask_from(2, 2, {0, 0, 0, 0}), b = mask_from(2, 2, {1, 1, 1, 1});
  CHECK(stability({a, a, a}) == 0.0);
  CHECK(stability({a, b, a, b}) == 1.0);
  std::vector<LabelField> flips;
  LabelField m(10, 10);
  flips.push_back(m);
  for (int t = 1; t < 6; ++t) {
    for (int i = 0; i < 10; ++i) m.labels[static_cast<std::size_t>((t * 10 + i) % 100)] ^= 1;
    flips.push_back(m);
  }
  CHECK(stability(flips) == doctest::Approx(0.1).epsilon(1e-15));
  CHECK_THROWS_AS(stability({a}), InvalidArgument);
  CHECK(iou(a, a) == 1.0);
  CHECK(iou(a, b) == 0.0);
  CHECK(iou(mask_from(2, 1, {1, 1}), mask_from(2, 1, {1, 0})) == 0.5);
}

TEST_CASE("run_strategy on short synthetic clips") {
  const SyntheticClip one = make_clip(small_clip(1));
  SegConfig cfg;
  cfg.threads = 1;
  const auto u = run_strategy(one.frames, Strategy::update, cfg);
  const auto n = run_strategy(one.frames, Strategy::non_update, cfg);
  CHECK(u == n);
  CHECK_THROWS_AS(run_strategy(one.frames, Strategy::manual, cfg), InvalidArgument);
  CHECK_THROWS_AS(run_strategy({}, Strategy::update, cfg), InvalidArgument);

  const SyntheticClip clip = make_clip(small_clip(8));
  std::vector<StageTimes> times;
  const auto masks = run_strategy(clip.frames, Strategy::update, cfg, nullptr, &times);
  CHECK(times.size() == 8);
  for (std::size_t t = 2; t < masks.size(); ++t) CHECK(iou(masks[t], clip.truth[t]) > 0.7);
  CHECK(run_strategy(clip.frames, Strategy::update, cfg) == masks);
  const auto manual = run_strategy(clip.frames, Strategy::manual, cfg, &clip.seeds);
  CHECK(iou(manual[0], clip.truth[0]) > 0.7);
}

TEST_CASE("a static scene settles") {
  ClipSpec s = small_clip(10);
  s.velocity_x = 0;
  s.velocity_y = 0;
  s.noise = 0;
  const SyntheticClip clip = make_clip(s);
  SegConfig cfg;
  const auto masks = run_strategy(clip.frames, Strategy::update, cfg);
  CHECK(masks[masks.size() - 1].labels == masks[masks.size() - 2].labels);
}
