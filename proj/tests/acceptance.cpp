// Acceptance run: one PASS/FAIL line per criterion. argv[1] is the path of
// the salientcut executable (used by the determinism check).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <thread>

#include "salientcut/appearance.hpp"
#include "salientcut/attention.hpp"
#include "salientcut/bench.hpp"
#include "salientcut/eval.hpp"
#include "salientcut/imageio.hpp"
#include "salientcut/maxflow.hpp"
#include "salientcut/mrf.hpp"
#include "salientcut/parallel.hpp"
#include "salientcut/prior.hpp"
#include "salientcut/synthetic.hpp"
#include "support/reference.hpp"

using namespace salientcut;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// 1. Min-cut labeling energy equals the exhaustive minimum on 4x4 grids.
Outcome min_cut_is_map() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(101);
  int mismatches = 0;
  LabelField l(4, 4);
  for (int trial = 0; trial < 500; ++trial) {
    const EnergyModel em = ref::random_energy(rng, 4, 4, trial % 2 ? 8 : 4, 5.0, 2.0);
    double best = INFINITY;
    for (std::uint32_t mask = 0; mask < (1u << 16); ++mask) {
      for (std::size_t i = 0; i < 16; ++i) l.labels[i] = (mask >> i) & 1;
      best = std::min(best, ref::naive_energy(l, em));
    }
    mismatches += ref::naive_energy(minimize_energy(em), em) != best;
  }
  const double secs = seconds_since(t0);
  return {mismatches == 0 && secs < 60.0,
          fmt("500 grids (4- and 8-neighborhood), %d energy mismatches, %.1f s", mismatches, secs)};
}

// 2. Flow value against exhaustive cuts and against an augmenting-path solver.
Outcome max_flow_correct() {
  std::mt19937_64 rng(102);
  int small_bad = 0, large_bad = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const FlowGraph g = ref::random_graph(rng, 1 + rng() % 8, 0.5, 10);
    small_bad += max_flow(g).flow_value != ref::brute_force_min_cut(g);
  }
  for (int trial = 0; trial < 1000; ++trial) {
    const FlowGraph g = ref::random_graph(rng, 20 + rng() % 60, 0.12, 100, trial % 2 == 0);
    const CutResult r = max_flow(g);
    const double ek = ref::edmonds_karp(g);
    const double scale = std::max(1.0, ek);
    const double rel = std::max(std::abs(r.flow_value - ek), std::abs(cut_capacity(g, r.source_side) - ek)) / scale;
    worst = std::max(worst, rel);
    large_bad += rel > 1e-9;
  }
  return {small_bad == 0 && large_bad == 0,
          fmt("200 small graphs: %d mismatches; 1000 larger graphs: %d over 1e-9 (worst rel %.1e)", small_bad,
              large_bad, worst)};
}

// 3. Prior-update variance recursion and weight normalization.
Outcome prior_recursion() {
  double v = 0.0;
  for (int t = 0; t < 200; ++t) v = fusion_weights(0.03, 0.035, v).next_variance;
  const double root = xi_variance_fixed_point(0.03, 0.035);
  const double gap = std::abs(v - root);
  std::mt19937_64 rng(103);
  std::uniform_real_distribution<double> sig(1e-3, 1.0), var(0.0, 1.0);
  int bad = 0;
  for (int i = 0; i < 1000000; ++i) {
    const FusionWeights fw = fusion_weights(sig(rng), sig(rng), var(rng));
    bad += fw.weight_mask + fw.weight_saliency != 1.0;
  }
  return {gap < 1e-10 && std::abs(root - 6.031e-4) < 1e-7 && bad == 0,
          fmt("v200 = %.9e, root = %.9e, |diff| = %.1e; weight sums != 1: %d of 1e6", v, root, gap, bad)};
}

// 4. Weighted EM.
Outcome weighted_em() {
  std::mt19937_64 rng(104);
  std::uniform_real_distribution<double> u(0, 1);
  std::normal_distribution<double> g(0, 1);
  int decreases = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int clusters = 1 + static_cast<int>(rng() % 4);
    std::vector<Rgb> centers(static_cast<std::size_t>(clusters));
    for (auto& c : centers) c = {u(rng), u(rng), u(rng)};
    std::vector<Rgb> x;
    std::vector<double> w;
    const std::size_t n = 100 + rng() % 900;
    for (std::size_t i = 0; i < n; ++i) {
      const Rgb& c = centers[rng() % centers.size()];
      x.push_back({c[0] + 0.05 * g(rng), c[1] + 0.05 * g(rng), c[2] + 0.05 * g(rng)});
      w.push_back(u(rng));
    }
    EmTrace trace;
    fit_weighted_gmm(x, w, 1 + static_cast<int>(rng() % 3), trial, &trace);
    for (std::size_t i = 1; i < trace.log_likelihood.size(); ++i)
      decreases += trace.log_likelihood[i] - trace.log_likelihood[i - 1] < -1e-9;
  }

  // Two clusters, 3:1 mass, sd 0.03: means within 0.01, weights within 0.02.
  const Rgb a{0.2, 0.3, 0.8}, b{0.9, 0.6, 0.1};
  std::vector<Rgb> x;
  std::vector<double> w;
  for (int i = 0; i < 4000; ++i) {
    const Rgb& c = i % 4 ? a : b;
    x.push_back({c[0] + 0.03 * g(rng), c[1] + 0.03 * g(rng), c[2] + 0.03 * g(rng)});
    w.push_back(1.0);
  }
  const GmmModel m = fit_weighted_gmm(x, w, 2, 7);
  bool recovered = m.components.size() == 2;
  if (recovered) {
    const bool first_is_a = std::abs(m.components[0].mean[0] - a[0]) < std::abs(m.components[1].mean[0] - a[0]);
    const auto& ca = m.components[first_is_a ? 0 : 1];
    const auto& cb = m.components[first_is_a ? 1 : 0];
    for (std::size_t k = 0; k < 3; ++k)
      recovered &= std::abs(ca.mean[k] - a[k]) < 0.01 && std::abs(cb.mean[k] - b[k]) < 0.01;
    recovered &= std::abs(ca.weight - 0.75) < 0.02 && std::abs(cb.weight - 0.25) < 0.02;
  }

  // Scaling every weight by a power of two leaves the fit bit-identical.
  for (double& v : w) v = u(rng);
  const GmmModel base = fit_weighted_gmm(x, w, 3, 8);
  bool invariant = true;
  for (double s : {0.25, 8.0, 1024.0}) {
    std::vector<double> ws = w;
    for (double& v : ws) v *= s;
    const GmmModel sm = fit_weighted_gmm(x, ws, 3, 8);
    invariant &= sm.components.size() == base.components.size();
    for (std::size_t c = 0; invariant && c < sm.components.size(); ++c)
      invariant &= sm.components[c].weight == base.components[c].weight &&
                   sm.components[c].mean == base.components[c].mean && sm.components[c].cov == base.components[c].cov;
  }
  return {decreases == 0 && recovered && invariant,
          fmt("LL decreases: %d over 100 datasets; two-cluster recovery %s; weight-scale invariance %s", decreases,
              recovered ? "ok" : "failed", invariant ? "exact" : "broken")};
}

// 5. Eye-focusing density.
Outcome efdm() {
  std::mt19937_64 rng(105);
  std::uniform_real_distribution<double> u(0, 1);
  double worst_sum = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const int w = 8 + static_cast<int>(rng() % 120), h = 8 + static_cast<int>(rng() % 120);
    StochasticSaliencyMap s{PixelGrid(w, h), PixelGrid(w, h, 1, 0.001 + 0.01 * u(rng)), 0};
    for (double& v : s.mean.values()) v = u(rng);
    const auto e = compute_efdm(s, 256, trial);
    double sum = 0.0;
    for (double v : e->density.values()) sum += v;
    worst_sum = std::max(worst_sum, std::abs(sum - 1.0));
  }

  StochasticSaliencyMap two{PixelGrid(2, 1), PixelGrid(2, 1, 1, 0.01), 0};
  two.mean[0] = 0.6;
  two.mean[1] = 0.4;
  const double p1 = compute_efdm(two, 100000, 5, 1)->density[0];
  const double phi = 0.5 * std::erfc(-std::sqrt(2.0) / std::sqrt(2.0));

  StochasticSaliencyMap a{PixelGrid(64, 48), PixelGrid(64, 48, 1, 0.004), 0};
  for (double& v : a.mean.values()) v = static_cast<double>(rng() % 64) / 64.0;
  StochasticSaliencyMap b = a;
  for (double& v : b.mean.values()) v += 0.5;
  const auto da = compute_efdm(a, 512, 9), db = compute_efdm(b, 512, 9);
  const auto arg = [](const PixelGrid& g) {
    return static_cast<std::size_t>(std::max_element(g.values().begin(), g.values().end()) - g.values().begin());
  };
  const bool shift_ok = arg(da->density) == arg(db->density) && da->density == db->density;
  return {worst_sum <= 1e-6 && std::abs(p1 - phi) <= 0.01 && shift_ok,
          fmt("max |sum - 1| = %.1e; two-pixel p1 = %.4f vs %.4f; shift invariance %s", worst_sum, p1, phi,
              shift_ok ? "exact" : "broken")};
}

// 6. Confusion arithmetic on constructed cases.
Outcome metrics() {
  struct Case {
    int w, h;
    std::vector<std::uint8_t> pred, truth;
    std::uint64_t tp, tn, fp, fn;
    double error, recall, precision, f;
  };
  auto fill = [](int n, std::initializer_list<std::pair<int, int>> ones) {
    std::vector<std::uint8_t> v(static_cast<std::size_t>(n), 0);
    for (auto [lo, hi] : ones)
      for (int i = lo; i < hi; ++i) v[static_cast<std::size_t>(i)] = 1;
    return v;
  };
  const std::vector<Case> cases{
      {1, 1, {0}, {0}, 0, 1, 0, 0, 0.0, 1.0, 1.0, 1.0},
      {1, 1, {1}, {1}, 1, 0, 0, 0, 0.0, 1.0, 1.0, 1.0},
      {1, 1, {1}, {0}, 0, 0, 1, 0, 1.0, 1.0, 0.0, 0.0},
      {1, 1, {0}, {1}, 0, 0, 0, 1, 1.0, 0.0, 1.0, 0.0},
      {4, 1, {1, 1, 0, 0}, {1, 0, 1, 0}, 1, 1, 1, 1, 0.5, 0.5, 0.5, 0.5},
      {4, 1, {1, 1, 1, 1}, {1, 1, 1, 1}, 4, 0, 0, 0, 0.0, 1.0, 1.0, 1.0},
      {4, 1, {0, 0, 0, 0}, {0, 0, 0, 0}, 0, 4, 0, 0, 0.0, 1.0, 1.0, 1.0},
      {4, 1, {1, 1, 1, 1}, {0, 0, 0, 0}, 0, 0, 4, 0, 1.0, 1.0, 0.0, 0.0},
      {4, 1, {0, 0, 0, 0}, {1, 1, 1, 1}, 0, 0, 0, 4, 1.0, 0.0, 1.0, 0.0},
      {4, 1, {1, 0, 1, 0}, {0, 1, 0, 1}, 0, 0, 2, 2, 1.0, 0.0, 0.0, 0.0},
      {4, 1, {1, 0, 0, 0}, {1, 1, 0, 0}, 1, 2, 0, 1, 0.25, 0.5, 1.0, 2.0 / 3.0},
      {4, 1, {1, 1, 0, 0}, {1, 0, 0, 0}, 1, 2, 1, 0, 0.25, 1.0, 0.5, 2.0 / 3.0},
      {2, 2, {1, 1, 1, 0}, {1, 1, 0, 0}, 2, 1, 1, 0, 0.25, 1.0, 2.0 / 3.0, 0.8},
      {2, 2, {1, 0, 0, 0}, {1, 1, 1, 0}, 1, 1, 0, 2, 0.5, 1.0 / 3.0, 1.0, 0.5},
      {10, 10, fill(100, {{0, 55}}), fill(100, {{0, 50}, {55, 60}}), 50, 40, 5, 5, 0.1, 50.0 / 55.0, 50.0 / 55.0,
       50.0 / 55.0},
      {10, 10, fill(100, {{0, 10}}), fill(100, {{0, 20}}), 10, 80, 0, 10, 0.1, 0.5, 1.0, 2.0 / 3.0},
      {10, 10, fill(100, {{0, 40}}), fill(100, {{0, 20}}), 20, 60, 20, 0, 0.2, 1.0, 0.5, 2.0 / 3.0},
      {10, 10, fill(100, {{0, 30}}), fill(100, {{10, 40}}), 20, 60, 10, 10, 0.2, 2.0 / 3.0, 2.0 / 3.0, 2.0 / 3.0},
      {5, 2, fill(10, {{0, 1}}), fill(10, {{9, 10}}), 0, 8, 1, 1, 0.2, 0.0, 0.0, 0.0},
      {5, 2, fill(10, {{0, 10}}), fill(10, {{0, 9}}), 9, 0, 1, 0, 0.1, 1.0, 0.9, 18.0 / 19.0},
  };
  int bad = 0;
  for (const auto& c : cases) {
    LabelField p(c.w, c.h), t(c.w, c.h);
    p.labels = c.pred;
    t.labels = c.truth;
    const MetricsReport r = score({p}, {t});
    const bool ok = r.tp == c.tp && r.tn == c.tn && r.fp == c.fp && r.fn == c.fn && r.error == c.error &&
                    r.recall == c.recall && r.precision == c.precision && std::abs(r.f_value - c.f) <= 1e-15;
    bad += !ok;
  }
  // The empty sequence: no pixels, error 0 and unit ratios.
  const MetricsReport none = score({}, {});
  bad += !(none.error == 0.0 && none.recall == 1.0 && none.precision == 1.0);
  return {bad == 0, fmt("%zu constructed cases plus the empty sequence, %d mismatches", cases.size(), bad)};
}

// 7. End-to-end synthetic suite.
Outcome synthetic_suite(const SegConfig& cfg) {
  const auto t0 = Clock::now();
  ClipSpec spec;  // 352x288, 60 frames, moving disk, static textured sign
  const SyntheticClip clip = make_clip(spec);
  const auto upd = run_strategy(clip.frames, Strategy::update, cfg);
  const auto non = run_strategy(clip.frames, Strategy::non_update, cfg);
  const MetricsReport r = score(upd, clip.truth);
  const double su = stability(upd), sn = stability(non);

  ClipSpec occ = spec;
  occ.occlusion_start = 25;
  occ.occlusion_length = 5;
  const SyntheticClip oc = make_clip(occ);
  const auto upd_o = run_strategy(oc.frames, Strategy::update, cfg);
  const auto man_o = run_strategy(oc.frames, Strategy::manual, cfg, &oc.seeds);
  const int back = occ.occlusion_start + occ.occlusion_length;
  int update_reacquired = -1;
  double manual_best = 0.0;
  for (int t = back; t < back + 10; ++t) {
    const double iu = iou(upd_o[static_cast<std::size_t>(t)], oc.truth[static_cast<std::size_t>(t)]);
    if (update_reacquired < 0 && iu > 0.5) update_reacquired = t - back;
    manual_best = std::max(manual_best, iou(man_o[static_cast<std::size_t>(t)], oc.truth[static_cast<std::size_t>(t)]));
  }
  const double secs = seconds_since(t0);
  const bool pass = r.error < 0.05 && r.f_value > 0.85 && su < sn && update_reacquired >= 0 && manual_best <= 0.5 &&
                    secs < 600.0;
  return {pass, fmt("update error %.4f F %.4f; stability update %.5f < non-update %.5f; after occlusion update "
                    "IoU>0.5 at +%d frames, manual best IoU %.3f; %.0f s",
                    r.error, r.f_value, su, sn, update_reacquired, manual_best, secs)};
}

// 8. Bit-identical CLI output for repeated runs and 1 vs 8 workers.
Outcome determinism(const std::string& exe) {
  const fs::path root = fs::temp_directory_path() / "salientcut_acceptance_determinism";
  fs::remove_all(root);
  auto sh = [](const std::string& cmd) { return std::system((cmd + " > /dev/null").c_str()); };
  const std::string q = "'" + exe + "'";
  if (sh(q + " gen --output " + (root / "clip").string() + " --frames 20") != 0) return {false, "gen failed"};
  const std::string base = q + " segment --input " + (root / "clip" / "frames").string() + " --seed 3 --output ";
  if (sh(base + (root / "a").string() + " --threads 1") != 0 || sh(base + (root / "b").string() + " --threads 1") != 0 ||
      sh(base + (root / "c").string() + " --threads 8") != 0)
    return {false, "segment failed"};
  auto hash = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    const std::string s{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    return std::hash<std::string>{}(s);
  };
  int compared = 0, differ = 0;
  for (const auto& p : list_frames(root / "a")) {
    const auto name = p.filename();
    const auto h = hash(p);
    differ += h != hash(root / "b" / name) || h != hash(root / "c" / name);
    ++compared;
  }
  return {compared == 20 && differ == 0,
          fmt("%d mask files hashed across 3 runs (threads 1, 1, 8): %d differ", compared, differ)};
}

// 9. Throughput and per-pixel scaling of the priors stage.
Outcome performance(const SegConfig& cfg) {
  set_worker_count(4);
  auto bench = [&](int w, int h) {
    ClipSpec s;
    s.width = w;
    s.height = h;
    s.radius = 20.0 * w / 352.0;
    s.frames = 12;
    return run_bench(make_clip(s).frames, cfg, 2);
  };
  const BenchReport small = bench(352, 288), large = bench(640, 512);
  set_worker_count(1);
  const double ratio = large.ms_per_pixel(1) / small.ms_per_pixel(1);
  return {small.frames_per_second() >= 3.0 && ratio <= 1.2,
          fmt("%.2f frames/s at 352x288 with 4 workers on %u hardware threads; priors ms/pixel ratio "
              "640x512 / 352x288 = %.3f",
              small.frames_per_second(), std::thread::hardware_concurrency(), ratio)};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: acceptance <path-to-salientcut>\n";
    return 2;
  }
  set_worker_count(1);
  SegConfig cfg;
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"min-cut equals exhaustive MAP", min_cut_is_map},
      {"max-flow correctness", max_flow_correct},
      {"prior-update recursion", prior_recursion},
      {"weighted EM", weighted_em},
      {"EFDM", efdm},
      {"metrics arithmetic", metrics},
      {"synthetic end-to-end suite", [&] { return synthetic_suite(cfg); }},
      {"determinism", [&] { return determinism(argv[1]); }},
      {"performance", [&] { return performance(cfg); }},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << "criterion " << i + 1 << " (" << criteria[i].first << "): " << (o.pass ? "PASS" : "FAIL") << " | "
              << o.detail << std::endl;
  }
  std::cout << (failed ? std::to_string(failed) + " criteria failed" : std::string("all criteria passed")) << '\n';
  return failed ? 1 : 0;
}
