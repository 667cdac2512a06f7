#include "salientcut/cli.hpp"

#include <Eigen/Core>
#include <png.h>

#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "salientcut/attention.hpp"
#include "salientcut/bench.hpp"
#include "salientcut/config.hpp"
#include "salientcut/eval.hpp"
#include "salientcut/imageio.hpp"
#include "salientcut/maxflow.hpp"
#include "salientcut/mrf.hpp"
#include "salientcut/parallel.hpp"
#include "salientcut/pipeline.hpp"
#include "salientcut/random.hpp"
#include "salientcut/saliency.hpp"
#include "salientcut/synthetic.hpp"

namespace salientcut {

namespace fs = std::filesystem;

namespace {

constexpr const char* kVersion = "1.0.0";

struct EmptyInput : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Options shared by the subcommands that run the pipeline.
struct PipelineOptions {
  std::string config_path;
  std::vector<std::string> settings;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<double> lambda, sigma_c, kappa, sigma1, sigma2;
  std::optional<int> neighborhood, M;

  void attach(CLI::App* app) {
    app->add_option("--config", config_path, "key=value configuration file");
    app->add_option("--set", settings, "override one configuration key (key=value); repeatable");
    app->add_option("--seed", seed, "run seed");
    app->add_option("--threads", threads, "worker threads (fallback: SALIENTCUT_THREADS)");
    app->add_option("--lambda", lambda, "pairwise strength");
    app->add_option("--sigma-c", sigma_c, "pairwise contrast scale");
    app->add_option("--kappa", kappa, "Potts constant");
    app->add_option("--neighborhood", neighborhood, "4 or 8");
    app->add_option("--M", M, "color mixture components");
    app->add_option("--sigma1", sigma1, "mask-term deviation of the prior update");
    app->add_option("--sigma2", sigma2, "saliency-term deviation of the prior update");
  }

  SegConfig resolve() const {
    SegConfig cfg = config_path.empty() ? SegConfig{} : load_config(config_path);
    for (const auto& kv : settings) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw InvalidArgument("--set expects key=value, got '" + kv + "'");
      apply_setting(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (seed) cfg.seed = *seed;
    if (threads) cfg.threads = *threads;
    if (lambda) cfg.lambda = *lambda;
    if (sigma_c) cfg.sigma_c = *sigma_c;
    if (kappa) cfg.kappa = *kappa;
    if (sigma1) cfg.sigma1 = *sigma1;
    if (sigma2) cfg.sigma2 = *sigma2;
    if (neighborhood) cfg.neighborhood = *neighborhood;
    if (M) cfg.M = *M;
    validate(cfg);
    return cfg;
  }
};

void apply_threads(const SegConfig& cfg) {
  std::size_t n = 0;
  if (cfg.threads > 0)
    n = static_cast<std::size_t>(cfg.threads);
  else if (std::getenv("SALIENTCUT_THREADS"))
    n = worker_count_from_env();
  else
    n = std::max(1u, std::thread::hardware_concurrency());
  set_worker_count(n);
}

std::vector<PixelGrid> load_sequence(const fs::path& dir) {
  const auto paths = list_frames(dir);
  if (paths.empty()) throw EmptyInput("no frame_*.png files in " + dir.string());
  std::vector<PixelGrid> frames;
  frames.reserve(paths.size());
  for (const auto& p : paths) {
    PixelGrid f = load_frame(p);
    if (f.channels() == 1) {
      PixelGrid rgb(f.width(), f.height(), 3);
      for (std::size_t i = 0; i < f.size(); ++i)
        for (int c = 0; c < 3; ++c) rgb[3 * i + c] = f[i];
      f = std::move(rgb);
    }
    frames.push_back(std::move(f));
  }
  return frames;
}

std::vector<LabelField> load_masks(const fs::path& dir) {
  const auto paths = list_frames(dir);
  if (paths.empty()) throw EmptyInput("no frame_*.png masks in " + dir.string());
  std::vector<LabelField> masks;
  for (const auto& p : paths) masks.push_back(load_mask(p));
  return masks;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream o(path, std::ios::binary);
  if (!o || !(o << text)) throw IoError("cannot write " + path.string());
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create directory " + dir.string());
}

PixelGrid overlay(const PixelGrid& frame, const LabelField& mask) {
  PixelGrid o = frame;
  for (std::size_t i = 0; i < mask.labels.size(); ++i) {
    if (mask.labels[i]) {
      o[3 * i] = 0.5 * o[3 * i] + 0.5;
      o[3 * i + 1] *= 0.5;
      o[3 * i + 2] *= 0.5;
    }
  }
  return o;
}

nlohmann::json versions() {
  return {{"salientcut", kVersion},
          {"libpng", PNG_LIBPNG_VER_STRING},
          {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                        std::to_string(EIGEN_MINOR_VERSION)}};
}

int cmd_gen(const ClipSpec& spec, const fs::path& output, std::ostream& out) {
  const SyntheticClip clip = make_clip(spec);
  write_clip(clip, output);
  out << "wrote " << clip.frames.size() << " frames (" << spec.width << "x" << spec.height << ") to " << output.string()
      << '\n';
  return kExitOk;
}

int cmd_saliency(const PipelineOptions& po, const fs::path& input, const fs::path& output, bool efdm,
                 std::ostream& out) {
  const SegConfig cfg = po.resolve();
  apply_threads(cfg);
  const auto frames = load_sequence(input);
  ensure_dir(output);
  std::optional<StochasticSaliencyMap> ssm;
  for (std::size_t t = 0; t < frames.size(); ++t) {
    const SaliencyMap s = compute_saliency(frames[t], t ? &frames[t - 1] : nullptr, cfg.saliency_params(), t);
    save_gray(s.values, output / ("saliency_" + frame_filename(t).substr(6)));
    if (efdm) {
      ssm = kalman_update_saliency(ssm ? &*ssm : nullptr, s, cfg.q_var, cfg.r_var);
      auto d = compute_efdm(*ssm, cfg.efdm_samples, frame_seed(cfg.seed, t, 1), cfg.efdm_decimation);
      const Efdm e = d ? *d : uniform_efdm(frames[t].width(), frames[t].height());
      save_gray(rescale_unit(e.density), output / ("efdm_" + frame_filename(t).substr(6)));
    }
  }
  out << "wrote saliency maps for " << frames.size() << " frames to " << output.string() << '\n';
  return kExitOk;
}

int cmd_segment(const PipelineOptions& po, const fs::path& input, const fs::path& output, const std::string& strategy_name,
                const std::string& seeds_path, bool with_overlay, int dimacs_frame, std::ostream& out) {
  const Strategy strategy = parse_strategy(strategy_name);
  if (strategy == Strategy::manual && seeds_path.empty())
    throw InvalidArgument("--strategy manual requires --seeds <file>");
  const SegConfig cfg = po.resolve();
  apply_threads(cfg);
  std::vector<Seed> seeds;
  if (!seeds_path.empty()) seeds = read_seed_file(seeds_path);
  const auto frames = load_sequence(input);
  ensure_dir(output);
  if (with_overlay) ensure_dir(output / "overlay");

  Segmenter seg(cfg, strategy, seeds);
  std::vector<StageTimes> times;
  for (std::size_t t = 0; t < frames.size(); ++t) {
    const FrameResult r = seg.process(frames[t]);
    save_mask(r.mask, output / frame_filename(t));
    if (with_overlay) save_rgb(overlay(frames[t], r.mask), output / "overlay" / frame_filename(t));
    if (dimacs_frame >= 0 && static_cast<std::size_t>(dimacs_frame) == t) {
      // Rebuild the frame's graph from its recorded prior for inspection.
      const auto models = build_models(frames[t], r.prior, cfg.M, frame_seed(cfg.seed, t, 3));
      const EnergyModel em = build_energy(frames[t], r.prior, nll_maps(frames[t], models.first, models.second), cfg);
      std::ofstream d(output / "graph.dimacs");
      if (!d) throw IoError("cannot write " + (output / "graph.dimacs").string());
      energy_to_graph(em).write_dimacs(d);
    }
    times.push_back(r.times);
  }

  nlohmann::json manifest;
  manifest["strategy"] = std::string(to_string(strategy));
  manifest["seed"] = cfg.seed;
  manifest["frames"] = frames.size();
  manifest["resolution"] = {frames.front().width(), frames.front().height()};
  manifest["input"] = input.string();
  manifest["seeds_file"] = seeds_path;
  manifest["config"] = nlohmann::json::object();
  {
    std::istringstream cfg_text(to_config_text(cfg));
    std::string line;
    while (std::getline(cfg_text, line)) {
      const auto eq = line.find('=');
      manifest["config"][line.substr(0, eq)] = line.substr(eq + 1);
    }
  }
  manifest["versions"] = versions();
  write_text(output / "manifest.json", manifest.dump(2) + "\n");
  const BenchReport b = summarize_times(times, frames.front().width(), frames.front().height(), worker_count());
  out << "segmented " << frames.size() << " frames (" << to_string(strategy) << "), " << b.total.mean
      << " ms/frame; masks in " << output.string() << '\n';
  return kExitOk;
}

int cmd_eval(const fs::path& pred, const fs::path& truth, const std::string& json_path, const std::string& csv_path,
             std::ostream& out) {
  const auto p = load_masks(pred);
  const auto g = load_masks(truth);
  if (p.size() != g.size())
    throw InvalidArgument("frame-count mismatch: " + std::to_string(p.size()) + " predicted vs " +
                          std::to_string(g.size()) + " truth masks");
  const MetricsReport r = score(p, g);
  const std::string json = to_json(r);
  if (!json_path.empty()) write_text(json_path, json + "\n");
  if (!csv_path.empty()) write_text(csv_path, to_csv(r));
  out << "error=" << r.error << " recall=" << r.recall << " precision=" << r.precision << " f_value=" << r.f_value;
  if (p.size() >= 2) out << " stability=" << stability(p);
  out << '\n';
  return kExitOk;
}

int cmd_bench(const PipelineOptions& po, const std::string& input, std::size_t warmup, std::size_t measured,
              const std::string& json_path, std::ostream& out) {
  const SegConfig cfg = po.resolve();
  apply_threads(cfg);
  std::vector<BenchReport> reports;
  if (!input.empty()) {
    auto frames = load_sequence(input);
    if (frames.size() > warmup + measured) frames.resize(warmup + measured);
    reports.push_back(run_bench(frames, cfg, std::min(warmup, frames.size() - 1)));
  } else {
    for (const auto& [w, h] : {std::pair{352, 288}, std::pair{480, 384}, std::pair{640, 512}}) {
      ClipSpec spec;
      spec.width = w;
      spec.height = h;
      spec.frames = static_cast<int>(warmup + measured);
      spec.radius = 20.0 * w / 352.0;
      reports.push_back(run_bench(make_clip(spec).frames, cfg, warmup));
    }
  }
  const std::string json = to_json(reports);
  if (!json_path.empty()) write_text(json_path, json + "\n");
  out << json << '\n';
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"salientcut: salient object segmentation for video"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  ClipSpec clip;
  std::string gen_output;
  bool no_distractor = false;
  auto* gen = app.add_subcommand("gen", "write a synthetic clip with ground truth");
  gen->add_option("--output", gen_output, "output directory")->required();
  gen->add_option("--width", clip.width);
  gen->add_option("--height", clip.height);
  gen->add_option("--frames", clip.frames);
  gen->add_option("--radius", clip.radius);
  gen->add_option("--occlusion-start", clip.occlusion_start, "first hidden frame (-1: none)");
  gen->add_option("--occlusion-length", clip.occlusion_length);
  gen->add_option("--noise", clip.noise);
  gen->add_option("--seed", clip.seed);
  gen->add_flag("--no-distractor", no_distractor);

  PipelineOptions sal_opts, seg_opts, bench_opts;
  std::string sal_input, sal_output;
  bool sal_efdm = false;
  auto* sal = app.add_subcommand("saliency", "write per-frame saliency (and EFDM) maps");
  sal->add_option("--input", sal_input, "directory of frame_*.png")->required();
  sal->add_option("--output", sal_output, "output directory")->required();
  sal->add_flag("--efdm", sal_efdm, "also write eye-focusing density maps");
  sal_opts.attach(sal);

  std::string seg_input, seg_output, seg_strategy = "update", seg_seeds;
  bool seg_overlay = false;
  int seg_dimacs = -1;
  auto* seg = app.add_subcommand("segment", "segment a frame sequence");
  seg->add_option("--input", seg_input, "directory of frame_*.png")->required();
  seg->add_option("--output", seg_output, "output directory")->required();
  seg->add_option("--strategy", seg_strategy, "manual | non-update | update");
  seg->add_option("--seeds", seg_seeds, "seed file (x y label per line), required for manual");
  seg->add_flag("--overlay", seg_overlay, "also write overlay images");
  seg->add_option("--dimacs-frame", seg_dimacs, "dump this frame's flow graph as DIMACS");
  seg_opts.attach(seg);

  std::string ev_pred, ev_truth, ev_json, ev_csv;
  auto* ev = app.add_subcommand("eval", "score predicted masks against ground truth");
  ev->add_option("--pred", ev_pred, "predicted mask directory")->required();
  ev->add_option("--truth", ev_truth, "ground-truth mask directory")->required();
  ev->add_option("--json", ev_json, "write the report as JSON");
  ev->add_option("--csv", ev_csv, "write per-frame rows as CSV");

  std::string bench_input, bench_json;
  std::size_t bench_warmup = 2, bench_frames = 10;
  auto* bench = app.add_subcommand("bench", "per-stage timing report");
  bench->add_option("--input", bench_input, "clip directory (default: synthetic clips at three resolutions)");
  bench->add_option("--warmup", bench_warmup);
  bench->add_option("--frames", bench_frames, "measured frames");
  bench->add_option("--json", bench_json, "write the report to this file");
  bench_opts.attach(bench);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitBadArgs;
  }

  try {
    if (*gen) {
      clip.distractor = !no_distractor;
      return cmd_gen(clip, gen_output, out);
    }
    if (*sal) return cmd_saliency(sal_opts, sal_input, sal_output, sal_efdm, out);
    if (*seg)
      return cmd_segment(seg_opts, seg_input, seg_output, seg_strategy, seg_seeds, seg_overlay, seg_dimacs, out);
    if (*ev) return cmd_eval(ev_pred, ev_truth, ev_json, ev_csv, out);
    if (*bench) {
      if (bench_frames < 1) throw InvalidArgument("--frames must be >= 1");
      return cmd_bench(bench_opts, bench_input, bench_warmup, bench_frames, bench_json, out);
    }
  } catch (const EmptyInput& e) {
    err << "error: " << e.what() << '\n';
    return kExitEmptyInput;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return kExitBadArgs;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  }
  return kExitBadArgs;
}

}  // namespace salientcut
