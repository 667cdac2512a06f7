#include "salientcut/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace salientcut {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_real(std::string_view key, std::string_view v) {
  // std::from_chars for double is available in libstdc++ 11
  double out = 0.0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size() || !std::isfinite(out))
    throw InvalidArgument(std::string(key) + ": expected a real number, got '" + std::string(v) + "'");
  return out;
}

template <typename Int>
Int parse_int(std::string_view key, std::string_view v) {
  Int out{};
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size())
    throw InvalidArgument(std::string(key) + ": expected an integer, got '" + std::string(v) + "'");
  return out;
}

std::string fmt_real(double v) {
  std::ostringstream ss;
  ss.precision(17);
  ss << v;
  return ss.str();
}

}  // namespace

UpdateParams SegConfig::update_params() const {
  UpdateParams p;
  p.sigma1 = sigma1;
  p.sigma2 = sigma2;
  p.smoothing_radius = smoothing_radius;
  p.edge_band = edge_band;
  p.prior_scale_max = prior_scale_max;
  p.spatial_sigma_frac = spatial_sigma_frac;
  p.convention = kalman_convention;
  return p;
}

SaliencyParams SegConfig::saliency_params() const {
  SaliencyParams p;
  p.class_weights = class_weights;
  return p;
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys{
      "lambda",          "sigma_c",         "kappa",         "neighborhood",       "M",
      "sigma1",          "sigma2",          "smoothing_radius", "edge_band",       "prior_scale_max",
      "spatial_sigma_frac", "prior_components", "kalman_convention", "efdm_samples", "efdm_decimation",
      "q_var",           "r_var",           "weight_intensity", "weight_color",    "weight_orientation",
      "weight_motion",   "seed",            "threads"};
  return keys;
}

void apply_setting(SegConfig& cfg, std::string_view key, std::string_view raw) {
  const std::string_view v = trim(raw);
  if (key == "lambda") cfg.lambda = parse_real(key, v);
  else if (key == "sigma_c") cfg.sigma_c = parse_real(key, v);
  else if (key == "kappa") cfg.kappa = parse_real(key, v);
  else if (key == "neighborhood") cfg.neighborhood = parse_int<int>(key, v);
  else if (key == "M") cfg.M = parse_int<int>(key, v);
  else if (key == "sigma1") cfg.sigma1 = parse_real(key, v);
  else if (key == "sigma2") cfg.sigma2 = parse_real(key, v);
  else if (key == "smoothing_radius") cfg.smoothing_radius = parse_int<int>(key, v);
  else if (key == "edge_band") cfg.edge_band = parse_int<int>(key, v);
  else if (key == "prior_scale_max") cfg.prior_scale_max = parse_real(key, v);
  else if (key == "spatial_sigma_frac") cfg.spatial_sigma_frac = parse_real(key, v);
  else if (key == "prior_components") cfg.prior_components = parse_int<int>(key, v);
  else if (key == "kalman_convention") {
    if (v == "direct") cfg.kalman_convention = KalmanConvention::direct;
    else if (v == "standard") cfg.kalman_convention = KalmanConvention::standard;
    else throw InvalidArgument("kalman_convention: expected one of {direct, standard}, got '" + std::string(v) + "'");
  } else if (key == "efdm_samples") cfg.efdm_samples = parse_int<std::size_t>(key, v);
  else if (key == "efdm_decimation") cfg.efdm_decimation = parse_int<int>(key, v);
  else if (key == "q_var") cfg.q_var = parse_real(key, v);
  else if (key == "r_var") cfg.r_var = parse_real(key, v);
  else if (key == "weight_intensity") cfg.class_weights[0] = parse_real(key, v);
  else if (key == "weight_color") cfg.class_weights[1] = parse_real(key, v);
  else if (key == "weight_orientation") cfg.class_weights[2] = parse_real(key, v);
  else if (key == "weight_motion") cfg.class_weights[3] = parse_real(key, v);
  else if (key == "seed") cfg.seed = parse_int<std::uint64_t>(key, v);
  else if (key == "threads") cfg.threads = parse_int<int>(key, v);
  else throw InvalidArgument("unknown config key '" + std::string(key) + "'");
}

void validate(const SegConfig& c) {
  auto fail = [](const std::string& key, const std::string& rule) { throw InvalidArgument(key + ": " + rule); };
  if (!(c.lambda >= 0)) fail("lambda", "must be >= 0");
  if (!(c.sigma_c > 0)) fail("sigma_c", "must be > 0");
  if (!(c.kappa >= 0)) fail("kappa", "must be >= 0");
  if (c.neighborhood != 4 && c.neighborhood != 8)
    fail("neighborhood", "must be one of {4, 8}, got " + std::to_string(c.neighborhood));
  if (c.M < 1 || c.M > 16) fail("M", "must be in [1, 16]");
  if (!(c.sigma1 > 0)) fail("sigma1", "must be > 0");
  if (!(c.sigma2 > 0)) fail("sigma2", "must be > 0");
  if (c.smoothing_radius < 0) fail("smoothing_radius", "must be >= 0");
  if (c.edge_band < 0) fail("edge_band", "must be >= 0");
  if (!(c.prior_scale_max > 0 && c.prior_scale_max < 1)) fail("prior_scale_max", "must be in (0, 1)");
  if (!(c.spatial_sigma_frac >= 0)) fail("spatial_sigma_frac", "must be >= 0");
  if (c.prior_components < 1 || c.prior_components > 16) fail("prior_components", "must be in [1, 16]");
  if (c.efdm_samples < 1) fail("efdm_samples", "must be >= 1");
  if (c.efdm_decimation < 1) fail("efdm_decimation", "must be >= 1");
  if (!(c.q_var >= 0)) fail("q_var", "must be >= 0");
  if (!(c.r_var > 0)) fail("r_var", "must be > 0");
  static const char* names[4] = {"weight_intensity", "weight_color", "weight_orientation", "weight_motion"};
  double total = 0.0;
  for (int k = 0; k < 4; ++k) {
    if (!(c.class_weights[k] >= 0)) fail(names[k], "must be >= 0");
    total += c.class_weights[k];
  }
  if (!(total > 0)) fail("weight_intensity", "feature class weights must not all be zero");
  if (c.threads < 0) fail("threads", "must be >= 0");
}

SegConfig parse_config(std::string_view text, std::string_view origin) {
  SegConfig cfg;
  std::istringstream in{std::string(text)};
  std::string line;
  for (int lineno = 1; std::getline(in, line); ++lineno) {
    const std::string_view s = trim(line);
    if (s.empty() || s.front() == '#') continue;
    const auto eq = s.find('=');
    const std::string where = std::string(origin) + ":" + std::to_string(lineno) + ": ";
    if (eq == std::string_view::npos) throw InvalidArgument(where + "expected key=value");
    const std::string_view key = trim(s.substr(0, eq));
    try {
      apply_setting(cfg, key, s.substr(eq + 1));
    } catch (const InvalidArgument& e) {
      throw InvalidArgument(where + e.what());
    }
  }
  validate(cfg);
  return cfg;
}

SegConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.string());
}

std::string to_config_text(const SegConfig& c) {
  std::ostringstream o;
  o << "lambda=" << fmt_real(c.lambda) << '\n'
    << "sigma_c=" << fmt_real(c.sigma_c) << '\n'
    << "kappa=" << fmt_real(c.kappa) << '\n'
    << "neighborhood=" << c.neighborhood << '\n'
    << "M=" << c.M << '\n'
    << "sigma1=" << fmt_real(c.sigma1) << '\n'
    << "sigma2=" << fmt_real(c.sigma2) << '\n'
    << "smoothing_radius=" << c.smoothing_radius << '\n'
    << "edge_band=" << c.edge_band << '\n'
    << "prior_scale_max=" << fmt_real(c.prior_scale_max) << '\n'
    << "spatial_sigma_frac=" << fmt_real(c.spatial_sigma_frac) << '\n'
    << "prior_components=" << c.prior_components << '\n'
    << "kalman_convention=" << (c.kalman_convention == KalmanConvention::direct ? "direct" : "standard") << '\n'
    << "efdm_samples=" << c.efdm_samples << '\n'
    << "efdm_decimation=" << c.efdm_decimation << '\n'
    << "q_var=" << fmt_real(c.q_var) << '\n'
    << "r_var=" << fmt_real(c.r_var) << '\n'
    << "weight_intensity=" << fmt_real(c.class_weights[0]) << '\n'
    << "weight_color=" << fmt_real(c.class_weights[1]) << '\n'
    << "weight_orientation=" << fmt_real(c.class_weights[2]) << '\n'
    << "weight_motion=" << fmt_real(c.class_weights[3]) << '\n'
    << "seed=" << c.seed << '\n'
    << "threads=" << c.threads << '\n';
  return o.str();
}

}  // namespace salientcut
