#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "salientcut/prior.hpp"
#include "salientcut/saliency.hpp"

namespace salientcut {

struct SegConfig {
  // pairwise term
  double lambda = 10.0;
  double sigma_c = 0.1;
  double kappa = 0.05;
  int neighborhood = 8;
  // appearance
  int M = 3;
  // prior fusion
  double sigma1 = 0.03;
  double sigma2 = 0.035;
  int smoothing_radius = 8;
  int edge_band = 8;
  double prior_scale_max = 0.95;
  double spatial_sigma_frac = 0.04;
  int prior_components = 3;
  KalmanConvention kalman_convention = KalmanConvention::direct;
  // attention
  std::size_t efdm_samples = 256;
  int efdm_decimation = kEfdmDecimation;
  double q_var = 5e-3;
  double r_var = 5e-3;
  // saliency
  std::array<double, 4> class_weights{0.25, 0.25, 0.25, 0.25};  // intensity, color, orientation, motion
  std::uint64_t seed = 1;
  int threads = 0;  // 0: SALIENTCUT_THREADS or hardware concurrency

  UpdateParams update_params() const;
  SaliencyParams saliency_params() const;
};

/// Throws InvalidArgument naming the first offending key.
void validate(const SegConfig& cfg);

/// Sets one key from its textual value; unknown keys and unparsable values
/// throw InvalidArgument. Does not validate ranges.
void apply_setting(SegConfig& cfg, std::string_view key, std::string_view value);

/// key=value lines, '#' comments, blank lines ignored. Errors carry the line
/// number; the result is validated.
SegConfig load_config(const std::filesystem::path& path);
SegConfig parse_config(std::string_view text, std::string_view origin = "<config>");

/// Every key accepted by apply_setting, in a stable order.
const std::vector<std::string>& config_keys();

/// key=value rendering that round-trips through parse_config.
std::string to_config_text(const SegConfig& cfg);

}  // namespace salientcut
