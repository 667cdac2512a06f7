#pragma once

#include <array>

#include "salientcut/appearance.hpp"
#include "salientcut/config.hpp"
#include "salientcut/maxflow.hpp"
#include "salientcut/pixel_grid.hpp"

namespace salientcut {

/// Binary grid energy: per-pixel unary costs plus a disagreement cost B on
/// every neighbor pair. Each unordered pair is stored once, under the
/// forward offset that leads from its first pixel to its second.
struct EnergyModel {
  /// right, down, down-right, down-left; 4-neighborhoods use the first two.
  static constexpr std::array<std::array<int, 2>, 4> kOffsets{{{1, 0}, {0, 1}, {1, 1}, {-1, 1}}};

  int width = 0;
  int height = 0;
  PixelGrid unary0;  // cost of label 0 (background)
  PixelGrid unary1;  // cost of label 1 (object)
  int neighborhood = 8;
  std::array<PixelGrid, 4> pairwise;  // B for (x, x + kOffsets[k]); 0 where x + offset leaves the grid

  EnergyModel() = default;
  /// Zero costs on a width x height grid.
  EnergyModel(int width, int height, int neighborhood);

  int direction_count() const { return neighborhood == 8 ? 4 : 2; }
  bool has_neighbor(int x, int y, int k) const {
    const int nx = x + kOffsets[k][0], ny = y + kOffsets[k][1];
    return nx >= 0 && ny >= 0 && nx < width && ny < height;
  }
};

/// Intensity-contrast pairwise weight for one pair.
double pairwise_weight(double intensity_x, double intensity_y, double distance, double lambda, double sigma_c,
                       double kappa);

EnergyModel build_energy(const PixelGrid& frame, const PixelGrid& prior, const LikelihoodMaps& lik,
                         const SegConfig& cfg);

double energy_of(const LabelField& labels, const EnergyModel& em);

/// One vertex per pixel; source side is label 1. Each pixel's t-links are
/// shifted by min(unary0, unary1), which is kept in FlowGraph::offset so
/// that cut + offset equals the energy of the cut labeling.
FlowGraph energy_to_graph(const EnergyModel& em);

/// Min-cut labeling of `em`.
LabelField minimize_energy(const EnergyModel& em);

}  // namespace salientcut
