#include "salientcut/mrf.hpp"

#include <cmath>
#include <numbers>

#include "salientcut/parallel.hpp"

namespace salientcut {

EnergyModel::EnergyModel(int w, int h, int nb)
    : width(w), height(h), unary0(w, h), unary1(w, h), neighborhood(nb) {
  if (nb != 4 && nb != 8) throw InvalidArgument("EnergyModel: neighborhood must be 4 or 8");
  for (auto& p : pairwise) p = PixelGrid(w, h);
}

double pairwise_weight(double ix, double iy, double distance, double lambda, double sigma_c, double kappa) {
  const double d = ix - iy;
  return lambda * std::exp(-d * d / (2.0 * sigma_c * sigma_c)) / distance + kappa;
}

EnergyModel build_energy(const PixelGrid& frame, const PixelGrid& prior, const LikelihoodMaps& lik,
                         const SegConfig& cfg) {
  const int w = frame.width(), h = frame.height();
  if (frame.channels() != 3) throw InvalidArgument("build_energy: frame must be RGB");
  if (prior.channels() != 1 || !prior.same_size(w, h) || !lik.obj_nll.same_size(w, h) ||
      !lik.bkg_nll.same_size(w, h))
    throw InvalidArgument("build_energy: input sizes differ");
  validate(cfg);

  EnergyModel em(w, h, cfg.neighborhood);
  PixelGrid intensity(w, h);
  for (std::size_t i = 0; i < intensity.size(); ++i)
    intensity[i] = (frame[3 * i] + frame[3 * i + 1] + frame[3 * i + 2]) / 3.0;

  const int dirs = em.direction_count();
  parallel_for(0, static_cast<std::size_t>(h), 16, [&](std::size_t y0, std::size_t y1) {
    for (int y = static_cast<int>(y0); y < static_cast<int>(y1); ++y)
      for (int x = 0; x < w; ++x) {
        const double p = prior.at(x, y);
        em.unary1.at(x, y) = lik.obj_nll.at(x, y) - std::log(p);
        em.unary0.at(x, y) = lik.bkg_nll.at(x, y) - std::log(1.0 - p);
        for (int k = 0; k < dirs; ++k) {
          if (!em.has_neighbor(x, y, k)) continue;
          const auto& o = EnergyModel::kOffsets[k];
          const double dist = k < 2 ? 1.0 : std::numbers::sqrt2;
          em.pairwise[k].at(x, y) = pairwise_weight(intensity.at(x, y), intensity.at(x + o[0], y + o[1]), dist,
                                                    cfg.lambda, cfg.sigma_c, cfg.kappa);
        }
      }
  });
  return em;
}

double energy_of(const LabelField& labels, const EnergyModel& em) {
  if (labels.width != em.width || labels.height != em.height)
    throw InvalidArgument("energy_of: label field and energy sizes differ");
  const int dirs = em.direction_count();
  return parallel_reduce(
      0, static_cast<std::size_t>(em.height), 16, 0.0,
      [&](std::size_t y0, std::size_t y1) {
        double e = 0.0;
        for (int y = static_cast<int>(y0); y < static_cast<int>(y1); ++y)
          for (int x = 0; x < em.width; ++x) {
            const int a = labels.at(x, y);
            e += a ? em.unary1.at(x, y) : em.unary0.at(x, y);
            for (int k = 0; k < dirs; ++k) {
              if (!em.has_neighbor(x, y, k)) continue;
              const auto& o = EnergyModel::kOffsets[k];
              if (a != labels.at(x + o[0], y + o[1])) e += em.pairwise[k].at(x, y);
            }
          }
        return e;
      },
      [](double a, double b) { return a + b; });
}

FlowGraph energy_to_graph(const EnergyModel& em) {
  const std::size_t n = static_cast<std::size_t>(em.width) * static_cast<std::size_t>(em.height);
  const int dirs = em.direction_count();
  FlowGraph g(n, n * static_cast<std::size_t>(dirs));
  double offset = 0.0;
  for (int y = 0; y < em.height; ++y)
    for (int x = 0; x < em.width; ++x) {
      const std::size_t v = static_cast<std::size_t>(y) * em.width + x;
      const double u0 = em.unary0.at(x, y), u1 = em.unary1.at(x, y);
      const double m = std::min(u0, u1);
      offset += m;
      g.add_terminal_edges(v, u0 - m, u1 - m);
      for (int k = 0; k < dirs; ++k) {
        if (!em.has_neighbor(x, y, k)) continue;
        const double b = em.pairwise[k].at(x, y);
        if (b < 0.0) throw InvalidArgument("energy_to_graph: negative pairwise cost");
        if (b == 0.0) continue;
        const auto& o = EnergyModel::kOffsets[k];
        const std::size_t u = static_cast<std::size_t>(y + o[1]) * em.width + (x + o[0]);
        g.add_edge(v, u, b, b);
      }
    }
  g.offset = offset;
  return g;
}

LabelField minimize_energy(const EnergyModel& em) {
  return labels_from_cut(max_flow(energy_to_graph(em)), em.width, em.height);
}

}  // namespace salientcut
