#pragma once

// Weighted k-means++ / k-means / EM for Gaussian mixtures in D dimensions.
// Shared by the spatial prior fit (D = 2) and the color models (D = 3).

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include "salientcut/parallel.hpp"
#include "salientcut/pixel_grid.hpp"
#include "salientcut/random.hpp"

namespace salientcut::gmm {

template <int D>
using Vec = Eigen::Matrix<double, D, 1>;
template <int D>
using Mat = Eigen::Matrix<double, D, D>;

template <int D>
struct Component {
  double weight = 0.0;
  Vec<D> mean = Vec<D>::Zero();
  Mat<D> cov = Mat<D>::Identity();
};

template <int D>
struct Mixture {
  std::vector<Component<D>> components;
};

struct FitOptions {
  double ridge = 1e-6;
  // false: cov += ridge * I. true: eigenvalues are raised to at least ridge,
  // leaving well-conditioned components at their exact M-step value.
  bool ridge_as_floor = false;
  double rel_tol = 1e-6;
  int max_em_iterations = 100;
  int max_kmeans_iterations = 10;
  double min_component_weight = 1e-8;
};

struct FitTrace {
  std::vector<double> log_likelihood;  // weight-normalized, one per E-step
  int iterations = 0;
};

/// Precomputed evaluation form of one component.
template <int D>
struct Evaluator {
  struct Term {
    double log_coef;  // log(weight) - 0.5 log det(2 pi cov)
    Vec<D> mean;
    Mat<D> inv_chol;  // L^{-1}, cov = L L^T
  };
  std::vector<Term> terms;

  explicit Evaluator(const Mixture<D>& m) {
    for (const auto& c : m.components) {
      Eigen::LLT<Mat<D>> llt(c.cov);
      Mat<D> l = llt.matrixL();
      double log_det = 0.0;
      for (int i = 0; i < D; ++i) log_det += 2.0 * std::log(l(i, i));
      Term t;
      t.log_coef = std::log(c.weight) - 0.5 * (D * std::log(2.0 * std::numbers::pi) + log_det);
      t.mean = c.mean;
      t.inv_chol = l.inverse();
      terms.push_back(t);
    }
  }

  double component_log(std::size_t k, const Vec<D>& x) const {
    const Vec<D> z = terms[k].inv_chol * (x - terms[k].mean);
    return terms[k].log_coef - 0.5 * z.squaredNorm();
  }

  /// log of the mixture density.
  double log_density(const Vec<D>& x) const {
    double mx = -std::numeric_limits<double>::infinity();
    double buf[16];
    const std::size_t k = terms.size();
    for (std::size_t j = 0; j < k; ++j) {
      buf[j] = component_log(j, x);
      mx = std::max(mx, buf[j]);
    }
    if (!std::isfinite(mx)) return mx;
    double s = 0.0;
    for (std::size_t j = 0; j < k; ++j) s += std::exp(buf[j] - mx);
    return mx + std::log(s);
  }
};

namespace detail {

constexpr std::size_t kGrain = 1024;

template <int D>
double sq_dist(const Vec<D>& a, const Vec<D>& b) {
  return (a - b).squaredNorm();
}

// Index drawn with probability proportional to mass[i].
inline std::size_t draw_index(const std::vector<double>& mass, double u) {
  double total = 0.0;
  for (double m : mass) total += m;
  double target = u * total, run = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < mass.size(); ++i) {
    if (mass[i] <= 0.0) continue;
    last_positive = i;
    run += mass[i];
    if (run > target) return i;
  }
  return last_positive;
}

template <int D>
std::vector<Vec<D>> kmeans_pp(const std::vector<Vec<D>>& x, const std::vector<double>& w, int k,
                              std::mt19937_64& rng) {
  std::vector<Vec<D>> centers;
  centers.push_back(x[draw_index(w, unit_double(rng()))]);
  std::vector<double> d2(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) d2[i] = sq_dist<D>(x[i], centers[0]);
  while (static_cast<int>(centers.size()) < k) {
    std::vector<double> mass(x.size());
    double total = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) total += (mass[i] = w[i] * d2[i]);
    if (!(total > 0.0)) break;  // every weighted sample already coincides with a center
    centers.push_back(x[draw_index(mass, unit_double(rng()))]);
    for (std::size_t i = 0; i < x.size(); ++i) d2[i] = std::min(d2[i], sq_dist<D>(x[i], centers.back()));
  }
  return centers;
}

template <int D>
std::vector<int> assign(const std::vector<Vec<D>>& x, const std::vector<Vec<D>>& centers) {
  std::vector<int> label(x.size());
  parallel_for(0, x.size(), kGrain, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      double best = std::numeric_limits<double>::infinity();
      int arg = 0;
      for (std::size_t c = 0; c < centers.size(); ++c) {
        const double d = sq_dist<D>(x[i], centers[c]);
        if (d < best) {
          best = d;
          arg = static_cast<int>(c);
        }
      }
      label[i] = arg;
    }
  });
  return label;
}

template <int D>
struct Moments {
  std::vector<double> n;
  std::vector<Vec<D>> s1;
  std::vector<Mat<D>> s2;
  double ll = 0.0;

  explicit Moments(std::size_t k = 0) : n(k, 0.0), s1(k, Vec<D>::Zero()), s2(k, Mat<D>::Zero()) {}
  void add(const Moments& o) {
    for (std::size_t c = 0; c < n.size(); ++c) {
      n[c] += o.n[c];
      s1[c] += o.s1[c];
      s2[c] += o.s2[c];
    }
    ll += o.ll;
  }
};

template <int D>
Mixture<D> from_moments(const Moments<D>& m, const FitOptions& opt) {
  Mixture<D> mix;
  double total = 0.0;
  for (double v : m.n) total += v;
  for (std::size_t c = 0; c < m.n.size(); ++c) {
    Component<D> comp;
    comp.weight = total > 0 ? m.n[c] / total : 0.0;
    if (m.n[c] > 0) {
      comp.mean = m.s1[c] / m.n[c];
      comp.cov = m.s2[c] / m.n[c] - comp.mean * comp.mean.transpose();
      comp.cov = 0.5 * (comp.cov + comp.cov.transpose()).eval();
      Eigen::SelfAdjointEigenSolver<Mat<D>> es(comp.cov);
      if (opt.ridge_as_floor) {
        if (es.eigenvalues().minCoeff() < opt.ridge) {
          const Vec<D> ev = es.eigenvalues().cwiseMax(opt.ridge);
          comp.cov = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
        }
      } else {
        // Clip tiny negative eigenvalues from cancellation before the ridge.
        const Vec<D> ev = es.eigenvalues().cwiseMax(0.0);
        comp.cov = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose() +
                   opt.ridge * Mat<D>::Identity();
      }
    } else {
      comp.cov = opt.ridge * Mat<D>::Identity();
    }
    mix.components.push_back(comp);
  }
  return mix;
}

template <int D>
Mixture<D> init_from_kmeans(const std::vector<Vec<D>>& x, const std::vector<double>& w, int k, std::uint64_t seed,
                            const FitOptions& opt) {
  std::mt19937_64 rng(seed);
  std::vector<Vec<D>> centers = kmeans_pp<D>(x, w, k, rng);
  std::vector<int> label = assign<D>(x, centers);
  for (int it = 0; it < opt.max_kmeans_iterations; ++it) {
    std::vector<Vec<D>> sum(centers.size(), Vec<D>::Zero());
    std::vector<double> mass(centers.size(), 0.0);
    for (std::size_t i = 0; i < x.size(); ++i) {
      sum[label[i]] += w[i] * x[i];
      mass[label[i]] += w[i];
    }
    for (std::size_t c = 0; c < centers.size(); ++c)
      if (mass[c] > 0) centers[c] = sum[c] / mass[c];
    std::vector<int> next = assign<D>(x, centers);
    const bool stable = next == label;
    label = std::move(next);
    if (stable) break;
  }
  Moments<D> m(centers.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const auto c = static_cast<std::size_t>(label[i]);
    m.n[c] += w[i];
    m.s1[c] += w[i] * x[i];
    m.s2[c] += w[i] * x[i] * x[i].transpose();
  }
  Mixture<D> mix = from_moments<D>(m, opt);
  std::erase_if(mix.components, [&](const Component<D>& c) { return c.weight < opt.min_component_weight; });
  double total = 0.0;
  for (auto& c : mix.components) total += c.weight;
  for (auto& c : mix.components) c.weight /= total;
  return mix;
}

// E-step over all samples; returns responsibility-weighted moments and the
// weighted log-likelihood of the current mixture.
template <int D>
Moments<D> e_step(const std::vector<Vec<D>>& x, const std::vector<double>& w, const Mixture<D>& mix) {
  const Evaluator<D> ev(mix);
  const std::size_t k = mix.components.size();
  return parallel_reduce(
      std::size_t{0}, x.size(), kGrain, Moments<D>(k),
      [&](std::size_t lo, std::size_t hi) {
        Moments<D> part(k);
        double logs[16];
        for (std::size_t i = lo; i < hi; ++i) {
          double mx = -std::numeric_limits<double>::infinity();
          for (std::size_t c = 0; c < k; ++c) {
            logs[c] = ev.component_log(c, x[i]);
            mx = std::max(mx, logs[c]);
          }
          double s = 0.0;
          for (std::size_t c = 0; c < k; ++c) s += (logs[c] = std::exp(logs[c] - mx));
          part.ll += w[i] * (mx + std::log(s));
          for (std::size_t c = 0; c < k; ++c) {
            const double r = w[i] * logs[c] / s;
            part.n[c] += r;
            part.s1[c] += r * x[i];
            part.s2[c] += r * x[i] * x[i].transpose();
          }
        }
        return part;
      },
      [](Moments<D> a, const Moments<D>& b) {
        a.add(b);
        return a;
      });
}

}  // namespace detail

/// Weighted EM. `x` must be centered/scaled by the caller if needed; `w` are
/// nonnegative and normalized to sum 1 here. Components whose weight falls
/// below min_component_weight are dropped and the fit restarts with fewer.
template <int D>
Mixture<D> fit(const std::vector<Vec<D>>& x, std::vector<double> w, int k, std::uint64_t seed,
               const FitOptions& opt = {}, FitTrace* trace = nullptr) {
  double total = 0.0;
  for (double v : w) total += v;
  if (!(total > 0.0)) throw InvalidArgument("weighted GMM: weights must have a positive sum");
  for (double& v : w) v /= total;
  if (k < 1) throw InvalidArgument("weighted GMM: component count must be >= 1");
  if (k > 16) throw InvalidArgument("weighted GMM: at most 16 components are supported");

  for (int kk = k; kk >= 1; --kk) {
    Mixture<D> mix = detail::init_from_kmeans<D>(x, w, kk, seed, opt);
    if (trace) *trace = FitTrace{};
    bool degenerate = false;
    double prev_ll = -std::numeric_limits<double>::infinity();
    for (int it = 0; it < opt.max_em_iterations; ++it) {
      detail::Moments<D> m = detail::e_step<D>(x, w, mix);
      if (trace) {
        trace->log_likelihood.push_back(m.ll);
        trace->iterations = it;
      }
      if (it > 0 && (m.ll - prev_ll) < opt.rel_tol * std::abs(prev_ll)) break;
      prev_ll = m.ll;
      Mixture<D> next = detail::from_moments<D>(m, opt);
      if (std::any_of(next.components.begin(), next.components.end(),
                      [&](const Component<D>& c) { return c.weight < opt.min_component_weight; })) {
        degenerate = true;
        break;
      }
      mix = std::move(next);
    }
    if (!degenerate) return mix;
    kk = std::min<int>(kk, static_cast<int>(mix.components.size()));
  }
  throw InvalidArgument("weighted GMM: EM collapsed to zero components");
}

}  // namespace salientcut::gmm
