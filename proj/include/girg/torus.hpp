#pragma once

// Torus positions, distances, connection thresholds and the law of
// sum_i Delta_i^p used for finite-p thresholds.

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "girg/model.hpp"
#include "girg/random.hpp"

namespace girg {

struct TorusPoint {
  std::vector<double> coords;

  TorusPoint() = default;
  explicit TorusPoint(std::vector<double> c) : coords(std::move(c)) {
    for (double x : coords)
      if (!(x >= 0.0 && x < 1.0)) throw std::invalid_argument("torus coordinate outside [0, 1)");
  }
  std::size_t dim() const noexcept { return coords.size(); }
};

inline double circle_distance(double a, double b) noexcept {
  const double diff = std::abs(a - b);
  return std::min(diff, 1.0 - diff);
}

inline double torus_distance(std::span<const double> x, std::span<const double> y, Norm norm) {
  if (x.size() != y.size()) throw std::invalid_argument("torus_distance: dimension mismatch");
  if (norm.is_linf()) {
    double m = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) m = std::max(m, circle_distance(x[i], y[i]));
    return m;
  }
  const double p = norm.p();
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += std::pow(circle_distance(x[i], y[i]), p);
  return std::pow(s, 1.0 / p);
}

inline double torus_distance(const TorusPoint& x, const TorusPoint& y, Norm norm) {
  return torus_distance(std::span<const double>(x.coords), std::span<const double>(y.coords), norm);
}

/// Coordinate j of vertex v; a pure function of (rng, v, j).
inline double position_coordinate(const SeededStream& positions, std::uint64_t v, int j) noexcept {
  return positions.substream(v).uniform_at(static_cast<std::uint64_t>(j));
}

/// Flat row-major n x d array of uniform torus positions.
inline std::vector<double> sample_positions(std::uint64_t n, int d, const SeededStream& rng) {
  const SeededStream s = rng.substream(streams::kPositions);
  std::vector<double> pos(n * static_cast<std::size_t>(d));
  for (std::uint64_t v = 0; v < n; ++v) {
    const SeededStream sv = s.substream(v);
    for (int j = 0; j < d; ++j) pos[v * d + j] = sv.uniform_at(static_cast<std::uint64_t>(j));
  }
  return pos;
}

/// ln of the uncapped L_inf threshold 0.5 * (lambda w_u w_v / n)^(1/d).
inline double log_threshold_linf(double w_u, double w_v, const ModelParams& params) noexcept {
  return (std::log(params.lambda) + std::log(w_u) + std::log(w_v) - std::log(static_cast<double>(params.n))) /
             params.d -
         std::log(2.0);
}

inline double connection_threshold_linf(double w_u, double w_v, const ModelParams& params) noexcept {
  return std::min(0.5, std::exp(log_threshold_linf(w_u, w_v, params)));
}

inline double ball_volume_linf(double r, int d) {
  if (!(r >= 0.0)) throw std::domain_error("ball_volume_linf: negative radius");
  if (r >= 0.5) return 1.0;
  return std::exp(d * std::log(2.0 * r));
}

struct CltConstants {
  double mu;
  double sigma2;
};

/// Moments of Delta^p for Delta uniform on [0, 1/2].
inline CltConstants clt_constants(Norm norm) {
  if (norm.is_linf()) throw std::domain_error("clt_constants: requires a finite norm index");
  const double p = norm.p();
  const double h = std::pow(0.5, p);
  return {h / (p + 1.0), h * h * (1.0 / (2.0 * p + 1.0) - 1.0 / ((p + 1.0) * (p + 1.0)))};
}

/// Lattice approximation of the law of S_d = sum_{i<d} Delta_i^p.
///
/// The base law is discretized onto a lattice with mean-preserving linear
/// splitting, the d-fold convolution is taken by FFT squaring, and the
/// lattice is halved whenever it grows beyond `max_bins`. Each lattice atom
/// is spread uniformly over one spacing when reading off the CDF.
class LpSumDistribution {
 public:
  LpSumDistribution(double p, int d, std::size_t base_bins = 1 << 14, std::size_t max_bins = 1 << 16)
      : p_(p), d_(d) {
    if (!(p >= 1.0) || std::isinf(p)) throw std::domain_error("LpSumDistribution: p must be finite and >= 1");
    if (d < 1) throw std::domain_error("LpSumDistribution: d must be positive");
    const double top = std::pow(0.5, p);
    const double h = top / static_cast<double>(base_bins);
    std::vector<double> base(base_bins + 1, 0.0);
    const double e = (1.0 + p) / p;
    auto cdf = [&](double x) { return 2.0 * std::pow(x, 1.0 / p); };
    auto first_moment = [&](double x) { return 2.0 / (1.0 + p) * std::pow(x, e); };
    for (std::size_t j = 0; j < base_bins; ++j) {
      const double a = j * h, b = (j + 1 == base_bins) ? top : (j + 1) * h;
      const double mass = cdf(b) - cdf(a);
      if (mass <= 0.0) continue;
      const double frac = ((first_moment(b) - first_moment(a)) / mass - a) / h;
      base[j] += mass * (1.0 - frac);
      base[j + 1] += mass * frac;
    }
    Lattice acc{{1.0}, h};
    Lattice power{std::move(base), h};
    for (int rem = d;;) {
      if (rem & 1) acc = convolve(acc, power, max_bins);
      rem >>= 1;
      if (!rem) break;
      power = convolve(power, power, max_bins);
    }
    spacing_ = acc.spacing;
    cumulative_.resize(acc.pmf.size() + 1);
    cumulative_[0] = 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i < acc.pmf.size(); ++i) {
      total += std::max(0.0, acc.pmf[i]);
      cumulative_[i + 1] = total;
    }
    for (double& c : cumulative_) c /= total;
  }

  double p() const noexcept { return p_; }
  int d() const noexcept { return d_; }
  double spacing() const noexcept { return spacing_; }

  /// Pr[S_d <= s].
  double cdf(double s) const noexcept {
    const double x = s / spacing_ + 0.5;  // atom i covers [i - 1/2, i + 1/2)
    if (x <= 0.0) return 0.0;
    const std::size_t atoms = cumulative_.size() - 1;
    if (x >= static_cast<double>(atoms)) return 1.0;
    const auto i = static_cast<std::size_t>(x);
    const double f = x - static_cast<double>(i);
    return cumulative_[i] + f * (cumulative_[i + 1] - cumulative_[i]);
  }

  /// Smallest s with cdf(s) = q.
  double quantile(double q) const {
    if (!(q > 0.0 && q < 1.0)) throw std::domain_error("LpSumDistribution::quantile: q must lie in (0, 1)");
    const auto it = std::lower_bound(cumulative_.begin() + 1, cumulative_.end(), q);
    const auto i = static_cast<std::size_t>(it - cumulative_.begin()) - 1;
    const double width = cumulative_[i + 1] - cumulative_[i];
    const double f = width > 0.0 ? (q - cumulative_[i]) / width : 0.0;
    return (static_cast<double>(i) + f - 0.5) * spacing_;
  }

 private:
  struct Lattice {
    std::vector<double> pmf;
    double spacing;
  };

  static std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
  }

  static Lattice convolve(Lattice a, Lattice b, std::size_t max_bins) {
    while (a.spacing < 0.75 * b.spacing) a = coarsen(a);
    while (b.spacing < 0.75 * a.spacing) b = coarsen(b);
    const std::size_t len = a.pmf.size() + b.pmf.size() - 1;
    std::size_t size = 1;
    while (size < len) size <<= 1;
    const std::size_t spectrum = size / 2 + 1;
    auto* in = fftw_alloc_real(size);
    auto* fa = fftw_alloc_complex(spectrum);
    auto* fb = fftw_alloc_complex(spectrum);
    fftw_plan forward_a, forward_b, backward;
    {
      std::lock_guard lock(planner_mutex());
      forward_a = fftw_plan_dft_r2c_1d(static_cast<int>(size), in, fa, FFTW_ESTIMATE);
      forward_b = fftw_plan_dft_r2c_1d(static_cast<int>(size), in, fb, FFTW_ESTIMATE);
      backward = fftw_plan_dft_c2r_1d(static_cast<int>(size), fa, in, FFTW_ESTIMATE);
    }
    std::fill(in, in + size, 0.0);
    std::copy(a.pmf.begin(), a.pmf.end(), in);
    fftw_execute(forward_a);
    std::fill(in, in + size, 0.0);
    std::copy(b.pmf.begin(), b.pmf.end(), in);
    fftw_execute(forward_b);
    for (std::size_t i = 0; i < spectrum; ++i) {
      const std::complex<double> x(fa[i][0], fa[i][1]), y(fb[i][0], fb[i][1]);
      const auto z = x * y;
      fa[i][0] = z.real();
      fa[i][1] = z.imag();
    }
    fftw_execute(backward);
    Lattice out{std::vector<double>(len), a.spacing};
    for (std::size_t i = 0; i < len; ++i) out.pmf[i] = std::max(0.0, in[i] / static_cast<double>(size));
    {
      std::lock_guard lock(planner_mutex());
      fftw_destroy_plan(forward_a);
      fftw_destroy_plan(forward_b);
      fftw_destroy_plan(backward);
    }
    fftw_free(in);
    fftw_free(fa);
    fftw_free(fb);
    while (out.pmf.size() > max_bins) out = coarsen(out);
    return out;
  }

  // Halves the lattice; odd atoms split evenly between their neighbours.
  static Lattice coarsen(const Lattice& l) {
    Lattice out{std::vector<double>(l.pmf.size() / 2 + 1, 0.0), 2.0 * l.spacing};
    for (std::size_t i = 0; i < l.pmf.size(); ++i) {
      if (i % 2 == 0) {
        out.pmf[i / 2] += l.pmf[i];
      } else {
        out.pmf[i / 2] += 0.5 * l.pmf[i];
        out.pmf[i / 2 + 1] += 0.5 * l.pmf[i];
      }
    }
    return out;
  }

  double p_;
  int d_;
  double spacing_ = 0.0;
  std::vector<double> cumulative_;
};

/// Shared, lazily built distributions keyed by (p, d).
inline std::shared_ptr<const LpSumDistribution> lp_sum_distribution(double p, int d) {
  static std::mutex m;
  static std::map<std::pair<double, int>, std::shared_ptr<const LpSumDistribution>> cache;
  std::lock_guard lock(m);
  auto& slot = cache[{p, d}];
  if (!slot) slot = std::make_shared<const LpSumDistribution>(p, d);
  return slot;
}

struct ThresholdQuantile {
  double t;
  double achieved_accuracy;
};

/// Threshold t with Pr[sum_i Delta_i^p <= t^p] = q.
inline ThresholdQuantile threshold_quantile_lp(double q, Norm norm, int d,
                                               double accuracy = std::numeric_limits<double>::infinity()) {
  if (norm.is_linf()) throw std::domain_error("threshold_quantile_lp: requires a finite norm index");
  if (!(q > 0.0 && q < 1.0)) throw std::domain_error("threshold_quantile_lp: q must lie in (0, 1)");
  const double p = norm.p();
  const auto dist = lp_sum_distribution(p, d);
  const double s = dist->quantile(q);
  const double h = dist->spacing();
  const double t = std::pow(std::max(s, 0.0), 1.0 / p);
  const double err = std::max(std::pow(s + h, 1.0 / p) - t, t - std::pow(std::max(s - h, 0.0), 1.0 / p));
  if (err > accuracy)
    throw std::runtime_error("threshold_quantile_lp: requested accuracy not reachable on the lattice");
  return {t, err};
}

inline ThresholdQuantile threshold_quantile_lp(double w_u, double w_v, const ModelParams& params,
                                               double accuracy = std::numeric_limits<double>::infinity()) {
  return threshold_quantile_lp(kappa(w_u, w_v, params) / static_cast<double>(params.n), params.norm, params.d,
                               accuracy);
}

}  // namespace girg
