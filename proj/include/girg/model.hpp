#pragma once

// Model parameters, Pareto weights and the capped weight products kappa.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "girg/random.hpp"

namespace girg {

/// L_p norm index, with p = infinity held as a distinct state.
class Norm {
 public:
  static constexpr Norm linf() noexcept { return Norm(); }
  static Norm lp(double p) {
    if (std::isinf(p) && p > 0) return linf();
    if (!(p >= 1.0)) throw std::invalid_argument("norm index p must lie in [1, inf]");
    Norm n;
    n.p_ = p;
    return n;
  }

  constexpr bool is_linf() const noexcept { return p_ == 0.0; }
  /// Finite index; +inf for L_inf.
  constexpr double p() const noexcept { return is_linf() ? std::numeric_limits<double>::infinity() : p_; }

  std::string to_string() const {
    if (is_linf()) return "inf";
    std::ostringstream os;
    os << p_;
    return os.str();
  }

  friend constexpr bool operator==(Norm a, Norm b) noexcept { return a.p_ == b.p_; }

 private:
  constexpr Norm() noexcept = default;
  double p_ = 0.0;  // 0 encodes infinity
};

/// Full parameterization of a GIRG / IRG instance.
struct ModelParams {
  std::uint64_t n = 1000;
  double beta = 2.5;
  double w0 = 1.0;
  double lambda = 1.0;
  int d = 1;
  Norm norm = Norm::linf();

  void validate() const {
    if (n < 1) throw std::invalid_argument("n must be at least 1");
    if (!(beta > 2.0) && !std::isinf(beta)) throw std::invalid_argument("beta must exceed 2");
    if (!(w0 > 0.0) || !std::isfinite(w0)) throw std::invalid_argument("w0 must be positive");
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("lambda must be positive");
    if (d < 1) throw std::invalid_argument("d must be at least 1");
  }

  /// ln(tau) with tau = 2^d / lambda; tau itself overflows for large d.
  double log_tau() const noexcept { return d * std::log(2.0) - std::log(lambda); }
};

/// Per-vertex weights, each at least w0.
class WeightSequence {
 public:
  WeightSequence() = default;
  explicit WeightSequence(std::vector<double> weights, double w0) : values_(std::move(weights)) {
    for (double w : values_)
      if (!(w >= w0)) throw std::invalid_argument("weight below w0");
  }
  /// Weights with no lower-bound check beyond positivity.
  static WeightSequence explicit_weights(std::vector<double> weights) {
    for (double w : weights)
      if (!(w > 0.0)) throw std::invalid_argument("weights must be positive");
    WeightSequence s;
    s.values_ = std::move(weights);
    return s;
  }

  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const noexcept { return values_[i]; }
  std::span<const double> values() const noexcept { return values_; }
  auto begin() const noexcept { return values_.begin(); }
  auto end() const noexcept { return values_.end(); }

 private:
  std::vector<double> values_;
};

inline double pareto_cdf(double x, double beta, double w0) {
  if (!(beta > 2.0)) throw std::domain_error("pareto_cdf: beta must exceed 2");
  if (!(w0 > 0.0)) throw std::domain_error("pareto_cdf: w0 must be positive");
  if (!(x >= w0)) throw std::domain_error("pareto_cdf: x below w0");
  if (std::isinf(x)) return 1.0;
  return -std::expm1((1.0 - beta) * std::log(x / w0));
}

inline double pareto_density(double x, double beta, double w0) {
  if (!(x >= w0)) throw std::domain_error("pareto_density: x below w0");
  return (beta - 1.0) / w0 * std::exp(-beta * std::log(x / w0));
}

/// Inverse CDF with survival draw u in (0, 1]: w = w0 * u^(1/(1-beta)).
inline double pareto_from_survival(double u, double beta, double w0) {
  if (!(u > 0.0 && u <= 1.0)) throw std::domain_error("pareto_from_survival: u must lie in (0, 1]");
  return w0 * std::exp(std::log(u) / (1.0 - beta));
}

/// Weight i depends only on (rng, i).
inline WeightSequence sample_weights(const ModelParams& params, const SeededStream& rng) {
  params.validate();
  std::vector<double> w(params.n);
  const SeededStream s = rng.substream(streams::kWeights);
  for (std::uint64_t i = 0; i < params.n; ++i)
    w[i] = std::isinf(params.beta) ? params.w0 : pareto_from_survival(s.uniform_open_left_at(i), params.beta, params.w0);
  return WeightSequence(std::move(w), params.w0);
}

inline WeightSequence constant_weights(std::uint64_t n, double w) {
  return WeightSequence(std::vector<double>(n, w), w);
}

inline double kappa(double w_u, double w_v, const ModelParams& params) noexcept {
  return std::min(params.lambda * (w_u * w_v), static_cast<double>(params.n));
}

inline double irg_edge_probability(double kappa_uv, std::uint64_t n) {
  if (!(kappa_uv > 0.0) || kappa_uv > static_cast<double>(n) * (1 + 1e-12))
    throw std::domain_error("irg_edge_probability: kappa must lie in (0, n]");
  return std::min(1.0, kappa_uv / static_cast<double>(n));
}

/// Density of the minimum of k i.i.d. Pareto(beta, w0) weights.
inline double min_weight_density(double x, int k, double beta, double w0) {
  if (k < 1) throw std::domain_error("min_weight_density: k must be at least 1");
  if (!(x >= w0)) throw std::domain_error("min_weight_density: x below w0");
  const double e = (1.0 - beta) * k;
  return (beta - 1.0) * k / x * std::exp(e * std::log(x / w0));
}

/// Density of a further weight given that the minimum of the tuple is w1.
inline double conditional_weight_density(double x, double w1, double beta) {
  if (!(x >= w1)) throw std::domain_error("conditional_weight_density: x below w1");
  return (beta - 1.0) / x * std::exp((1.0 - beta) * std::log(x / w1));
}

/// Lazy view of kappa_uv over a weight sequence.
class KappaMatrix {
 public:
  KappaMatrix(const WeightSequence& weights, const ModelParams& params) : weights_(&weights), params_(params) {}

  double operator()(std::size_t u, std::size_t v) const noexcept {
    return kappa((*weights_)[u], (*weights_)[v], params_);
  }
  /// Smallest off-diagonal entry.
  double min_entry() const {
    if (weights_->size() < 2) throw std::domain_error("KappaMatrix::min_entry needs two vertices");
    auto w = weights_->values();
    std::vector<double> sorted(w.begin(), w.end());
    std::partial_sort(sorted.begin(), sorted.begin() + 2, sorted.end());
    return kappa(sorted[0], sorted[1], params_);
  }
  std::size_t size() const noexcept { return weights_->size(); }

 private:
  const WeightSequence* weights_;
  ModelParams params_;
};

}  // namespace girg
