#pragma once

// Closed-form probabilities, bounds and asymptotic regime tables.

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "girg/graph.hpp"

namespace girg {

struct BoundInterval {
  double lower;
  double upper;
  bool contains(double x) const noexcept { return lower <= x && x <= upper; }
};

/// A bound that may be vacuous outside its regime.
struct FlaggedBound {
  double value;
  bool valid;
};

enum class RegimeLabel { geometric_dominated, nongeometric_dominated, vanishing, boundary };

inline const char* to_string(RegimeLabel l) noexcept {
  switch (l) {
    case RegimeLabel::geometric_dominated: return "geometric-dominated";
    case RegimeLabel::nongeometric_dominated: return "nongeometric-dominated";
    case RegimeLabel::vanishing: return "vanishing";
    case RegimeLabel::boundary: return "boundary";
  }
  return "?";
}

struct RegimePrediction {
  RegimeLabel label;
  std::optional<double> n_exponent;
  std::string decay_form;
  /// ln of the explicit geometric decay factor, when one is attached.
  std::optional<double> log_decay;
};

/// Growth of d relative to n, as in the table columns.
enum class DimRegime { constant, loglog, sublog, superlog, superlog_squared };

namespace detail {

inline double neumaier_sum(const std::vector<double>& xs) noexcept {
  double sum = 0.0, c = 0.0;
  for (double x : xs) {
    const double t = sum + x;
    c += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
    sum = t;
  }
  return sum + c;
}

/// 1 - (kappa/n)^(1/d), accurate when the result is tiny.
inline double one_minus_root(double kappa, double n, int d) noexcept {
  return -std::expm1(std::log(kappa / n) / d);
}

inline bool near(double a, double b) noexcept { return std::abs(a - b) < 1e-9; }

}  // namespace detail

struct LogBoundInterval {
  double log_lower;
  double log_upper;
  bool strict_lower;  // the proof's constant is strictly below the reported one
  BoundInterval interval() const { return {std::exp(log_lower), std::exp(log_upper)}; }
};

/// C(n, k) lies in [(n / 2k)^k, (e n / k)^k] for 1 <= k <= n / 2.
inline LogBoundInterval binomial_approx_bounds(std::uint64_t n, std::uint64_t k) {
  if (k < 1 || 2 * k > n) throw std::domain_error("binomial_approx_bounds: need 1 <= k <= n/2");
  const double ln_n = std::log(static_cast<double>(n)), ln_k = std::log(static_cast<double>(k));
  const double kk = static_cast<double>(k);
  return {kk * (ln_n - std::log(2.0) - ln_k), kk * (ln_n + 1.0 - ln_k), true};
}

/// Upper bound on Pr[U_k is a star centred at the minimum-weight vertex
/// with w_1 in [w_minus, w_plus]].
inline double star_prob_upper(int k, double beta, double w0, double lambda, double n, double w_minus, double w_plus) {
  if (!(w0 <= w_minus && w_minus <= w_plus)) throw std::domain_error("star_prob_upper: need w0 <= w_minus <= w_plus");
  if (!(beta > 2.0)) throw std::domain_error("star_prob_upper: beta must exceed 2");
  const double x = k * (3.0 - beta) - 2.0;
  const double common = (beta - 1.0) * k * std::pow(w0, (beta - 1.0) * k) * std::pow(lambda / n, k - 1) *
                        std::pow((beta - 1.0) / (beta - 2.0), k - 1);
  if (std::abs(x) < 1e-9) return common * std::log(w_plus / w_minus);
  return common * (std::pow(w_plus, x) - std::pow(w_minus, x)) / x;
}

/// n-exponent of the upper bound on q_k.
inline RegimePrediction qk_regime_upper(int k, double beta, double /*n*/ = 0.0) {
  if (!(beta > 2.0)) throw std::domain_error("qk_regime_upper: beta must exceed 2");
  if (k < 3) throw std::domain_error("qk_regime_upper: k must be at least 3");
  if (beta < 3.0) {
    const double kc = 2.0 / (3.0 - beta);
    if (detail::near(k, kc)) return {RegimeLabel::boundary, std::nullopt, "k = 2/(3-beta)", std::nullopt};
    if (k > kc) return {RegimeLabel::nongeometric_dominated, 0.5 * k * (1.0 - beta), "Theta(1)^k", std::nullopt};
  }
  if (detail::near(beta, 3.0)) return {RegimeLabel::boundary, 1.0 - k, "beta = 3", std::nullopt};
  return {RegimeLabel::geometric_dominated, 1.0 - k, "Theta(1)^k", std::nullopt};
}

/// Low-dimensional lower bound on q_k; the low-weight branch carries 2^(-dk).
inline RegimePrediction qk_lower_lowdim(int k, double beta, int d, double n = 0.0) {
  auto r = qk_regime_upper(k, beta, n);
  if (r.label == RegimeLabel::geometric_dominated ||
      (r.label == RegimeLabel::boundary && r.decay_form == "beta = 3")) {
    r.decay_form = "Theta(1)^k 2^(-dk)";
    r.log_decay = -static_cast<double>(d) * k * std::log(2.0);
  }
  return r;
}

/// Exact Pr[clique | star] when w_2 = ... = w_k = ratio * w_1.
inline double cond_clique_prob_uniform(int k, int d, double ratio) {
  if (k < 2) throw std::domain_error("cond_clique_prob_uniform: k must be at least 2");
  if (!(ratio >= 1.0)) throw std::domain_error("cond_clique_prob_uniform: ratio must be at least 1");
  if (k == 2) return 1.0;
  const double rho = std::exp(std::log(ratio) / d);
  const double s = std::min(1.0, rho / 2.0);  // range of k-1 points relative to the box side
  const double m = k - 1.0;
  const double per_dim = std::pow(s, m - 1.0) * (m - (m - 1.0) * s);
  return std::pow(per_dim, d);
}

inline BoundInterval theorem3_sandwich(int k, int d, double c) {
  if (k < 3 || d < 1 || !(c >= 1.0)) throw std::domain_error("theorem3_sandwich: need k >= 3, d >= 1, c >= 1");
  const double log_lower = d * ((k - 1.0) * std::log(0.5) + std::log(static_cast<double>(k)));
  const double log_upper = log_lower + d * (k - 2.0) * std::log(c);
  return {std::exp(log_lower), std::min(1.0, std::exp(log_upper))};
}

/// (1 - (kappa0/n)^(r/d) * sum_A (1 - (kappa_ij/n)^(1/d)))^d with
/// r = (3(k-2)+1)(k-1); vacuous (1, invalid) if the base is negative.
inline FlaggedBound highdim_superset_upper(int k, int d, const std::vector<double>& kappa_list, double kappa0,
                                           double n) {
  if (kappa_list.empty()) return {1.0, true};
  std::vector<double> terms;
  for (double kij : kappa_list) terms.push_back(detail::one_minus_root(kij, n, d));
  const double r = (3.0 * (k - 2) + 1.0) * (k - 1);
  const double inner = std::exp(r * std::log(kappa0 / n) / d) * detail::neumaier_sum(terms);
  if (inner > 1.0) return {1.0, false};
  return {std::exp(d * std::log1p(-inner)), true};
}

/// prod_i (1 - sum_{j<i, {i,j} in A} (1 - (kappa_ij/n)^(1/d)))^d; vacuous
/// (0, invalid) if an inner sum reaches 1.
inline FlaggedBound highdim_superset_lower(int d, const std::vector<std::vector<double>>& kappa, double n,
                                           const std::vector<Edge>& edge_set) {
  const std::size_t k = kappa.size();
  std::vector<std::vector<double>> earlier(k);
  for (auto [a, b] : edge_set) {
    if (a >= k || b >= k || a == b) throw std::invalid_argument("highdim_superset_lower: bad edge");
    const std::size_t i = std::max(a, b), j = std::min(a, b);
    earlier[i].push_back(detail::one_minus_root(kappa[i][j], n, d));
  }
  double log_value = 0.0;
  for (const auto& terms : earlier) {
    if (terms.empty()) continue;
    const double s = detail::neumaier_sum(terms);
    if (s >= 1.0) return {0.0, false};
    log_value += d * std::log1p(-s);
  }
  return {std::exp(log_value), true};
}

/// Pr[v2 ~ v3 | v1 ~ v2, v3] for constant weights with per-dimension arc
/// a = (kappa0/n)^(1/d) in [2/3, 1].
inline double triangle_cond_prob(double a, int d) {
  if (!(a >= 2.0 / 3.0 - 1e-15 && a <= 1.0)) throw std::domain_error("triangle_cond_prob: a must lie in [2/3, 1]");
  const double miss = (1.0 - a) * (2.0 * a - 1.0) / (a * a);
  return std::exp(d * std::log1p(-miss));
}

struct ExponentCorrection {
  double exponent;         // 1 - 3 ln^2(n) / (4 d^2), as stated
  double series_exponent;  // 1 - ln^2(n/kappa0) / d^2, from expanding d ln q directly
  double error;            // ln^3(n) / d^3
};

inline ExponentCorrection triangle_exponent_correction(double n, int d, double kappa0 = 1.0) {
  const double ln_n = std::log(n), dd = d;
  const double x = std::log(n / kappa0) / dd;
  return {1.0 - 3.0 * ln_n * ln_n / (4.0 * dd * dd), 1.0 - x * x, ln_n * ln_n * ln_n / (dd * dd * dd)};
}

struct PowerBounds {
  BoundInterval interval;
  bool small;  // -ell ln(psi) / d <= 0.1
};

/// Interval containing 1 - psi^(ell/d).
inline PowerBounds one_minus_power_bounds(double psi, double ell, int d) {
  if (!(psi > 0.0 && psi < 1.0)) throw std::domain_error("one_minus_power_bounds: psi must lie in (0, 1)");
  const double x = -ell * std::log(psi) / d;
  return {{x - std::exp(1.0) * x * x, x}, x <= 0.1};
}

namespace detail {

inline bool low_dim(DimRegime r) noexcept { return r == DimRegime::loglog || r == DimRegime::sublog; }
inline bool high_dim(DimRegime r) noexcept { return r == DimRegime::superlog || r == DimRegime::superlog_squared; }

inline RegimePrediction triangle_regime(double beta, DimRegime r) {
  const double nongeo = 1.5 * (3.0 - beta);
  if (near(beta, 7.0 / 3.0)) return {RegimeLabel::boundary, std::nullopt, "beta = 7/3", std::nullopt};
  if (near(beta, 3.0)) return {RegimeLabel::boundary, std::nullopt, "beta = 3", std::nullopt};
  if (beta < 7.0 / 3.0) return {RegimeLabel::nongeometric_dominated, nongeo, "Theta(1)", std::nullopt};
  if (beta < 3.0) {
    if (high_dim(r)) return {RegimeLabel::nongeometric_dominated, nongeo, "Theta(1)", std::nullopt};
    return {RegimeLabel::geometric_dominated, 1.0, r == DimRegime::constant ? "Theta(1)" : "exp(-Theta(1)d)",
            std::nullopt};
  }
  if (r == DimRegime::superlog_squared) return {RegimeLabel::nongeometric_dominated, 0.0, "Theta(1)", std::nullopt};
  if (r == DimRegime::superlog)
    return {RegimeLabel::geometric_dominated, std::nullopt,
            std::isinf(beta) ? "Theta(exp(ln^3(n)/d^2))" : "Omega(exp(ln^3(n)/d^2))", std::nullopt};
  return {RegimeLabel::geometric_dominated, 1.0, r == DimRegime::constant ? "Theta(1)" : "exp(-Theta(1)d)",
          std::nullopt};
}

}  // namespace detail

/// The table cell for E[K_k]; k = 3 uses the triangle table, where
/// beta = infinity stands for constant weights.
inline RegimePrediction expected_kk_regime(double beta, int k, DimRegime r) {
  if (!(beta > 2.0)) throw std::domain_error("expected_kk_regime: beta must exceed 2");
  if (k < 3) throw std::domain_error("expected_kk_regime: k must be at least 3");
  if (k == 3) return detail::triangle_regime(beta, r);
  const std::string kk = "Theta(k)^-k";
  if (detail::near(beta, 3.0)) return {RegimeLabel::boundary, std::nullopt, "beta = 3", std::nullopt};
  if (beta < 3.0) {
    const double kc = 2.0 / (3.0 - beta);
    if (detail::near(k, kc)) return {RegimeLabel::boundary, std::nullopt, "k = 2/(3-beta)", std::nullopt};
    const double nongeo = 0.5 * k * (3.0 - beta);
    if (k > kc || detail::high_dim(r)) return {RegimeLabel::nongeometric_dominated, nongeo, kk, std::nullopt};
  } else if (detail::high_dim(r)) {
    return {RegimeLabel::vanishing, std::nullopt, "o(1)", std::nullopt};
  }
  return {RegimeLabel::geometric_dominated, 1.0, detail::low_dim(r) ? "exp(-Theta(1)dk) " + kk : kk, std::nullopt};
}

/// The table cell for the clique number omega(G).
inline RegimePrediction clique_number_regime(double beta, DimRegime r) {
  if (!(beta > 2.0)) throw std::domain_error("clique_number_regime: beta must exceed 2");
  const bool early = r == DimRegime::constant || r == DimRegime::loglog;
  if (beta < 3.0 && !detail::near(beta, 3.0))
    return {RegimeLabel::nongeometric_dominated, 0.5 * (3.0 - beta), "Theta(n^((3-beta)/2))", std::nullopt};
  if (detail::near(beta, 3.0))
    return {RegimeLabel::boundary, std::nullopt,
            early ? "Theta(log(n)/loglog(n))" : r == DimRegime::sublog ? "Omega(log(n)/d)" : "O(1)", std::nullopt};
  if (early) return {RegimeLabel::geometric_dominated, 0.0, "Theta(log(n)/loglog(n))", std::nullopt};
  if (r == DimRegime::sublog) return {RegimeLabel::geometric_dominated, 0.0, "Theta(log(n)/d)", std::nullopt};
  return {RegimeLabel::vanishing, 0.0, "<= 3", std::nullopt};
}

/// Principal branch of the Lambert W function for z >= 0.
inline double lambert_w(double z) {
  if (!(z >= 0.0)) throw std::domain_error("lambert_w: z must be non-negative");
  if (z == 0.0) return 0.0;
  if (std::isinf(z)) return z;
  double w = z < 3.0 ? std::log1p(z) * (1.0 - std::log1p(std::log1p(z)) / (2.0 + std::log1p(z)))
                     : std::log(z) - std::log(std::log(z));
  for (int it = 0; it < 64; ++it) {
    const double ew = std::exp(w);
    const double f = w * ew - z;
    const double wp1 = w + 1.0;
    const double step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1));
    w -= step;
    if (std::abs(step) <= 1e-15 * (1.0 + std::abs(w))) break;
  }
  return w;
}

/// Clique size k solving (a k)^(-k) = n^(-1-epsilon) with a = c1 exp(c2 d).
inline double clique_number_point_prediction(double n, double d, double c1, double c2, double epsilon) {
  if (!(c1 > 0.0) || !(c2 >= 0.0)) throw std::domain_error("clique_number_point_prediction: need c1 > 0, c2 >= 0");
  const double a = c1 * std::exp(c2 * d);
  const double big_l = (1.0 + epsilon) * std::log(n);
  return std::exp(lambert_w(a * big_l)) / a;
}

/// prod_A kappa_ij / n.
inline double irg_superset_probability(const std::vector<double>& kappa_list, double n) {
  double log_p = 0.0;
  for (double k : kappa_list) log_p += std::log(k / n);
  return std::exp(log_p);
}

}  // namespace girg
