#include <algorithm>
#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "girg/estimators.hpp"
#include "girg/theory.hpp"

using namespace girg;

namespace {

double exact_binomial(std::uint64_t n, std::uint64_t k) {
  unsigned __int128 c = 1;
  for (std::uint64_t i = 0; i < k; ++i) c = c * (n - i) / (i + 1);
  return static_cast<double>(c);
}

double bisect_w(double z) {
  double lo = 0, hi = std::max(1.0, std::log(z + 1) + 1);
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (mid * std::exp(mid) < z ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

template <class F>
double integrate_log(F f, double a, double b, int panels = 100000) {
  const double la = std::log(a), lb = std::log(b), h = (lb - la) / panels;
  double s = 0;
  for (int i = 0; i <= panels; ++i) {
    const double x = std::exp(la + i * h);
    s += ((i == 0 || i == panels) ? 1.0 : (i % 2 ? 4.0 : 2.0)) * f(x) * x;
  }
  return s * h / 3;
}

std::vector<Edge> clique_edges(int k) {
  std::vector<Edge> e;
  for (Vertex u = 0; u < static_cast<Vertex>(k); ++u)
    for (Vertex v = u + 1; v < static_cast<Vertex>(k); ++v) e.emplace_back(u, v);
  return e;
}

}  // namespace

TEST(BinomialApprox, ContainsExact) {
  EXPECT_TRUE(binomial_approx_bounds(10, 1).interval().contains(10));
  EXPECT_TRUE(binomial_approx_bounds(20, 5).interval().contains(15504));
  const auto b = binomial_approx_bounds(1000, 10);
  const double ln_exact = std::log(exact_binomial(1000, 10));
  EXPECT_LE(b.log_lower, ln_exact);
  EXPECT_GE(b.log_upper, ln_exact);
  for (std::uint64_t n = 2; n <= 120; ++n)
    for (std::uint64_t k = 1; 2 * k <= n && k <= 25; ++k) {
      const auto r = binomial_approx_bounds(n, k);
      const double l = std::log(exact_binomial(n, k));
      EXPECT_LE(r.log_lower, l + 1e-12) << n << " " << k;
      EXPECT_GE(r.log_upper, l - 1e-12) << n << " " << k;
    }
  EXPECT_THROW(binomial_approx_bounds(10, 6), std::domain_error);
}

TEST(StarProbUpper, ClosedFormAndIntegral) {
  EXPECT_NEAR(star_prob_upper(3, 2.5, 1, 1, 1000, 1, 10), 5.539e-5, 1e-8);
  EXPECT_EQ(star_prob_upper(3, 2.5, 1, 1, 1000, 4, 4), 0.0);
  // integrate the minimum-weight density against the per-edge conditional mean
  const int k = 3;
  const double beta = 2.5, n = 1000;
  const double m = (beta - 1) / (beta - 2);
  const double integral = integrate_log(
      [&](double w1) { return min_weight_density(w1, k, beta, 1.0) * std::pow(w1 * w1 * m / n, k - 1); }, 1, 10);
  EXPECT_NEAR(star_prob_upper(k, beta, 1, 1, n, 1, 10), integral, 1e-10);
  // singular exponent k(3 - beta) = 2 falls back to the logarithmic limit
  const double near_sing = star_prob_upper(4, 2.5 + 1e-7, 1, 1, 1000, 1, 5);
  EXPECT_NEAR(star_prob_upper(4, 2.5, 1, 1, 1000, 1, 5), near_sing, 1e-6 * near_sing);
}

TEST(StarProbUpper, DominatesSimulation) {
  const int k = 3, trials = 1000000;
  const double beta = 2.5, n = 200;
  ModelParams p;
  p.n = 200;
  p.beta = beta;
  std::uint64_t hits = 0;
  for (int i = 0; i < trials; ++i) {
    const SeededStream s = SeededStream(1).substream(i);
    double w[3];
    for (int a = 0; a < k; ++a) w[a] = pareto_from_survival(s.uniform_open_left_at(a), beta, 1.0);
    const int c = std::min_element(w, w + 3) - w;
    if (w[c] > 10) continue;
    bool star = true;
    for (int a = 0; a < k && star; ++a)
      if (a != c) star = s.uniform_at(10 + a) < kappa(w[c], w[a], p) / n;
    hits += star;
  }
  const auto e = bernoulli_estimate(hits, trials);
  EXPECT_LE(e.mean - 4 * e.std_error, star_prob_upper(k, beta, 1, 1, n, 1, 10));
}

TEST(QkRegime, UpperExamples) {
  EXPECT_NEAR(*qk_regime_upper(5, 2.5).n_exponent, -3.75, 1e-12);
  EXPECT_EQ(qk_regime_upper(5, 2.5).label, RegimeLabel::nongeometric_dominated);
  EXPECT_NEAR(*qk_regime_upper(3, 2.5).n_exponent, -2.0, 1e-12);
  for (int k = 3; k < 9; ++k) EXPECT_NEAR(*qk_regime_upper(k, 3.5).n_exponent, 1.0 - k, 1e-12);
  EXPECT_EQ(qk_regime_upper(4, 2.5).label, RegimeLabel::boundary);
}

TEST(QkRegime, LowerExamples) {
  const auto a = qk_lower_lowdim(5, 2.5, 3);
  EXPECT_NEAR(*a.n_exponent, -3.75, 1e-12);
  EXPECT_FALSE(a.log_decay.has_value());
  const auto b = qk_lower_lowdim(3, 3.5, 4);
  EXPECT_NEAR(*b.n_exponent, -2.0, 1e-12);
  ASSERT_TRUE(b.log_decay.has_value());
  EXPECT_NEAR(std::exp(*b.log_decay), std::pow(2.0, -12), 1e-18);
  // upper / lower for the low-weight branch is 2^(dk) up to Theta(1)^k
  EXPECT_NEAR(-*b.log_decay, 4 * 3 * std::log(2.0), 1e-12);
}

TEST(CondCliqueUniform, Examples) {
  EXPECT_NEAR(cond_clique_prob_uniform(3, 1, 1.0), 0.75, 1e-15);
  for (int d : {1, 3, 10})
    for (double r : {1.0, 2.0, 50.0}) EXPECT_EQ(cond_clique_prob_uniform(2, d, r), 1.0);
  EXPECT_NEAR(cond_clique_prob_uniform(3, 2, 1.0), 0.5625, 1e-15);
  EXPECT_THROW(cond_clique_prob_uniform(3, 2, 0.5), std::domain_error);
}

TEST(CondCliqueUniform, MatchesStatedFormula) {
  for (int k = 2; k <= 7; ++k)
    for (int d : {1, 2, 5, 17})
      for (double rho : {1.0, 1.1, 1.5, 1.99}) {
        const double ratio = std::pow(rho, d);
        const double stated = std::pow(ratio, k - 2) *
                              std::pow(std::pow(2.0, -(k - 1)) * ((2.0 - k) * rho + 2.0 * (k - 1)), d);
        EXPECT_NEAR(cond_clique_prob_uniform(k, d, ratio), stated, 1e-12 * stated) << k << " " << d << " " << rho;
        EXPECT_LE(cond_clique_prob_uniform(k, d, ratio), 1.0);
      }
}

TEST(CondCliqueUniform, MatchesStarConditionedSimulation) {
  ModelParams p;
  p.n = 1000;
  for (int d : {1, 2})
    for (double rho : {1.0, 1.5}) {
      p.d = d;
      p.lambda = p.n * std::pow(0.1, d);  // t11 = 0.05
      const double ratio = std::pow(rho, d);
      const auto w = WeightSequence::explicit_weights({1.0, ratio, ratio, ratio});
      const auto e = estimate_clique_prob_given_star(p, w, 400000, SeededStream(2).substream(static_cast<std::uint64_t>(d * 7 + rho * 2)));
      EXPECT_NEAR(e.mean, cond_clique_prob_uniform(4, d, ratio), 4 * e.std_error) << d << " " << rho;
    }
}

TEST(Theorem3Sandwich, Examples) {
  auto a = theorem3_sandwich(3, 1, 1.0);
  EXPECT_NEAR(a.lower, 0.75, 1e-15);
  EXPECT_NEAR(a.upper, 0.75, 1e-15);
  auto b = theorem3_sandwich(4, 2, 1.0);
  EXPECT_NEAR(b.lower, 0.25, 1e-15);
  EXPECT_NEAR(b.upper, 0.25, 1e-15);
  auto c = theorem3_sandwich(3, 4, 1.2);
  const double lower = std::pow(0.5, 8) * 81;
  EXPECT_NEAR(c.lower, lower, 1e-15);
  EXPECT_NEAR(c.upper, std::pow(1.2, 4) * lower, 1e-14);
  EXPECT_EQ(theorem3_sandwich(3, 30, 3.0).upper, 1.0);
  EXPECT_THROW(theorem3_sandwich(2, 1, 1.0), std::domain_error);
}

TEST(Theorem3Sandwich, UniformClosedFormIsLowerEndpointAtCEqualsOne) {
  for (int k = 3; k <= 10; ++k)
    for (int d = 1; d <= 40; ++d)
      EXPECT_NEAR(cond_clique_prob_uniform(k, d, 1.0), theorem3_sandwich(k, d, 1.0).lower,
                  1e-12 * theorem3_sandwich(k, d, 1.0).lower);
}

TEST(HighDimBounds, Examples) {
  const double n = 256;
  EXPECT_EQ(highdim_superset_upper(3, 32, {n, n, n}, n, n).value, 1.0);
  EXPECT_EQ(highdim_superset_upper(3, 32, {}, 1, n).value, 1.0);
  const std::vector<std::vector<double>> sat(3, std::vector<double>(3, n));
  EXPECT_EQ(highdim_superset_lower(32, sat, n, clique_edges(3)).value, 1.0);
  EXPECT_EQ(highdim_superset_lower(32, sat, n, {}).value, 1.0);
  const auto vac = highdim_superset_lower(2, std::vector<std::vector<double>>(4, std::vector<double>(4, 1.0)), n,
                                          clique_edges(4));
  EXPECT_FALSE(vac.valid);
  EXPECT_EQ(vac.value, 0.0);
  const auto up = highdim_superset_upper(4, 2, std::vector<double>(6, 1.0), 1.0, 1e6);
  EXPECT_TRUE(up.valid);
}

TEST(HighDimBounds, ContainMonteCarlo) {
  for (int k : {3, 4})
    for (int d : {32, 64, 128})
      for (std::uint64_t n : {128u, 256u}) {
        ModelParams p;
        p.n = n;
        p.d = d;
        const auto edges = clique_edges(k);
        const auto w = WeightSequence::explicit_weights(std::vector<double>(k, 1.0));
        const auto e = estimate_superset_probability(p, w, edges, 4000000, SeededStream(3).substream(k * 1000 + d + n));
        const std::vector<std::vector<double>> kap(k, std::vector<double>(k, 1.0));
        const auto lo = highdim_superset_lower(d, kap, static_cast<double>(n), edges);
        const auto up = highdim_superset_upper(k, d, std::vector<double>(edges.size(), 1.0), 1.0, static_cast<double>(n));
        const double s = e.probability.std_error;
        EXPECT_GE(e.probability.mean + 4 * s, lo.value) << k << " " << d << " " << n;
        EXPECT_LE(e.probability.mean - 4 * s, up.value) << k << " " << d << " " << n;
      }
}

TEST(TriangleCondProb, Examples) {
  EXPECT_THROW(triangle_cond_prob(0.5, 1), std::domain_error);
  EXPECT_NEAR(triangle_cond_prob(2.0 / 3.0, 1), 0.75, 1e-14);
  for (int d : {1, 7, 1000}) EXPECT_NEAR(triangle_cond_prob(1.0, d), 1.0, 1e-15);
  const double per_dim = 3 - 3 / 0.9 + 1 / 0.81;
  EXPECT_NEAR(triangle_cond_prob(0.9, 2), per_dim * per_dim, 1e-14);
  EXPECT_NEAR(triangle_cond_prob(0.9, 2), 0.81222, 1e-5);
}

TEST(TriangleCondProb, MatchesWedgeSimulation) {
  ModelParams p;
  p.n = 1000;
  const auto w = WeightSequence::explicit_weights({1, 1, 1});
  for (double a : {2.0 / 3.0, 0.8, 0.9, 0.95})
    for (int d : {1, 2, 8, 32}) {
      p.d = d;
      p.lambda = p.n * std::pow(a, d);
      const auto e = estimate_triangle_prob_given_wedge(p, w, 200000, SeededStream(4).substream(static_cast<std::uint64_t>(d * 100 + a * 20)));
      EXPECT_NEAR(e.mean, triangle_cond_prob(a, d), 4 * e.std_error) << a << " " << d;
    }
}

TEST(ExponentCorrection, Examples) {
  EXPECT_NEAR(triangle_exponent_correction(std::exp(10.0), 100).exponent, 0.9925, 1e-12);
  EXPECT_NEAR(triangle_exponent_correction(1000, 1000000).exponent, 1.0, 1e-9);
  EXPECT_NEAR(triangle_exponent_correction(1000, 1000000).series_exponent, 1.0, 1e-9);
}

TEST(ExponentCorrection, SeriesTracksExactConditionalProbability) {
  for (double n : {1e3, 1e4})
    for (int d : {64, 128, 256, 1024, 4096}) {
      const double q = 1.0 / n;
      const double a = std::exp(std::log(q) / d);
      const double ratio = std::log(triangle_cond_prob(a, d)) / std::log(q);
      const auto c = triangle_exponent_correction(n, d, 1.0);
      EXPECT_NEAR(ratio, c.series_exponent, 2 * c.error) << n << " " << d;
    }
}

TEST(ExponentCorrection, MonteCarloWithinBand) {
  ModelParams p;
  p.n = 1000;
  p.d = 128;
  p.lambda = 1.0;
  const auto e = estimate_triangle_prob_given_wedge(p, WeightSequence::explicit_weights({1, 1, 1}), 4000000,
                                                    SeededStream(5));
  const double lq = std::log(1e-3);
  const double ratio = std::log(e.mean) / lq;
  const double sigma = e.std_error / e.mean / std::abs(lq);
  const auto c = triangle_exponent_correction(1000, 128, 1.0);
  EXPECT_NEAR(ratio, c.series_exponent, 2 * c.error + 4 * sigma);
}

TEST(OneMinusPower, ContainsExact) {
  const auto b = one_minus_power_bounds(0.01, 1, 1000);
  const double exact = 1 - std::pow(0.01, 1.0 / 1000);
  EXPECT_TRUE(b.interval.contains(exact));
  EXPECT_TRUE(b.small);
  const auto z = one_minus_power_bounds(0.3, 0, 10);
  EXPECT_EQ(z.interval.lower, 0.0);
  EXPECT_EQ(z.interval.upper, 0.0);
  const auto one = one_minus_power_bounds(1 - 1e-12, 1, 10);
  EXPECT_LT(one.interval.upper, 1e-12);
  EXPECT_THROW(one_minus_power_bounds(1.0, 1, 10), std::domain_error);
  SeededStream rng(6);
  for (int i = 0; i < 10000; ++i) {
    const double psi = std::exp(-20 * rng.uniform()) * (1 - 1e-12);
    const double ell = 10 * rng.uniform();
    const int d = 1 + static_cast<int>(rng.below(5000));
    const auto r = one_minus_power_bounds(psi, ell, d);
    if (!r.small) continue;
    const double ex = static_cast<double>(1 - std::pow(static_cast<long double>(psi), static_cast<long double>(ell) / d));
    EXPECT_GE(ex, r.interval.lower - 1e-15 * r.interval.upper) << psi << " " << ell << " " << d;
    EXPECT_LE(ex, r.interval.upper * (1 + 1e-14)) << psi << " " << ell << " " << d;
  }
}

TEST(ExpectedKkRegime, Examples) {
  const auto a = expected_kk_regime(2.5, 5, DimRegime::constant);
  EXPECT_NEAR(*a.n_exponent, 1.25, 1e-12);
  EXPECT_EQ(a.decay_form, "Theta(k)^-k");
  const auto b = expected_kk_regime(3.5, 4, DimRegime::superlog);
  EXPECT_EQ(b.label, RegimeLabel::vanishing);
  EXPECT_EQ(b.decay_form, "o(1)");
  const auto c = expected_kk_regime(2.5, 3, DimRegime::sublog);
  EXPECT_NEAR(*c.n_exponent, 1.0, 1e-12);
  EXPECT_EQ(c.decay_form, "exp(-Theta(1)d)");
  EXPECT_EQ(expected_kk_regime(2.5, 4, DimRegime::constant).label, RegimeLabel::boundary);
  EXPECT_EQ(expected_kk_regime(7.0 / 3.0, 3, DimRegime::constant).label, RegimeLabel::boundary);
  EXPECT_EQ(expected_kk_regime(3.0, 3, DimRegime::constant).label, RegimeLabel::boundary);
  EXPECT_EQ(expected_kk_regime(INFINITY, 3, DimRegime::superlog_squared).label, RegimeLabel::nongeometric_dominated);
  EXPECT_THROW(expected_kk_regime(2.0, 3, DimRegime::constant), std::domain_error);
}

TEST(CliqueNumberRegime, Examples) {
  for (auto r : {DimRegime::constant, DimRegime::sublog, DimRegime::superlog})
    EXPECT_NEAR(*clique_number_regime(2.5, r).n_exponent, 0.25, 1e-12);
  EXPECT_EQ(clique_number_regime(3.5, DimRegime::superlog).decay_form, "<= 3");
  EXPECT_EQ(clique_number_regime(3.5, DimRegime::loglog).decay_form, "Theta(log(n)/loglog(n))");
  EXPECT_EQ(clique_number_regime(3.0, DimRegime::constant).label, RegimeLabel::boundary);
}

TEST(LambertW, Examples) {
  EXPECT_EQ(lambert_w(0), 0.0);
  EXPECT_NEAR(lambert_w(std::exp(1.0)), 1.0, 1e-15);
  EXPECT_NEAR(lambert_w(1.0), bisect_w(1.0), 1e-14);
  EXPECT_NEAR(lambert_w(1.0), 0.5671432904, 1e-10);
  EXPECT_THROW(lambert_w(-0.1), std::domain_error);
}

TEST(LambertW, DefiningIdentity) {
  SeededStream rng(7);
  for (int i = 0; i < 20000; ++i) {
    const double z = std::exp(-20 + 38.4 * rng.uniform());  // up to 1e8
    const double w = lambert_w(z);
    EXPECT_NEAR(w * std::exp(w), z, 1e-12 * z) << z;
  }
  for (double z : {1e-300, 1e-10, 0.5, 1e8}) EXPECT_NEAR(lambert_w(z), bisect_w(z), 1e-12 * (1 + bisect_w(z)));
}

TEST(CliqueNumberPrediction, IdentityAndShape) {
  for (double n : {1e3, 1e6, 1e12})
    for (double d : {0.0, 1.0, 5.0})
      for (double eps : {0.0, 0.3}) {
        const double c1 = 0.7, c2 = 0.4;
        const double k = clique_number_point_prediction(n, d, c1, c2, eps);
        const double a = c1 * std::exp(c2 * d);
        EXPECT_NEAR(-k * std::log(a * k), -(1 + eps) * std::log(n), 1e-9 * (1 + eps) * std::log(n));
      }
  double prev = INFINITY;
  for (double d = 0; d < 20; d += 0.5) {
    const double k = clique_number_point_prediction(1e9, d, 1.0, 0.3, 0.1);
    EXPECT_LT(k, prev);
    prev = k;
  }
  double gap = INFINITY;
  for (double e : {20.0, 80.0, 320.0, 1000.0}) {
    const double ln_n = e * std::log(2.0);
    const double k = clique_number_point_prediction(std::exp(ln_n), 0, 1, 0, 0);
    const double g = std::abs(k * (std::log(ln_n) - std::log(std::log(ln_n))) / ln_n - 1);
    EXPECT_LT(g, gap);
    gap = g;
  }
}

TEST(IrgSuperset, ExamplesAndSimulation) {
  EXPECT_EQ(irg_superset_probability({}, 100), 1.0);
  EXPECT_NEAR(irg_superset_probability({10, 10, 10}, 100), 1e-3, 1e-18);
  ModelParams p;
  p.n = 100;
  const auto w = WeightSequence::explicit_weights({4, 5, 6});
  const auto e = estimate_qk(p, 3, 1000000, SeededStream(8), ModelKind::irg, w);
  EXPECT_NEAR(e.mean, irg_superset_probability({20, 24, 30}, 100), 4 * e.std_error);
}
