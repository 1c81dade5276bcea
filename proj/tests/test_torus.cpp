#include <algorithm>
#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "girg/torus.hpp"

using namespace girg;

namespace {

template <class F>
double simpson(F f, double a, double b, int panels) {
  const double h = (b - a) / panels;
  double s = f(a) + f(b);
  for (int i = 1; i < panels; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double best = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    best = std::max(best, std::abs(static_cast<double>(i) / a.size() - static_cast<double>(j) / b.size()));
  }
  return best;
}

ModelParams params(std::uint64_t n, double lambda, int d) {
  ModelParams p;
  p.n = n;
  p.lambda = lambda;
  p.d = d;
  return p;
}

}  // namespace

TEST(CircleDistance, Examples) {
  EXPECT_NEAR(circle_distance(0.9, 0.1), 0.2, 1e-15);
  EXPECT_EQ(circle_distance(0.3, 0.3), 0.0);
  EXPECT_EQ(circle_distance(0.0, 0.5), 0.5);
}

TEST(CircleDistance, MetricOnCircle) {
  SeededStream rng(1);
  for (int i = 0; i < 100000; ++i) {
    const double a = rng.uniform(), b = rng.uniform(), c = rng.uniform();
    EXPECT_LE(circle_distance(a, b), 0.5);
    EXPECT_EQ(circle_distance(a, b), circle_distance(b, a));
    EXPECT_LE(circle_distance(a, c), circle_distance(a, b) + circle_distance(b, c) + 1e-15);
  }
}

TEST(TorusDistance, Examples) {
  const TorusPoint x({0.1, 0.7}), y({0.3, 0.6});
  EXPECT_EQ(torus_distance(x, x, Norm::linf()), 0.0);
  EXPECT_EQ(torus_distance(x, x, Norm::lp(2)), 0.0);
  EXPECT_NEAR(torus_distance(x, y, Norm::linf()), 0.2, 1e-15);
  const TorusPoint a({0.0, 0.0}), b({0.3, 0.6});
  EXPECT_NEAR(torus_distance(a, b, Norm::lp(2)), 0.5, 1e-15);
  const std::vector<double> u{0.1}, v{0.2, 0.3};
  EXPECT_THROW(torus_distance(u, v, Norm::linf()), std::invalid_argument);
}

TEST(TorusDistance, TriangleInequality) {
  SeededStream rng(2);
  for (Norm norm : {Norm::linf(), Norm::lp(1), Norm::lp(2), Norm::lp(3.5)})
    for (int i = 0; i < 20000; ++i) {
      std::vector<double> x(3), y(3), z(3);
      for (int j = 0; j < 3; ++j) {
        x[j] = rng.uniform();
        y[j] = rng.uniform();
        z[j] = rng.uniform();
      }
      EXPECT_LE(torus_distance(x, z, norm), torus_distance(x, y, norm) + torus_distance(y, z, norm) + 1e-12);
    }
}

TEST(ConnectionThreshold, Examples) {
  EXPECT_NEAR(connection_threshold_linf(1, 1, params(100, 1, 1)), 0.005, 1e-15);
  EXPECT_EQ(connection_threshold_linf(10, 10, params(100, 1, 3)), 0.5);
  EXPECT_NEAR(connection_threshold_linf(1, 1, params(10000, 1, 2)), 0.005, 1e-15);
  EXPECT_EQ(connection_threshold_linf(1000, 1000, params(100, 1, 3)), 0.5);
}

TEST(ConnectionThreshold, BallVolumeEqualsMarginal) {
  SeededStream rng(3);
  for (int i = 0; i < 2000; ++i) {
    const int d = 1 + static_cast<int>(rng.below(3000));
    const auto p = params(1 + rng.below(100000), 0.1 + 5 * rng.uniform(), d);
    const double wu = 1 + 30 * rng.uniform(), wv = 1 + 30 * rng.uniform();
    const double q = std::min(1.0, p.lambda * wu * wv / p.n);
    EXPECT_NEAR(ball_volume_linf(connection_threshold_linf(wu, wv, p), d), q, 1e-11 * q);
  }
}

TEST(BallVolume, Examples) {
  EXPECT_EQ(ball_volume_linf(0.5, 17), 1.0);
  EXPECT_NEAR(ball_volume_linf(0.25, 2), 0.25, 1e-15);
  EXPECT_NEAR(ball_volume_linf(0.005, 1), 0.01, 1e-15);
  EXPECT_THROW(ball_volume_linf(-0.1, 1), std::domain_error);
}

TEST(ThresholdQuantile, Examples) {
  const auto a = threshold_quantile_lp(0.3, Norm::lp(1), 1);
  EXPECT_NEAR(a.t, 0.15, std::max(a.achieved_accuracy, 1e-6));
  EXPECT_LT(a.achieved_accuracy, 1e-3);
  EXPECT_NEAR(threshold_quantile_lp(1 - 1e-9, Norm::lp(1), 1).t, 0.5, 1e-4);
  EXPECT_THROW(threshold_quantile_lp(0.0, Norm::lp(1), 1), std::domain_error);
  EXPECT_THROW(threshold_quantile_lp(1.0, Norm::lp(1), 1), std::domain_error);
  EXPECT_THROW(threshold_quantile_lp(0.3, Norm::linf(), 1), std::domain_error);
  EXPECT_THROW(threshold_quantile_lp(0.3, Norm::lp(1), 1, 1e-12), std::runtime_error);
}

TEST(ThresholdQuantile, MatchesMonteCarloQuantile) {
  const std::size_t m = 10000000;
  SeededStream rng(4);
  std::vector<double> s(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double a = circle_distance(rng.uniform(), rng.uniform());
    const double b = circle_distance(rng.uniform(), rng.uniform());
    s[i] = std::sqrt(a * a + b * b);
  }
  const std::size_t idx = m / 10;
  std::nth_element(s.begin(), s.begin() + idx, s.end());
  EXPECT_NEAR(threshold_quantile_lp(0.1, Norm::lp(2), 2).t, s[idx], 1e-3);
}

TEST(LpSumDistribution, TriangularCdfForTwoL1Coordinates) {
  // sum of two uniforms on [0, 1/2]
  const auto dist = lp_sum_distribution(1.0, 2);
  for (double x : {0.05, 0.2, 0.5, 0.7, 0.9}) {
    const double exact = x <= 0.5 ? 2 * x * x : 1 - 2 * (1 - x) * (1 - x);
    EXPECT_NEAR(dist->cdf(x), exact, 1e-6) << x;
  }
}

TEST(LpSumDistribution, EmpiricalProbabilityMatches) {
  const int d = 5;
  const auto dist = lp_sum_distribution(2.0, d);
  const double t2 = dist->quantile(0.3);
  SeededStream rng(5);
  const int trials = 1000000;
  int hits = 0;
  for (int i = 0; i < trials; ++i) {
    double s = 0;
    for (int j = 0; j < d; ++j) {
      const double c = circle_distance(rng.uniform(), rng.uniform());
      s += c * c;
    }
    hits += s <= t2;
  }
  EXPECT_NEAR(static_cast<double>(hits) / trials, 0.3, 4 * std::sqrt(0.21 / trials));
}

TEST(BallVolume, EmpiricalLinfProbabilityMatches) {
  const int d = 3, trials = 1000000;
  const double r = 0.2;
  SeededStream rng(6);
  int hits = 0;
  for (int i = 0; i < trials; ++i) {
    double m = 0;
    for (int j = 0; j < d; ++j) m = std::max(m, circle_distance(rng.uniform(), rng.uniform()));
    hits += m <= r;
  }
  const double q = ball_volume_linf(r, d);
  EXPECT_NEAR(static_cast<double>(hits) / trials, q, 4 * std::sqrt(q * (1 - q) / trials));
}

TEST(CltConstants, ClosedFormsAndQuadrature) {
  auto c1 = clt_constants(Norm::lp(1));
  EXPECT_NEAR(c1.mu, 0.25, 1e-15);
  EXPECT_NEAR(c1.sigma2, 1.0 / 48, 1e-15);
  auto c2 = clt_constants(Norm::lp(2));
  EXPECT_NEAR(c2.mu, 1.0 / 12, 1e-15);
  EXPECT_NEAR(c2.sigma2, 1.0 / 180, 1e-15);
  for (double p : {1.0, 1.5, 2.0, 3.0}) {
    const auto c = clt_constants(Norm::lp(p));
    // circle distance is uniform on [0, 1/2] with density 2
    const double m1 = simpson([&](double x) { return 2 * std::pow(x, p); }, 0, 0.5, 2000000);
    const double m2 = simpson([&](double x) { return 2 * std::pow(x, 2 * p); }, 0, 0.5, 2000000);
    EXPECT_NEAR(c.mu, m1, 1e-10) << p;
    EXPECT_NEAR(c.sigma2, m2 - m1 * m1, 1e-10) << p;
    EXPECT_GT(c.mu, 0);
    EXPECT_LE(c.mu, std::pow(0.5, p));
  }
  EXPECT_THROW(clt_constants(Norm::linf()), std::domain_error);
}

TEST(CircleDistance, HomogeneousInCentre) {
  SeededStream rng(7);
  std::vector<std::vector<double>> samples(3);
  const double centres[] = {0.0, 0.25, 0.7};
  for (int c = 0; c < 3; ++c)
    for (int i = 0; i < 50000; ++i) samples[c].push_back(circle_distance(rng.uniform(), centres[c]));
  // critical value at level 0.01 for two samples of 50000
  const double crit = 1.63 * std::sqrt(2.0 / 50000);
  EXPECT_LT(ks_two_sample(samples[0], samples[1]), crit);
  EXPECT_LT(ks_two_sample(samples[0], samples[2]), crit);
  EXPECT_LT(ks_two_sample(samples[1], samples[2]), crit);
}

TEST(SamplePositions, InUnitCubeAndDeterministic) {
  const auto a = sample_positions(100, 4, SeededStream(8));
  const auto b = sample_positions(100, 4, SeededStream(8));
  EXPECT_EQ(a, b);
  for (double x : a) {
    EXPECT_GE(x, 0.0);
    EXPECT_LT(x, 1.0);
  }
}
