#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "hsc/intervals.hpp"
#include "hsc/partition.hpp"

using namespace hsc;

namespace {

// Tonks gas on one interval: Z = sum_n lambda^n (L - (n-1)R)_+^n / n!
double tonks(double L, double R, double lambda) {
  double z = 0.0;
  for (int n = 0; n < 200; ++n) {
    const double free = L - (n - 1) * R;
    if (n > 0 && free <= 0.0) break;
    z += std::pow(lambda, n) * (n ? std::pow(free, n) : 1.0) / std::tgamma(n + 1.0);
  }
  return z;
}

// Midpoint-rule volume of {x1 < x2 in S : x2 - x1 > R}.
double pair_volume(const IntervalSet& s, double R, int grid = 4000) {
  const double lo = s.lower(), hi = s.upper(), h = (hi - lo) / grid;
  double v = 0.0;
  for (int i = 0; i < grid; ++i) {
    const double x = lo + (i + 0.5) * h;
    if (!s.contains(x)) continue;
    v += h * s.intersect(IntervalSet(x + R, hi + 1.0)).measure();
  }
  return v;
}

}  // namespace

TEST(Intervals, Algebra) {
  const IntervalSet a(0.0, 1.0), b(0.5, 2.0);
  EXPECT_DOUBLE_EQ(a.unite(b).measure(), 2.0);
  EXPECT_DOUBLE_EQ(a.intersect(b).measure(), 0.5);
  EXPECT_DOUBLE_EQ(a.subtract(b).measure(), 0.5);
  EXPECT_DOUBLE_EQ(a.above(0.25).measure(), 0.75);
  EXPECT_TRUE(a.intersect(IntervalSet(3.0, 4.0)).empty());
  EXPECT_EQ(a.unite(IntervalSet(1.0, 1.5)).parts().size(), 1u);
}

TEST(HardRod, KnownValue) {
  const HardRodSeries s(IntervalSet(0.0, 1.0), 0.6);
  EXPECT_NEAR(s.evaluate(2.0), 3.32, 1e-12);
  const auto p = s.count_distribution(2.0, 10);
  EXPECT_NEAR(p[0], 1.0 / 3.32, 1e-12);
  EXPECT_NEAR(p[1], 2.0 / 3.32, 1e-12);
  EXPECT_NEAR(p[2], 0.32 / 3.32, 1e-12);
  EXPECT_NEAR(std::round(p[0] * 1e4) / 1e4, 0.3012, 1e-12);
  EXPECT_NEAR(std::round(p[1] * 1e4) / 1e4, 0.6024, 1e-12);
  EXPECT_NEAR(std::round(p[2] * 1e4) / 1e4, 0.0964, 1e-12);
  EXPECT_EQ(s.max_count(), 2u);
}

TEST(HardRod, ClosedFormSingleInterval) {
  for (double L : {0.3, 1.0, 2.7, 5.0})
    for (double R : {0.1, 0.45, 1.0})
      for (double lambda : {0.5, 2.0, 7.0}) {
        const double z = HardRodSeries(IntervalSet(0.0, L), R).evaluate(lambda);
        EXPECT_NEAR(z / tonks(L, R, lambda), 1.0, 1e-10) << L << ' ' << R << ' ' << lambda;
      }
}

TEST(HardRod, ZeroRadiusIsExponential) {
  const IntervalSet s = IntervalSet(0.0, 1.0).unite(IntervalSet(2.0, 2.5));
  EXPECT_NEAR(HardRodSeries(s, 0.0).evaluate(1.7), std::exp(1.7 * 1.5), 1e-9);
}

TEST(HardRod, TwoComponentCoefficientsAgainstQuadrature) {
  const IntervalSet s = IntervalSet(0.0, 1.0).unite(IntervalSet(1.5, 2.0));
  const double R = 0.6;
  const HardRodSeries series(s, R);
  const auto& a = series.coefficients();
  ASSERT_GE(a.size(), 3u);
  EXPECT_NEAR(a[0], 1.0, 1e-12);
  EXPECT_NEAR(a[1], 1.5, 1e-12);
  EXPECT_NEAR(a[2], pair_volume(s, R), 2e-3);
}

TEST(HardRod, BoundaryBlocksNeighbourhood) {
  // a boundary point at -0.1 with R = 0.3 leaves [0.2, 1]
  const double z = hard_rod_partition(IntervalSet(0.0, 1.0), Configuration<1>{{-0.1}}, 1.5, 0.3);
  EXPECT_NEAR(z, tonks(0.8, 0.3, 1.5), 1e-10);
}

TEST(HardRod, CountDistributionSumsToOne) {
  const auto p = HardRodSeries(IntervalSet(0.0, 3.0), 0.4).count_distribution(2.5, 64);
  EXPECT_NEAR(std::accumulate(p.begin(), p.end(), 0.0), 1.0, 1e-12);
}

TEST(Acceptance, MonteCarloMatchesSeries) {
  const Region<1> r(Box<1>::cube(0, 1));
  RngStream rng(21, 0);
  const Estimate mc = acceptance_probability<1>(r, Configuration<1>{{-0.1}}, 2.0, 0.3, 100000, rng);
  const double exact = partition_series_1d(r, Configuration<1>{{-0.1}}, 2.0, 0.3).mean * std::exp(-2.0);
  EXPECT_TRUE(mc.within(exact, 4.0)) << mc.mean << " vs " << exact;
  EXPECT_EQ(acceptance_probability<1>(r, Configuration<1>{}, 0.0, 0.3, 10, rng).mean, 1.0);
  EXPECT_EQ(acceptance_probability<1>(r, Configuration<1>{}, 2.0, 0.0, 10, rng).mean, 1.0);
  EXPECT_THROW(acceptance_probability<1>(r, Configuration<1>{}, 2.0, 0.3, 0, rng), std::invalid_argument);
}

TEST(Acceptance, MonotoneInCondition) {
  const Region<2> r(Box<2>::cube(0, 1));
  for (std::uint64_t s = 0; s < 5; ++s) {
    RngStream a(30, s), b(30, s);
    const Estimate few = acceptance_probability<2>(r, Configuration<2>{}, 3.0, 0.2, 5000, a);
    const Estimate more = acceptance_probability<2>(r, Configuration<2>{{-0.1, 0.5}}, 3.0, 0.2, 5000, b);
    EXPECT_LE(more.mean, few.mean);
  }
}

TEST(Thinning, ExampleRatio) {
  // x = 0.5, tail (0.5, 1], R = 0.6, lambda = 2: Z(tail, {x}) = 1 and
  // Z(tail) = 1 + 2 * 0.5, so the ratio is 1/2.
  const Region<1> r(Box<1>::cube(0, 1));
  const TailDomain<1> tail{&r, nullptr, 0.5};
  ExactSeriesOracle exact;
  RngStream rng(22, 0);
  const Estimate e = thinning_probability_with<1>({0.5}, Configuration<1>{}, tail, 2.0, 0.6, exact, rng);
  EXPECT_NEAR(e.mean, 0.5, 1e-12);
  McRatioOracle mc{40000};
  const Estimate m = thinning_probability_with<1>({0.5}, Configuration<1>{}, tail, 2.0, 0.6, mc, rng);
  EXPECT_EQ(m.method, Method::mc_paired);
  EXPECT_TRUE(m.within(0.5, 4.0)) << m.mean << " +- " << m.std_error;
}

TEST(Thinning, ShortCircuits) {
  const Region<1> r(Box<1>::cube(0, 1));
  const TailDomain<1> tail{&r, nullptr, 0.5};
  McRatioOracle mc{10};
  RngStream rng(23, 0);
  EXPECT_EQ(thinning_probability_with<1>({0.5}, Configuration<1>{{0.4}}, tail, 2.0, 0.3, mc, rng).mean, 0.0);
  EXPECT_EQ(thinning_probability_with<1>({0.5}, Configuration<1>{}, tail, 2.0, 0.0, mc, rng).mean, 1.0);
  EXPECT_EQ(thinning_probability_with<1>({0.5}, Configuration<1>{}, tail, 0.0, 0.3, mc, rng).mean, 1.0);
  const TailDomain<1> none{&r, nullptr, 1.0};
  EXPECT_EQ(thinning_probability_with<1>({1.0}, Configuration<1>{}, none, 2.0, 0.3, mc, rng).mean, 1.0);
  EXPECT_EQ(mc.stats.short_circuits, 1u);
}

TEST(Thinning, McAgreesWithSeriesAcrossPivots) {
  const Region<1> r(Box<1>::cube(0, 2));
  const Configuration<1> cond{{-0.1}, {0.5}};
  ExactSeriesOracle exact;
  McRatioOracle mc{20000};
  RngStream rng(24, 0);
  for (double x : {0.9, 1.2, 1.6}) {
    const TailDomain<1> tail{&r, nullptr, x};
    const double e = thinning_probability_with<1>({x}, cond, tail, 1.5, 0.3, exact, rng).mean;
    const Estimate m = thinning_probability_with<1>({x}, cond, tail, 1.5, 0.3, mc, rng);
    EXPECT_TRUE(m.within(e, 4.0)) << x << ": " << m.mean << " vs " << e;
  }
}

TEST(Thinning, SumProductIdentity) {
  const Region<1> r(Box<1>::cube(0, 2));
  const Configuration<1> x{{-0.1}};
  const std::vector<Point<1>> z{{0.1}, {0.35}, {0.9}, {1.5}};
  ExactSeriesOracle exact;
  RngStream rng(25, 0);
  double total = 0.0;
  for (unsigned mask = 0; mask < (1u << z.size()); ++mask) {
    Configuration<1> cond = x;
    double prod = 1.0;
    for (std::size_t k = 0; k < z.size(); ++k) {
      const TailDomain<1> tail{&r, nullptr, z[k][0]};
      const double p = thinning_probability_with<1>(z[k], cond, tail, 1.5, 0.3, exact, rng).mean;
      const bool kept = mask >> k & 1u;
      prod *= thin_choice(kept, p);
      if (kept) cond.insert(z[k]);
    }
    total += prod;
  }
  EXPECT_NEAR(total, 1.0, 1e-12);
}

TEST(Thinning, IntervalIdentity) {
  const Region<1> r(Box<1>::cube(0, 2));
  const Configuration<1> cond{{-0.1}, {0.2}};
  const double a = 0.6, b = 1.3, lambda = 1.5, R = 0.3;
  ExactSeriesOracle exact;
  RngStream rng(26, 0);
  const Region<1> strip(Box<1>::cube(a, b));
  const int n = 20000;
  double s = 0, s2 = 0;
  for (int i = 0; i < n; ++i) {
    double prod = 1.0;
    for (const auto& zp : sample_poisson(strip, lambda, rng)) {
      const TailDomain<1> tail{&r, nullptr, zp[0]};
      prod *= 1.0 - thinning_probability_with<1>(zp, cond, tail, lambda, R, exact, rng).mean;
    }
    s += prod;
    s2 += prod * prod;
  }
  const double mean = s / n, se = std::sqrt((s2 / n - mean * mean) / n);
  const IntervalSet blocked = neighbourhood(cond, R);
  const double rhs = hard_rod_partition(IntervalSet(b, 2.0).subtract(blocked), Configuration<1>{}, lambda, R) /
                     hard_rod_partition(IntervalSet(a, 2.0).subtract(blocked), Configuration<1>{}, lambda, R);
  EXPECT_NEAR(mean, rhs, 4 * se);
}

TEST(Thinning, SeriesOracleIsOneDimensional) {
  const Region<2> r(Box<2>::cube(0, 1));
  EXPECT_THROW(partition_series_1d(r, Configuration<2>{}, 1.0, 0.1), std::invalid_argument);
}
