#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "hsc/bounds.hpp"
#include "hsc/random.hpp"
#include "hsc/stats.hpp"

using namespace hsc;

TEST(Stats, ChiSquareTail) {
  EXPECT_NEAR(stats::chi_square_sf(3.841458820694124, 1), 0.05, 1e-9);
  EXPECT_NEAR(stats::chi_square_sf(5.991464547107979, 2), 0.05, 1e-9);
  EXPECT_EQ(stats::chi_square_sf(1.0, 0), 1.0);
}

TEST(Stats, GoodnessOfFit) {
  const std::vector<std::size_t> obs{300, 600, 100};
  const auto ok = stats::chi_square_gof(obs, {0.3012, 0.6024, 0.0964});
  EXPECT_GT(ok.p_value, 0.1);
  const auto bad = stats::chi_square_gof(obs, {0.6, 0.3, 0.1});
  EXPECT_LT(bad.p_value, 1e-10);
  // a single merged bin carries no information
  EXPECT_EQ(stats::chi_square_gof({10}, {1.0}).p_value, 1.0);
}

TEST(Stats, TwoSample) {
  EXPECT_GT(stats::chi_square_two_sample({100, 200, 50}, {110, 190, 55}).p_value, 0.3);
  EXPECT_LT(stats::chi_square_two_sample({100, 200, 50}, {200, 100, 50}).p_value, 1e-6);
  RngStream rng(61, 0);
  std::vector<double> a, b, c;
  for (int i = 0; i < 2000; ++i) {
    a.push_back(rng.uniform());
    b.push_back(rng.uniform());
    c.push_back(std::sqrt(rng.uniform()));
  }
  EXPECT_GT(stats::ks_two_sample(a, b).p_value, 0.01);
  EXPECT_LT(stats::ks_two_sample(a, c).p_value, 1e-6);
}

TEST(Stats, KolmogorovKnownQuantile) {
  EXPECT_NEAR(stats::kolmogorov_sf(1.3580986393225505), 0.05, 1e-6);
}

TEST(Bounds, BallVolumes) {
  EXPECT_DOUBLE_EQ(ball_volume_coeff(1), 2.0);
  EXPECT_NEAR(ball_volume_coeff(2), std::numbers::pi, 1e-14);
  EXPECT_NEAR(ball_volume_coeff(3), 4.0 * std::numbers::pi / 3.0, 1e-14);
  EXPECT_THROW(ball_volume_coeff(0), std::invalid_argument);
}

TEST(Bounds, TwoDimensionalValues) {
  const auto rows = bounds_table(2, 1.0);
  auto find = [&](const std::string& q, const std::string& src) {
    for (const auto& r : rows)
      if (r.quantity == q && r.source == src) return r;
    throw std::runtime_error("missing row");
  };
  EXPECT_EQ(*find("critical_intensity", "rigorous-window").lower, 0.174);
  EXPECT_EQ(*find("critical_intensity", "rigorous-window").upper, 0.843);
  EXPECT_EQ(*find("critical_intensity", "high-confidence-lower").lower, 0.358);
  EXPECT_EQ(*find("cluster_expansion_radius", "best-known-window").lower, 0.1625);
  EXPECT_NEAR(*find("cluster_expansion_radius", "best-known-window").upper, 0.2342, 5e-5);
  // the cluster expansion window sits below the percolation lower bound
  EXPECT_LT(*find("cluster_expansion_radius", "best-known-window").upper,
            *find("critical_intensity", "high-confidence-lower").lower);
}

TEST(Bounds, OneDimensionAndConjecture) {
  const auto rows = bounds_table(1, 1.0);
  bool ce = false, conj = false;
  for (const auto& r : rows) {
    if (r.quantity == "cluster_expansion_radius" && r.kind == BoundKind::exact) {
      EXPECT_NEAR(*r.lower, 1.0 / std::numbers::e, 1e-15);
      ce = true;
    }
    if (r.kind == BoundKind::conjecture) {
      EXPECT_NEAR(*r.lower, 1.0 / std::numbers::e, 1e-15);
      conj = true;
    }
    if (r.quantity == "critical_intensity" && r.kind == BoundKind::exact) {
      EXPECT_TRUE(std::isinf(*r.lower));
    }
  }
  EXPECT_TRUE(ce && conj);
}

TEST(Bounds, HomogeneousInRadius) {
  for (std::size_t d : {1u, 2u, 3u}) {
    const auto a = bounds_table(d, 1.0), b = bounds_table(d, 2.0);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      const double scale = (a[i].kind == BoundKind::limit || a[i].kind == BoundKind::conjecture)
                               ? 1.0
                               : std::pow(2.0, -static_cast<double>(d));
      for (auto [x, y] : {std::pair{a[i].lower, b[i].lower}, std::pair{a[i].upper, b[i].upper}})
        if (x && std::isfinite(*x)) {
          EXPECT_NEAR(*y, *x * scale, 1e-12 * std::abs(*x));
        }
    }
  }
  EXPECT_THROW(bounds_table(2, 0.0), std::invalid_argument);
}
