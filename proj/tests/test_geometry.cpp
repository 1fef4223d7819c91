#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "hsc/geometry.hpp"

using namespace hsc;

TEST(Order, LexicographicTotalOrder) {
  const Point<2> a{0.1, 0.9}, b{0.2, 0.0}, c{0.1, 0.95};
  EXPECT_TRUE(order_less(a, b));
  EXPECT_TRUE(order_less(a, c));
  EXPECT_FALSE(order_less(b, a));
  EXPECT_FALSE(order_less(a, a));
  RngStream rng(3, 0);
  for (int i = 0; i < 1000; ++i) {
    const Point<2> x{rng.uniform(), rng.uniform()}, y{rng.uniform(), rng.uniform()};
    if (x == y) continue;
    EXPECT_NE(order_less(x, y), order_less(y, x));
  }
}

TEST(Distance, WithinIsClosed) {
  const Point<2> x{0.0, 0.0}, y{3.0, 4.0};
  EXPECT_DOUBLE_EQ(distance(x, y), 5.0);
  EXPECT_TRUE(within(x, y, 5.0));
  EXPECT_FALSE(within(x, y, 4.999999));
}

TEST(Configuration, CanonicalAndChecked) {
  const Configuration<1> c{{0.7}, {0.1}, {0.4}};
  ASSERT_EQ(c.size(), 3u);
  EXPECT_EQ(c[0][0], 0.1);
  EXPECT_EQ(c[2][0], 0.7);
  EXPECT_TRUE(c.contains({0.4}));
  EXPECT_THROW((Configuration<1>{{0.1}, {0.1}}), std::invalid_argument);
  EXPECT_THROW((Configuration<1>{{NAN}}), std::invalid_argument);
  EXPECT_THROW((Configuration<1>{{INFINITY}}), std::invalid_argument);
}

TEST(Configuration, SetAlgebra) {
  const Configuration<1> a{{0.1}, {0.2}, {0.3}}, b{{0.2}, {0.4}};
  EXPECT_EQ(unite(a, b), (Configuration<1>{{0.1}, {0.2}, {0.3}, {0.4}}));
  EXPECT_EQ(intersect(a, b), (Configuration<1>{{0.2}}));
  EXPECT_EQ(subtract(a, b), (Configuration<1>{{0.1}, {0.3}}));
  EXPECT_EQ(symmetric_difference(a, b), (Configuration<1>{{0.1}, {0.3}, {0.4}}));
  EXPECT_TRUE(includes(a, Configuration<1>{{0.3}}));
  EXPECT_FALSE(includes(b, a));
  EXPECT_TRUE(disjoint(subtract(a, b), b));
  // symmetric difference = union minus intersection
  EXPECT_EQ(symmetric_difference(a, b), subtract(unite(a, b), intersect(a, b)));
}

TEST(Box, Basics) {
  const Box<2> b = Box<2>::cube(0.0, 2.0);
  EXPECT_DOUBLE_EQ(b.volume(), 4.0);
  EXPECT_TRUE(b.contains({0.0, 2.0}));
  EXPECT_FALSE(b.contains({-1e-12, 1.0}));
  EXPECT_DOUBLE_EQ(b.distance({3.0, 1.0}), 1.0);
  EXPECT_DOUBLE_EQ(b.distance({1.0, 1.0}), 0.0);
  EXPECT_TRUE(b.meets(Ball<2>{{3.0, 1.0}, 1.0}));
  EXPECT_FALSE(b.meets(Ball<2>{{3.0, 3.0}, 1.0}));
  EXPECT_TRUE(Box<2>::empty().is_empty());
  EXPECT_EQ(Box<2>::empty().volume(), 0.0);
  EXPECT_TRUE(b.intersect(Box<2>::cube(3.0, 4.0)).is_empty());
}

TEST(Region, MembershipWithRemovalAndRestriction) {
  const Region<2> box(Box<2>::cube(0.0, 1.0));
  const std::vector<Ball<2>> hole{{{0.5, 0.5}, 0.2}};
  const Region<2> r = box.without(hole);
  EXPECT_FALSE(r.contains({0.5, 0.5}));
  EXPECT_FALSE(r.contains({0.5, 0.7}));  // closed ball removed
  EXPECT_TRUE(r.contains({0.1, 0.1}));
  const Region<2> s = box.restricted_to({{{0.0, 0.0}, 0.3}});
  EXPECT_TRUE(s.contains({0.1, 0.1}));
  EXPECT_FALSE(s.contains({0.5, 0.5}));
  EXPECT_TRUE(box.restricted_to({}).trivially_empty());
  // balls missing the sampling box are ignored
  EXPECT_TRUE(box.without(std::vector<Ball<2>>{{{5.0, 5.0}, 1.0}}).is_box());
}

TEST(Region, VolumeExactAndMonteCarlo) {
  RngStream rng(1, 0);
  const Region<2> box(Box<2>::cube(0.0, 1.0));
  EXPECT_EQ(region_volume(box, 0, rng).mean, 1.0);
  const Region<2> r = box.without(std::vector<Ball<2>>{{{0.5, 0.5}, 0.25}});
  const double exact = 1.0 - std::numbers::pi * 0.0625;
  const Estimate e = region_volume(r, 200000, rng);
  EXPECT_TRUE(e.within(exact, 4.0)) << e.mean << " vs " << exact;
  EXPECT_THROW(region_volume(r, 0, rng), std::invalid_argument);
}

TEST(Region, VolumeErrorShrinksWithSamples) {
  const Region<2> r = Region<2>(Box<2>::cube(0.0, 1.0)).without(std::vector<Ball<2>>{{{0.5, 0.5}, 0.3}});
  RngStream a(5, 0), b(5, 1);
  const Estimate e1 = region_volume(r, 40000, a), e2 = region_volume(r, 80000, b);
  EXPECT_NEAR(e2.std_error / e1.std_error, 1.0 / std::sqrt(2.0), 0.02);
}

TEST(Ring, RegionAndRestriction) {
  const Region<1> r(Box<1>::cube(0.0, 1.0));
  const Configuration<1> c{{-0.1}, {3.0}};
  const Region<1> ring = ring_region(r, c, 0.3);
  EXPECT_TRUE(ring.contains({0.15}));
  EXPECT_FALSE(ring.contains({0.25}));
  EXPECT_EQ(restrict_to_ring(c, r, 0.3), (Configuration<1>{{-0.1}}));
  EXPECT_THROW(ring_region(r, Configuration<1>{{0.5}}, 0.3), std::invalid_argument);
}

TEST(Tail, PivotAndPriority) {
  const Region<1> whole(Box<1>::cube(0.0, 1.0));
  const TailDomain<1> t{&whole, nullptr, 0.4};
  EXPECT_FALSE(t.contains({0.3}));
  EXPECT_FALSE(t.contains({0.4}));
  EXPECT_TRUE(t.contains({0.5}));
  EXPECT_DOUBLE_EQ(t.sampling_box().lo[0], 0.4);

  const Region<1> pri(Box<1>::cube(0.6, 1.0));
  const TailDomain<1> tp{&whole, &pri, 0.8};
  EXPECT_TRUE(tp.contains({0.1}));   // outside the priority part, visited later
  EXPECT_FALSE(tp.contains({0.7}));  // before the pivot inside the priority part
  EXPECT_TRUE(tp.contains({0.9}));
}

TEST(Rng, DeterministicStreams) {
  RngStream a(42, 7), b(42, 7), c(42, 8);
  for (int i = 0; i < 10; ++i) {
    const double x = a.uniform();
    EXPECT_EQ(x, b.uniform());
    EXPECT_NE(x, c.uniform());
  }
}
