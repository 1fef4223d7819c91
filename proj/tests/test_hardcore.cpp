#include <gtest/gtest.h>

#include <cmath>

#include "hsc/hardcore.hpp"
#include "hsc/sampling.hpp"

using namespace hsc;

TEST(HardCore, StrictSeparation) {
  EXPECT_EQ(is_hard_core(Configuration<1>{{0.0}, {0.5}}, 0.4), 1);
  EXPECT_EQ(is_hard_core(Configuration<1>{{0.0}, {0.3}}, 0.4), 0);
  // distance exactly R is a conflict
  EXPECT_EQ(is_hard_core(Configuration<1>{{0.0}, {0.5}}, 0.5), 0);
  EXPECT_EQ(is_hard_core(Configuration<1>{}, 1.0), 1);
  EXPECT_EQ(is_hard_core(Configuration<1>{{0.0}}, Configuration<1>{{-0.2}}, 0.3), 0);
  EXPECT_EQ(is_hard_core(Configuration<1>{{0.0}}, Configuration<1>{{-0.4}}, 0.3), 1);
  // boundary points never interact with each other
  EXPECT_EQ(is_hard_core(Configuration<1>{}, Configuration<1>{{-0.1}, {-0.2}}, 0.3), 1);
  EXPECT_THROW(is_hard_core(Configuration<1>{{0.1}}, Configuration<1>{{0.1}}, 0.3), std::invalid_argument);
}

TEST(HardCore, MatchesBruteForce) {
  RngStream rng(11, 0);
  for (int t = 0; t < 500; ++t) {
    const Configuration<2> y = sample_poisson(Region<2>(Box<2>::cube(0, 1)), 8.0, rng);
    const double R = 0.2;
    bool ok = true;
    for (std::size_t i = 0; i < y.size(); ++i)
      for (std::size_t j = i + 1; j < y.size(); ++j) ok &= distance(y[i], y[j]) > R;
    EXPECT_EQ(is_hard_core(y, R), ok ? 1 : 0);
  }
}

TEST(HardCore, ChainIdentityRandomTriples) {
  RngStream rng(12, 0);
  const Region<1> r(Box<1>::cube(0, 2));
  for (int t = 0; t < 2000; ++t) {
    const auto all = sample_poisson(r, 4.0, rng);
    std::vector<Point<1>> x, y, z;
    for (const auto& p : all) {
      const double u = rng.uniform();
      (u < 1.0 / 3 ? x : u < 2.0 / 3 ? y : z).push_back(p);
    }
    ASSERT_TRUE(chain_identity_check(Configuration<1>(x), Configuration<1>(y), Configuration<1>(z), 0.3));
  }
}

TEST(HardCore, Hamiltonian) {
  EXPECT_EQ(hamiltonian(Configuration<1>{{0.0}, {1.0}}, Configuration<1>{}, 0.5), 0.0);
  EXPECT_TRUE(std::isinf(hamiltonian(Configuration<1>{{0.0}, {0.1}}, Configuration<1>{}, 0.5)));
}

TEST(HardCore, BoundaryConditionValidation) {
  const Region<1> r(Box<1>::cube(0, 1));
  EXPECT_THROW(BoundaryCondition<1>(Configuration<1>{{0.5}}, r), std::invalid_argument);
  const BoundaryCondition<1> c(Configuration<1>{{-0.1}, {5.0}}, r);
  EXPECT_EQ(c.ring_restricted(0.3).points, (Configuration<1>{{-0.1}}));
}

// Greedy random packings never beat the bound.
TEST(SizeBound, DominatesPackings) {
  RngStream rng(13, 0);
  const double R = 0.25;
  const Region<2> box(Box<2>::cube(0, 1));
  const Region<2> holed = box.without(std::vector<Ball<2>>{{{0.5, 0.5}, 0.3}});
  for (const auto* r : {&box, &holed}) {
    const std::size_t bound = hs_size_bound(*r, R);
    for (int t = 0; t < 50; ++t) {
      std::vector<Point<2>> pack;
      for (int k = 0; k < 3000; ++k) {
        const Point<2> p{rng.uniform(), rng.uniform()};
        if (!r->contains(p)) continue;
        bool ok = true;
        for (const auto& q : pack) ok &= !within(p, q, R);
        if (ok) pack.push_back(p);
      }
      EXPECT_LE(pack.size(), bound);
    }
  }
}

TEST(SizeBound, EdgeCasesAndMonotonicity) {
  const Region<2> box(Box<2>::cube(0, 1));
  EXPECT_EQ(hs_size_bound(Region<2>::empty(), 0.3), 0u);
  EXPECT_EQ(hs_size_bound(box, 0.0), unbounded);
  const std::size_t full = hs_size_bound(box, 0.3);
  const std::size_t holed = hs_size_bound(box.without(std::vector<Ball<2>>{{{0.5, 0.5}, 0.45}}), 0.3);
  EXPECT_LE(holed, full);
  EXPECT_LT(hs_size_bound(box.without(std::vector<Ball<2>>{{{0.5, 0.5}, 2.0}}), 0.3), full);
  // one cell of diameter R in 1D when the box is shorter than R
  EXPECT_EQ(hs_size_bound(Region<1>(Box<1>::cube(0, 0.2)), 0.3), 1u);
}
