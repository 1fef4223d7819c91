#pragma once

#include <cstddef>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "hsc/geometry.hpp"
#include "hsc/hardcore.hpp"
#include "hsc/partition.hpp"
#include "hsc/percolation.hpp"
#include "hsc/random.hpp"
#include "hsc/sampling.hpp"

namespace hsc {

/// Output of the dependent thinning: kept is hard-sphere, dominating is
/// Poisson, kept is a subset of dominating.
template <std::size_t D>
struct ThinnedPair {
  Configuration<D> kept;
  Configuration<D> dominating;
};

/// Dependent thinning of a Poisson process into the hard-sphere model on r
/// with the given boundary points.
///
/// Points of the Poisson draw are visited in lexicographic order and x is
/// kept with probability p(x, kept so far) supplied by the oracle. With a
/// priority sub-region P of r, the visiting order puts P first; only the
/// Poisson points of P are drawn and decided, and the result is the
/// restriction of the full thinning of r to P.
template <std::size_t D, class Oracle>
ThinnedPair<D> thin_to_hard_sphere(const Region<D>& r, const Configuration<D>& boundary,
                                   double lambda, double R, Oracle& oracle, RngStream& rng,
                                   const Region<D>* priority = nullptr) {
  for (const auto& p : boundary)
    if (r.contains(p)) throw std::invalid_argument("boundary points must lie outside the region");
  Configuration<D> condition = restrict_to_ring(boundary, r, R);
  Configuration<D> dominating = sample_poisson(priority ? *priority : r, lambda, rng);
  std::vector<Point<D>> kept;
  for (const auto& x : dominating) {
    const TailDomain<D> tail{&r, priority, x[0]};
    const Estimate p = thinning_probability_with<D>(x, condition, tail, lambda, R, oracle, rng);
    if (rng.uniform() < p.mean) {
      kept.push_back(x);
      condition.insert(x);
    }
  }
  return {Configuration<D>::from_sorted(std::move(kept)), std::move(dominating)};
}

template <std::size_t D>
ThinnedPair<D> thin_to_hard_sphere(const Region<D>& r, const BoundaryCondition<D>& c,
                                   double lambda, double R, std::size_t n_mc, RngStream& rng) {
  McRatioOracle oracle{n_mc};
  return thin_to_hard_sphere(r, c.points, lambda, R, oracle, rng);
}

/// A draw of the zone coupling on the disagreement zone D = D0 u D1 u D2.
template <std::size_t D>
struct ZoneSample {
  Configuration<D> xi1, xi2, xi3;
  Region<D> d0, d1, d2;
};

/// One step of the twisted construction on the disagreement zone of r.
///
/// D1 is blocked by c1 only, D2 by c2 only, D0 by both. D0 gets a plain
/// Poisson process; D1 and D2 get the restrictions of independent thinnings
/// of the whole region r with boundaries c1 and c2.
template <std::size_t D, class Oracle>
ZoneSample<D> twisted_zone(const Region<D>& r, const Configuration<D>& c1,
                           const Configuration<D>& c2, double lambda, double R, Oracle& oracle,
                           RngStream& rng) {
  const Configuration<D> b1 = restrict_to_ring(c1, r, R);
  const Configuration<D> b2 = restrict_to_ring(c2, r, R);
  if (b1.empty() && b2.empty())
    throw std::invalid_argument("zone coupling requires nonempty disagreement zone");
  const auto s1 = balls_around(b1, R);
  const auto s2 = balls_around(b2, R);

  ZoneSample<D> z;
  z.d0 = r.restricted_to(s1).restricted_to(s2);
  z.d1 = r.restricted_to(s2).without(s1);
  z.d2 = r.restricted_to(s1).without(s2);

  const Configuration<D> poisson0 = sample_poisson(z.d0, lambda, rng);
  const ThinnedPair<D> t1 = thin_to_hard_sphere(r, b1, lambda, R, oracle, rng, &z.d1);
  const ThinnedPair<D> t2 = thin_to_hard_sphere(r, b2, lambda, R, oracle, rng, &z.d2);
  z.xi1 = t1.kept;
  z.xi2 = t2.kept;
  z.xi3 = unite(unite(poisson0, t1.dominating), t2.dominating);
  return z;
}

struct TraceStep {
  std::size_t depth = 0;
  bool base_case = false;
  std::size_t boundary1 = 0, boundary2 = 0;  // ring-restricted boundary sizes
  std::size_t d0_points = 0, d1_points = 0, d2_points = 0;
  std::size_t hs_bound = 0;  // hs_size_bound of the region entering this step
};

struct RecursionTrace {
  std::vector<TraceStep> steps;
  std::size_t cap = 0;
  bool terminated = false;

  std::size_t depth() const { return steps.size(); }
};

class RecursionCapExceeded : public std::logic_error {
 public:
  RecursionCapExceeded(const std::string& msg, RecursionTrace trace)
      : std::logic_error(msg), trace_(std::move(trace)) {}
  const RecursionTrace& trace() const { return trace_; }

 private:
  RecursionTrace trace_;
};

template <std::size_t D>
struct CouplingSample {
  Configuration<D> xi1, xi2, xi3;
  Region<D> region;
  Configuration<D> c1, c2;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;

  friend bool operator==(const CouplingSample& a, const CouplingSample& b) {
    return a.xi1 == b.xi1 && a.xi2 == b.xi2 && a.xi3 == b.xi3 && a.c1 == b.c1 && a.c2 == b.c2 &&
           a.seed == b.seed && a.stream == b.stream;
  }
};

/// Every point of xi1 (sym) xi2 is R-connected inside xi1 (sym) xi2 to
/// c1 (sym) c2.
template <std::size_t D>
bool disagreement_connected(const Configuration<D>& xi1, const Configuration<D>& xi2,
                            const Configuration<D>& c1, const Configuration<D>& c2, double R) {
  const Configuration<D> diff = symmetric_difference(xi1, xi2);
  if (diff.empty()) return true;
  const Configuration<D> cdiff = symmetric_difference(c1, c2);
  std::vector<Point<D>> all(diff.begin(), diff.end());
  all.insert(all.end(), cdiff.begin(), cdiff.end());
  const ClusterPartition cp = cluster_partition<D>(std::span<const Point<D>>(all), R);
  std::vector<char> anchored(cp.components, 0);
  for (std::size_t k = diff.size(); k < all.size(); ++k) anchored[cp.label[k]] = 1;
  for (std::size_t k = 0; k < diff.size(); ++k)
    if (!anchored[cp.label[k]]) return false;
  return true;
}

/// Twisted disagreement coupling of HS(r, c1), HS(r, c2) and Poisson(r).
///
/// While either boundary reaches the current region, run the zone step on
/// its disagreement zone D and continue on r \ D with the points just placed
/// in D as the new boundaries; the old boundaries cannot reach r \ D. Once
/// no boundary reaches the region a single thinning fills both xi1 and xi2.
template <std::size_t D, class Oracle>
CouplingSample<D> twisted_couple(const Region<D>& r, const Configuration<D>& c1,
                                 const Configuration<D>& c2, double lambda, double R,
                                 Oracle& oracle, RngStream& rng, RecursionTrace* trace_out = nullptr) {
  for (const auto* c : {&c1, &c2})
    for (const auto& p : *c)
      if (r.contains(p)) throw std::invalid_argument("boundary points must lie outside the region");

  CouplingSample<D> out;
  out.region = r;
  out.c1 = c1;
  out.c2 = c2;
  out.seed = rng.seed();
  out.stream = rng.stream_id();

  RecursionTrace trace;
  const std::size_t bound = hs_size_bound(r, R);
  trace.cap = bound == unbounded ? unbounded : 2 * bound + 2;

  Region<D> region = r;
  Configuration<D> b1 = restrict_to_ring(c1, region, R);
  Configuration<D> b2 = restrict_to_ring(c2, region, R);
  for (std::size_t depth = 0;; ++depth) {
    if (depth > trace.cap) {
      std::ostringstream os;
      os << "twisted recursion exceeded depth cap " << trace.cap;
      throw RecursionCapExceeded(os.str(), trace);
    }
    TraceStep step;
    step.depth = depth;
    step.boundary1 = b1.size();
    step.boundary2 = b2.size();
    step.hs_bound = hs_size_bound(region, R);
    if (b1.empty() && b2.empty()) {
      const ThinnedPair<D> t = thin_to_hard_sphere(region, Configuration<D>{}, lambda, R, oracle, rng);
      out.xi1 = unite(out.xi1, t.kept);
      out.xi2 = unite(out.xi2, t.kept);
      out.xi3 = unite(out.xi3, t.dominating);
      step.base_case = true;
      trace.steps.push_back(step);
      break;
    }
    const ZoneSample<D> z = twisted_zone(region, b1, b2, lambda, R, oracle, rng);
    step.d1_points = z.xi1.size();
    step.d2_points = z.xi2.size();
    step.d0_points = static_cast<std::size_t>(
        std::count_if(z.xi3.begin(), z.xi3.end(), [&](const Point<D>& p) { return z.d0.contains(p); }));
    trace.steps.push_back(step);
    out.xi1 = unite(out.xi1, z.xi1);
    out.xi2 = unite(out.xi2, z.xi2);
    out.xi3 = unite(out.xi3, z.xi3);

    region = region.without(balls_around(unite(b1, b2), R));
    b1 = restrict_to_ring(z.xi1, region, R);
    b2 = restrict_to_ring(z.xi2, region, R);
  }
  trace.terminated = true;

  // Screening: every level only sees the points of the level before it, so
  // the assembled processes must still respect the original boundaries.
  if (!is_hard_core(out.xi1, restrict_to_ring(c1, r, R), R) ||
      !is_hard_core(out.xi2, restrict_to_ring(c2, r, R), R))
    throw std::logic_error("twisted coupling violated boundary screening");

  if (trace_out) *trace_out = std::move(trace);
  return out;
}

template <std::size_t D>
CouplingSample<D> twisted_couple(const Region<D>& r, const BoundaryCondition<D>& c1,
                                 const BoundaryCondition<D>& c2, double lambda, double R,
                                 std::size_t n_mc, RngStream& rng,
                                 RecursionTrace* trace = nullptr) {
  McRatioOracle oracle{n_mc};
  return twisted_couple(r, c1.points, c2.points, lambda, R, oracle, rng, trace);
}

}  // namespace hsc
