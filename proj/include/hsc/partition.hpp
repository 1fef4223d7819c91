#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "hsc/estimate.hpp"
#include "hsc/geometry.hpp"
#include "hsc/hardcore.hpp"
#include "hsc/intervals.hpp"
#include "hsc/random.hpp"
#include "hsc/sampling.hpp"

namespace hsc {

/// Grand-canonical partition function of hard rods on a union of intervals,
/// as a polynomial in the activity: Z(lambda) = sum_n a_n lambda^n, where
/// a_n is the volume of ordered n-point configurations with gaps > R.
///
/// The coefficients come from the backward recursion
///   f(t) = 1 + lambda * int_{S, x > t} f(x + R) dx,   Z = f(inf S),
/// solved exactly with piecewise polynomials on a breakpoint grid that is
/// closed under shifts by R. With R == 0 the series does not terminate and
/// Z = exp(lambda |S|) is used instead.
class HardRodSeries {
 public:
  HardRodSeries(const IntervalSet& s, double R) : length_(s.measure()), poisson_(!(R > 0.0)) {
    if (R < 0.0 || !std::isfinite(R)) throw std::invalid_argument("radius must be finite and >= 0");
    if (s.empty()) {
      coeff_ = {1.0};
      return;
    }
    if (poisson_) return;
    solve(s, R);
  }

  /// a_n; empty when R == 0.
  const std::vector<double>& coefficients() const { return coeff_; }

  /// Highest n with a_n > 0 (largest hard-rod packing), or unbounded for R == 0.
  std::size_t max_count() const { return poisson_ ? unbounded : coeff_.size() - 1; }

  double evaluate(double lambda) const {
    if (poisson_) return std::exp(lambda * length_);
    double z = 0.0;
    for (std::size_t n = coeff_.size(); n-- > 0;) z = z * lambda + coeff_[n];
    return z;
  }

  /// P(N = n) = a_n lambda^n / Z for n = 0..max_count (truncated at n_max
  /// terms when R == 0).
  std::vector<double> count_distribution(double lambda, std::size_t n_max = 64) const {
    std::vector<double> p;
    if (poisson_) {
      const double mu = lambda * length_;
      double term = std::exp(-mu);
      for (std::size_t n = 0; n <= n_max; ++n) {
        p.push_back(term);
        term *= mu / static_cast<double>(n + 1);
      }
      return p;
    }
    const double z = evaluate(lambda);
    double pw = 1.0;
    for (double a : coeff_) {
      p.push_back(a * pw / z);
      pw *= lambda;
    }
    return p;
  }

 private:
  using Poly = std::vector<std::vector<double>>;  // [n][k]: lambda^n u^k

  static void add_to(std::vector<double>& acc, const std::vector<double>& v, double sign) {
    if (acc.size() < v.size()) acc.resize(v.size(), 0.0);
    for (std::size_t i = 0; i < v.size(); ++i) acc[i] += sign * v[i];
  }

  // Coefficients in lambda of P(u) for fixed u.
  static std::vector<double> at(const Poly& p, double u) {
    std::vector<double> out(p.size(), 0.0);
    for (std::size_t n = 0; n < p.size(); ++n) {
      double v = 0.0;
      for (std::size_t k = p[n].size(); k-- > 0;) v = v * u + p[n][k];
      out[n] = v;
    }
    return out;
  }

  // Q(u) = P(u + delta).
  static Poly shifted(const Poly& p, double delta) {
    if (delta == 0.0) return p;
    Poly q(p.size());
    for (std::size_t n = 0; n < p.size(); ++n) {
      const auto& c = p[n];
      std::vector<double> r(c.size(), 0.0);
      for (std::size_t k = 0; k < c.size(); ++k) {
        // (u + delta)^k = sum_j binom(k, j) u^j delta^(k-j)
        double binom = 1.0;
        for (std::size_t j = 0; j <= k; ++j) {
          r[j] += c[k] * binom * std::pow(delta, static_cast<double>(k - j));
          binom = binom * static_cast<double>(k - j) / static_cast<double>(j + 1);
        }
      }
      q[n] = std::move(r);
    }
    return q;
  }

  void solve(const IntervalSet& s, double R) {
    const double lo = s.lower(), hi = s.upper();
    const auto K = static_cast<long>(std::ceil((hi - lo) / R)) + 1;
    std::vector<double> bp;
    for (const auto& [a, b] : s.parts())
      for (double e : {a, b})
        for (long k = -K; k <= K; ++k) {
          const double v = e + static_cast<double>(k) * R;
          if (v >= lo && v <= hi) bp.push_back(v);
        }
    std::sort(bp.begin(), bp.end());
    bp.erase(std::unique(bp.begin(), bp.end()), bp.end());

    const std::size_t m = bp.size() - 1;
    std::vector<Poly> piece(m);
    std::vector<double> right = {1.0};  // f(hi) = 1
    for (std::size_t j = m; j-- > 0;) {
      const double w = bp[j + 1] - bp[j];
      const double mid = 0.5 * (bp[j] + bp[j + 1]);
      Poly p;
      if (!s.contains(mid) || w <= 0.0) {
        p.resize(right.size());
        for (std::size_t n = 0; n < right.size(); ++n) p[n] = {right[n]};
      } else {
        Poly q;
        if (mid + R >= hi) {
          q = {{1.0}};
        } else {
          const auto it = std::upper_bound(bp.begin(), bp.end(), mid + R);
          const std::size_t k = static_cast<std::size_t>(it - bp.begin()) - 1;
          q = shifted(piece[k], bp[j] + R - bp[k]);
        }
        // G(u) = lambda * int_0^u q, stored with n shifted by one.
        Poly g(q.size() + 1);
        for (std::size_t n = 0; n < q.size(); ++n) {
          g[n + 1].assign(q[n].size() + 1, 0.0);
          for (std::size_t k = 0; k < q[n].size(); ++k)
            g[n + 1][k + 1] = q[n][k] / static_cast<double>(k + 1);
        }
        std::vector<double> c0 = right;
        add_to(c0, at(g, w), 1.0);
        p.resize(std::max(g.size(), c0.size()));
        for (std::size_t n = 0; n < p.size(); ++n) {
          std::vector<double> poly;
          if (n < g.size()) {
            poly = g[n];
            for (double& v : poly) v = -v;
          }
          if (poly.empty()) poly.push_back(0.0);
          if (n < c0.size()) poly[0] += c0[n];
          p[n] = std::move(poly);
        }
      }
      right = at(p, 0.0);
      piece[j] = std::move(p);
    }
    coeff_ = right;
    while (coeff_.size() > 1 && coeff_.back() <= 0.0) coeff_.pop_back();
    for (double& a : coeff_) a = std::max(a, 0.0);
  }

  std::vector<double> coeff_;
  double length_ = 0.0;
  bool poisson_ = false;
};

/// Z(S, C, lambda) for 1D hard rods: S minus the closed R-neighbourhood of C.
inline double hard_rod_partition(const IntervalSet& s, const Configuration<1>& c, double lambda,
                                 double R) {
  return HardRodSeries(s.subtract(neighbourhood(c, R)), R).evaluate(lambda);
}

/// Exact partition function on a 1D region with boundary points outside it.
template <std::size_t D>
Estimate partition_series_1d(const Region<D>& region, const Configuration<D>& boundary,
                             double lambda, double R) {
  if constexpr (D != 1) {
    throw std::invalid_argument("series oracle is 1D only");
  } else {
    return Estimate::series(hard_rod_partition(to_intervals(region), boundary, lambda, R));
  }
}

template <std::size_t D>
Estimate partition_series_1d(const Region<D>& region, const BoundaryCondition<D>& c, double lambda,
                             double R) {
  return partition_series_1d(region, c.points, lambda, R);
}

/// Monte Carlo estimate of Pi(B, lambda)(H(xi | C) = 1).
template <std::size_t D, Domain<D> Dom>
Estimate acceptance_probability(const Dom& region, const Configuration<D>& boundary, double lambda,
                                double R, std::size_t n_mc, RngStream& rng) {
  if (n_mc == 0) throw std::invalid_argument("acceptance estimator requires samples");
  if (lambda == 0.0 || !(R > 0.0)) return Estimate::exact(1.0);
  std::size_t ok = 0;
  for (std::size_t i = 0; i < n_mc; ++i) {
    const Configuration<D> draw = sample_poisson<D>(region, lambda, rng);
    if (!detail::has_internal_conflict(draw, R) && !detail::has_cross_conflict(draw, boundary, R))
      ++ok;
  }
  return Estimate::proportion(ok, n_mc);
}

template <std::size_t D>
Estimate acceptance_probability(const Region<D>& region, const BoundaryCondition<D>& c,
                                double lambda, double R, std::size_t n_mc, RngStream& rng) {
  return acceptance_probability<D, Region<D>>(region, c.points, lambda, R, n_mc, rng);
}

/// Counters reported alongside Monte Carlo thinning runs.
struct ThinningStats {
  std::size_t decisions = 0;
  std::size_t short_circuits = 0;
  std::size_t clamps = 0;
  std::size_t draws = 0;
};

/// Paired (common random numbers) estimate of
///   Z(T, cond + {x}) / Z(T, cond)
/// as the ratio of hard-core acceptance counts with and without x on the
/// same Poisson draws on T. The numerator indicator is dominated by the
/// denominator draw by draw.
template <std::size_t D, Domain<D> Dom>
Estimate paired_ratio(const Point<D>& x, const Configuration<D>& condition, const Dom& tail,
                      double lambda, double R, std::size_t n_mc, RngStream& rng,
                      ThinningStats* stats = nullptr) {
  const Box<D> box = tail.sampling_box();
  const double mean = box.is_empty() ? 0.0 : lambda * box.volume();
  if (mean == 0.0 || !(R > 0.0)) return Estimate::exact(1.0);
  if (n_mc == 0) throw std::invalid_argument("thinning estimator requires samples");

  // Condition points that can interact with the tail at all.
  std::vector<Point<D>> cond;
  for (const auto& c : condition)
    if (box.meets(Ball<D>{c, R})) cond.push_back(c);

  std::vector<Point<D>> buf;
  std::size_t base_ok = 0, with_ok = 0;
  for (std::size_t i = 0; i < n_mc; ++i) {
    const std::uint64_t n = rng.poisson(mean);
    buf.clear();
    bool ok = true, okx = true;
    for (std::uint64_t j = 0; j < n && ok; ++j) {
      const Point<D> p = box.sample(rng);
      if (!tail.contains(p)) continue;
      for (const auto& c : cond)
        if (within(p, c, R)) {
          ok = false;
          break;
        }
      if (!ok) break;
      for (const auto& q : buf)
        if (within(p, q, R)) {
          ok = false;
          break;
        }
      if (!ok) break;
      if (okx && within(p, x, R)) okx = false;
      buf.push_back(p);
    }
    if (ok) {
      ++base_ok;
      if (okx) ++with_ok;
    }
  }
  if (stats) stats->draws += n_mc;
  if (base_ok == 0) throw std::runtime_error("condition infeasible");
  double r = static_cast<double>(with_ok) / static_cast<double>(base_ok);
  if (r > 1.0) {
    r = 1.0;
    if (stats) ++stats->clamps;
  }
  return {r, std::sqrt(r * (1.0 - r) / static_cast<double>(base_ok)), n_mc, Method::mc_paired};
}

/// Thinning probability estimated by the paired Monte Carlo ratio.
struct McRatioOracle {
  std::size_t n_mc = 20000;
  ThinningStats stats{};

  template <std::size_t D, Domain<D> Dom>
  Estimate operator()(const Point<D>& x, const Configuration<D>& condition, const Dom& tail,
                      double lambda, double R, RngStream& rng) {
    return paired_ratio<D>(x, condition, tail, lambda, R, n_mc, rng, &stats);
  }
};

/// Thinning probability from the exact hard-rod series (1D only).
struct ExactSeriesOracle {
  ThinningStats stats{};

  template <class Dom>
  Estimate operator()(const Point<1>& x, const Configuration<1>& condition, const Dom& tail,
                      double lambda, double R, RngStream&) {
    const IntervalSet t = to_intervals(tail).subtract(neighbourhood(condition, R));
    const double den = HardRodSeries(t, R).evaluate(lambda);
    const double num =
        HardRodSeries(t.subtract(IntervalSet(x[0] - R, x[0] + R)), R).evaluate(lambda);
    double p = num / den;
    if (p > 1.0) {
      p = 1.0;
      ++stats.clamps;
    }
    return Estimate::series(p);
  }
};

/// p(x, Y) = H({x} | C u Y) * Z(T, C u Y u {x}) / Z(T, C u Y), where T is
/// the part of the region after x. The oracle supplies the Z-ratio.
template <std::size_t D, Domain<D> Dom, class Oracle>
Estimate thinning_probability_with(const Point<D>& x, const Configuration<D>& condition,
                                   const Dom& remaining, double lambda, double R, Oracle& oracle,
                                   RngStream& rng) {
  ++oracle.stats.decisions;
  for (const auto& c : condition)
    if (within(x, c, R)) {
      ++oracle.stats.short_circuits;
      return Estimate::exact(0.0);
    }
  if (!(R > 0.0) || lambda == 0.0) return Estimate::exact(1.0);
  const Box<D> box = remaining.sampling_box();
  if (box.is_empty() || box.volume() == 0.0) return Estimate::exact(1.0);
  return oracle(x, condition, remaining, lambda, R, rng);
}

template <std::size_t D, Domain<D> Dom>
Estimate thinning_probability(const Point<D>& x, const BoundaryCondition<D>& c,
                              const Configuration<D>& y_before, const Dom& remaining,
                              double lambda, double R, std::size_t n_mc, RngStream& rng) {
  McRatioOracle oracle{n_mc};
  return thinning_probability_with<D>(x, unite(c.points, y_before), remaining, lambda, R, oracle,
                                      rng);
}

/// q(x, Y) = p if x is kept, 1 - p otherwise.
inline double thin_choice(bool kept, double p) { return kept ? p : 1.0 - p; }

inline double thin_choice(bool kept, const Estimate& p) { return thin_choice(kept, p.mean); }

}  // namespace hsc
