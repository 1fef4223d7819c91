#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

namespace hsc::stats {

struct TestResult {
  double statistic = 0.0;
  double dof = 0.0;
  double p_value = 1.0;

  bool passes(double alpha) const { return p_value > alpha; }
};

inline double chi_square_sf(double x, double dof) {
  if (dof <= 0.0) return 1.0;
  if (x <= 0.0) return 1.0;
  boost::math::chi_squared dist(dof);
  return boost::math::cdf(boost::math::complement(dist, x));
}

/// Histogram of non-negative integer values, one bin per value.
inline std::vector<std::size_t> histogram(const std::vector<std::size_t>& values) {
  std::size_t top = 0;
  for (auto v : values) top = std::max(top, v);
  std::vector<std::size_t> h(values.empty() ? 0 : top + 1, 0);
  for (auto v : values) ++h[v];
  return h;
}

/// Pearson goodness of fit against bin probabilities. Trailing bins are
/// merged until every expected count is at least `min_expected`; the last
/// probability bin absorbs the remaining mass (1 - sum).
inline TestResult chi_square_gof(const std::vector<std::size_t>& observed,
                                 const std::vector<double>& probs, double min_expected = 5.0) {
  const double n = static_cast<double>(std::accumulate(observed.begin(), observed.end(), std::size_t{0}));
  if (n == 0.0) return {};
  const std::size_t bins = std::max(observed.size(), probs.size());
  std::vector<double> obs(bins, 0.0), exp(bins, 0.0);
  for (std::size_t i = 0; i < observed.size(); ++i) obs[i] = static_cast<double>(observed[i]);
  double used = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    exp[i] = probs[i] * n;
    used += probs[i];
  }
  exp.back() += std::max(0.0, 1.0 - used) * n;

  // Merge from the right, then from the left, until each bin is large enough.
  std::vector<double> o2, e2;
  double oa = 0, ea = 0;
  for (std::size_t i = bins; i-- > 0;) {
    oa += obs[i];
    ea += exp[i];
    if (ea >= min_expected) {
      o2.push_back(oa);
      e2.push_back(ea);
      oa = ea = 0;
    }
  }
  if (ea > 0 || oa > 0) {
    if (e2.empty()) {
      o2.push_back(oa);
      e2.push_back(ea);
    } else {
      o2.back() += oa;
      e2.back() += ea;
    }
  }
  TestResult r;
  for (std::size_t i = 0; i < o2.size(); ++i) {
    if (e2[i] > 0) r.statistic += (o2[i] - e2[i]) * (o2[i] - e2[i]) / e2[i];
    else if (o2[i] > 0) r.statistic = INFINITY;
  }
  r.dof = static_cast<double>(o2.size()) - 1.0;
  r.p_value = std::isinf(r.statistic) ? 0.0 : chi_square_sf(r.statistic, r.dof);
  return r;
}

/// Chi-square test of homogeneity for two histograms over the same bins.
/// Sparse bins (pooled expected count below `min_expected` in either row) are
/// merged into their right neighbour.
inline TestResult chi_square_two_sample(const std::vector<std::size_t>& a,
                                        const std::vector<std::size_t>& b,
                                        double min_expected = 5.0) {
  const std::size_t bins = std::max(a.size(), b.size());
  std::vector<double> x(bins, 0.0), y(bins, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) x[i] = static_cast<double>(a[i]);
  for (std::size_t i = 0; i < b.size(); ++i) y[i] = static_cast<double>(b[i]);
  const double na = std::accumulate(x.begin(), x.end(), 0.0);
  const double nb = std::accumulate(y.begin(), y.end(), 0.0);
  if (na == 0.0 || nb == 0.0) return {};
  const double n = na + nb;
  const double fa = na / n, fb = nb / n;

  std::vector<double> x2, y2;
  double xa = 0, ya = 0;
  for (std::size_t i = 0; i < bins; ++i) {
    xa += x[i];
    ya += y[i];
    const double tot = xa + ya;
    if (tot * fa >= min_expected && tot * fb >= min_expected) {
      x2.push_back(xa);
      y2.push_back(ya);
      xa = ya = 0;
    }
  }
  if (xa + ya > 0) {
    if (x2.empty()) {
      x2.push_back(xa);
      y2.push_back(ya);
    } else {
      x2.back() += xa;
      y2.back() += ya;
    }
  }
  TestResult r;
  for (std::size_t i = 0; i < x2.size(); ++i) {
    const double tot = x2[i] + y2[i];
    const double ea = tot * fa, eb = tot * fb;
    r.statistic += (x2[i] - ea) * (x2[i] - ea) / ea + (y2[i] - eb) * (y2[i] - eb) / eb;
  }
  r.dof = static_cast<double>(x2.size()) - 1.0;
  r.p_value = chi_square_sf(r.statistic, r.dof);
  return r;
}

/// Kolmogorov limiting survival function Q(t) = 2 sum (-1)^(k-1) exp(-2 k^2 t^2).
inline double kolmogorov_sf(double t) {
  if (t <= 0.0) return 1.0;
  if (t < 0.2) return 1.0;
  double s = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * t * t);
    s += (k % 2 ? 1.0 : -1.0) * term;
    if (term < 1e-16) break;
  }
  return std::clamp(2.0 * s, 0.0, 1.0);
}

/// Two-sample Kolmogorov-Smirnov test with the Stephens small-sample
/// correction of the asymptotic distribution.
inline TestResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) return {};
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  const double ne = std::sqrt(na * nb / (na + nb));
  TestResult r;
  r.statistic = d;
  r.p_value = kolmogorov_sf((ne + 0.12 + 0.11 / ne) * d);
  return r;
}

/// Sample Pearson correlation.
inline double correlation(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) throw std::invalid_argument("correlation needs paired samples");
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

struct MeanEstimate {
  double mean = 0.0;
  double std_error = 0.0;
};

inline MeanEstimate mean_of(const std::vector<double>& v) {
  const double n = static_cast<double>(v.size());
  if (v.empty()) return {};
  const double m = std::accumulate(v.begin(), v.end(), 0.0) / n;
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return {m, v.size() > 1 ? std::sqrt(s / (n - 1) / n) : 0.0};
}

}  // namespace hsc::stats
