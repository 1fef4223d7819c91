#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "hsc/estimate.hpp"
#include "hsc/geometry.hpp"
#include "hsc/random.hpp"
#include "hsc/sampling.hpp"

namespace hsc {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n), size_(n, 1) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
  }

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> size_;
};

/// Connected components of the Gilbert graph (edges at distance <= R).
/// Labels are numbered 0..components-1 in order of first appearance.
struct ClusterPartition {
  std::vector<std::size_t> label;
  std::size_t components = 0;

  bool connected(std::size_t i, std::size_t j) const { return label[i] == label[j]; }
};

template <std::size_t D>
ClusterPartition cluster_partition(std::span<const Point<D>> pts, double R) {
  const std::size_t n = pts.size();
  DisjointSets ds(n);
  if (n > 1 && R > 0.0) {
    Point<D> lo = pts[0];
    for (const auto& p : pts)
      for (std::size_t i = 0; i < D; ++i) lo[i] = std::min(lo[i], p[i]);
    using Key = std::array<std::int64_t, D>;
    std::vector<std::pair<Key, std::size_t>> cells(n);
    for (std::size_t k = 0; k < n; ++k) {
      Key key;
      for (std::size_t i = 0; i < D; ++i)
        key[i] = static_cast<std::int64_t>(std::floor((pts[k][i] - lo[i]) / R));
      cells[k] = {key, k};
    }
    std::sort(cells.begin(), cells.end());
    const auto cmp = [](const std::pair<Key, std::size_t>& a, const Key& b) { return a.first < b; };
    std::array<int, D> off;
    for (std::size_t k = 0; k < n; ++k) {
      const Key& home = cells[k].first;
      const std::size_t i = cells[k].second;
      off.fill(-1);
      while (true) {
        Key nb = home;
        for (std::size_t d = 0; d < D; ++d) nb[d] += off[d];
        // Only look "upwards" to visit each unordered cell pair once.
        if (!(nb < home)) {
          auto it = std::lower_bound(cells.begin(), cells.end(), nb, cmp);
          for (; it != cells.end() && it->first == nb; ++it)
            if (it->second != i && within(pts[i], pts[it->second], R)) ds.unite(i, it->second);
        }
        std::size_t d = 0;
        for (; d < D; ++d) {
          if (++off[d] <= 1) break;
          off[d] = -1;
        }
        if (d == D) break;
      }
    }
  }
  ClusterPartition cp;
  cp.label.assign(n, 0);
  std::vector<std::size_t> root_label(n, std::numeric_limits<std::size_t>::max());
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t r = ds.find(k);
    if (root_label[r] == std::numeric_limits<std::size_t>::max()) root_label[r] = cp.components++;
    cp.label[k] = root_label[r];
  }
  return cp;
}

template <std::size_t D>
ClusterPartition cluster_partition(const Configuration<D>& c, double R) {
  return cluster_partition<D>(std::span<const Point<D>>(c.points()), R);
}

/// The complement of a box (the outside of a sampling window).
template <std::size_t D>
struct BoxComplement {
  Box<D> box;
};

/// Sets that connectivity questions are asked about.
template <std::size_t D>
using Target = std::variant<Box<D>, Configuration<D>, BoxComplement<D>>;

namespace detail {

template <std::size_t D>
double inner_depth(const Box<D>& outer, const Point<D>& p) {
  if (!outer.contains(p)) return 0.0;
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < D; ++i) m = std::min({m, p[i] - outer.lo[i], outer.hi[i] - p[i]});
  return m;
}

template <std::size_t D>
double inner_depth(const Box<D>& outer, const Box<D>& a) {
  for (std::size_t i = 0; i < D; ++i)
    if (a.lo[i] < outer.lo[i] || a.hi[i] > outer.hi[i]) return 0.0;
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < D; ++i) m = std::min({m, a.lo[i] - outer.lo[i], outer.hi[i] - a.hi[i]});
  return m;
}

}  // namespace detail

/// Distance from a point to a target set (+inf for an empty configuration).
template <std::size_t D>
double target_distance(const Target<D>& t, const Point<D>& p) {
  return std::visit(
      [&](const auto& v) -> double {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, Box<D>>) {
          return v.distance(p);
        } else if constexpr (std::is_same_v<V, Configuration<D>>) {
          double m = std::numeric_limits<double>::infinity();
          for (const auto& q : v) m = std::min(m, distance(p, q));
          return m;
        } else {
          return detail::inner_depth(v.box, p);
        }
      },
      t);
}

/// Distance between two target sets.
template <std::size_t D>
double target_gap(const Target<D>& a, const Target<D>& b) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  if (const auto* c = std::get_if<Configuration<D>>(&a)) {
    double m = inf;
    for (const auto& p : *c) m = std::min(m, target_distance(b, p));
    return m;
  }
  if (const auto* c = std::get_if<Configuration<D>>(&b)) return target_gap<D>(b, a);
  if (std::holds_alternative<BoxComplement<D>>(a) && std::holds_alternative<BoxComplement<D>>(b))
    return 0.0;
  if (const auto* bc = std::get_if<BoxComplement<D>>(&a))
    return detail::inner_depth(bc->box, std::get<Box<D>>(b));
  if (const auto* bc = std::get_if<BoxComplement<D>>(&b))
    return detail::inner_depth(bc->box, std::get<Box<D>>(a));
  return box_gap(std::get<Box<D>>(a), std::get<Box<D>>(b));
}

/// a <-> b through c: a chain of points of c with steps <= R starting within R
/// of a and ending within R of b. Sets at distance <= R count as connected
/// without any intermediate point.
template <std::size_t D>
bool sets_connected(const Target<D>& a, const Target<D>& b, const Configuration<D>& c, double R) {
  if (target_gap(a, b) <= R) return true;
  if (c.empty()) return false;
  const ClusterPartition cp = cluster_partition(c, R);
  std::vector<char> near_a(cp.components, 0), near_b(cp.components, 0);
  for (std::size_t k = 0; k < c.size(); ++k) {
    if (target_distance(a, c[k]) <= R) near_a[cp.label[k]] = 1;
    if (target_distance(b, c[k]) <= R) near_b[cp.label[k]] = 1;
  }
  for (std::size_t k = 0; k < cp.components; ++k)
    if (near_a[k] && near_b[k]) return true;
  return false;
}

/// Whether some cluster comes within R of both faces of the box orthogonal
/// to `axis`.
template <std::size_t D>
bool spans(const Configuration<D>& c, const Box<D>& box, double R, std::size_t axis = 0) {
  if (c.empty()) return box.hi[axis] - box.lo[axis] <= R;
  const ClusterPartition cp = cluster_partition(c, R);
  std::vector<char> left(cp.components, 0), right(cp.components, 0);
  for (std::size_t k = 0; k < c.size(); ++k) {
    if (c[k][axis] - box.lo[axis] <= R) left[cp.label[k]] = 1;
    if (box.hi[axis] - c[k][axis] <= R) right[cp.label[k]] = 1;
  }
  for (std::size_t k = 0; k < cp.components; ++k)
    if (left[k] && right[k]) return true;
  return false;
}

/// Pi(box, alpha)(a <-> b), estimated over independent replicas.
template <std::size_t D>
Estimate connection_probability(const Box<D>& box, const Target<D>& a, const Target<D>& b,
                                double alpha, double R, std::size_t replicas, RngStream& rng) {
  if (replicas == 0) throw std::invalid_argument("connection probability requires replicas");
  if (target_gap(a, b) <= R) return Estimate::exact(1.0);
  if (alpha == 0.0) return Estimate::exact(0.0);
  const Region<D> region(box);
  std::size_t hits = 0;
  for (std::size_t r = 0; r < replicas; ++r)
    if (sets_connected(a, b, sample_poisson(region, alpha, rng), R)) ++hits;
  return Estimate::proportion(hits, replicas);
}

/// One record of a parameter sweep.
struct SweepRow {
  std::size_t dimension = 0;
  double radius = 0.0;
  double intensity = 0.0;
  double box_side = 0.0;
  std::size_t replicas = 0;
  std::string statistic;
  double value = 0.0;
  double std_error = 0.0;

  friend bool operator==(const SweepRow&, const SweepRow&) = default;
};

/// Left-to-right spanning probability of the Gilbert graph on [0, side]^D
/// for every (side, alpha) pair. Replica r of grid point (i, j) uses stream
/// (i << 40) | (j << 24) | r of `seed`, so rows are reproducible one by one.
template <std::size_t D>
std::vector<SweepRow> critical_intensity_sweep(double R, const std::vector<double>& box_sides,
                                               const std::vector<double>& alpha_grid,
                                               std::size_t replicas, std::uint64_t seed) {
  std::vector<SweepRow> rows;
  for (std::size_t i = 0; i < box_sides.size(); ++i) {
    const Box<D> box = Box<D>::cube(0.0, box_sides[i]);
    const Region<D> region(box);
    for (std::size_t j = 0; j < alpha_grid.size(); ++j) {
      std::size_t hits = 0;
      for (std::size_t r = 0; r < replicas; ++r) {
        RngStream rng(seed, (std::uint64_t{i} << 40) | (std::uint64_t{j} << 24) | r);
        if (spans(sample_poisson(region, alpha_grid[j], rng), box, R)) ++hits;
      }
      const Estimate e = Estimate::proportion(hits, replicas);
      rows.push_back({D, R, alpha_grid[j], box_sides[i], replicas, "spanning_probability", e.mean,
                      e.std_error});
    }
  }
  std::sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
    return std::tie(a.box_side, a.intensity) < std::tie(b.box_side, b.intensity);
  });
  return rows;
}

/// Intensity where the spanning probability of one box size first reaches
/// 1/2, by linear interpolation between grid points.
inline std::optional<double> half_crossing(const std::vector<SweepRow>& rows, double box_side) {
  std::vector<const SweepRow*> sel;
  for (const auto& r : rows)
    if (r.box_side == box_side && r.statistic == "spanning_probability") sel.push_back(&r);
  std::sort(sel.begin(), sel.end(),
            [](const SweepRow* a, const SweepRow* b) { return a->intensity < b->intensity; });
  for (std::size_t k = 1; k < sel.size(); ++k) {
    const double v0 = sel[k - 1]->value, v1 = sel[k]->value;
    if (v0 < 0.5 && v1 >= 0.5) {
      const double t = (0.5 - v0) / (v1 - v0);
      return sel[k - 1]->intensity + t * (sel[k]->intensity - sel[k - 1]->intensity);
    }
  }
  return std::nullopt;
}

struct DecayFit {
  double K = 1.0;
  double kappa = 0.0;
  double kappa_std_error = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // root mean square of log residuals
  std::size_t points = 0;

  std::pair<double, double> kappa_interval(double z = 1.96) const {
    return {kappa - z * kappa_std_error, kappa + z * kappa_std_error};
  }
  bool decaying(double z = 1.96) const { return kappa_interval(z).first > 0.0; }
};

/// Least-squares fit of log(probability) against distance.
///
/// Points with zero estimate are skipped. When every point carries a
/// standard error, the fit is weighted by the delta-method variance of the
/// log and the slope error is inflated by the reduced chi-square if the
/// scatter exceeds it; otherwise plain least squares with residual-based
/// error is used.
inline DecayFit fit_decay(const std::vector<std::pair<double, Estimate>>& rows) {
  std::vector<double> x, y, w;
  bool weighted = true;
  for (const auto& [d, e] : rows) {
    if (!(e.mean > 0.0)) continue;
    x.push_back(d);
    y.push_back(std::log(e.mean));
    const double rel = e.std_error / e.mean;
    w.push_back(rel > 0.0 ? 1.0 / (rel * rel) : 0.0);
    if (!(rel > 0.0)) weighted = false;
  }
  if (x.size() < 3) throw std::invalid_argument("insufficient decay data");
  if (!weighted) std::fill(w.begin(), w.end(), 1.0);

  const std::size_t n = x.size();
  double sw = 0, sx = 0, sy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sw += w[i];
    sx += w[i] * x[i];
    sy += w[i] * y[i];
  }
  const double mx = sx / sw, my = sy / sw;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += w[i] * (x[i] - mx) * (x[i] - mx);
    sxy += w[i] * (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw std::invalid_argument("insufficient decay data");
  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;
  double chi2 = 0.0, rss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - (intercept + slope * x[i]);
    chi2 += w[i] * r * r;
    rss += r * r;
  }
  const double dof = static_cast<double>(n - 2);
  double var;
  if (weighted) var = std::max(1.0, dof > 0 ? chi2 / dof : 1.0) / sxx;
  else var = dof > 0 ? (chi2 / dof) / sxx : 0.0;

  DecayFit f;
  f.intercept = intercept;
  f.K = std::max(1.0, std::exp(intercept));
  f.kappa = -slope;
  f.kappa_std_error = std::sqrt(var);
  f.residual = std::sqrt(rss / static_cast<double>(n));
  f.points = n;
  return f;
}

}  // namespace hsc
