#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "hsc/estimate.hpp"
#include "hsc/random.hpp"

namespace hsc {

template <std::size_t D>
using Point = std::array<double, D>;

template <std::size_t D>
double squared_distance(const Point<D>& x, const Point<D>& y) {
  double s = 0.0;
  for (std::size_t i = 0; i < D; ++i) {
    const double t = x[i] - y[i];
    s += t * t;
  }
  return s;
}

template <std::size_t D>
double distance(const Point<D>& x, const Point<D>& y) {
  return std::sqrt(squared_distance(x, y));
}

/// Closed-ball test |x - y| <= r. Every hard-core and connectivity decision in
/// the library goes through this predicate so that "blocked" and "connected"
/// are exact complements of each other.
template <std::size_t D>
bool within(const Point<D>& x, const Point<D>& y, double r) {
  return squared_distance(x, y) <= r * r;
}

/// Lexicographic coordinate order; the thinning visits points in this order.
template <std::size_t D>
bool order_less(const Point<D>& x, const Point<D>& y) {
  return x < y;
}

template <std::size_t D>
bool is_finite(const Point<D>& x) {
  return std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); });
}

template <std::size_t D>
struct Ball {
  Point<D> center{};
  double radius = 0.0;

  bool contains(const Point<D>& x) const { return within(center, x, radius); }
};

/// Closed axis-aligned box. lo[i] > hi[i] in any coordinate means empty.
template <std::size_t D>
struct Box {
  Point<D> lo{};
  Point<D> hi{};

  static Box cube(double lo, double hi) {
    Box b;
    b.lo.fill(lo);
    b.hi.fill(hi);
    return b;
  }

  static Box empty() { return cube(1.0, 0.0); }

  bool is_empty() const {
    for (std::size_t i = 0; i < D; ++i)
      if (lo[i] > hi[i]) return true;
    return false;
  }

  double volume() const {
    if (is_empty()) return 0.0;
    double v = 1.0;
    for (std::size_t i = 0; i < D; ++i) v *= hi[i] - lo[i];
    return v;
  }

  bool contains(const Point<D>& x) const {
    for (std::size_t i = 0; i < D; ++i)
      if (x[i] < lo[i] || x[i] > hi[i]) return false;
    return true;
  }

  /// Euclidean distance from x to the box (0 inside).
  double distance(const Point<D>& x) const {
    double s = 0.0;
    for (std::size_t i = 0; i < D; ++i) {
      double t = 0.0;
      if (x[i] < lo[i]) t = lo[i] - x[i];
      else if (x[i] > hi[i]) t = x[i] - hi[i];
      s += t * t;
    }
    return std::sqrt(s);
  }

  bool meets(const Ball<D>& b) const {
    if (is_empty()) return false;
    double s = 0.0;
    for (std::size_t i = 0; i < D; ++i) {
      double t = 0.0;
      if (b.center[i] < lo[i]) t = lo[i] - b.center[i];
      else if (b.center[i] > hi[i]) t = b.center[i] - hi[i];
      s += t * t;
    }
    return s <= b.radius * b.radius;
  }

  Box intersect(const Box& o) const {
    Box r;
    for (std::size_t i = 0; i < D; ++i) {
      r.lo[i] = std::max(lo[i], o.lo[i]);
      r.hi[i] = std::min(hi[i], o.hi[i]);
    }
    return r;
  }

  Point<D> sample(RngStream& rng) const {
    Point<D> p;
    for (std::size_t i = 0; i < D; ++i) p[i] = rng.uniform(lo[i], hi[i]);
    return p;
  }
};

template <std::size_t D>
Box<D> bounding_box(const Ball<D>& b) {
  Box<D> r;
  for (std::size_t i = 0; i < D; ++i) {
    r.lo[i] = b.center[i] - b.radius;
    r.hi[i] = b.center[i] + b.radius;
  }
  return r;
}

/// Gap between two boxes (0 when they touch or overlap).
template <std::size_t D>
double box_gap(const Box<D>& a, const Box<D>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < D; ++i) {
    double t = 0.0;
    if (a.hi[i] < b.lo[i]) t = b.lo[i] - a.hi[i];
    else if (b.hi[i] < a.lo[i]) t = a.lo[i] - b.hi[i];
    s += t * t;
  }
  return std::sqrt(s);
}

/// Finite set of distinct points kept sorted by order_less.
template <std::size_t D>
class Configuration {
 public:
  using value_type = Point<D>;
  using const_iterator = typename std::vector<Point<D>>::const_iterator;

  Configuration() = default;

  explicit Configuration(std::vector<Point<D>> pts) : pts_(std::move(pts)) { canonicalize(); }

  Configuration(std::initializer_list<Point<D>> pts) : pts_(pts) { canonicalize(); }

  /// Adopt points already sorted and distinct (checked).
  static Configuration from_sorted(std::vector<Point<D>> pts) {
    Configuration c;
    c.pts_ = std::move(pts);
    for (std::size_t i = 1; i < c.pts_.size(); ++i)
      if (!order_less(c.pts_[i - 1], c.pts_[i]))
        throw std::invalid_argument("configuration points must be distinct and sorted");
    return c;
  }

  std::size_t size() const { return pts_.size(); }
  bool empty() const { return pts_.empty(); }
  const_iterator begin() const { return pts_.begin(); }
  const_iterator end() const { return pts_.end(); }
  const Point<D>& operator[](std::size_t i) const { return pts_[i]; }
  const std::vector<Point<D>>& points() const { return pts_; }

  bool contains(const Point<D>& x) const {
    return std::binary_search(pts_.begin(), pts_.end(), x, order_less<D>);
  }

  void insert(const Point<D>& x) {
    auto it = std::lower_bound(pts_.begin(), pts_.end(), x, order_less<D>);
    if (it != pts_.end() && *it == x)
      throw std::invalid_argument("configuration points must be distinct");
    pts_.insert(it, x);
  }

  friend bool operator==(const Configuration&, const Configuration&) = default;

 private:
  void canonicalize() {
    for (const auto& p : pts_)
      if (!is_finite(p)) throw std::invalid_argument("point coordinates must be finite");
    std::sort(pts_.begin(), pts_.end(), order_less<D>);
    if (std::adjacent_find(pts_.begin(), pts_.end()) != pts_.end())
      throw std::invalid_argument("configuration points must be distinct");
  }

  std::vector<Point<D>> pts_;
};

template <std::size_t D>
Configuration<D> unite(const Configuration<D>& a, const Configuration<D>& b) {
  std::vector<Point<D>> out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out), order_less<D>);
  return Configuration<D>::from_sorted(std::move(out));
}

template <std::size_t D>
Configuration<D> intersect(const Configuration<D>& a, const Configuration<D>& b) {
  std::vector<Point<D>> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out),
                        order_less<D>);
  return Configuration<D>::from_sorted(std::move(out));
}

template <std::size_t D>
Configuration<D> subtract(const Configuration<D>& a, const Configuration<D>& b) {
  std::vector<Point<D>> out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out),
                      order_less<D>);
  return Configuration<D>::from_sorted(std::move(out));
}

template <std::size_t D>
Configuration<D> symmetric_difference(const Configuration<D>& a, const Configuration<D>& b) {
  std::vector<Point<D>> out;
  std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out),
                                order_less<D>);
  return Configuration<D>::from_sorted(std::move(out));
}

template <std::size_t D>
bool includes(const Configuration<D>& outer, const Configuration<D>& inner) {
  return std::includes(outer.begin(), outer.end(), inner.begin(), inner.end(), order_less<D>);
}

template <std::size_t D>
bool disjoint(const Configuration<D>& a, const Configuration<D>& b) {
  return intersect(a, b).empty();
}

/// Balls of radius r around every point of c.
template <std::size_t D>
std::vector<Ball<D>> balls_around(const Configuration<D>& c, double r) {
  std::vector<Ball<D>> out;
  out.reserve(c.size());
  for (const auto& p : c) out.push_back({p, r});
  return out;
}

/// base box, intersected with the union of each restriction group, minus the
/// union of the removed balls. All balls are closed.
template <std::size_t D>
class Region {
 public:
  Region() : base_(Box<D>::empty()) {}
  explicit Region(Box<D> base) : base_(base) {}

  static Region empty() { return Region(); }

  const Box<D>& base() const { return base_; }
  const std::vector<Ball<D>>& removed() const { return removed_; }
  const std::vector<std::vector<Ball<D>>>& restrictions() const { return groups_; }

  /// The union of restricted balls when exactly one group is present.
  const std::vector<Ball<D>>& restricted_balls() const {
    static const std::vector<Ball<D>> none;
    return groups_.empty() ? none : groups_.front();
  }

  bool is_box() const { return removed_.empty() && groups_.empty(); }

  Region without(std::span<const Ball<D>> balls) const {
    Region r = *this;
    const Box<D> sb = sampling_box();
    for (const auto& b : balls)
      if (sb.meets(b)) r.removed_.push_back(b);
    return r;
  }

  Region without(const std::vector<Ball<D>>& balls) const {
    return without(std::span<const Ball<D>>(balls));
  }

  /// Intersect with the union of `balls`. An empty list yields the empty region.
  Region restricted_to(std::vector<Ball<D>> balls) const {
    Region r = *this;
    const Box<D> sb = sampling_box();
    std::erase_if(balls, [&](const Ball<D>& b) { return !sb.meets(b); });
    r.groups_.push_back(std::move(balls));
    return r;
  }

  bool contains(const Point<D>& x) const {
    if (!base_.contains(x)) return false;
    for (const auto& g : groups_) {
      bool hit = false;
      for (const auto& b : g)
        if (b.contains(x)) {
          hit = true;
          break;
        }
      if (!hit) return false;
    }
    for (const auto& b : removed_)
      if (b.contains(x)) return false;
    return true;
  }

  /// Smallest box the region is known to fit in: base clipped to the bounding
  /// box of every restriction group.
  Box<D> sampling_box() const {
    Box<D> box = base_;
    for (const auto& g : groups_) {
      if (g.empty()) return Box<D>::empty();
      Box<D> gb = bounding_box(g.front());
      for (const auto& b : g) {
        const Box<D> bb = bounding_box(b);
        for (std::size_t i = 0; i < D; ++i) {
          gb.lo[i] = std::min(gb.lo[i], bb.lo[i]);
          gb.hi[i] = std::max(gb.hi[i], bb.hi[i]);
        }
      }
      box = box.intersect(gb);
    }
    return box;
  }

  /// True when the region is certainly empty (empty sampling box). A region
  /// whose box survives may still have zero volume if balls cover it.
  bool trivially_empty() const { return sampling_box().is_empty(); }

 private:
  Box<D> base_;
  std::vector<Ball<D>> removed_;
  std::vector<std::vector<Ball<D>>> groups_;
};

template <std::size_t D>
bool region_contains(const Region<D>& r, const Point<D>& x) {
  return r.contains(x);
}

/// Lebesgue measure of the region: exact for plain boxes, hit-or-miss Monte
/// Carlo over the sampling box otherwise.
template <std::size_t D>
Estimate region_volume(const Region<D>& r, std::size_t mc_samples, RngStream& rng) {
  if (r.is_box()) return Estimate::exact(r.base().volume());
  const Box<D> box = r.sampling_box();
  if (box.is_empty()) return Estimate::exact(0.0);
  if (mc_samples == 0) throw std::invalid_argument("volume estimator requires samples");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < mc_samples; ++i)
    if (r.contains(box.sample(rng))) ++hits;
  Estimate e = Estimate::proportion(hits, mc_samples);
  const double v = box.volume();
  e.mean *= v;
  e.std_error *= v;
  return e;
}

/// The part of `base` within distance R of the configuration c, i.e. base
/// intersected with the closed R-sphere of c. c must lie outside base.
template <std::size_t D>
Region<D> ring_region(const Region<D>& base, const Configuration<D>& c, double R) {
  for (const auto& p : c)
    if (base.contains(p))
      throw std::invalid_argument("boundary points must lie outside the region");
  return base.restricted_to(balls_around(c, R));
}

/// Points of c whose closed R-ball meets the region's sampling box. Dropping
/// the others never changes any hard-core decision inside the region.
template <std::size_t D>
Configuration<D> restrict_to_ring(const Configuration<D>& c, const Region<D>& r, double R) {
  const Box<D> box = r.sampling_box();
  std::vector<Point<D>> out;
  for (const auto& p : c)
    if (box.meets(Ball<D>{p, R})) out.push_back(p);
  return Configuration<D>::from_sorted(std::move(out));
}

/// The part of a region that comes strictly after a pivot in the visiting
/// order of the thinning. With a priority sub-region P the order visits P
/// first (lexicographically) and the rest of the region afterwards, so the
/// tail after x in P is (P after x) together with (whole minus P).
/// The tie set {y : y[0] == pivot} is Lebesgue-null and is left out.
template <std::size_t D>
struct TailDomain {
  const Region<D>* whole = nullptr;
  const Region<D>* priority = nullptr;
  double pivot = -std::numeric_limits<double>::infinity();

  bool contains(const Point<D>& y) const {
    if (!whole->contains(y)) return false;
    if (priority && !priority->contains(y)) return true;
    return y[0] > pivot;
  }

  Box<D> sampling_box() const {
    Box<D> b = whole->sampling_box();
    if (!priority) b.lo[0] = std::max(b.lo[0], pivot);
    return b;
  }
};

}  // namespace hsc
