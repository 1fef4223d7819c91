#pragma once

#include <algorithm>
#include <limits>
#include <utility>
#include <vector>

#include "hsc/geometry.hpp"

namespace hsc {

/// Finite union of disjoint intervals on the line, sorted. Endpoints are
/// treated as measure-zero: open and closed variants are not distinguished.
class IntervalSet {
 public:
  using Interval = std::pair<double, double>;

  IntervalSet() = default;
  IntervalSet(double lo, double hi) {
    if (lo < hi) parts_.emplace_back(lo, hi);
  }
  explicit IntervalSet(std::vector<Interval> parts) : parts_(std::move(parts)) { normalize(); }

  const std::vector<Interval>& parts() const { return parts_; }
  bool empty() const { return parts_.empty(); }

  double measure() const {
    double m = 0.0;
    for (const auto& [a, b] : parts_) m += b - a;
    return m;
  }

  double lower() const { return parts_.front().first; }
  double upper() const { return parts_.back().second; }

  bool contains(double x) const {
    return std::any_of(parts_.begin(), parts_.end(),
                       [x](const Interval& p) { return p.first <= x && x <= p.second; });
  }

  IntervalSet unite(const IntervalSet& o) const {
    std::vector<Interval> all = parts_;
    all.insert(all.end(), o.parts_.begin(), o.parts_.end());
    return IntervalSet(std::move(all));
  }

  IntervalSet intersect(const IntervalSet& o) const {
    std::vector<Interval> out;
    std::size_t i = 0, j = 0;
    while (i < parts_.size() && j < o.parts_.size()) {
      const double a = std::max(parts_[i].first, o.parts_[j].first);
      const double b = std::min(parts_[i].second, o.parts_[j].second);
      if (a < b) out.emplace_back(a, b);
      if (parts_[i].second < o.parts_[j].second) ++i;
      else ++j;
    }
    IntervalSet r;
    r.parts_ = std::move(out);
    return r;
  }

  IntervalSet subtract(const IntervalSet& o) const { return intersect(o.complement()); }

  IntervalSet complement() const {
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<Interval> out;
    double cur = -inf;
    for (const auto& [a, b] : parts_) {
      if (cur < a) out.emplace_back(cur, a);
      cur = b;
    }
    if (cur < inf) out.emplace_back(cur, inf);
    IntervalSet r;
    r.parts_ = std::move(out);
    return r;
  }

  /// Part strictly above t.
  IntervalSet above(double t) const {
    return intersect(IntervalSet(t, std::numeric_limits<double>::infinity()));
  }

  friend bool operator==(const IntervalSet&, const IntervalSet&) = default;

 private:
  void normalize() {
    std::erase_if(parts_, [](const Interval& p) { return !(p.first < p.second); });
    std::sort(parts_.begin(), parts_.end());
    std::vector<Interval> out;
    for (const auto& p : parts_) {
      if (!out.empty() && p.first <= out.back().second)
        out.back().second = std::max(out.back().second, p.second);
      else
        out.push_back(p);
    }
    parts_ = std::move(out);
  }

  std::vector<Interval> parts_;
};

inline IntervalSet ball_union(const std::vector<Ball<1>>& balls) {
  std::vector<IntervalSet::Interval> parts;
  for (const auto& b : balls) parts.emplace_back(b.center[0] - b.radius, b.center[0] + b.radius);
  return IntervalSet(std::move(parts));
}

inline IntervalSet to_intervals(const Region<1>& r) {
  const Box<1>& base = r.base();
  if (base.is_empty()) return {};
  IntervalSet s(base.lo[0], base.hi[0]);
  for (const auto& g : r.restrictions()) s = s.intersect(ball_union(g));
  return s.subtract(ball_union(r.removed()));
}

inline IntervalSet to_intervals(const TailDomain<1>& t) {
  const IntervalSet whole = to_intervals(*t.whole);
  if (!t.priority) return whole.above(t.pivot);
  const IntervalSet pri = to_intervals(*t.priority).intersect(whole);
  return pri.above(t.pivot).unite(whole.subtract(pri));
}

/// Closed R-neighbourhood of a 1D configuration.
inline IntervalSet neighbourhood(const Configuration<1>& c, double R) {
  std::vector<IntervalSet::Interval> parts;
  for (const auto& p : c) parts.emplace_back(p[0] - R, p[0] + R);
  return IntervalSet(std::move(parts));
}

}  // namespace hsc
