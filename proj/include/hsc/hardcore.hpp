#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>

#include "hsc/geometry.hpp"

namespace hsc {

/// A fixed configuration living outside `region`.
template <std::size_t D>
struct BoundaryCondition {
  Configuration<D> points;
  Region<D> region;

  BoundaryCondition() = default;
  BoundaryCondition(Configuration<D> pts, Region<D> r) : points(std::move(pts)), region(std::move(r)) {
    for (const auto& p : points)
      if (region.contains(p))
        throw std::invalid_argument("boundary points must lie outside the region");
  }

  /// Same condition restricted to the ring of the region.
  BoundaryCondition ring_restricted(double R) const {
    BoundaryCondition b;
    b.points = restrict_to_ring(points, region, R);
    b.region = region;
    return b;
  }
};

namespace detail {

// Both inputs sorted lexicographically, so a sweep on the first coordinate
// bounds the candidate pairs.
template <std::size_t D>
bool has_internal_conflict(const Configuration<D>& y, double R) {
  for (std::size_t i = 0; i < y.size(); ++i)
    for (std::size_t j = i + 1; j < y.size() && y[j][0] - y[i][0] <= R; ++j)
      if (within(y[i], y[j], R)) return true;
  return false;
}

template <std::size_t D>
bool has_cross_conflict(const Configuration<D>& y, const Configuration<D>& c, double R) {
  if (y.empty() || c.empty()) return false;
  const auto& cp = c.points();
  for (const auto& p : y) {
    auto it = std::lower_bound(cp.begin(), cp.end(), p[0] - R,
                               [](const Point<D>& q, double v) { return q[0] < v; });
    for (; it != cp.end() && (*it)[0] <= p[0] + R; ++it)
      if (within(p, *it, R)) return true;
  }
  return false;
}

}  // namespace detail

/// Conditional hard-core indicator: 1 iff all pairs inside y and all pairs
/// between y and c are at distance strictly greater than R.
template <std::size_t D>
int is_hard_core(const Configuration<D>& y, const Configuration<D>& c, double R) {
  if (!disjoint(y, c)) throw std::invalid_argument("configurations must be disjoint");
  if (detail::has_internal_conflict(y, R)) return 0;
  return detail::has_cross_conflict(y, c, R) ? 0 : 1;
}

template <std::size_t D>
int is_hard_core(const Configuration<D>& y, double R) {
  return detail::has_internal_conflict(y, R) ? 0 : 1;
}

/// Checks H(X u Y | Z) == H(X | Y u Z) * H(Y | Z) for pairwise disjoint inputs.
template <std::size_t D>
bool chain_identity_check(const Configuration<D>& x, const Configuration<D>& y,
                          const Configuration<D>& z, double R) {
  const int lhs = is_hard_core(unite(x, y), z, R);
  const int rhs = is_hard_core(x, unite(y, z), R) * is_hard_core(y, z, R);
  return lhs == rhs;
}

/// Hard-sphere energy of x in the field of c: 0 or +infinity.
template <std::size_t D>
double hamiltonian(const Configuration<D>& x, const Configuration<D>& c, double R) {
  return is_hard_core(x, c, R) ? 0.0 : std::numeric_limits<double>::infinity();
}

inline constexpr std::size_t unbounded = std::numeric_limits<std::size_t>::max();

/// Upper bound on the size of any hard-core configuration inside r.
///
/// Tiles the sampling box with cells of side R/sqrt(d); a closed cell has
/// diameter R so it holds at most one point. Cells lying entirely inside a
/// removed ball, or missing a restriction group, are not counted, which makes
/// the bound non-increasing under ball removal.
template <std::size_t D>
std::size_t hs_size_bound(const Region<D>& r, double R) {
  const Box<D> box = r.sampling_box();
  if (box.is_empty()) return 0;
  if (!(R > 0.0)) return unbounded;
  const double side = R / std::sqrt(static_cast<double>(D));
  std::array<std::size_t, D> n{};
  double total = 1.0;
  for (std::size_t i = 0; i < D; ++i) {
    const double w = box.hi[i] - box.lo[i];
    n[i] = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(w / side)));
    total *= static_cast<double>(n[i]);
  }
  if (total > 4.0e6) return static_cast<std::size_t>(total);
  if (r.is_box()) return static_cast<std::size_t>(total);

  std::size_t count = 0;
  std::array<std::size_t, D> idx{};
  const auto cell_inside_ball = [&](const Box<D>& cell, const Ball<D>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < D; ++i) {
      const double t = std::max(std::abs(cell.lo[i] - b.center[i]), std::abs(cell.hi[i] - b.center[i]));
      s += t * t;
    }
    return s <= b.radius * b.radius;
  };
  for (std::size_t k = 0; k < static_cast<std::size_t>(total); ++k) {
    Box<D> cell;
    for (std::size_t i = 0; i < D; ++i) {
      cell.lo[i] = box.lo[i] + side * static_cast<double>(idx[i]);
      cell.hi[i] = std::min(box.hi[i], cell.lo[i] + side);
    }
    bool live = true;
    for (const auto& g : r.restrictions()) {
      if (std::none_of(g.begin(), g.end(), [&](const Ball<D>& b) { return cell.meets(b); })) {
        live = false;
        break;
      }
    }
    if (live)
      for (const auto& b : r.removed())
        if (cell_inside_ball(cell, b)) {
          live = false;
          break;
        }
    if (live) ++count;
    for (std::size_t i = 0; i < D; ++i) {
      if (++idx[i] < n[i]) break;
      idx[i] = 0;
    }
  }
  return count;
}

}  // namespace hsc
