#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace hsc {

/// Volume of the unit ball in d dimensions, pi^(d/2) / Gamma(d/2 + 1).
inline double ball_volume_coeff(std::size_t d) {
  if (d == 0) throw std::invalid_argument("dimension must be >= 1");
  const double h = static_cast<double>(d) / 2.0;
  return std::pow(std::numbers::pi, h) / std::tgamma(h + 1.0);
}

enum class BoundKind {
  bound,       // rigorous or high-confidence interval in intensity units
  exact,       // known value (lower == upper)
  limit,       // dimensionless high-dimensional limit of value * v_d R^d
  conjecture,  // conjectured dimensionless limit, never used as a bound
};

inline const char* to_string(BoundKind k) {
  switch (k) {
    case BoundKind::bound: return "bound";
    case BoundKind::exact: return "exact";
    case BoundKind::limit: return "limit";
    case BoundKind::conjecture: return "conjecture";
  }
  return "unknown";
}

struct BoundsRow {
  std::size_t dimension = 0;
  std::string quantity;  // critical_intensity | cluster_expansion_radius
  BoundKind kind = BoundKind::bound;
  std::optional<double> lower;
  std::optional<double> upper;
  std::string source;

  friend bool operator==(const BoundsRow&, const BoundsRow&) = default;
};

/// Known constants for the hard-sphere model of exclusion radius R and the
/// Boolean model of connection radius R. Intensity-valued entries scale as
/// R^-d; limit and conjecture rows are dimensionless.
inline std::vector<BoundsRow> bounds_table(std::size_t d, double R) {
  if (d == 0) throw std::invalid_argument("dimension must be >= 1");
  if (!(R > 0.0) || !std::isfinite(R)) throw std::invalid_argument("radius must be positive");
  const double inf = std::numeric_limits<double>::infinity();
  const double vd = ball_volume_coeff(d);
  const double rd = std::pow(R, static_cast<double>(d));
  const double e = std::numbers::e;
  std::vector<BoundsRow> rows;

  if (d == 1) {
    rows.push_back({1, "critical_intensity", BoundKind::exact, inf, inf, "boolean-1d-never-percolates"});
    rows.push_back({1, "cluster_expansion_radius", BoundKind::exact, 1.0 / (e * R), 1.0 / (e * R),
                    "tonks-gas-exact"});
  }
  if (d == 2) {
    rows.push_back({2, "critical_intensity", BoundKind::bound, 0.174 / rd, 0.843 / rd,
                    "rigorous-window"});
    rows.push_back({2, "critical_intensity", BoundKind::bound, 0.358 / rd, std::nullopt,
                    "high-confidence-lower"});
    rows.push_back({2, "cluster_expansion_radius", BoundKind::bound, 0.1625 / rd,
                    2.0 / (e * std::numbers::pi * rd), "best-known-window"});
  }
  rows.push_back({d, "cluster_expansion_radius", BoundKind::bound, 1.0 / (e * vd * rd),
                  2.0 / (vd * rd), "general-window"});
  rows.push_back({d, "critical_intensity_times_ball_volume", BoundKind::limit, 1.0, 1.0,
                  "high-dimension-limit"});
  rows.push_back({d, "cluster_expansion_radius_times_ball_volume", BoundKind::conjecture, 1.0 / e,
                  1.0 / e, "high-dimension-conjecture"});
  return rows;
}

/// Intensity below which the Gilbert graph of connection radius R is
/// subcritical by comparison with a branching process: the expected number
/// of neighbours alpha v_d R^d is below one.
inline double subcritical_intensity_bound(std::size_t d, double R) {
  if (d == 1) return std::numeric_limits<double>::infinity();
  return 1.0 / (ball_volume_coeff(d) * std::pow(R, static_cast<double>(d)));
}

}  // namespace hsc
