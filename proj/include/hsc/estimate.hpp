#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>

namespace hsc {

enum class Method { exact, mc_paired, mc_plain, series };

inline const char* to_string(Method m) {
  switch (m) {
    case Method::exact: return "exact";
    case Method::mc_paired: return "mc_paired";
    case Method::mc_plain: return "mc_plain";
    case Method::series: return "series";
  }
  return "unknown";
}

/// A numerical value together with its Monte Carlo uncertainty.
/// Exact and series values carry std_error == 0.
struct Estimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n_samples = 0;
  Method method = Method::exact;

  static Estimate exact(double value) { return {value, 0.0, 0, Method::exact}; }
  static Estimate series(double value) { return {value, 0.0, 0, Method::series}; }

  /// Binomial proportion hits/n with standard error sqrt(p(1-p)/n).
  static Estimate proportion(std::size_t hits, std::size_t n) {
    const double p = n ? static_cast<double>(hits) / static_cast<double>(n) : 0.0;
    const double se = n ? std::sqrt(p * (1.0 - p) / static_cast<double>(n)) : 0.0;
    return {p, se, n, Method::mc_plain};
  }

  std::pair<double, double> interval(double z) const {
    return {mean - z * std_error, mean + z * std_error};
  }

  bool within(double value, double z) const {
    return std::abs(value - mean) <= z * std_error;
  }
};

/// Standard error of a difference of independent estimates.
inline double combined_error(const Estimate& a, const Estimate& b) {
  return std::hypot(a.std_error, b.std_error);
}

}  // namespace hsc
