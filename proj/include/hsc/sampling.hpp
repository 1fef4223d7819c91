#pragma once

#include <concepts>
#include <cstddef>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "hsc/geometry.hpp"
#include "hsc/hardcore.hpp"
#include "hsc/random.hpp"

namespace hsc {

/// Anything with an exact membership test and a box that contains it.
template <class T, std::size_t D>
concept Domain = requires(const T& t, const Point<D>& p) {
  { t.contains(p) } -> std::convertible_to<bool>;
  { t.sampling_box() } -> std::convertible_to<Box<D>>;
};

/// Poisson process of intensity alpha on the domain: Poisson(alpha * |box|)
/// uniform points on the sampling box, kept when inside the domain.
template <std::size_t D, Domain<D> Dom>
Configuration<D> sample_poisson(const Dom& domain, double alpha, RngStream& rng) {
  if (alpha < 0.0 || !std::isfinite(alpha)) throw std::invalid_argument("intensity must be finite and >= 0");
  const Box<D> box = domain.sampling_box();
  if (box.is_empty() || alpha == 0.0) return {};
  const std::uint64_t n = rng.poisson(alpha * box.volume());
  std::vector<Point<D>> pts;
  pts.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    const Point<D> p = box.sample(rng);
    if (domain.contains(p)) pts.push_back(p);
  }
  return Configuration<D>(std::move(pts));
}

template <std::size_t D>
Configuration<D> sample_poisson(const Region<D>& r, double alpha, RngStream& rng) {
  return sample_poisson<D, Region<D>>(r, alpha, rng);
}

class RejectionExhausted : public std::runtime_error {
 public:
  RejectionExhausted(std::size_t attempts, double rate)
      : std::runtime_error(message(attempts, rate)), attempts_(attempts), rate_(rate) {}

  std::size_t attempts() const { return attempts_; }
  /// Upper estimate of the acceptance rate (< 1/attempts).
  double acceptance_rate() const { return rate_; }

 private:
  static std::string message(std::size_t attempts, double rate) {
    std::ostringstream os;
    os << "rejection sampler exhausted " << attempts << " attempts (acceptance rate < " << rate
       << "); reduce lambda * volume";
    return os.str();
  }
  std::size_t attempts_;
  double rate_;
};

/// Exact hard-sphere sampler: Poisson draws conditioned on the hard-core
/// constraint given the boundary points.
template <std::size_t D>
Configuration<D> sample_hard_sphere_rejection(const Region<D>& r, const Configuration<D>& boundary,
                                              double lambda, double R, RngStream& rng,
                                              std::size_t max_attempts) {
  const Configuration<D> ring = restrict_to_ring(boundary, r, R);
  for (std::size_t a = 0; a < max_attempts; ++a) {
    Configuration<D> draw = sample_poisson(r, lambda, rng);
    if (!detail::has_internal_conflict(draw, R) && !detail::has_cross_conflict(draw, ring, R))
      return draw;
  }
  throw RejectionExhausted(max_attempts, 1.0 / static_cast<double>(max_attempts ? max_attempts : 1));
}

}  // namespace hsc
