#pragma once

#include <cstdint>
#include <random>

namespace hsc {

/// Reproducible random stream addressed by (seed, stream_id).
///
/// The engine is seeded through std::seed_seq from all 128 bits of the
/// address, so replicas that share a seed but differ in stream_id get
/// decorrelated engine states. Draw sequences are bitwise reproducible for a
/// given build.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id) : seed_(seed), stream_(stream_id) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream_id),
                      static_cast<std::uint32_t>(stream_id >> 32), 0x68736375u};
    engine_.seed(seq);
  }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_; }

  /// Uniform on [lo, hi).
  double uniform(double lo, double hi) {
    return lo + (hi - lo) * std::generate_canonical<double, 53>(engine_);
  }

  double uniform() { return std::generate_canonical<double, 53>(engine_); }

  std::uint64_t poisson(double mean) {
    if (!(mean > 0.0)) return 0;
    std::poisson_distribution<std::uint64_t> dist(mean);
    return dist(engine_);
  }

  bool bernoulli(double p) { return uniform() < p; }

  /// Derive an independent child stream (used to give sub-tasks their own
  /// streams without consuming draws in a data-dependent way).
  RngStream split(std::uint64_t tag) {
    const std::uint64_t s = engine_();
    return RngStream(s ^ (tag * 0x9E3779B97F4A7C15ull), stream_ + tag + 1);
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
};

}  // namespace hsc
