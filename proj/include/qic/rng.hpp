#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace qic {

/// Seeded pseudo-random stream identified by (seed, stream index).
///
/// Every random draw in the toolkit goes through one of these. Two streams
/// built from the same pair produce identical sequences; distinct indices give
/// statistically independent sequences. A stream has a single owner and is
/// never shared between threads.
class RngStream {
 public:
  using engine_type = std::mt19937_64;

  explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0)
      : seed_(seed), stream_(stream), engine_(make_engine(seed, stream)) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

  /// Child stream keyed by this stream's identity and `index`.
  RngStream substream(std::uint64_t index) const {
    return RngStream(seed_, mix(stream_ + 0x9e3779b97f4a7c15ULL * (index + 1)));
  }

  /// Uniform double in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double normal() { return normal_(engine_); }

  /// Uniform integer in [0, n).
  std::size_t below(std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_);
  }

  unsigned bit() { return static_cast<unsigned>(engine_() >> 63); }

  engine_type& engine() { return engine_; }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    // splitmix64 finalizer
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  static engine_type make_engine(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    return engine_type(seq);
  }

  std::uint64_t seed_;
  std::uint64_t stream_;
  engine_type engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace qic
