#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <utility>

namespace ffg {

// Top-level stream families. Generators and Monte Carlo never share a family,
// so changing one cannot perturb the other.
enum class StreamFamily : std::uint64_t {
  erdos_renyi = 1,
  oriented_expander = 2,
  poisson = 3,
  fs = 4,
  monte_carlo = 16,
  sweep_seeds = 32,
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Portable seeded random stream.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the
/// standard. Distributions are implemented here rather than taken from
/// <random>, because the standard leaves those implementation-defined.
/// Sub-streams are derived by hashing the parent seed with a key through
/// SplitMix64, so a stream for (family, level, block, node) depends only on
/// those keys and never on how many draws were made elsewhere.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }

  RngStream substream(std::uint64_t key) const { return RngStream(derive(seed_, key)); }
  RngStream substream(std::initializer_list<std::uint64_t> keys) const;
  RngStream substream(StreamFamily family) const {
    return substream(static_cast<std::uint64_t>(family));
  }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform01();

  /// Uniform integer in [0, bound). bound must be > 0.
  std::uint64_t below(std::uint64_t bound);

  /// Fisher-Yates shuffle driven by below().
  template <typename T>
  void shuffle(std::span<T> values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(below(i));
      std::swap(values[i - 1], values[j]);
    }
  }

  static std::uint64_t derive(std::uint64_t seed, std::uint64_t key) noexcept;

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace ffg
