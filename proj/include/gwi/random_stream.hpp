#pragma once

#include <cstdint>
#include <limits>

namespace gwi {

namespace detail {

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace detail

/// Counter-based random stream.
///
/// The i-th output is a pure function of (key, i), so a stream can be
/// recreated anywhere from its key. Child streams are obtained by hashing
/// tags into the key with derive(); this is how per-path, per-generation and
/// per-role streams are laid out, which keeps every simulation independent of
/// thread count and scheduling.
///
/// Satisfies UniformRandomBitGenerator, so it can drive <random>
/// distributions directly.
class RandomStream {
public:
  using result_type = std::uint64_t;

  constexpr explicit RandomStream(std::uint64_t key) noexcept : key_(key) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  constexpr result_type operator()() noexcept {
    ++counter_;
    return detail::mix64(key_ + counter_ * detail::kGoldenGamma);
  }

  /// Uniform on (0, 1] with 53 random bits; never returns 0.
  constexpr double uniform() noexcept {
    return static_cast<double>(((*this)() >> 11) + 1) * 0x1.0p-53;
  }

  /// Independent child stream identified by `tag`. Does not advance *this.
  [[nodiscard]] constexpr RandomStream derive(std::uint64_t tag) const noexcept {
    return RandomStream(
        detail::mix64(key_ ^ detail::mix64(tag + detail::kGoldenGamma)) +
        0x632BE59BD9B4E019ULL);
  }

  template <class... Tags>
  [[nodiscard]] constexpr RandomStream derive(std::uint64_t first,
                                              Tags... rest) const noexcept {
    if constexpr (sizeof...(rest) == 0) {
      return derive(first);
    } else {
      return derive(first).derive(static_cast<std::uint64_t>(rest)...);
    }
  }

  [[nodiscard]] constexpr std::uint64_t key() const noexcept { return key_; }
  [[nodiscard]] constexpr std::uint64_t counter() const noexcept { return counter_; }

private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace gwi
