#pragma once

#include <cstdint>
#include <limits>
#include <string_view>

namespace gsobol {

// Counter-based stream: the i-th output is a bijective mix of key + i * gamma
// (SplitMix64). Streams are addressed by (seed, tag, index), so a draw never
// depends on which other streams were consumed before it.
class Stream {
 public:
  using result_type = std::uint64_t;

  explicit Stream(std::uint64_t key) noexcept : key_(key) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept;

  // Uniform on [0, 1) with 53 random bits.
  double uniform01() noexcept;

  std::uint64_t counter() const noexcept { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

std::uint64_t mix64(std::uint64_t x) noexcept;

// Key for stream (seed, tag, index). Tag strings are hashed with FNV-1a.
std::uint64_t stream_key(std::uint64_t seed, std::string_view tag,
                         std::uint64_t index) noexcept;

// Child seed for independent repetitions (e.g. coverage replicate r).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t rep) noexcept;

}  // namespace gsobol
