#include "gsobol/rng.hpp"

namespace gsobol {

namespace {
constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

std::uint64_t fnv1a(std::string_view s) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}
}  // namespace

std::uint64_t mix64(std::uint64_t x) noexcept {
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Stream::result_type Stream::operator()() noexcept {
  ++counter_;
  return mix64(key_ + counter_ * kGamma);
}

double Stream::uniform01() noexcept {
  return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
}

std::uint64_t stream_key(std::uint64_t seed, std::string_view tag,
                         std::uint64_t index) noexcept {
  std::uint64_t k = mix64(seed + kGamma);
  k = mix64(k ^ fnv1a(tag));
  return mix64(k + (index + 1) * kGamma);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t rep) noexcept {
  return stream_key(seed, "rep", rep);
}

}  // namespace gsobol
