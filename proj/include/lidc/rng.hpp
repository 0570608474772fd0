#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <string_view>

namespace lidc {

/// Philox4x32-10 counter-based generator (Salmon, Moraes, Dror, Shaw 2011).
///
/// The key selects an independent stream; the counter walks it. Two
/// generators with different keys never share state, so replicas can be
/// produced in any order on any thread and still be bit-identical.
class Philox4x32 {
 public:
  using result_type = std::uint32_t;
  using block_type = std::array<std::uint32_t, 4>;

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  explicit Philox4x32(std::uint64_t key, std::uint64_t substream = 0) noexcept
      : key_{static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32)},
        counter_{0, 0, static_cast<std::uint32_t>(substream),
                 static_cast<std::uint32_t>(substream >> 32)} {}

  result_type operator()() noexcept {
    if (index_ == 4) {
      buffer_ = block(counter_, key_);
      increment();
      index_ = 0;
    }
    return buffer_[index_++];
  }

  void discard(unsigned long long n) noexcept {
    while (n-- > 0) (*this)();
  }

  /// Raw 10-round bijection; exposed for known-answer tests.
  static block_type block(block_type ctr, std::array<std::uint32_t, 2> key) noexcept {
    for (int round = 0; round < 10; ++round) {
      const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * ctr[0];
      const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * ctr[2];
      const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
      const auto lo0 = static_cast<std::uint32_t>(p0);
      const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
      const auto lo1 = static_cast<std::uint32_t>(p1);
      ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    return ctr;
  }

 private:
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

  void increment() noexcept {
    if (++counter_[0] == 0) ++counter_[1];
  }

  std::array<std::uint32_t, 2> key_;
  block_type counter_;
  block_type buffer_{};
  int index_ = 4;
};

namespace detail {

constexpr std::uint64_t splitmix64(std::uint64_t z) noexcept {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

constexpr std::uint64_t fnv1a(std::string_view s) noexcept {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ull;
  }
  return h;
}

}  // namespace detail

/// Identifies one reproducible random stream: (global seed, replica, module tag).
struct StreamId {
  std::uint64_t seed = 0;
  std::uint64_t replica = 0;
  std::uint64_t tag = 0;

  static constexpr std::uint64_t tag_of(std::string_view name) noexcept { return detail::fnv1a(name); }

  constexpr std::uint64_t key() const noexcept {
    using detail::splitmix64;
    return splitmix64(seed ^ splitmix64(replica ^ splitmix64(tag)));
  }

  /// Same seed and replica, different module.
  constexpr StreamId with_tag(std::string_view name) const noexcept {
    return {seed, replica, tag ^ tag_of(name)};
  }

  Philox4x32 engine(std::uint64_t substream = 0) const noexcept { return Philox4x32(key(), substream); }

  friend constexpr bool operator==(const StreamId&, const StreamId&) = default;
};

inline StreamId make_stream(std::uint64_t seed, std::uint64_t replica, std::string_view module) noexcept {
  return {seed, replica, StreamId::tag_of(module)};
}

/// Uniform double in the open interval (0, 1), 53 bits.
template <class Engine>
double uniform_open01(Engine& eng) {
  const std::uint64_t hi = eng();
  const std::uint64_t lo = eng();
  const std::uint64_t bits = ((hi << 32) | lo) >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

}  // namespace lidc
