#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>

namespace dpdp {

/// Deterministic ChaCha20 keystream keyed by a 32-byte seed. Same seed, same
/// sequence of draws. Single-owner; not thread-safe.
class SeededRng {
 public:
  using Seed = std::array<std::uint8_t, 32>;

  explicit SeededRng(const Seed& seed);

  /// Seed derived by hashing a small integer, for tests and the CLI `--seed`.
  static SeededRng from_u64(std::uint64_t seed);
  /// Fresh seed from the operating system.
  static SeededRng from_os();

  const Seed& seed() const noexcept { return seed_; }

  void fill(std::span<std::uint8_t> out);
  std::uint64_t next_u64();
  /// Uniform in [0, bound), bound > 0.
  std::uint64_t uniform(std::uint64_t bound);
  bool coin();

  /// Child generator whose seed depends only on this seed, `label` and
  /// `index`; independent of how much of this stream was consumed.
  SeededRng derive(std::string_view label, std::uint64_t index = 0) const;

 private:
  void refill();

  Seed seed_;
  std::array<std::uint8_t, 64> block_{};
  std::size_t used_ = 64;
  std::uint32_t counter_ = 0;
};

}  // namespace dpdp
