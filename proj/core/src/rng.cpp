#include "dpdp/rng.hpp"

#include <sodium.h>

#include <cstring>
#include <stdexcept>

#include "dpdp/bytes.hpp"
#include "sodium_init.hpp"

namespace dpdp {

using detail::ensure_sodium;

SeededRng::SeededRng(const Seed& seed) : seed_(seed) { ensure_sodium(); }

SeededRng SeededRng::from_u64(std::uint64_t seed) {
  std::array<std::uint8_t, 8> le{};
  for (int i = 0; i < 8; ++i) le[i] = static_cast<std::uint8_t>(seed >> (8 * i));
  return SeededRng(sha256({as_bytes("dpdp/seed"), le}));
}

SeededRng SeededRng::from_os() {
  ensure_sodium();
  Seed s;
  randombytes_buf(s.data(), s.size());
  return SeededRng(s);
}

void SeededRng::refill() {
  static constexpr std::array<std::uint8_t, 64> kZero{};
  static constexpr std::array<std::uint8_t, crypto_stream_chacha20_ietf_NONCEBYTES> kNonce{};
  crypto_stream_chacha20_ietf_xor_ic(block_.data(), kZero.data(), kZero.size(), kNonce.data(),
                                     counter_++, seed_.data());
  used_ = 0;
}

void SeededRng::fill(std::span<std::uint8_t> out) {
  std::size_t off = 0;
  while (off < out.size()) {
    if (used_ == block_.size()) refill();
    std::size_t take = std::min(out.size() - off, block_.size() - used_);
    std::memcpy(out.data() + off, block_.data() + used_, take);
    used_ += take;
    off += take;
  }
}

std::uint64_t SeededRng::next_u64() {
  std::array<std::uint8_t, 8> b;
  fill(b);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= std::uint64_t{b[i]} << (8 * i);
  return v;
}

std::uint64_t SeededRng::uniform(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("uniform: bound must be positive");
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  for (;;) {
    std::uint64_t v = next_u64();
    if (v < limit) return v % bound;
  }
}

bool SeededRng::coin() { return (next_u64() & 1) != 0; }

SeededRng SeededRng::derive(std::string_view label, std::uint64_t index) const {
  std::array<std::uint8_t, 8> le{};
  for (int i = 0; i < 8; ++i) le[i] = static_cast<std::uint8_t>(index >> (8 * i));
  Seed child;
  crypto_generichash_state st;
  crypto_generichash_init(&st, seed_.data(), seed_.size(), child.size());
  crypto_generichash_update(&st, reinterpret_cast<const unsigned char*>(label.data()), label.size());
  crypto_generichash_update(&st, le.data(), le.size());
  crypto_generichash_final(&st, child.data(), child.size());
  return SeededRng(child);
}

}  // namespace dpdp
