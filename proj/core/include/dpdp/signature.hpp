#pragma once

// Ed25519 (strongly unforgeable) signatures for the Merkle-root handshake.

#include <array>
#include <cstdint>

#include "dpdp/bytes.hpp"
#include "dpdp/rng.hpp"

namespace dpdp {

struct SigVerifyKey {
  static constexpr std::size_t kSize = 32;
  std::array<std::uint8_t, kSize> bytes{};
  bool operator==(const SigVerifyKey&) const = default;
};

struct SigSigningKey {
  static constexpr std::size_t kSize = 64;
  std::array<std::uint8_t, kSize> bytes{};
};

struct SignatureKeypair {
  SigVerifyKey vk;
  SigSigningKey sk;
};

struct Signature {
  static constexpr std::size_t kSize = 64;
  std::array<std::uint8_t, kSize> bytes{};

  /// MalformedSignature unless exactly kSize bytes.
  static Signature decode(ByteView raw);
  bool operator==(const Signature&) const = default;
};

SignatureKeypair sig_gen(SeededRng& rng);
Signature sig_sign(const SigSigningKey& sk, ByteView msg);
bool sig_verify(const SigVerifyKey& vk, ByteView msg, const Signature& sig);

}  // namespace dpdp
