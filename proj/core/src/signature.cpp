#include "dpdp/signature.hpp"

#include <sodium.h>

#include <algorithm>

#include "dpdp/error.hpp"
#include "sodium_init.hpp"

namespace dpdp {

Signature Signature::decode(ByteView raw) {
  if (raw.size() != kSize) {
    fail(Errc::MalformedSignature, "expected 64 signature bytes, got " + std::to_string(raw.size()));
  }
  Signature sig;
  std::copy(raw.begin(), raw.end(), sig.bytes.begin());
  return sig;
}

SignatureKeypair sig_gen(SeededRng& rng) {
  detail::ensure_sodium();
  std::array<std::uint8_t, crypto_sign_SEEDBYTES> seed;
  rng.fill(seed);
  SignatureKeypair kp;
  crypto_sign_seed_keypair(kp.vk.bytes.data(), kp.sk.bytes.data(), seed.data());
  sodium_memzero(seed.data(), seed.size());
  return kp;
}

Signature sig_sign(const SigSigningKey& sk, ByteView msg) {
  detail::ensure_sodium();
  Signature sig;
  crypto_sign_detached(sig.bytes.data(), nullptr, msg.data(), msg.size(), sk.bytes.data());
  return sig;
}

bool sig_verify(const SigVerifyKey& vk, ByteView msg, const Signature& sig) {
  detail::ensure_sodium();
  return crypto_sign_verify_detached(sig.bytes.data(), msg.data(), msg.size(), vk.bytes.data()) == 0;
}

}  // namespace dpdp
