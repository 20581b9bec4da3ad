#pragma once

// Type-3 pairing groups over BLS12-381, written multiplicatively: `a * b` is
// the group operation and `a.pow(x)` is exponentiation by a scalar.

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <blst.h>

#include "dpdp/bytes.hpp"
#include "dpdp/rng.hpp"

namespace dpdp {

/// Element of Z_p, p the prime order of the pairing groups.
class Scalar {
 public:
  static constexpr std::size_t kEncodedSize = 32;

  Scalar();  // zero
  static Scalar from_u64(std::uint64_t v);
  /// Big-endian bytes of any length, reduced mod p.
  static Scalar from_be_bytes_reduced(ByteView bytes);
  /// Exactly 32 big-endian bytes; rejects values >= p.
  static Scalar decode(ByteView bytes);
  static Scalar random(SeededRng& rng);
  static Scalar random_nonzero(SeededRng& rng);

  std::array<std::uint8_t, kEncodedSize> encode() const;

  bool is_zero() const;
  Scalar inverse() const;  // zero maps to zero

  Scalar operator+(const Scalar& o) const;
  Scalar operator-(const Scalar& o) const;
  Scalar operator*(const Scalar& o) const;
  Scalar operator-() const;
  Scalar& operator+=(const Scalar& o) { return *this = *this + o; }
  Scalar& operator*=(const Scalar& o) { return *this = *this * o; }
  bool operator==(const Scalar& o) const;

  /// Little-endian exponent form expected by blst's point multiplication.
  blst_scalar raw_scalar() const;

 private:
  blst_fr fr_;
};

class G1 {
 public:
  static constexpr std::size_t kEncodedSize = 48;

  G1();  // identity
  static G1 generator();
  static G1 identity() { return G1{}; }
  static G1 random(SeededRng& rng);
  /// Compressed encoding; rejects off-curve and out-of-subgroup points.
  static G1 decode(ByteView bytes);

  std::array<std::uint8_t, kEncodedSize> encode() const;

  bool is_identity() const;
  bool in_subgroup() const;
  G1 pow(const Scalar& x) const;
  G1 inverse() const;
  G1 operator*(const G1& o) const;
  G1& operator*=(const G1& o) { return *this = *this * o; }
  bool operator==(const G1& o) const;

  blst_p1_affine affine() const;
  static G1 from_raw(const blst_p1& p);

 private:
  friend G1 multi_pow(const std::vector<G1>&, const std::vector<Scalar>&);
  blst_p1 p_;
};

class G2 {
 public:
  static constexpr std::size_t kEncodedSize = 96;

  G2();  // identity
  static G2 generator();
  static G2 identity() { return G2{}; }
  static G2 decode(ByteView bytes);

  std::array<std::uint8_t, kEncodedSize> encode() const;

  bool is_identity() const;
  G2 pow(const Scalar& x) const;
  G2 inverse() const;
  G2 operator*(const G2& o) const;
  bool operator==(const G2& o) const;

  blst_p2_affine affine() const;

 private:
  blst_p2 p_;
};

class GT {
 public:
  static constexpr std::size_t kEncodedSize = 576;

  GT();  // one
  static GT one() { return GT{}; }
  /// 12 big-endian base-field coordinates; rejects non-canonical
  /// coordinates and elements outside the order-p subgroup.
  static GT decode(ByteView bytes);

  Bytes encode() const;

  bool is_one() const;
  GT pow(const Scalar& x) const;
  GT inverse() const;
  GT operator*(const GT& o) const;
  bool operator==(const GT& o) const;

 private:
  friend GT pairing(const G1&, const G2&);
  friend class PairingEquation;
  blst_fp12 f_;
};

/// e : G1 x G2 -> GT.
GT pairing(const G1& a, const G2& b);

/// Checks prod e(lhs_i) == prod e(rhs_i) with one shared final
/// exponentiation.
class PairingEquation {
 public:
  PairingEquation& lhs(const G1& a, const G2& b);
  PairingEquation& rhs(const G1& a, const G2& b);
  bool holds() const;

 private:
  std::vector<std::pair<G1, G2>> terms_;
};

/// Fixed pairing parameters. Immutable; safe to share across threads.
struct PairingContext {
  std::string curve;
  unsigned order_bits;
  Bytes order;  // p, big-endian
  G1 g1;
  G2 g2;

  GT e(const G1& a, const G2& b) const { return pairing(a, b); }
};

/// Only the 128-bit level is supported; anything else is UnsupportedLevel.
PairingContext group_gen(unsigned security_level);

inline constexpr std::string_view kDomainH = "DPDP/H";
inline constexpr std::string_view kDomainHprime = "DPDP/Hprime";

/// Hash to G1 (RFC 9380 SSWU, random-oracle variant) under a domain tag.
G1 hash_to_g1(std::string_view domain_tag, ByteView input);

/// Secret-keyed hash to G1: BLAKE2b-keyed PRF, then hash_to_g1 under
/// kDomainHprime. The key must be 32 bytes (BadKeyLength otherwise).
G1 keyed_hash_to_g1(ByteView key, ByteView input);

/// Product of bases[i]^exps[i] (Pippenger; not constant time).
G1 multi_pow(const std::vector<G1>& bases, const std::vector<Scalar>& exps);

}  // namespace dpdp
