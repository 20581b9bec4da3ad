#include "dpdp/algebra.hpp"

#include <algorithm>

#include <sodium.h>

#include <cstring>

#include "dpdp/error.hpp"
#include "sodium_init.hpp"

namespace dpdp {
namespace {

constexpr std::size_t kScalarBits = 255;

// BLS12-381 subgroup order r, big-endian.
constexpr std::array<std::uint8_t, 32> kOrder = {
    0x73, 0xed, 0xa7, 0x53, 0x29, 0x9d, 0x7d, 0x48, 0x33, 0x39, 0xd8,
    0x08, 0x09, 0xa1, 0xd8, 0x05, 0x53, 0xbd, 0xa4, 0x02, 0xff, 0xfe,
    0x5b, 0xfe, 0xff, 0xff, 0xff, 0xff, 0x00, 0x00, 0x00, 0x01};

void require_size(ByteView bytes, std::size_t n, const char* what) {
  if (bytes.size() != n) {
    fail(Errc::BadEncoding, std::string(what) + ": expected " + std::to_string(n) + " bytes, got " +
                                std::to_string(bytes.size()));
  }
}

}  // namespace

// ---------------------------------------------------------------- Scalar

Scalar::Scalar() { std::memset(&fr_, 0, sizeof(fr_)); }

Scalar Scalar::from_u64(std::uint64_t v) {
  const std::uint64_t limbs[4] = {v, 0, 0, 0};
  Scalar s;
  blst_fr_from_uint64(&s.fr_, limbs);
  return s;
}

Scalar Scalar::from_be_bytes_reduced(ByteView bytes) {
  blst_scalar sc;
  blst_scalar_from_be_bytes(&sc, bytes.data(), bytes.size());
  Scalar s;
  blst_fr_from_scalar(&s.fr_, &sc);
  return s;
}

Scalar Scalar::decode(ByteView bytes) {
  require_size(bytes, kEncodedSize, "scalar");
  blst_scalar sc;
  blst_scalar_from_bendian(&sc, bytes.data());
  if (!blst_scalar_fr_check(&sc)) fail(Errc::BadEncoding, "scalar not reduced mod p");
  Scalar s;
  blst_fr_from_scalar(&s.fr_, &sc);
  return s;
}

Scalar Scalar::random(SeededRng& rng) {
  // 512 bits reduced mod p: bias below 2^-256.
  std::array<std::uint8_t, 64> wide;
  rng.fill(wide);
  return from_be_bytes_reduced(wide);
}

Scalar Scalar::random_nonzero(SeededRng& rng) {
  for (;;) {
    Scalar s = random(rng);
    if (!s.is_zero()) return s;
  }
}

std::array<std::uint8_t, Scalar::kEncodedSize> Scalar::encode() const {
  blst_scalar sc;
  blst_scalar_from_fr(&sc, &fr_);
  std::array<std::uint8_t, kEncodedSize> out;
  blst_bendian_from_scalar(out.data(), &sc);
  return out;
}

blst_scalar Scalar::raw_scalar() const {
  blst_scalar sc;
  blst_scalar_from_fr(&sc, &fr_);
  return sc;
}

bool Scalar::is_zero() const { return *this == Scalar{}; }

Scalar Scalar::inverse() const {
  Scalar s;
  if (is_zero()) return s;
  blst_fr_inverse(&s.fr_, &fr_);
  return s;
}

Scalar Scalar::operator+(const Scalar& o) const {
  Scalar s;
  blst_fr_add(&s.fr_, &fr_, &o.fr_);
  return s;
}

Scalar Scalar::operator-(const Scalar& o) const {
  Scalar s;
  blst_fr_sub(&s.fr_, &fr_, &o.fr_);
  return s;
}

Scalar Scalar::operator*(const Scalar& o) const {
  Scalar s;
  blst_fr_mul(&s.fr_, &fr_, &o.fr_);
  return s;
}

Scalar Scalar::operator-() const { return Scalar{} - *this; }

bool Scalar::operator==(const Scalar& o) const {
  return std::memcmp(&fr_, &o.fr_, sizeof(fr_)) == 0;
}

// ---------------------------------------------------------------- G1

G1::G1() { std::memset(&p_, 0, sizeof(p_)); }

G1 G1::generator() {
  G1 g;
  g.p_ = *blst_p1_generator();
  return g;
}

G1 G1::random(SeededRng& rng) { return generator().pow(Scalar::random_nonzero(rng)); }

G1 G1::decode(ByteView bytes) {
  require_size(bytes, kEncodedSize, "G1 element");
  blst_p1_affine aff;
  if (blst_p1_uncompress(&aff, bytes.data()) != BLST_SUCCESS) {
    fail(Errc::BadEncoding, "G1 point not on curve");
  }
  if (!blst_p1_affine_in_g1(&aff)) fail(Errc::BadEncoding, "G1 point outside subgroup");
  G1 g;
  blst_p1_from_affine(&g.p_, &aff);
  return g;
}

std::array<std::uint8_t, G1::kEncodedSize> G1::encode() const {
  std::array<std::uint8_t, kEncodedSize> out;
  blst_p1_compress(out.data(), &p_);
  return out;
}

bool G1::is_identity() const { return blst_p1_is_inf(&p_); }
bool G1::in_subgroup() const { return blst_p1_in_g1(&p_); }

G1 G1::pow(const Scalar& x) const {
  blst_scalar sc = x.raw_scalar();
  G1 g;
  blst_p1_mult(&g.p_, &p_, sc.b, kScalarBits);
  return g;
}

G1 G1::inverse() const {
  G1 g = *this;
  blst_p1_cneg(&g.p_, true);
  return g;
}

G1 G1::operator*(const G1& o) const {
  G1 g;
  blst_p1_add_or_double(&g.p_, &p_, &o.p_);
  return g;
}

bool G1::operator==(const G1& o) const { return blst_p1_is_equal(&p_, &o.p_); }

G1 G1::from_raw(const blst_p1& p) {
  G1 g;
  g.p_ = p;
  return g;
}

blst_p1_affine G1::affine() const {
  blst_p1_affine aff;
  blst_p1_to_affine(&aff, &p_);
  return aff;
}

// ---------------------------------------------------------------- G2

G2::G2() { std::memset(&p_, 0, sizeof(p_)); }

G2 G2::generator() {
  G2 g;
  g.p_ = *blst_p2_generator();
  return g;
}

G2 G2::decode(ByteView bytes) {
  require_size(bytes, kEncodedSize, "G2 element");
  blst_p2_affine aff;
  if (blst_p2_uncompress(&aff, bytes.data()) != BLST_SUCCESS) {
    fail(Errc::BadEncoding, "G2 point not on curve");
  }
  if (!blst_p2_affine_in_g2(&aff)) fail(Errc::BadEncoding, "G2 point outside subgroup");
  G2 g;
  blst_p2_from_affine(&g.p_, &aff);
  return g;
}

std::array<std::uint8_t, G2::kEncodedSize> G2::encode() const {
  std::array<std::uint8_t, kEncodedSize> out;
  blst_p2_compress(out.data(), &p_);
  return out;
}

bool G2::is_identity() const { return blst_p2_is_inf(&p_); }

G2 G2::pow(const Scalar& x) const {
  blst_scalar sc = x.raw_scalar();
  G2 g;
  blst_p2_mult(&g.p_, &p_, sc.b, kScalarBits);
  return g;
}

G2 G2::inverse() const {
  G2 g = *this;
  blst_p2_cneg(&g.p_, true);
  return g;
}

G2 G2::operator*(const G2& o) const {
  G2 g;
  blst_p2_add_or_double(&g.p_, &p_, &o.p_);
  return g;
}

bool G2::operator==(const G2& o) const { return blst_p2_is_equal(&p_, &o.p_); }

blst_p2_affine G2::affine() const {
  blst_p2_affine aff;
  blst_p2_to_affine(&aff, &p_);
  return aff;
}

// ---------------------------------------------------------------- GT

GT::GT() { f_ = *blst_fp12_one(); }

namespace {

// fp12 = fp6[2], fp6 = fp2[3], fp2 = fp[2]: 12 coordinates in memory order.
blst_fp* coords(blst_fp12& f) { return reinterpret_cast<blst_fp*>(&f); }
const blst_fp* coords(const blst_fp12& f) { return reinterpret_cast<const blst_fp*>(&f); }
static_assert(sizeof(blst_fp12) == 12 * sizeof(blst_fp));

}  // namespace

GT GT::decode(ByteView bytes) {
  require_size(bytes, kEncodedSize, "GT element");
  GT g;
  for (int i = 0; i < 12; ++i) {
    blst_fp_from_bendian(&coords(g.f_)[i], bytes.data() + 48 * i);
  }
  if (g.encode() != Bytes(bytes.begin(), bytes.end())) {
    fail(Errc::BadEncoding, "GT coordinate not canonical");
  }
  if (!blst_fp12_in_group(&g.f_)) fail(Errc::BadEncoding, "GT element outside subgroup");
  return g;
}

Bytes GT::encode() const {
  Bytes out(kEncodedSize);
  for (int i = 0; i < 12; ++i) blst_bendian_from_fp(out.data() + 48 * i, &coords(f_)[i]);
  return out;
}

bool GT::is_one() const { return blst_fp12_is_one(&f_); }

GT GT::pow(const Scalar& x) const {
  blst_scalar sc = x.raw_scalar();
  GT acc;
  for (int bit = static_cast<int>(kScalarBits); bit >= 0; --bit) {
    blst_fp12_sqr(&acc.f_, &acc.f_);
    if ((sc.b[bit / 8] >> (bit % 8)) & 1) blst_fp12_mul(&acc.f_, &acc.f_, &f_);
  }
  return acc;
}

GT GT::inverse() const {
  GT g;
  blst_fp12_inverse(&g.f_, &f_);
  return g;
}

GT GT::operator*(const GT& o) const {
  GT g;
  blst_fp12_mul(&g.f_, &f_, &o.f_);
  return g;
}

bool GT::operator==(const GT& o) const { return blst_fp12_is_equal(&f_, &o.f_); }

GT pairing(const G1& a, const G2& b) {
  GT out;
  if (a.is_identity() || b.is_identity()) return out;
  blst_p1_affine pa = a.affine();
  blst_p2_affine pb = b.affine();
  blst_fp12 ml;
  blst_miller_loop(&ml, &pb, &pa);
  blst_final_exp(&out.f_, &ml);
  return out;
}

PairingEquation& PairingEquation::lhs(const G1& a, const G2& b) {
  terms_.emplace_back(a, b);
  return *this;
}

PairingEquation& PairingEquation::rhs(const G1& a, const G2& b) {
  terms_.emplace_back(a.inverse(), b);
  return *this;
}

bool PairingEquation::holds() const {
  // e(a, g) e(a', g) = e(a a', g): one Miller loop per distinct G2 element.
  std::vector<std::pair<G1, G2>> merged;
  for (const auto& [a, b] : terms_) {
    auto it = std::find_if(merged.begin(), merged.end(), [&](const auto& t) { return t.second == b; });
    if (it == merged.end()) {
      merged.emplace_back(a, b);
    } else {
      it->first *= a;
    }
  }
  blst_fp12 acc = *blst_fp12_one();
  for (const auto& [a, b] : merged) {
    if (a.is_identity() || b.is_identity()) continue;
    blst_p1_affine pa = a.affine();
    blst_p2_affine pb = b.affine();
    blst_fp12 ml;
    blst_miller_loop(&ml, &pb, &pa);
    blst_fp12_mul(&acc, &acc, &ml);
  }
  blst_fp12 out;
  blst_final_exp(&out, &acc);
  return blst_fp12_is_one(&out);
}

// ---------------------------------------------------------------- context

PairingContext group_gen(unsigned security_level) {
  if (security_level != 128) {
    fail(Errc::UnsupportedLevel, "only the 128-bit level is available, got " +
                                     std::to_string(security_level));
  }
  return PairingContext{
      .curve = "BLS12-381",
      .order_bits = 255,
      .order = Bytes(kOrder.begin(), kOrder.end()),
      .g1 = G1::generator(),
      .g2 = G2::generator(),
  };
}

G1 hash_to_g1(std::string_view domain_tag, ByteView input) {
  if (domain_tag.empty()) fail(Errc::InvalidArgument, "hash_to_g1 needs a non-empty domain tag");
  blst_p1 out;
  blst_hash_to_g1(&out, input.data(), input.size(),
                  reinterpret_cast<const byte*>(domain_tag.data()), domain_tag.size(), nullptr, 0);
  return G1::from_raw(out);
}

G1 keyed_hash_to_g1(ByteView key, ByteView input) {
  if (key.size() != 32) {
    fail(Errc::BadKeyLength, "keyed hash needs a 32-byte key, got " + std::to_string(key.size()));
  }
  detail::ensure_sodium();
  std::array<std::uint8_t, 64> prf;
  crypto_generichash(prf.data(), prf.size(), input.data(), input.size(), key.data(), key.size());
  return hash_to_g1(kDomainHprime, prf);
}

G1 multi_pow(const std::vector<G1>& bases, const std::vector<Scalar>& exps) {
  if (bases.size() != exps.size()) fail(Errc::InvalidArgument, "multi_pow length mismatch");
  const std::size_t n = bases.size();
  if (n == 0) return G1{};
  if (n == 1) return bases[0].pow(exps[0]);

  std::vector<const blst_p1*> projective(n);
  for (std::size_t i = 0; i < n; ++i) projective[i] = &bases[i].p_;
  std::vector<blst_p1_affine> affine(n);
  blst_p1s_to_affine(affine.data(), projective.data(), n);

  std::vector<blst_scalar> raw(n);
  std::vector<const blst_p1_affine*> points(n);
  std::vector<const byte*> scalars(n);
  for (std::size_t i = 0; i < n; ++i) {
    raw[i] = exps[i].raw_scalar();
    points[i] = &affine[i];
    scalars[i] = raw[i].b;
  }
  std::vector<limb_t> scratch(blst_p1s_mult_pippenger_scratch_sizeof(n) / sizeof(limb_t) + 1);
  G1 out;
  blst_p1s_mult_pippenger(&out.p_, points.data(), n, scalars.data(), kScalarBits, scratch.data());
  return out;
}

}  // namespace dpdp
