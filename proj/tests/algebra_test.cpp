#include <set>

#include <boost/multiprecision/cpp_int.hpp>
#include <gtest/gtest.h>

#include "dpdp/algebra.hpp"
#include "dpdp/error.hpp"
#include "dpdp/signature.hpp"
#include "support.hpp"

namespace dpdp {
namespace {

using boost::multiprecision::cpp_int;

// Group order of BLS12-381, written out independently of the library.
const cpp_int kP{"0x73eda753299d7d483339d80809a1d80553bda402fffe5bfeffffffff00000001"};

cpp_int to_int(const Scalar& s) {
  cpp_int v;
  for (auto b : s.encode()) v = (v << 8) | b;
  return v;
}

Scalar from_int(cpp_int v) {
  Bytes be(32);
  for (int i = 31; i >= 0; --i) {
    be[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(v & 0xff);
    v >>= 8;
  }
  return Scalar::decode(be);
}

TEST(GroupGen, FixedContext) {
  auto ctx = group_gen(128);
  EXPECT_EQ(ctx.curve, "BLS12-381");
  EXPECT_GE(ctx.order_bits, 250u);
  cpp_int order;
  for (auto b : ctx.order) order = (order << 8) | b;
  EXPECT_EQ(order, kP);
  EXPECT_EQ(msb(kP) + 1, ctx.order_bits);
  EXPECT_TRUE(ctx.g1 == G1::generator());
  EXPECT_TRUE(ctx.g2 == G2::generator());
}

TEST(GroupGen, OtherLevelsUnsupported) {
  for (unsigned level : {0u, 80u, 112u, 192u, 256u}) {
    try {
      group_gen(level);
      FAIL() << level;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), Errc::UnsupportedLevel);
    }
  }
}

TEST(Pairing, SmallExponents) {
  auto ctx = group_gen(128);
  const GT lhs = ctx.e(ctx.g1.pow(Scalar::from_u64(3)), ctx.g2.pow(Scalar::from_u64(5)));
  EXPECT_TRUE(lhs == ctx.e(ctx.g1, ctx.g2).pow(Scalar::from_u64(15)));
}

TEST(Pairing, NonDegenerate) {
  auto ctx = group_gen(128);
  EXPECT_FALSE(ctx.e(ctx.g1, ctx.g2).is_one());
  EXPECT_TRUE(ctx.e(G1::identity(), ctx.g2).is_one());
}

TEST(Pairing, Bilinearity) {
  auto ctx = group_gen(128);
  auto rng = SeededRng::from_u64(11);
  for (int i = 0; i < 100; ++i) {
    const Scalar a = Scalar::random(rng), b = Scalar::random(rng);
    ASSERT_TRUE(ctx.e(ctx.g1.pow(a), ctx.g2.pow(b)) == ctx.e(ctx.g1.pow(a * b), ctx.g2)) << i;
  }
}

TEST(Pairing, EquationMergesSharedG2) {
  auto ctx = group_gen(128);
  auto rng = SeededRng::from_u64(12);
  const Scalar a = Scalar::random(rng), b = Scalar::random(rng);
  PairingEquation ok;
  ok.lhs(ctx.g1.pow(a), ctx.g2).lhs(ctx.g1.pow(b), ctx.g2).rhs(ctx.g1, ctx.g2.pow(a + b));
  EXPECT_TRUE(ok.holds());
  PairingEquation bad;
  bad.lhs(ctx.g1.pow(a), ctx.g2).lhs(ctx.g1.pow(b), ctx.g2).rhs(ctx.g1, ctx.g2.pow(a * b));
  EXPECT_FALSE(bad.holds());
}

TEST(Scalar, ArithmeticMatchesBigIntOracle) {
  auto rng = SeededRng::from_u64(13);
  for (int i = 0; i < 200; ++i) {
    const Scalar x = Scalar::random(rng), y = Scalar::random(rng);
    const cpp_int X = to_int(x), Y = to_int(y);
    ASSERT_LT(X, kP);
    EXPECT_EQ(to_int(x + y), (X + Y) % kP);
    EXPECT_EQ(to_int(x - y), ((X - Y) % kP + kP) % kP);
    EXPECT_EQ(to_int(x * y), (X * Y) % kP);
    if (!x.is_zero()) EXPECT_EQ((to_int(x.inverse()) * X) % kP, 1);
  }
}

TEST(Scalar, ReductionOfWideInput) {
  auto rng = SeededRng::from_u64(14);
  for (int i = 0; i < 50; ++i) {
    Bytes wide = test::random_bytes(64, rng);
    cpp_int v;
    for (auto b : wide) v = (v << 8) | b;
    EXPECT_EQ(to_int(Scalar::from_be_bytes_reduced(wide)), v % kP);
  }
}

TEST(Scalar, DecodeRejectsNonCanonical) {
  EXPECT_TRUE(from_int(kP - 1) == -Scalar::from_u64(1));
  Bytes be(32);
  cpp_int v = kP;
  for (int i = 31; i >= 0; --i) {
    be[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(v & 0xff);
    v >>= 8;
  }
  EXPECT_THROW(Scalar::decode(be), Error);
  EXPECT_THROW(Scalar::decode(Bytes(31)), Error);
}

TEST(Encoding, RoundTripAllTypes) {
  auto ctx = group_gen(128);
  auto rng = SeededRng::from_u64(15);
  for (int i = 0; i < 1000; ++i) {
    const Scalar x = Scalar::random(rng);
    ASSERT_TRUE(Scalar::decode(x.encode()) == x);
    const G1 p = ctx.g1.pow(x);
    ASSERT_TRUE(G1::decode(p.encode()) == p);
    const G2 q = ctx.g2.pow(x);
    ASSERT_TRUE(G2::decode(q.encode()) == q);
  }
  const GT base = ctx.e(ctx.g1, ctx.g2);
  GT t = base;
  for (int i = 0; i < 1000; ++i) {
    t = t * base.pow(Scalar::from_u64(static_cast<std::uint64_t>(i) + 2));
    ASSERT_TRUE(GT::decode(t.encode()) == t);
  }
  EXPECT_TRUE(G1::decode(G1::identity().encode()).is_identity());
}

TEST(Encoding, RejectsInvalidPoints) {
  auto ctx = group_gen(128);
  auto enc = ctx.g1.encode();
  enc[47] ^= 0x01;  // x no longer on the curve, or off the subgroup
  bool rejected = false;
  try {
    G1 p = G1::decode(enc);
    rejected = !p.in_subgroup();
  } catch (const Error& e) {
    rejected = e.code() == Errc::BadEncoding;
  }
  EXPECT_TRUE(rejected);
  EXPECT_THROW(G1::decode(Bytes(47)), Error);
  EXPECT_THROW(G2::decode(Bytes(96, 0xff)), Error);
  auto gt = ctx.e(ctx.g1, ctx.g2).encode();
  gt[575] ^= 0x01;
  EXPECT_THROW(GT::decode(gt), Error);
}

TEST(Encoding, RejectsPointOutsideSubgroup) {
  // Search for an x whose curve point has a cofactor component: decoding
  // must refuse it rather than accept a low-order point.
  std::size_t rejected = 0;
  for (std::uint8_t x = 1; x < 40; ++x) {
    Bytes enc(48, 0);
    enc[0] = 0x80;
    enc[47] = x;
    try {
      G1::decode(enc);
    } catch (const Error&) {
      ++rejected;
    }
  }
  EXPECT_EQ(rejected, 39u);
}

TEST(HashToG1, Rfc9380Vector) {
  // BLS12381G1_XMD:SHA-256_SSWU_RO_, msg = "".
  const auto p = hash_to_g1("QUUX-V01-CS02-with-BLS12381G1_XMD:SHA-256_SSWU_RO_", {});
  EXPECT_EQ(to_hex(p.encode()),
            "852926add2207b76ca4fa57a8734416c8dc95e24501772c814278700eed6d1e4"
            "e8cf62d9c09db0fac349612b759e79a1");
}

TEST(HashToG1, DeterministicAndDomainSeparated) {
  const ByteView x = as_bytes("block 7");
  EXPECT_TRUE(hash_to_g1(kDomainH, x) == hash_to_g1(kDomainH, x));
  EXPECT_FALSE(hash_to_g1(kDomainH, x) == hash_to_g1(kDomainHprime, x));
  EXPECT_TRUE(hash_to_g1(kDomainH, x).in_subgroup());
  EXPECT_THROW(hash_to_g1("", x), Error);
}

TEST(HashToG1, NoCollisionsOverTenThousandInputs) {
  std::set<std::string> seen;
  for (std::uint64_t i = 0; i < 10000; ++i) {
    Bytes in(8);
    for (int k = 0; k < 8; ++k) in[static_cast<std::size_t>(k)] = static_cast<std::uint8_t>(i >> (8 * k));
    seen.insert(to_hex(hash_to_g1(kDomainH, in).encode()));
  }
  EXPECT_EQ(seen.size(), 10000u);
}

TEST(KeyedHash, KeyDependence) {
  auto rng = SeededRng::from_u64(16);
  const Bytes k1 = test::random_bytes(32, rng), k2 = test::random_bytes(32, rng);
  const ByteView x = as_bytes("payload");
  EXPECT_TRUE(keyed_hash_to_g1(k1, x) == keyed_hash_to_g1(k1, x));
  EXPECT_FALSE(keyed_hash_to_g1(k1, x) == keyed_hash_to_g1(k2, x));
  EXPECT_TRUE(keyed_hash_to_g1(k1, x).in_subgroup());
  for (std::size_t len : {0u, 16u, 31u, 33u, 64u}) {
    try {
      keyed_hash_to_g1(Bytes(len), x);
      FAIL() << len;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), Errc::BadKeyLength);
    }
  }
}

TEST(MultiPow, MatchesNaiveProduct) {
  auto rng = SeededRng::from_u64(17);
  const Scalar minus_one = Scalar{} - Scalar::from_u64(1);
  for (std::size_t n : {0, 1, 2, 3, 8, 31, 32, 33, 100}) {
    std::vector<G1> bases;
    std::vector<Scalar> exps;
    G1 naive;
    for (std::size_t i = 0; i < n; ++i) {
      // Mix in identity bases and zero, one and p-1 exponents.
      bases.push_back(i % 7 == 3 ? G1::identity() : G1::random(rng));
      switch (i % 5) {
        case 1: exps.push_back(Scalar{}); break;
        case 2: exps.push_back(Scalar::from_u64(1)); break;
        case 4: exps.push_back(minus_one); break;
        default: exps.push_back(Scalar::random(rng)); break;
      }
      naive *= bases.back().pow(exps.back());
    }
    EXPECT_TRUE(multi_pow(bases, exps) == naive) << "n=" << n;
  }
  std::vector<G1> same(5, G1::generator());
  std::vector<Scalar> ones(5, Scalar::from_u64(1));
  EXPECT_TRUE(multi_pow(same, ones) == G1::generator().pow(Scalar::from_u64(5)));
  EXPECT_THROW(multi_pow(same, {}), Error);
}

TEST(Group, InverseAndIdentity) {
  auto rng = SeededRng::from_u64(18);
  const G1 p = G1::random(rng);
  EXPECT_TRUE((p * p.inverse()).is_identity());
  EXPECT_TRUE(p.pow(Scalar{}).is_identity());
  EXPECT_TRUE(p.pow(Scalar::from_u64(2)) == p * p);
}

TEST(Signature, RoundTripAndBitFlips) {
  auto rng = SeededRng::from_u64(19);
  auto kp = sig_gen(rng);
  const Bytes msg = test::random_bytes(32, rng);
  const Signature sig = sig_sign(kp.sk, msg);
  EXPECT_TRUE(sig_verify(kp.vk, msg, sig));
  for (int i = 0; i < 64; ++i) {
    Bytes m = msg;
    const auto bit = rng.uniform(m.size() * 8);
    m[bit / 8] ^= static_cast<std::uint8_t>(1u << (bit % 8));
    EXPECT_FALSE(sig_verify(kp.vk, m, sig));
    Signature s = sig;
    const auto sbit = rng.uniform(Signature::kSize * 8);
    s.bytes[sbit / 8] ^= static_cast<std::uint8_t>(1u << (sbit % 8));
    EXPECT_FALSE(sig_verify(kp.vk, msg, s));
  }
  auto other = sig_gen(rng);
  EXPECT_FALSE(sig_verify(other.vk, msg, sig));
}

TEST(Signature, DecodeLength) {
  EXPECT_NO_THROW(Signature::decode(Bytes(64)));
  for (std::size_t len : {0u, 63u, 65u}) {
    try {
      Signature::decode(Bytes(len));
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), Errc::MalformedSignature);
    }
  }
}

TEST(Rng, SameSeedSameStream) {
  auto a = SeededRng::from_u64(5), b = SeededRng::from_u64(5), c = SeededRng::from_u64(6);
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    EXPECT_EQ(x, b.next_u64());
    (void)c;
  }
  EXPECT_NE(SeededRng::from_u64(5).next_u64(), SeededRng::from_u64(6).next_u64());
  auto d1 = SeededRng::from_u64(5).derive("x", 1);
  auto src = SeededRng::from_u64(5);
  src.next_u64();
  auto d2 = src.derive("x", 1);
  EXPECT_EQ(d1.next_u64(), d2.next_u64());
  EXPECT_NE(SeededRng::from_u64(5).derive("x", 1).next_u64(), SeededRng::from_u64(5).derive("x", 2).next_u64());
  auto g1 = SeededRng::from_u64(8), g2 = SeededRng::from_u64(8);
  EXPECT_TRUE(G1::random(g1) == G1::random(g2));
}

TEST(Rng, UniformStaysInRange) {
  auto rng = SeededRng::from_u64(20);
  std::vector<int> counts(7);
  for (int i = 0; i < 7000; ++i) {
    const auto v = rng.uniform(7);
    ASSERT_LT(v, 7u);
    ++counts[v];
  }
  for (int c : counts) EXPECT_GT(c, 800);
}

}  // namespace
}  // namespace dpdp
