#include <set>

#include <boost/multiprecision/cpp_int.hpp>
#include <gtest/gtest.h>

#include "dpdp/error.hpp"
#include "dpdp/rank.hpp"
#include "dpdp/rng.hpp"
#include "dpdp/wire.hpp"

namespace dpdp {
namespace {

using boost::multiprecision::cpp_int;
using boost::multiprecision::cpp_rational;

cpp_rational value(const Rank& r) { return cpp_rational(r.num(), cpp_int(1) << r.log2_den()); }

TEST(Rank, Midpoints) {
  EXPECT_EQ(midpoint(Rank::integer(1), Rank::integer(2)), Rank::parse("3/2"));
  EXPECT_EQ(midpoint(Rank::integer(1), Rank::parse("3/2")), Rank::parse("5/4"));
  EXPECT_EQ(midpoint(Rank::parse("3/2"), Rank::integer(2)), Rank::parse("7/4"));
  EXPECT_EQ(midpoint(Rank{}, Rank::integer(2)), Rank::integer(1));
}

TEST(Rank, MidpointRequiresOrder) {
  for (auto [lo, hi] : {std::pair{2, 1}, std::pair{3, 3}}) {
    try {
      midpoint(Rank::integer(lo), Rank::integer(hi));
      ADD_FAILURE();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), Errc::NotOrdered);
    }
  }
}

TEST(Rank, NormalisedForm) {
  auto r = Rank::dyadic(12, 3);  // 12/8 = 3/2
  EXPECT_EQ(r.num(), 3);
  EXPECT_EQ(r.log2_den(), 1u);
  EXPECT_EQ(Rank::dyadic(0, 5), Rank{});
  EXPECT_EQ(Rank::parse("4/2"), Rank::integer(2));
  EXPECT_TRUE(Rank::parse("4/2").is_integer());
}

TEST(Rank, ParseAndPrint) {
  for (const char* text : {"0", "7", "3/2", "5/4", "123456789012345678901234567891/1024"}) {
    EXPECT_EQ(Rank::parse(text).to_string(), text);
  }
  for (const char* bad : {"", "x", "1/3", "1/0", "-1", "1/", "/2", "1.5"}) {
    EXPECT_THROW(Rank::parse(bad), Error) << bad;
  }
  EXPECT_EQ(Rank::integer(9).to_u64(), 9u);
  EXPECT_THROW(Rank::parse("1/2").to_u64(), Error);
}

// Random midpoint chains against exact rational arithmetic.
TEST(Rank, OrderingAndMidpointMatchRationalOracle) {
  SeededRng rng = SeededRng::from_u64(11);
  std::vector<Rank> ranks{Rank{}, Rank::integer(1), Rank::integer(2)};
  for (int i = 0; i < 400; ++i) {
    std::sort(ranks.begin(), ranks.end());
    auto k = rng.uniform(ranks.size() - 1);
    Rank m = midpoint(ranks[k], ranks[k + 1]);
    EXPECT_EQ(value(m), (value(ranks[k]) + value(ranks[k + 1])) / 2);
    EXPECT_LT(ranks[k], m);
    EXPECT_LT(m, ranks[k + 1]);
    ranks.push_back(m);
  }
  for (int i = 0; i < 2000; ++i) {
    const auto& a = ranks[rng.uniform(ranks.size())];
    const auto& b = ranks[rng.uniform(ranks.size())];
    EXPECT_EQ(a < b, value(a) < value(b));
    EXPECT_EQ(a == b, value(a) == value(b));
  }
}

TEST(RankVersion, Injective) {
  EXPECT_NE(encode_rank_version(Rank::integer(1), 1), encode_rank_version(Rank::integer(1), 2));
  EXPECT_NE(encode_rank_version(Rank::parse("3/2"), 1), encode_rank_version(Rank::integer(3), 1));

  std::set<Bytes> seen;
  std::size_t count = 0;
  for (std::uint64_t num = 0; num < 40; ++num) {
    for (std::uint32_t e = 0; e < 6; ++e) {
      Rank r = Rank::dyadic(num, e);
      if (r.log2_den() != e) continue;  // not in lowest terms; same rank as another pair
      for (std::uint64_t v = 1; v < 4; ++v) {
        seen.insert(encode_rank_version(r, v));
        ++count;
      }
    }
  }
  EXPECT_EQ(seen.size(), count);
}

TEST(RankVersion, RoundTrip) {
  for (const char* text : {"0", "1", "3/2", "98765432109876543210/4096"}) {
    Rank r = Rank::parse(text);
    auto [back, v] = decode_rank_version(encode_rank_version(r, 77));
    EXPECT_EQ(back, r);
    EXPECT_EQ(v, 77u);
  }
}

TEST(RankWire, RoundTrip) {
  wire::Writer w;
  write_rank(w, Rank::parse("13/8"));
  write_rank(w, Rank::integer(4));
  wire::Reader r(w.data());
  EXPECT_EQ(read_rank(r), Rank::parse("13/8"));
  EXPECT_EQ(read_rank(r), Rank::integer(4));
  EXPECT_TRUE(r.done());
}

}  // namespace
}  // namespace dpdp
