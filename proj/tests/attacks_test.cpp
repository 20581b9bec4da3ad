#include <cmath>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "dpdp/attacks.hpp"
#include "dpdp/error.hpp"
#include "support.hpp"

namespace dpdp::attacks {
namespace {

constexpr Scheme kSchemes[] = {Scheme::Original, Scheme::Iht, Scheme::Mht};

TEST(Attacks, ExpectedMatrix) {
  EXPECT_TRUE(expected_success(Scheme::Original, Attack::Replace));
  EXPECT_TRUE(expected_success(Scheme::Original, Attack::Replay));
  EXPECT_TRUE(expected_success(Scheme::Original, Attack::Privacy));
  EXPECT_FALSE(expected_success(Scheme::Iht, Attack::Replace));
  EXPECT_FALSE(expected_success(Scheme::Iht, Attack::Replay));
  EXPECT_TRUE(expected_success(Scheme::Iht, Attack::Privacy));
  EXPECT_FALSE(expected_success(Scheme::Mht, Attack::Replace));
  EXPECT_FALSE(expected_success(Scheme::Mht, Attack::Replay));
  EXPECT_FALSE(expected_success(Scheme::Mht, Attack::Privacy));
}

TEST(Attacks, ReplaceOutcomes) {
  for (auto scheme : kSchemes) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      SeededRng rng = SeededRng::from_u64(seed);
      auto out = replace_attack(scheme, 6, 3, 4, rng);
      EXPECT_EQ(out.accepted, scheme == Scheme::Original) << protocol::to_string(scheme) << " " << seed;
      EXPECT_EQ(out.succeeded(), expected_success(scheme, Attack::Replace));
      if (scheme == Scheme::Mht) EXPECT_NE(out.detail.find("root-reconstruction"), std::string::npos) << out.detail;
    }
  }
}

TEST(Attacks, ReplaceNeedsTwoBlocks) {
  SeededRng rng = SeededRng::from_u64(1);
  EXPECT_THROW(replace_attack(Scheme::Original, 1, 2, 2, rng), Error);
  EXPECT_THROW(replace_attack(Scheme::Original, 4, 2, 1, rng), Error);
}

TEST(Attacks, ReplayOutcomes) {
  for (auto scheme : kSchemes) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      SeededRng rng = SeededRng::from_u64(seed);
      auto out = replay_attack(scheme, rng);
      EXPECT_EQ(out.accepted, scheme == Scheme::Original) << protocol::to_string(scheme) << " " << seed;
      EXPECT_EQ(out.succeeded(), expected_success(scheme, Attack::Replay));
      EXPECT_FALSE(out.transcript.empty());
    }
  }
}

TEST(Attacks, PrivacyOutcomes) {
  for (auto scheme : kSchemes) {
    SeededRng rng = SeededRng::from_u64(17);
    auto out = privacy_distinguisher(scheme, 200, rng);
    EXPECT_EQ(out.trials, 200u);
    if (scheme == Scheme::Mht) {
      EXPECT_GE(out.accuracy(), 0.40);
      EXPECT_LE(out.accuracy(), 0.60);
      EXPECT_FALSE(out.succeeded());
    } else {
      EXPECT_EQ(out.correct, 200u);
      EXPECT_TRUE(out.succeeded());
    }
  }
}

TEST(Attacks, GuessOnRealTags) {
  SeededRng rng = SeededRng::from_u64(19);
  auto keys = protocol::generate_keys(2, rng);
  const auto& pk = keys.pub.pk;
  for (int t = 0; t < 10; ++t) {
    auto m0 = test::random_block(2, rng), m1 = test::random_block(2, rng);
    SeededRng coin = SeededRng::from_u64(t);
    auto t1 = original::tag_block(pk, keys.sec.sk, m1);
    EXPECT_EQ(guess({pk, Scheme::Original}, t1, m0, m1, coin), 1);
    auto t0 = iht::tag_block(pk, keys.sec.sk, m0, Rank::integer(1), 1);
    EXPECT_EQ(guess({pk, Scheme::Iht}, t0, m0, m1, coin), 0);
    // Without the hash term the comparison no longer matches either block.
    auto tm = mht::tag_block(pk, keys.sec.sk, keys.sec.hkey, m0);
    PairingEquation eq;
    eq.lhs(tm, pk.g2a).rhs(original::block_commitment(pk, m0), pk.ctx.g2);
    EXPECT_FALSE(eq.holds());
  }
}

TEST(Attacks, DeterministicPerSeed) {
  for (auto scheme : kSchemes) {
    SeededRng a = SeededRng::from_u64(23), b = SeededRng::from_u64(23);
    EXPECT_EQ(replace_attack(scheme, 4, 2, 3, a).to_json(), replace_attack(scheme, 4, 2, 3, b).to_json());
    EXPECT_EQ(replay_attack(scheme, a).transcript, replay_attack(scheme, b).transcript);
    auto pa = privacy_distinguisher(scheme, 20, a);
    auto pb = privacy_distinguisher(scheme, 20, b);
    EXPECT_EQ(pa.correct, pb.correct);
    EXPECT_EQ(pa.transcript, pb.transcript);
  }
}

TEST(Attacks, OutcomeJson) {
  SeededRng rng = SeededRng::from_u64(29);
  auto j = nlohmann::json::parse(replace_attack(Scheme::Iht, 4, 2, 2, rng).to_json());
  EXPECT_EQ(j.at("format"), "dpdp-attack/1");
  EXPECT_EQ(j.at("scheme"), "iht");
  EXPECT_EQ(j.at("attack"), "replace");
  EXPECT_EQ(j.at("accepted"), false);
  EXPECT_EQ(j.at("succeeded"), false);
  EXPECT_EQ(j.at("expected"), false);
  auto p = nlohmann::json::parse(privacy_distinguisher(Scheme::Original, 4, rng).to_json());
  EXPECT_EQ(p.at("trials"), 4);
  EXPECT_EQ(p.at("correct"), 4);
  EXPECT_DOUBLE_EQ(p.at("accuracy").get<double>(), 1.0);
}

TEST(Attacks, ChanceBand) {
  auto [lo, hi] = chance_band(200);
  EXPECT_DOUBLE_EQ(lo, 0.40);
  EXPECT_DOUBLE_EQ(hi, 0.60);
  auto [lo10, hi10] = chance_band(10);
  EXPECT_NEAR(hi10 - 0.5, 1.96 * 0.5 / std::sqrt(10.0), 1e-12);
  EXPECT_NEAR(0.5 - lo10, hi10 - 0.5, 1e-12);
}

TEST(Attacks, Names) {
  for (auto a : {Attack::Replace, Attack::Replay, Attack::Privacy}) EXPECT_EQ(parse_attack(to_string(a)), a);
  EXPECT_THROW(parse_attack("forge"), Error);
}

}  // namespace
}  // namespace dpdp::attacks
