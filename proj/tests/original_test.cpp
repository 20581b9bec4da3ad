#include <set>

#include <gtest/gtest.h>

#include "dpdp/error.hpp"
#include "dpdp/original.hpp"
#include "support.hpp"

namespace dpdp {
namespace {

using original::check_proof;
using original::check_update;

// prod_j h_j^{m_j}, computed term by term.
G1 naive_commitment(const PublicKey& pk, const Block& block) {
  G1 acc;
  for (std::size_t j = 0; j < block.size(); ++j) acc *= pk.h[j].pow(block[j]);
  return acc;
}

class OriginalTest : public ::testing::Test {
 protected:
  void SetUp() override {
    ctx = group_gen(128);
    kp = original::keygen(ctx, 3, rng);
  }
  SeededRng rng = SeededRng::from_u64(21);
  PairingContext ctx;
  KeyPair kp;
};

TEST_F(OriginalTest, KeygenConsistency) {
  EXPECT_EQ(ctx.e(ctx.g1, kp.pk.g2a), ctx.e(ctx.g1.pow(kp.sk.a), ctx.g2));
  EXPECT_EQ(kp.pk.s(), 3u);
  SeededRng other = SeededRng::from_u64(22);
  EXPECT_NE(original::keygen(ctx, 3, other).pk.h[0], kp.pk.h[0]);
  EXPECT_EQ(original::keygen(ctx, 1, other).pk.h.size(), 1u);
  EXPECT_THROW(original::keygen(ctx, 0, other), Error);
}

TEST_F(OriginalTest, TagRaisedToSecretIsCommitment) {
  for (int t = 0; t < 10; ++t) {
    auto block = test::random_block(3, rng);
    auto tag = original::tag_block(kp.pk, kp.sk, block);
    EXPECT_EQ(tag.pow(kp.sk.a), naive_commitment(kp.pk, block));
    EXPECT_EQ(ctx.e(tag, kp.pk.g2a), ctx.e(naive_commitment(kp.pk, block), ctx.g2));
  }
}

TEST_F(OriginalTest, SingleSectorUnitBlock) {
  SeededRng r = SeededRng::from_u64(23);
  auto k1 = original::keygen(ctx, 1, r);
  auto tag = original::tag_block(k1.pk, k1.sk, Block{Scalar::from_u64(1)});
  EXPECT_EQ(tag, k1.pk.h[0].pow(k1.sk.a.inverse()));
}

TEST_F(OriginalTest, ZeroBlockTagIsIdentity) {
  EXPECT_TRUE(original::tag_block(kp.pk, kp.sk, Block(3)).is_identity());
}

TEST_F(OriginalTest, TagIsRankIndependent) {
  auto block = test::random_block(3, rng);
  FileMatrix m{.s = 3, .blocks = {block, block}, .original_length = 0};
  auto store = original::make_store(kp.pk, kp.sk, m);
  EXPECT_EQ(store.tags.at(Rank::integer(1)), store.tags.at(Rank::integer(2)));
}

TEST_F(OriginalTest, SectorCountChecked) {
  try {
    original::tag_block(kp.pk, kp.sk, Block(2));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::SectorCountMismatch);
  }
}

TEST_F(OriginalTest, ChallengeShape) {
  std::vector<Rank> ranks;
  for (int i = 1; i <= 10; ++i) ranks.push_back(Rank::integer(i));
  auto full = original::gen_challenge(ranks, 10, rng);
  ASSERT_EQ(full.pairs.size(), 10u);
  for (std::size_t i = 0; i < 10; ++i) EXPECT_EQ(full.pairs[i].first, ranks[i]);

  for (int t = 0; t < 50; ++t) {
    auto chal = original::gen_challenge(ranks, 4, rng);
    ASSERT_EQ(chal.pairs.size(), 4u);
    std::set<Rank> seen;
    for (std::size_t i = 0; i < 4; ++i) {
      EXPECT_FALSE(chal.pairs[i].second.is_zero());
      EXPECT_TRUE(seen.insert(chal.pairs[i].first).second);
      if (i > 0) EXPECT_LT(chal.pairs[i - 1].first, chal.pairs[i].first);
    }
  }

  SeededRng a = SeededRng::from_u64(5), b = SeededRng::from_u64(5);
  auto ca = original::gen_challenge(ranks, 5, a);
  auto cb = original::gen_challenge(ranks, 5, b);
  EXPECT_EQ(ca.pairs, cb.pairs);

  auto code_of = [&](std::span<const Rank> set, std::size_t count) {
    try {
      original::gen_challenge(set, count, rng);
    } catch (const Error& e) {
      return e.code();
    }
    return Errc::InvalidArgument;
  };
  EXPECT_EQ(code_of(ranks, 0), Errc::EmptyChallenge);
  EXPECT_EQ(code_of(ranks, 11), Errc::CountTooLarge);
  EXPECT_EQ(code_of({}, 1), Errc::EmptyRankSet);
}

TEST_F(OriginalTest, HonestProofsAccept) {
  for (std::size_t n : {1, 2, 7}) {
    auto m = test::random_matrix(n, 3, rng);
    auto store = original::make_store(kp.pk, kp.sk, m);
    auto ranks = store.ranks();
    auto chal = original::gen_challenge(ranks, n, rng);
    EXPECT_TRUE(check_proof(kp.pk, chal, original::gen_proof(kp.pk, store, chal, rng)));
  }
}

TEST_F(OriginalTest, FreshMasksDifferButBothAccept) {
  auto store = original::make_store(kp.pk, kp.sk, test::random_matrix(3, 3, rng));
  auto ranks = store.ranks();
  auto chal = original::gen_challenge(ranks, 2, rng);
  auto p1 = original::gen_proof(kp.pk, store, chal, rng);
  auto p2 = original::gen_proof(kp.pk, store, chal, rng);
  EXPECT_NE(p1.R, p2.R);
  EXPECT_TRUE(check_proof(kp.pk, chal, p1));
  EXPECT_TRUE(check_proof(kp.pk, chal, p2));
}

TEST_F(OriginalTest, FormulaCollapseWithZeroMasks) {
  auto store = original::make_store(kp.pk, kp.sk, test::random_matrix(2, 3, rng));
  Challenge chal{{{Rank::integer(2), Scalar::from_u64(1)}}};
  std::vector<Scalar> zero(3);
  auto proof = original::gen_proof_with_masks(kp.pk, store, chal, zero);
  const auto& block = store.blocks.at(Rank::integer(2));
  for (std::size_t j = 0; j < 3; ++j) {
    EXPECT_EQ(proof.B[j], kp.pk.h[j].pow(block[j]));
    EXPECT_TRUE(proof.R[j].is_identity());
  }
  EXPECT_EQ(proof.c, store.tags.at(Rank::integer(2)));
}

TEST_F(OriginalTest, HomomorphicAggregate) {
  auto store = original::make_store(kp.pk, kp.sk, test::random_matrix(2, 3, rng));
  Scalar v1 = Scalar::random_nonzero(rng), v2 = Scalar::random_nonzero(rng);
  Challenge chal{{{Rank::integer(1), v1}, {Rank::integer(2), v2}}};
  auto proof = original::gen_proof(kp.pk, store, chal, rng);
  EXPECT_EQ(proof.c,
            store.tags.at(Rank::integer(1)).pow(v1) * store.tags.at(Rank::integer(2)).pow(v2));
}

TEST_F(OriginalTest, AnySinglePerturbationRejects) {
  auto store = original::make_store(kp.pk, kp.sk, test::random_matrix(4, 3, rng));
  auto ranks = store.ranks();
  auto chal = original::gen_challenge(ranks, 3, rng);
  auto honest = original::gen_proof(kp.pk, store, chal, rng);

  auto bumped = honest;
  bumped.B[0] *= kp.pk.h[0];
  EXPECT_FALSE(check_proof(kp.pk, chal, bumped));

  for (int t = 0; t < 50; ++t) {
    auto p = honest;
    G1 noise = G1::random(rng);
    switch (t % 3) {
      case 0: p.R[rng.uniform(3)] *= noise; break;
      case 1: p.B[rng.uniform(3)] *= noise; break;
      default: p.c *= noise; break;
    }
    EXPECT_FALSE(check_proof(kp.pk, chal, p)) << "trial " << t;
  }
}

TEST_F(OriginalTest, MalformedProofLengths) {
  auto store = original::make_store(kp.pk, kp.sk, test::random_matrix(1, 3, rng));
  Challenge chal{{{Rank::integer(1), Scalar::from_u64(1)}}};
  auto p = original::gen_proof(kp.pk, store, chal, rng);
  p.B.pop_back();
  try {
    check_proof(kp.pk, chal, p);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::MalformedProof);
  }
}

// One retained block answers every challenged rank.
TEST_F(OriginalTest, SingleBlockAnswersAnyChallenge) {
  auto store = original::make_store(kp.pk, kp.sk, test::random_matrix(5, 3, rng));
  const auto& b1 = store.blocks.at(Rank::integer(1));
  const auto& t1 = store.tags.at(Rank::integer(1));
  auto ranks = store.ranks();
  auto chal = original::gen_challenge(ranks, 5, rng);
  std::vector<ProverInput> inputs;
  for (const auto& [rank, v] : chal.pairs) inputs.push_back({&b1, &t1, v});
  std::vector<Scalar> masks;
  for (int j = 0; j < 3; ++j) masks.push_back(Scalar::random(rng));
  EXPECT_TRUE(check_proof(kp.pk, chal, original::prove(kp.pk, inputs, masks)));
}

TEST_F(OriginalTest, UpdateProofs) {
  auto store = original::make_store(kp.pk, kp.sk, test::random_matrix(3, 3, rng));
  auto block = test::random_block(3, rng);
  UpdateRequest mod{OpKind::Modify, Rank::integer(2), block,
                    original::tag_block(kp.pk, kp.sk, block)};
  auto proof = original::perform_update(kp.pk, store, mod, rng);
  EXPECT_TRUE(check_update(kp.pk, proof));
  EXPECT_EQ(store.blocks.at(Rank::integer(2)), block);

  auto bad = proof;
  bad.d *= ctx.g1;
  EXPECT_FALSE(check_update(kp.pk, bad));

  Rank mid = midpoint(Rank::integer(1), Rank::integer(2));
  UpdateRequest ins{OpKind::Insert, mid, block, original::tag_block(kp.pk, kp.sk, block)};
  EXPECT_TRUE(check_update(kp.pk, original::perform_update(kp.pk, store, ins, rng)));
  EXPECT_TRUE(store.blocks.contains(Rank::parse("3/2")));

  UpdateRequest del{OpKind::Delete, Rank::integer(3), std::nullopt, std::nullopt};
  EXPECT_TRUE(check_update(kp.pk, original::perform_update(kp.pk, store, del, rng)));
  EXPECT_FALSE(store.blocks.contains(Rank::integer(3)));
  EXPECT_EQ(store.blocks.size(), 3u);
}

TEST_F(OriginalTest, ZeroBlockModifyStillAccepts) {
  auto store = original::make_store(kp.pk, kp.sk, test::random_matrix(2, 3, rng));
  Block zero(3);
  auto tag = original::tag_block(kp.pk, kp.sk, zero);
  ASSERT_TRUE(tag.is_identity());
  UpdateRequest mod{OpKind::Modify, Rank::integer(1), zero, tag};
  EXPECT_TRUE(check_update(kp.pk, original::perform_update(kp.pk, store, mod, rng)));
}

TEST_F(OriginalTest, UpdateRankErrorsLeaveStoreUntouched) {
  auto store = original::make_store(kp.pk, kp.sk, test::random_matrix(2, 3, rng));
  const auto before = store.blocks;
  auto code_of = [&](UpdateRequest req) {
    try {
      original::perform_update(kp.pk, store, req, rng);
    } catch (const Error& e) {
      return e.code();
    }
    return Errc::InvalidArgument;
  };
  auto block = test::random_block(3, rng);
  auto tag = original::tag_block(kp.pk, kp.sk, block);
  EXPECT_EQ(code_of({OpKind::Delete, Rank::integer(9), {}, {}}), Errc::RankNotFound);
  EXPECT_EQ(code_of({OpKind::Modify, Rank::integer(9), block, tag}), Errc::RankNotFound);
  EXPECT_EQ(code_of({OpKind::Insert, Rank::integer(1), block, tag}), Errc::RankOccupied);
  EXPECT_EQ(store.blocks, before);
}

TEST_F(OriginalTest, WireCodecsRoundTrip) {
  auto store = original::make_store(kp.pk, kp.sk, test::random_matrix(3, 3, rng));
  auto ranks = store.ranks();
  auto chal = original::gen_challenge(ranks, 2, rng);
  auto proof = original::gen_proof(kp.pk, store, chal, rng);
  auto block = store.blocks.at(Rank::integer(1));
  UpdateRequest req{OpKind::Insert, Rank::parse("5/4"), block, store.tags.at(Rank::integer(1))};
  auto uproof = original::perform_update(kp.pk, store, req, rng);

  wire::Writer w;
  write_public_key(w, kp.pk);
  write_challenge(w, chal);
  write_possession_proof(w, proof);
  write_update_proof(w, uproof);
  write_update_request(w, req);
  write_block(w, block);

  wire::Reader r(w.data());
  auto pk = read_public_key(r);
  EXPECT_EQ(pk.h, kp.pk.h);
  EXPECT_EQ(pk.g2a, kp.pk.g2a);
  auto chal2 = read_challenge(r);
  EXPECT_EQ(chal2.pairs, chal.pairs);
  auto proof2 = read_possession_proof(r);
  EXPECT_TRUE(check_proof(pk, chal2, proof2));
  EXPECT_TRUE(check_update(pk, read_update_proof(r)));
  auto req2 = read_update_request(r);
  EXPECT_EQ(req2.kind, req.kind);
  EXPECT_EQ(req2.rank, req.rank);
  EXPECT_EQ(req2.block, req.block);
  EXPECT_EQ(req2.tag, req.tag);
  EXPECT_EQ(read_block(r), block);
  EXPECT_TRUE(r.done());
}

TEST(OpKind, Names) {
  for (auto k : {OpKind::Insert, OpKind::Delete, OpKind::Modify}) {
    EXPECT_EQ(parse_op_kind(to_string(k)), k);
  }
  EXPECT_THROW(parse_op_kind("append"), Error);
}

}  // namespace
}  // namespace dpdp
