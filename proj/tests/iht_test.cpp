#include <gtest/gtest.h>

#include "dpdp/error.hpp"
#include "dpdp/iht.hpp"
#include "support.hpp"

namespace dpdp {
namespace {

using iht::EntryStatus;
using iht::IndexHashTable;

Errc code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return Errc::InvalidArgument;
}

Rank R(const char* text) { return Rank::parse(text); }

TEST(IndexHashTable, InitialAndApply) {
  auto t = IndexHashTable::initial(3);
  ASSERT_EQ(t.entries().size(), 3u);
  EXPECT_EQ(t.live_count(), 3u);

  t = iht::apply(t, OpKind::Insert, R("3/2"));
  EXPECT_EQ(*t.find(R("3/2")), (iht::Entry{R("3/2"), 1, EntryStatus::Live}));
  EXPECT_EQ(t.live_ranks(), (std::vector<Rank>{R("1"), R("3/2"), R("2"), R("3")}));

  t = iht::apply(t, OpKind::Modify, R("1"));
  t = iht::apply(t, OpKind::Modify, R("1"));
  EXPECT_EQ(t.find(R("1"))->vnb, 3u);

  t = iht::apply(t, OpKind::Delete, R("1"));
  EXPECT_EQ(t.find(R("1"))->status, EntryStatus::Deleted);
  EXPECT_EQ(t.find(R("1"))->vnb, 3u);
  EXPECT_EQ(t.live_count(), 3u);
  EXPECT_EQ(t.entries().size(), 4u);
}

TEST(IndexHashTable, UniquenessRules) {
  auto t = iht::apply(IndexHashTable::initial(2), OpKind::Delete, R("1"));
  EXPECT_EQ(code_of([&] { iht::apply(t, OpKind::Insert, R("1")); }), Errc::RankCollision);
  EXPECT_EQ(code_of([&] { iht::apply(t, OpKind::Insert, R("2")); }), Errc::RankCollision);
  EXPECT_EQ(code_of([&] { iht::apply(t, OpKind::Modify, R("1")); }), Errc::RankNotLive);
  EXPECT_EQ(code_of([&] { iht::apply(t, OpKind::Delete, R("1")); }), Errc::RankNotLive);
  EXPECT_EQ(code_of([&] { iht::apply(t, OpKind::Modify, R("7")); }), Errc::RankNotLive);
}

TEST(IndexHashTable, InsertionRanks) {
  auto t = IndexHashTable::initial(3);
  const Rank bound = Rank::integer(4);
  EXPECT_EQ(t.insertion_rank(1, bound), R("1/2"));
  EXPECT_EQ(t.insertion_rank(2, bound), R("3/2"));
  EXPECT_EQ(t.insertion_rank(4, bound), R("7/2"));
  EXPECT_EQ(code_of([&] { t.insertion_rank(0, bound); }), Errc::InvalidPosition);
  EXPECT_EQ(code_of([&] { t.insertion_rank(5, bound); }), Errc::InvalidPosition);

  // A tombstone between live neighbours is skipped over, never reissued.
  t = iht::apply(t, OpKind::Delete, R("2"));
  EXPECT_EQ(t.live_rank_at(2), R("3"));
  Rank r = t.insertion_rank(2, bound);
  EXPECT_EQ(r, R("3/2"));
  EXPECT_EQ(t.find(r), nullptr);
}

TEST(IndexHashTable, ExpectedEntries) {
  auto t = iht::apply(IndexHashTable::initial(2), OpKind::Modify, R("2"));
  EXPECT_EQ(iht::expected_entry(t, OpKind::Insert, R("5/2")), std::pair(R("5/2"), std::uint64_t{1}));
  EXPECT_EQ(iht::expected_entry(t, OpKind::Modify, R("2")), std::pair(R("2"), std::uint64_t{3}));
  EXPECT_EQ(iht::expected_entry(t, OpKind::Delete, R("2")), std::pair(R("2"), std::uint64_t{2}));
  EXPECT_EQ(code_of([&] { iht::expected_entry(t, OpKind::Insert, R("1")); }), Errc::RankCollision);
  EXPECT_EQ(code_of([&] { iht::expected_entry(t, OpKind::Modify, R("9")); }), Errc::UnknownRank);
}

TEST(IndexHashTable, WireRoundTrip) {
  auto t = IndexHashTable::initial(4);
  t = iht::apply(t, OpKind::Insert, R("7/4"));
  t = iht::apply(t, OpKind::Delete, R("3"));
  t = iht::apply(t, OpKind::Modify, R("1"));
  wire::Writer w;
  iht::write_table(w, t);
  wire::Reader r(w.data());
  EXPECT_EQ(iht::read_table(r), t);
  EXPECT_TRUE(r.done());
}

class IhtScheme : public ::testing::Test {
 protected:
  void SetUp() override {
    ctx = group_gen(128);
    kp = original::keygen(ctx, 2, rng);
  }
  SeededRng rng = SeededRng::from_u64(31);
  PairingContext ctx;
  KeyPair kp;
};

TEST_F(IhtScheme, TagIdentity) {
  auto block = test::random_block(2, rng);
  auto tag = iht::tag_block(kp.pk, kp.sk, block, R("5/2"), 4);
  G1 expected = iht::rank_hash(R("5/2"), 4);
  for (std::size_t j = 0; j < 2; ++j) expected *= kp.pk.h[j].pow(block[j]);
  EXPECT_EQ(tag.pow(kp.sk.a), expected);
  EXPECT_EQ(iht::rank_hash(R("5/2"), 4),
            hash_to_g1(kDomainH, encode_rank_version(R("5/2"), 4)));
}

TEST_F(IhtScheme, ZeroBlockTagIsHashTerm) {
  auto tag = iht::tag_block(kp.pk, kp.sk, Block(2), R("1"), 1);
  EXPECT_FALSE(tag.is_identity());
  EXPECT_EQ(tag.pow(kp.sk.a), iht::rank_hash(R("1"), 1));
}

TEST_F(IhtScheme, TagsBindRankAndVersion) {
  auto block = test::random_block(2, rng);
  std::vector<std::pair<Rank, std::uint64_t>> entries = {
      {R("1"), 1}, {R("2"), 1}, {R("1"), 2}, {R("3/2"), 1}, {R("3/2"), 2}, {R("3"), 1}};
  std::vector<G1> tags;
  for (const auto& [rank, vnb] : entries) tags.push_back(iht::tag_block(kp.pk, kp.sk, block, rank, vnb));
  for (std::size_t i = 0; i < tags.size(); ++i) {
    for (std::size_t k = i + 1; k < tags.size(); ++k) EXPECT_NE(tags[i], tags[k]) << i << "," << k;
  }
}

TEST_F(IhtScheme, HonestProofAccepts) {
  auto store = iht::make_store(kp.pk, kp.sk, test::random_matrix(6, 2, rng));
  auto table = IndexHashTable::initial(6);
  auto ranks = table.live_ranks();
  for (std::size_t count : {1, 3, 6}) {
    auto chal = original::gen_challenge(ranks, count, rng);
    EXPECT_TRUE(iht::check_proof(kp.pk, chal, original::gen_proof(kp.pk, store, chal, rng), table));
    // The baseline verifier has no hash term, so it refuses the same proof.
    EXPECT_FALSE(original::check_proof(kp.pk, chal, original::gen_proof(kp.pk, store, chal, rng)));
  }
}

TEST_F(IhtScheme, FormulaCollapse) {
  auto store = iht::make_store(kp.pk, kp.sk, test::random_matrix(2, 2, rng));
  Challenge chal{{{R("2"), Scalar::from_u64(1)}}};
  std::vector<Scalar> zero(2);
  auto proof = original::gen_proof_with_masks(kp.pk, store, chal, zero);
  EXPECT_EQ(proof.c, store.tags.at(R("2")));
  EXPECT_TRUE(iht::check_proof(kp.pk, chal, proof, IndexHashTable::initial(2)));
}

TEST_F(IhtScheme, SingleBlockAnswerRejected) {
  auto store = iht::make_store(kp.pk, kp.sk, test::random_matrix(4, 2, rng));
  auto table = IndexHashTable::initial(4);
  auto ranks = table.live_ranks();
  auto chal = original::gen_challenge(ranks, 4, rng);
  const auto& b1 = store.blocks.at(R("1"));
  const auto& t1 = store.tags.at(R("1"));
  std::vector<ProverInput> inputs;
  for (const auto& [rank, v] : chal.pairs) inputs.push_back({&b1, &t1, v});
  std::vector<Scalar> masks{Scalar::random(rng), Scalar::random(rng)};
  EXPECT_FALSE(iht::check_proof(kp.pk, chal, original::prove(kp.pk, inputs, masks), table));
}

TEST_F(IhtScheme, ChallengeMustMatchTable) {
  auto store = iht::make_store(kp.pk, kp.sk, test::random_matrix(2, 2, rng));
  auto table = iht::apply(IndexHashTable::initial(2), OpKind::Delete, R("2"));
  Challenge on_deleted{{{R("2"), Scalar::from_u64(1)}}};
  Challenge on_unknown{{{R("5"), Scalar::from_u64(1)}}};
  auto proof = original::gen_proof(kp.pk, store, on_deleted, rng);
  EXPECT_EQ(code_of([&] { iht::check_proof(kp.pk, on_deleted, proof, table); }),
            Errc::DeletedRankChallenged);
  EXPECT_EQ(code_of([&] { iht::check_proof(kp.pk, on_unknown, proof, table); }), Errc::UnknownRank);
}

TEST_F(IhtScheme, UpdatesVerifyAgainstTable) {
  auto store = iht::make_store(kp.pk, kp.sk, test::random_matrix(3, 2, rng));
  auto table = IndexHashTable::initial(3);

  auto run = [&](OpKind kind, const Rank& rank) {
    auto [er, ev] = iht::expected_entry(table, kind, rank);
    UpdateRequest req{kind, rank, std::nullopt, std::nullopt};
    if (kind != OpKind::Delete) {
      req.block = test::random_block(2, rng);
      req.tag = iht::tag_block(kp.pk, kp.sk, *req.block, er, ev);
    }
    auto proof = original::perform_update(kp.pk, store, req, rng);
    bool ok = iht::check_update(kp.pk, proof, er, ev);
    table = iht::apply(table, kind, rank);
    return ok;
  };
  EXPECT_TRUE(run(OpKind::Modify, R("2")));
  EXPECT_TRUE(run(OpKind::Insert, R("5/2")));
  EXPECT_TRUE(run(OpKind::Delete, R("1")));
  EXPECT_TRUE(run(OpKind::Modify, R("5/2")));

  auto ranks = table.live_ranks();
  auto chal = original::gen_challenge(ranks, ranks.size(), rng);
  EXPECT_TRUE(iht::check_proof(kp.pk, chal, original::gen_proof(kp.pk, store, chal, rng), table));
}

// The server ignores a modify and proves with the block it already holds.
TEST_F(IhtScheme, StaleUpdateProofRejected) {
  for (int t = 0; t < 10; ++t) {
    auto store = iht::make_store(kp.pk, kp.sk, test::random_matrix(2, 2, rng));
    auto table = IndexHashTable::initial(2);
    const Rank rank = R("1");
    auto [er, ev] = iht::expected_entry(table, OpKind::Modify, rank);
    ASSERT_EQ(ev, 2u);
    std::vector<Scalar> masks{Scalar::random(rng), Scalar::random(rng)};
    auto stale = original::prove_update(kp.pk, store.blocks.at(rank), store.tags.at(rank), masks,
                                        Scalar::random_nonzero(rng));
    EXPECT_FALSE(iht::check_update(kp.pk, stale, er, ev));
    EXPECT_TRUE(iht::check_update(kp.pk, stale, rank, 1));
  }
}

}  // namespace
}  // namespace dpdp
