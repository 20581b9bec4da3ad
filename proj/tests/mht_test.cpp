#include <gtest/gtest.h>

#include "dpdp/error.hpp"
#include "dpdp/mht.hpp"
#include "support.hpp"

namespace dpdp {
namespace {

using mht::Stage;

Errc code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return Errc::InvalidArgument;
}

class MhtTest : public ::testing::Test {
 protected:
  void SetUp() override {
    ctx = group_gen(128);
    keys = mht::keygen(ctx, 2, rng);
  }

  // Root of a tree rebuilt from scratch over the server's blocks.
  Digest rebuilt_root(const std::vector<Block>& blocks) const {
    std::vector<G1> leaves;
    for (const auto& b : blocks) leaves.push_back(keyed_hash_to_g1(keys.sec.hkey.bytes, block_bytes(b)));
    return MerkleTree::build(leaves).root();
  }

  Challenge full_challenge(std::size_t n) {
    std::vector<Rank> ranks;
    for (std::size_t i = 1; i <= n; ++i) ranks.push_back(Rank::integer(i));
    return original::gen_challenge(ranks, n, rng);
  }

  SeededRng rng = SeededRng::from_u64(61);
  PairingContext ctx;
  mht::Keys keys;
};

TEST_F(MhtTest, KeysAreFresh) {
  SeededRng other = SeededRng::from_u64(62);
  auto k2 = mht::keygen(ctx, 2, other);
  EXPECT_NE(k2.sec.hkey, keys.sec.hkey);
  EXPECT_NE(k2.pub.pk_ss, keys.pub.pk_ss);
}

TEST_F(MhtTest, TagIdentity) {
  for (int t = 0; t < 5; ++t) {
    auto block = test::random_block(2, rng);
    auto tag = mht::tag_block(keys.pub.pk, keys.sec.sk, keys.sec.hkey, block);
    auto leaf = mht::leaf_digest(keys.sec.hkey, block);
    EXPECT_EQ(leaf, keyed_hash_to_g1(keys.sec.hkey.bytes, block_bytes(block)));
    G1 base = leaf * keys.pub.pk.h[0].pow(block[0]) * keys.pub.pk.h[1].pow(block[1]);
    EXPECT_EQ(ctx.e(tag, keys.pub.pk.g2a), ctx.e(base, ctx.g2));
  }
}

TEST_F(MhtTest, ZeroBlockTagIsNotIdentity) {
  Block zero(2);
  auto tag = mht::tag_block(keys.pub.pk, keys.sec.sk, keys.sec.hkey, zero);
  EXPECT_FALSE(tag.is_identity());
  EXPECT_EQ(tag.pow(keys.sec.sk.a), mht::leaf_digest(keys.sec.hkey, zero));
}

TEST_F(MhtTest, IdenticalBlocksShareTagAndLeaf) {
  auto block = test::random_block(2, rng);
  FileMatrix m{.s = 2, .blocks = {block, block, test::random_block(2, rng)}, .original_length = 0};
  auto up = mht::upload(keys, m);
  EXPECT_EQ(up.server.tags[0], up.server.tags[1]);
  EXPECT_EQ(up.server.tree.leaves()[0], up.server.tree.leaves()[1]);
  EXPECT_NE(up.server.tree.auth_path(0), up.server.tree.auth_path(1));
}

TEST_F(MhtTest, UploadHandshake) {
  auto m = test::random_matrix(5, 2, rng);
  auto up = mht::upload(keys, m);
  EXPECT_EQ(up.client.n, 5u);
  EXPECT_EQ(up.client.root, up.server.tree.root());
  EXPECT_EQ(up.server.signed_root.root, up.client.root);
  EXPECT_TRUE(sig_verify(keys.pub.pk_ss, up.client.root, up.server.signed_root.sig));
  EXPECT_EQ(up.client.root, rebuilt_root(m.blocks));
}

TEST_F(MhtTest, UploadOfEmptyFile) {
  auto up = mht::upload(keys, chunk_file({}, 2));
  EXPECT_EQ(up.client.n, 1u);
  EXPECT_EQ(up.client.root, up.server.tree.root());
}

TEST_F(MhtTest, DroppedBlockAbortsUpload) {
  auto prepared = mht::prepare_upload(keys, test::random_matrix(4, 2, rng));
  auto package = prepared.package;
  package.blocks.pop_back();
  package.tags.pop_back();
  auto server = mht::accept_upload(package);
  EXPECT_EQ(code_of([&] { mht::confirm_upload(keys.pub, prepared, server.tree.root()); }),
            Errc::RootMismatch);
}

TEST_F(MhtTest, ModifyMatchesRebuild) {
  auto m = test::random_matrix(4, 2, rng);
  auto up = mht::upload(keys, m);
  auto block = test::random_block(2, rng);
  mht::perform_update(keys, up.client, up.server, {OpKind::Modify, 2}, block);
  m.blocks[1] = block;
  EXPECT_EQ(up.server.blocks, m.blocks);
  EXPECT_EQ(up.server.tree.root(), rebuilt_root(m.blocks));
  EXPECT_EQ(up.client.root, up.server.tree.root());
  EXPECT_EQ(up.server.signed_root.root, up.client.root);
}

TEST_F(MhtTest, RandomHistoriesMatchRebuild) {
  auto m = test::random_matrix(3, 2, rng);
  auto up = mht::upload(keys, m);
  std::vector<Block> mirror = m.blocks;
  for (int op = 0; op < 40; ++op) {
    auto kind = static_cast<OpKind>(rng.uniform(3));
    if (kind == OpKind::Delete && mirror.size() == 1) kind = OpKind::Insert;
    const std::size_t bound = mirror.size() + (kind == OpKind::Insert ? 1 : 0);
    const std::size_t pos = 1 + rng.uniform(bound);
    std::optional<Block> block;
    if (kind != OpKind::Delete) block = test::random_block(2, rng);
    mht::perform_update(keys, up.client, up.server, {kind, pos}, block);
    auto at = mirror.begin() + static_cast<std::ptrdiff_t>(pos - 1);
    if (kind == OpKind::Insert) mirror.insert(at, *block);
    if (kind == OpKind::Modify) *at = *block;
    if (kind == OpKind::Delete) mirror.erase(at);
    ASSERT_EQ(up.server.blocks, mirror) << "op " << op;
    ASSERT_EQ(up.server.tree.root(), rebuilt_root(mirror)) << "op " << op;
    ASSERT_EQ(up.client.root, up.server.tree.root());
    ASSERT_EQ(up.client.n, mirror.size());
  }
  auto chal = full_challenge(mirror.size());
  auto bundle = mht::gen_proof(keys.pub.pk, up.server, chal, rng);
  EXPECT_TRUE(mht::check_proof(keys.pub, chal, bundle, up.client.n, up.client.root).accepted);
}

TEST_F(MhtTest, InsertAppliedAtWrongPositionIsCaught) {
  auto up = mht::upload(keys, test::random_matrix(4, 2, rng));
  const auto client_before = up.client;
  mht::Request req{OpKind::Insert, 2};
  auto block = test::random_block(2, rng);
  auto aai = mht::select_aai(up.server, req);
  auto pending = mht::prepare_update(keys, up.client, req, aai, block);
  auto server_root = mht::apply_update(up.server, {OpKind::Insert, 3}, pending.info);
  EXPECT_EQ(code_of([&] { mht::confirm_update(keys.pub, up.client, pending, server_root); }),
            Errc::RootMismatch);
  EXPECT_EQ(up.client, client_before);
}

TEST_F(MhtTest, TamperedAaiIsCaught) {
  auto up = mht::upload(keys, test::random_matrix(5, 2, rng));
  for (auto kind : {OpKind::Modify, OpKind::Insert, OpKind::Delete}) {
    mht::Request req{kind, 3};
    auto aai = mht::select_aai(up.server, req);
    if (aai.leaf) {
      aai.leaf = *aai.leaf * ctx.g1;
    } else {
      ASSERT_FALSE(aai.suffix.empty());
      aai.suffix.back() = aai.suffix.back() * ctx.g1;
    }
    std::optional<Block> block;
    if (kind != OpKind::Delete) block = test::random_block(2, rng);
    EXPECT_EQ(code_of([&] { mht::prepare_update(keys, up.client, req, aai, block); }),
              Errc::RootMismatch);
  }
}

TEST_F(MhtTest, PositionRules) {
  auto one = mht::upload(keys, test::random_matrix(1, 2, rng));
  EXPECT_EQ(code_of([&] {
              mht::perform_update(keys, one.client, one.server, {OpKind::Delete, 1}, std::nullopt);
            }),
            Errc::RankOutOfRange);
  EXPECT_EQ(one.server.n(), 1u);
  EXPECT_EQ(code_of([] { mht::check_position({OpKind::Modify, 0}, 3); }), Errc::RankOutOfRange);
  EXPECT_EQ(code_of([] { mht::check_position({OpKind::Modify, 4}, 3); }), Errc::RankOutOfRange);
  EXPECT_NO_THROW(mht::check_position({OpKind::Insert, 4}, 3));
  EXPECT_EQ(code_of([] { mht::check_position({OpKind::Insert, 5}, 3); }), Errc::RankOutOfRange);
}

TEST_F(MhtTest, HonestProofs) {
  auto up = mht::upload(keys, test::random_matrix(6, 2, rng));
  auto chal = full_challenge(6);
  auto bundle = mht::gen_proof(keys.pub.pk, up.server, chal, rng);
  EXPECT_EQ(bundle.leaves.size(), 6u);
  auto res = mht::check_proof(keys.pub, chal, bundle, 6, up.client.root);
  EXPECT_TRUE(res.accepted);
  EXPECT_FALSE(res.failed_stage);

  std::vector<Rank> ranks{Rank::integer(2), Rank::integer(5)};
  auto part = original::gen_challenge(ranks, 2, rng);
  EXPECT_TRUE(mht::check_proof(keys.pub, part, mht::gen_proof(keys.pub.pk, up.server, part, rng), 6,
                               up.client.root)
                  .accepted);
}

TEST_F(MhtTest, StaleBundleRejectedAfterUpdate) {
  auto up = mht::upload(keys, test::random_matrix(3, 2, rng));
  auto chal = full_challenge(3);
  auto old_bundle = mht::gen_proof(keys.pub.pk, up.server, chal, rng);
  const auto old_server = up.server;
  mht::perform_update(keys, up.client, up.server, {OpKind::Modify, 1}, test::random_block(2, rng));

  // Whole pre-update state replayed: consistent tree and a genuine old signature.
  auto res = mht::check_proof(keys.pub, chal, old_bundle, 3, up.client.root);
  EXPECT_FALSE(res.accepted);
  EXPECT_EQ(res.failed_stage, Stage::Signature);

  // Current tree, previous signature.
  auto bundle = mht::gen_proof(keys.pub.pk, up.server, chal, rng);
  bundle.signed_root = old_server.signed_root;
  res = mht::check_proof(keys.pub, chal, bundle, 3, up.client.root);
  EXPECT_EQ(res.failed_stage, Stage::Signature);
}

TEST_F(MhtTest, LeafAtWrongPositionFailsStageOne) {
  auto up = mht::upload(keys, test::random_matrix(4, 2, rng));
  Challenge chal{{{Rank::integer(2), Scalar::from_u64(3)}}};
  auto bundle = mht::gen_proof(keys.pub.pk, up.server, chal, rng);
  bundle.leaves[0].leaf = up.server.tree.leaves()[0];
  auto res = mht::check_proof(keys.pub, chal, bundle, 4, up.client.root);
  EXPECT_EQ(res.failed_stage, Stage::RootReconstruction);

  // A genuine pair for leaf 1 claimed for position 2.
  bundle.leaves[0].path = up.server.tree.auth_path(0);
  res = mht::check_proof(keys.pub, chal, bundle, 4, up.client.root);
  EXPECT_EQ(res.failed_stage, Stage::RootReconstruction);
}

TEST_F(MhtTest, PerturbedProofFailsStageThree) {
  auto up = mht::upload(keys, test::random_matrix(4, 2, rng));
  auto chal = full_challenge(4);
  auto bundle = mht::gen_proof(keys.pub.pk, up.server, chal, rng);
  bundle.proof.B[0] *= keys.pub.pk.h[0];
  auto res = mht::check_proof(keys.pub, chal, bundle, 4, up.client.root);
  EXPECT_EQ(res.failed_stage, Stage::PairingEquation);
}

TEST_F(MhtTest, ForgedSignatureFailsStageTwo) {
  auto up = mht::upload(keys, test::random_matrix(2, 2, rng));
  auto chal = full_challenge(2);
  auto bundle = mht::gen_proof(keys.pub.pk, up.server, chal, rng);
  bundle.signed_root.sig.bytes[5] ^= 0x10;
  EXPECT_EQ(mht::check_proof(keys.pub, chal, bundle, 2, up.client.root).failed_stage, Stage::Signature);
}

TEST_F(MhtTest, ShapeAndRankErrors) {
  auto up = mht::upload(keys, test::random_matrix(3, 2, rng));
  auto chal = full_challenge(3);
  auto bundle = mht::gen_proof(keys.pub.pk, up.server, chal, rng);
  bundle.leaves.pop_back();
  EXPECT_EQ(code_of([&] { mht::check_proof(keys.pub, chal, bundle, 3, up.client.root); }),
            Errc::MalformedProof);
  for (const char* bad : {"0", "4", "3/2"}) {
    Challenge c{{{Rank::parse(bad), Scalar::from_u64(1)}}};
    EXPECT_EQ(code_of([&] { mht::gen_proof(keys.pub.pk, up.server, c, rng); }), Errc::UnknownRank)
        << bad;
  }
}

TEST_F(MhtTest, Codecs) {
  auto prepared = mht::prepare_upload(keys, test::random_matrix(5, 2, rng));
  auto up = mht::upload(keys, test::random_matrix(5, 2, rng));
  auto chal = full_challenge(5);
  auto bundle = mht::gen_proof(keys.pub.pk, up.server, chal, rng);
  mht::Request req{OpKind::Insert, 3};
  auto aai = mht::select_aai(up.server, req);
  auto block = test::random_block(2, rng);
  auto pending = mht::prepare_update(keys, up.client, req, aai, block);
  auto mod_aai = mht::select_aai(up.server, {OpKind::Modify, 4});

  wire::Writer w;
  mht::write_bundle(w, bundle);
  mht::write_request(w, req);
  mht::write_aai(w, aai);
  mht::write_aai(w, mod_aai);
  mht::write_update_info(w, pending.info);
  mht::write_upload_package(w, prepared.package);
  mht::write_public_keys(w, keys.pub);

  wire::Reader r(w.data());
  auto b2 = mht::read_bundle(r);
  EXPECT_TRUE(mht::check_proof(keys.pub, chal, b2, 5, up.client.root).accepted);
  EXPECT_EQ(b2.signed_root, bundle.signed_root);
  EXPECT_EQ(mht::read_request(r), req);
  auto aai2 = mht::read_aai(r);
  EXPECT_EQ(aai2.frontier, aai.frontier);
  EXPECT_EQ(aai2.suffix, aai.suffix);
  auto mod2 = mht::read_aai(r);
  EXPECT_EQ(mod2.leaf, mod_aai.leaf);
  EXPECT_EQ(mod2.path, mod_aai.path);
  auto info2 = mht::read_update_info(r);
  EXPECT_EQ(info2.block, pending.info.block);
  EXPECT_EQ(info2.tag, pending.info.tag);
  EXPECT_EQ(info2.sig, pending.info.sig);
  auto pkg = mht::read_upload_package(r);
  EXPECT_EQ(pkg.blocks, prepared.package.blocks);
  EXPECT_EQ(pkg.tags, prepared.package.tags);
  EXPECT_EQ(pkg.hkey, prepared.package.hkey);
  EXPECT_EQ(pkg.sig, prepared.package.sig);
  auto pub = mht::read_public_keys(r);
  EXPECT_EQ(pub.pk_ss, keys.pub.pk_ss);
  EXPECT_EQ(pub.pk.h, keys.pub.pk.h);
  EXPECT_TRUE(r.done());
}

TEST(MhtStage, Names) {
  EXPECT_EQ(mht::to_string(Stage::RootReconstruction), "root-reconstruction");
}

}  // namespace
}  // namespace dpdp
