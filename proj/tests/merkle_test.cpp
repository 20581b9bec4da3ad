#include <bit>
#include <functional>

#include <gtest/gtest.h>

#include "dpdp/error.hpp"
#include "dpdp/merkle.hpp"
#include "merkle_oracle.hpp"
#include "support.hpp"

namespace dpdp {
namespace {

using test::oracle_leaf;
using test::oracle_node;
using test::oracle_root;
using test::oracle_split;
using test::oracle_subtree;

std::vector<G1> random_leaves(std::size_t n, SeededRng& rng) {
  std::vector<G1> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(G1::random(rng));
  return out;
}

Errc code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return Errc::InvalidArgument;
}

TEST(Merkle, SplitPoint) {
  for (std::size_t c = 2; c < 200; ++c) EXPECT_EQ(split_point(c), oracle_split(c)) << c;
}

TEST(Merkle, HashesMatchOracle) {
  SeededRng rng = SeededRng::from_u64(41);
  auto g = G1::random(rng);
  EXPECT_EQ(leaf_hash(g), oracle_leaf(g));
  Digest a = oracle_leaf(g), b = oracle_leaf(G1::generator());
  EXPECT_EQ(node_hash(a, b), oracle_node(a, b));
  EXPECT_NE(node_hash(a, b), node_hash(b, a));
}

TEST(Merkle, BuildMatchesOracleUpTo33) {
  SeededRng rng = SeededRng::from_u64(42);
  for (std::size_t n = 1; n <= 33; ++n) {
    auto leaves = random_leaves(n, rng);
    auto tree = MerkleTree::build(leaves);
    ASSERT_EQ(tree.root(), oracle_root(leaves)) << "n=" << n;
    for (std::size_t i = 0; i < n; ++i) {
      auto path = tree.auth_path(i);
      EXPECT_EQ(path.leaf_index, i);
      EXPECT_EQ(recompute_root(leaves[i], path), tree.root()) << "n=" << n << " i=" << i;
      std::vector<Side> sides;
      for (const auto& step : path.siblings) sides.push_back(step.side);
      EXPECT_EQ(sides, expected_sides(i, n));
    }
  }
}

TEST(Merkle, ThreeLeafShape) {
  SeededRng rng = SeededRng::from_u64(43);
  auto leaves = random_leaves(3, rng);
  auto tree = MerkleTree::build(leaves);
  Digest left = oracle_node(oracle_leaf(leaves[0]), oracle_leaf(leaves[1]));
  EXPECT_EQ(tree.root(), oracle_node(left, oracle_leaf(leaves[2])));
  auto path = tree.auth_path(2);
  ASSERT_EQ(path.siblings.size(), 1u);
  EXPECT_EQ(path.siblings[0], (PathStep{left, Side::Left}));
}

TEST(Merkle, SingleLeaf) {
  SeededRng rng = SeededRng::from_u64(44);
  auto leaf = G1::random(rng);
  auto tree = MerkleTree::build({leaf});
  EXPECT_EQ(tree.root(), oracle_root({leaf}));
  auto path = tree.auth_path(0);
  EXPECT_TRUE(path.siblings.empty());
  EXPECT_EQ(recompute_root(leaf, path), tree.root());
}

TEST(Merkle, Errors) {
  EXPECT_EQ(code_of([] { MerkleTree::build({}); }), Errc::EmptyLeafSet);
  auto tree = MerkleTree::build({G1::generator()});
  EXPECT_EQ(code_of([&] { tree.auth_path(1); }), Errc::IndexOutOfRange);
  EXPECT_EQ(code_of([&] { tree.erase(0); }), Errc::EmptyLeafSet);
}

TEST(Merkle, PerturbedSiblingChangesRoot) {
  SeededRng rng = SeededRng::from_u64(45);
  auto leaves = random_leaves(13, rng);
  auto tree = MerkleTree::build(leaves);
  for (std::size_t i = 0; i < 13; ++i) {
    auto path = tree.auth_path(i);
    for (std::size_t k = 0; k < path.siblings.size(); ++k) {
      auto bad = path;
      bad.siblings[k].sibling[rng.uniform(32)] ^= 0x01;
      EXPECT_NE(recompute_root(leaves[i], bad), tree.root());
    }
  }
}

TEST(Merkle, SwappingLeavesChangesRoot) {
  SeededRng rng = SeededRng::from_u64(46);
  auto leaves = random_leaves(9, rng);
  auto root = MerkleTree::build(leaves).root();
  for (int t = 0; t < 20; ++t) {
    auto i = rng.uniform(9), k = rng.uniform(9);
    if (i == k) continue;
    auto swapped = leaves;
    std::swap(swapped[i], swapped[k]);
    EXPECT_NE(MerkleTree::build(swapped).root(), root);
  }
}

TEST(Merkle, PathsBindIndex) {
  SeededRng rng = SeededRng::from_u64(47);
  for (std::size_t n : {2, 5, 16, 21}) {
    auto leaves = random_leaves(n, rng);
    auto tree = MerkleTree::build(leaves);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < n; ++k) {
        if (i != k) EXPECT_NE(recompute_root(leaves[i], tree.auth_path(k)), tree.root());
      }
    }
  }
}

TEST(Merkle, IncrementalEqualsRebuild) {
  SeededRng rng = SeededRng::from_u64(48);
  for (std::size_t n0 = 1; n0 <= 33; ++n0) {
    auto leaves = random_leaves(n0, rng);
    auto tree = MerkleTree::build(leaves);
    for (int op = 0; op < 20; ++op) {
      auto kind = rng.uniform(3);
      if (kind == 2 && leaves.size() == 1) kind = 0;
      if (kind == 0) {
        auto i = rng.uniform(leaves.size() + 1);
        auto g = G1::random(rng);
        leaves.insert(leaves.begin() + static_cast<std::ptrdiff_t>(i), g);
        tree.insert(i, g);
      } else if (kind == 1) {
        auto i = rng.uniform(leaves.size());
        auto g = G1::random(rng);
        leaves[i] = g;
        tree.replace(i, g);
      } else {
        auto i = rng.uniform(leaves.size());
        leaves.erase(leaves.begin() + static_cast<std::ptrdiff_t>(i));
        tree.erase(i);
      }
      ASSERT_EQ(tree.root(), oracle_root(leaves)) << "n0=" << n0 << " op=" << op;
      ASSERT_EQ(tree, MerkleTree::build(leaves));
    }
    for (std::size_t i = 0; i < leaves.size(); ++i) {
      EXPECT_EQ(recompute_root(leaves[i], tree.auth_path(i)), tree.root());
    }
  }
}

TEST(Merkle, FrontierAndParts) {
  SeededRng rng = SeededRng::from_u64(49);
  for (std::size_t n = 1; n <= 33; ++n) {
    auto leaves = random_leaves(n, rng);
    auto tree = MerkleTree::build(leaves);
    for (std::size_t p = 0; p <= n; ++p) {
      auto frontier = tree.prefix_frontier(p);
      std::uint64_t covered = 0;
      for (const auto& node : frontier) {
        EXPECT_EQ(node.offset, covered);
        EXPECT_TRUE(std::has_single_bit(node.size));
        EXPECT_EQ(node.digest, oracle_subtree(leaves, node.offset, node.size));
        covered += node.size;
      }
      EXPECT_EQ(covered, p);
      std::vector<G1> suffix(leaves.begin() + static_cast<std::ptrdiff_t>(p), leaves.end());
      EXPECT_EQ(root_from_parts(n, frontier, suffix), tree.root()) << "n=" << n << " p=" << p;
    }
  }
}

TEST(Merkle, PartsMustFit) {
  SeededRng rng = SeededRng::from_u64(50);
  auto leaves = random_leaves(6, rng);
  auto tree = MerkleTree::build(leaves);
  auto frontier = tree.prefix_frontier(4);
  std::vector<G1> short_suffix(leaves.begin() + 5, leaves.end());
  EXPECT_EQ(code_of([&] { root_from_parts(6, frontier, short_suffix); }), Errc::MalformedProof);
}

TEST(Merkle, Codecs) {
  SeededRng rng = SeededRng::from_u64(51);
  auto tree = MerkleTree::build(random_leaves(11, rng));
  auto path = tree.auth_path(6);
  auto frontier = tree.prefix_frontier(7);
  wire::Writer w;
  write_auth_path(w, path);
  write_frontier(w, frontier);
  wire::Reader r(w.data());
  EXPECT_EQ(read_auth_path(r), path);
  EXPECT_EQ(read_frontier(r), frontier);
  EXPECT_TRUE(r.done());

  wire::Writer pw;
  write_auth_path(pw, path);
  EXPECT_EQ(pw.data().size(), 4 + 2 + path.siblings.size() * 33);
  auto bad = pw.data();
  bad.back() = 7;  // side byte out of range
  wire::Reader br(bad);
  EXPECT_THROW(read_auth_path(br), Error);
}

}  // namespace
}  // namespace dpdp
