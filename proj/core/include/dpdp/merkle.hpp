#pragma once

// Left-complete binary hash tree over G1 leaves: the left subtree of a node
// covering k leaves holds the largest power of two below k. Leaves enter as
// SHA-256(0x00 || compressed point), internal nodes as
// SHA-256(0x01 || left || right). A one-leaf tree's root is the node-domain
// hash of its leaf digest.

#include <cstdint>
#include <vector>

#include "dpdp/algebra.hpp"
#include "dpdp/bytes.hpp"
#include "dpdp/wire.hpp"

namespace dpdp {

Digest leaf_hash(const G1& leaf);
Digest node_hash(const Digest& left, const Digest& right);

/// Which side of the running digest the sibling sits on.
enum class Side : std::uint8_t { Left = 0, Right = 1 };

struct PathStep {
  Digest sibling;
  Side side;
  bool operator==(const PathStep&) const = default;
};

struct AuthPath {
  std::uint32_t leaf_index = 0;  // 0-based
  std::vector<PathStep> siblings;  // leaf to root
  bool operator==(const AuthPath&) const = default;
};

/// An aligned perfect subtree: leaves [offset, offset + size).
struct FrontierNode {
  std::uint64_t offset;
  std::uint64_t size;
  Digest digest;
  bool operator==(const FrontierNode&) const = default;
};

class MerkleTree {
 public:
  /// EmptyLeafSet on an empty input.
  static MerkleTree build(std::vector<G1> leaves);

  std::size_t size() const { return leaves_.size(); }
  const std::vector<G1>& leaves() const { return leaves_; }
  const Digest& root() const { return root_; }

  /// IndexOutOfRange unless index < size().
  AuthPath auth_path(std::size_t index) const;

  void replace(std::size_t index, const G1& leaf);
  /// Leaf lands at `index`; later leaves shift right. index <= size().
  void insert(std::size_t index, const G1& leaf);
  /// Later leaves shift left. EmptyLeafSet when removing the last leaf.
  void erase(std::size_t index);

  /// Maximal aligned perfect subtrees covering leaves [0, end), largest first.
  std::vector<FrontierNode> prefix_frontier(std::size_t end) const;

  /// Digest of the tree node covering [lo, lo + count).
  Digest subtree(std::size_t lo, std::size_t count) const;

  bool operator==(const MerkleTree& o) const { return leaves_ == o.leaves_ && root_ == o.root_; }

 private:
  void recompute_from(std::size_t index);
  void refresh_root();

  std::vector<G1> leaves_;
  // levels_[j][q]: digest of leaves [q 2^j, (q+1) 2^j), for every such
  // block that fits inside the tree.
  std::vector<std::vector<Digest>> levels_;
  Digest root_{};
};

/// Split point of a node covering `count` >= 2 leaves.
std::size_t split_point(std::size_t count);

/// Root implied by a leaf and its path.
Digest recompute_root(const G1& leaf, const AuthPath& path);

/// Sibling sides the path of leaf `index` must have in an n-leaf tree.
std::vector<Side> expected_sides(std::size_t index, std::size_t n);

/// Root of an n-leaf tree given the frontier covering [0, p) and the raw
/// leaves covering [p, n). MalformedProof when the parts do not fit.
Digest root_from_parts(std::size_t n, const std::vector<FrontierNode>& prefix,
                       const std::vector<G1>& suffix);

void write_auth_path(wire::Writer& w, const AuthPath& path);
AuthPath read_auth_path(wire::Reader& r);
void write_frontier(wire::Writer& w, const std::vector<FrontierNode>& nodes);
std::vector<FrontierNode> read_frontier(wire::Reader& r);

}  // namespace dpdp
