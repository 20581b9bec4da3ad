#pragma once

// Brute-force reference for the hash tree, written from the shape rules
// alone: leaves are SHA-256(0x00 || point), nodes SHA-256(0x01 || l || r),
// the left child of a k-leaf node covers the largest power of two below k,
// and a lone leaf is wrapped once in the node domain.

#include <vector>

#include "dpdp/algebra.hpp"
#include "dpdp/bytes.hpp"

namespace dpdp::test {

inline Digest oracle_leaf(const G1& g) {
  Bytes in{0x00};
  auto enc = g.encode();
  in.insert(in.end(), enc.begin(), enc.end());
  return sha256(in);
}

inline Digest oracle_node(const Digest& l, const Digest& r) {
  Bytes in{0x01};
  in.insert(in.end(), l.begin(), l.end());
  in.insert(in.end(), r.begin(), r.end());
  return sha256(in);
}

inline std::size_t oracle_split(std::size_t count) {
  std::size_t k = 1;
  while (k * 2 < count) k *= 2;
  return k;
}

inline Digest oracle_subtree(const std::vector<G1>& leaves, std::size_t lo, std::size_t count) {
  if (count == 1) return oracle_leaf(leaves[lo]);
  std::size_t k = oracle_split(count);
  return oracle_node(oracle_subtree(leaves, lo, k), oracle_subtree(leaves, lo + k, count - k));
}

inline Digest oracle_root(const std::vector<G1>& leaves) {
  if (leaves.size() == 1) {
    Bytes in{0x01};
    auto lh = oracle_leaf(leaves[0]);
    in.insert(in.end(), lh.begin(), lh.end());
    return sha256(in);
  }
  return oracle_subtree(leaves, 0, leaves.size());
}

}  // namespace dpdp::test
