#include "dpdp/merkle.hpp"

#include <bit>

#include "dpdp/error.hpp"

namespace dpdp {

Digest leaf_hash(const G1& leaf) {
  const std::uint8_t prefix = 0x00;
  const auto enc = leaf.encode();
  return sha256({ByteView(&prefix, 1), ByteView(enc)});
}

Digest node_hash(const Digest& left, const Digest& right) {
  const std::uint8_t prefix = 0x01;
  return sha256({ByteView(&prefix, 1), ByteView(left), ByteView(right)});
}

std::size_t split_point(std::size_t count) {
  return std::bit_floor(count - 1);
}

namespace {

bool is_aligned_block(std::size_t lo, std::size_t count) {
  return std::has_single_bit(count) && lo % count == 0;
}

Digest single_leaf_root(const Digest& leaf) {
  const std::uint8_t prefix = 0x01;
  return sha256({ByteView(&prefix, 1), ByteView(leaf)});
}

}  // namespace

MerkleTree MerkleTree::build(std::vector<G1> leaves) {
  if (leaves.empty()) fail(Errc::EmptyLeafSet);
  MerkleTree t;
  t.leaves_ = std::move(leaves);
  t.recompute_from(0);
  return t;
}

void MerkleTree::recompute_from(std::size_t index) {
  const std::size_t n = leaves_.size();
  std::size_t levels = 1;
  while ((std::size_t{1} << levels) <= n) ++levels;
  levels_.resize(levels);
  for (std::size_t j = 0; j < levels; ++j) {
    const std::size_t blocks = n >> j;
    auto& row = levels_[j];
    row.resize(blocks);
    for (std::size_t q = index >> j; q < blocks; ++q) {
      row[q] = j == 0 ? leaf_hash(leaves_[q]) : node_hash(levels_[j - 1][2 * q], levels_[j - 1][2 * q + 1]);
    }
  }
  refresh_root();
}

void MerkleTree::refresh_root() {
  root_ = leaves_.size() == 1 ? single_leaf_root(levels_[0][0]) : subtree(0, leaves_.size());
}

Digest MerkleTree::subtree(std::size_t lo, std::size_t count) const {
  if (is_aligned_block(lo, count)) {
    return levels_[static_cast<std::size_t>(std::countr_zero(count))][lo / count];
  }
  const std::size_t k = split_point(count);
  return node_hash(subtree(lo, k), subtree(lo + k, count - k));
}

AuthPath MerkleTree::auth_path(std::size_t index) const {
  if (index >= leaves_.size()) fail(Errc::IndexOutOfRange, std::to_string(index));
  AuthPath path;
  path.leaf_index = static_cast<std::uint32_t>(index);
  std::size_t lo = 0, count = leaves_.size();
  std::vector<PathStep> top_down;
  while (count > 1) {
    const std::size_t k = split_point(count);
    if (index < lo + k) {
      top_down.push_back({subtree(lo + k, count - k), Side::Right});
      count = k;
    } else {
      top_down.push_back({subtree(lo, k), Side::Left});
      lo += k;
      count -= k;
    }
  }
  path.siblings.assign(top_down.rbegin(), top_down.rend());
  return path;
}

void MerkleTree::replace(std::size_t index, const G1& leaf) {
  if (index >= leaves_.size()) fail(Errc::IndexOutOfRange, std::to_string(index));
  leaves_[index] = leaf;
  levels_[0][index] = leaf_hash(leaf);
  for (std::size_t j = 1; j < levels_.size(); ++j) {
    const std::size_t q = index >> j;
    if (q >= levels_[j].size()) break;
    levels_[j][q] = node_hash(levels_[j - 1][2 * q], levels_[j - 1][2 * q + 1]);
  }
  refresh_root();
}

void MerkleTree::insert(std::size_t index, const G1& leaf) {
  if (index > leaves_.size()) fail(Errc::IndexOutOfRange, std::to_string(index));
  leaves_.insert(leaves_.begin() + static_cast<std::ptrdiff_t>(index), leaf);
  recompute_from(index);
}

void MerkleTree::erase(std::size_t index) {
  if (index >= leaves_.size()) fail(Errc::IndexOutOfRange, std::to_string(index));
  if (leaves_.size() == 1) fail(Errc::EmptyLeafSet, "cannot remove the only leaf");
  leaves_.erase(leaves_.begin() + static_cast<std::ptrdiff_t>(index));
  recompute_from(index);
}

std::vector<FrontierNode> MerkleTree::prefix_frontier(std::size_t end) const {
  if (end > leaves_.size()) fail(Errc::IndexOutOfRange, std::to_string(end));
  std::vector<FrontierNode> out;
  std::size_t offset = 0;
  for (int bit = 63; bit >= 0; --bit) {
    const std::size_t size = std::size_t{1} << bit;
    if (end & size) {
      out.push_back({offset, size, subtree(offset, size)});
      offset += size;
    }
  }
  return out;
}

Digest recompute_root(const G1& leaf, const AuthPath& path) {
  Digest acc = leaf_hash(leaf);
  if (path.siblings.empty()) return single_leaf_root(acc);
  for (const auto& step : path.siblings) {
    acc = step.side == Side::Left ? node_hash(step.sibling, acc) : node_hash(acc, step.sibling);
  }
  return acc;
}

std::vector<Side> expected_sides(std::size_t index, std::size_t n) {
  if (index >= n) fail(Errc::IndexOutOfRange, std::to_string(index));
  std::vector<Side> top_down;
  std::size_t lo = 0, count = n;
  while (count > 1) {
    const std::size_t k = split_point(count);
    if (index < lo + k) {
      top_down.push_back(Side::Right);
      count = k;
    } else {
      top_down.push_back(Side::Left);
      lo += k;
      count -= k;
    }
  }
  return {top_down.rbegin(), top_down.rend()};
}

namespace {

struct PartsView {
  const std::vector<FrontierNode>& prefix;
  const std::vector<G1>& suffix;
  std::size_t p;

  Digest node(std::size_t lo, std::size_t count) const {
    for (const auto& f : prefix) {
      if (f.offset == lo && f.size == count) return f.digest;
    }
    if (lo >= p) {
      if (count == 1) return leaf_hash(suffix[lo - p]);
    } else if (count == 1) {
      fail(Errc::MalformedProof, "frontier does not cover leaf " + std::to_string(lo));
    }
    const std::size_t k = split_point(count);
    return node_hash(node(lo, k), node(lo + k, count - k));
  }
};

}  // namespace

Digest root_from_parts(std::size_t n, const std::vector<FrontierNode>& prefix,
                       const std::vector<G1>& suffix) {
  if (n == 0) fail(Errc::EmptyLeafSet);
  std::size_t p = 0;
  for (const auto& f : prefix) {
    if (f.offset != p || !is_aligned_block(f.offset, f.size)) {
      fail(Errc::MalformedProof, "frontier is not a left-aligned cover");
    }
    p += f.size;
  }
  if (p + suffix.size() != n) fail(Errc::MalformedProof, "parts do not add up to the leaf count");
  if (n == 1) {
    return single_leaf_root(prefix.empty() ? leaf_hash(suffix[0]) : prefix[0].digest);
  }
  return PartsView{prefix, suffix, p}.node(0, n);
}

void write_auth_path(wire::Writer& w, const AuthPath& path) {
  if (path.siblings.size() > 0xffff) fail(Errc::InvalidArgument, "path too long");
  w.u32(path.leaf_index).u16(static_cast<std::uint16_t>(path.siblings.size()));
  for (const auto& s : path.siblings) w.raw(s.sibling).u8(static_cast<std::uint8_t>(s.side));
}

AuthPath read_auth_path(wire::Reader& r) {
  AuthPath path;
  path.leaf_index = r.u32();
  const std::size_t count = r.u16();
  path.siblings.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    PathStep step{};
    auto raw = r.raw(step.sibling.size());
    std::copy(raw.begin(), raw.end(), step.sibling.begin());
    const auto side = r.u8();
    if (side > 1) fail(Errc::BadEncoding, "bad side byte");
    step.side = static_cast<Side>(side);
    path.siblings.push_back(step);
  }
  return path;
}

void write_frontier(wire::Writer& w, const std::vector<FrontierNode>& nodes) {
  w.count(nodes.size());
  for (const auto& f : nodes) w.u64(f.offset).u64(f.size).raw(f.digest);
}

std::vector<FrontierNode> read_frontier(wire::Reader& r) {
  std::vector<FrontierNode> out(r.count(48));
  for (auto& f : out) {
    f.offset = r.u64();
    f.size = r.u64();
    auto raw = r.raw(f.digest.size());
    std::copy(raw.begin(), raw.end(), f.digest.begin());
  }
  return out;
}

}  // namespace dpdp
