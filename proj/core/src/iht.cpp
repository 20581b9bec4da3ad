#include "dpdp/iht.hpp"

#include <algorithm>

#include "dpdp/error.hpp"

namespace dpdp::iht {
namespace {

G1 product(const std::vector<G1>& xs) {
  G1 acc;
  for (const auto& x : xs) acc *= x;
  return acc;
}

template <class Vec>
auto lower(Vec& entries, const Rank& rank) {
  return std::lower_bound(entries.begin(), entries.end(), rank,
                          [](const Entry& e, const Rank& r) { return e.rank < r; });
}

}  // namespace

IndexHashTable IndexHashTable::initial(std::size_t n) {
  IndexHashTable t;
  t.entries_.reserve(n);
  for (std::size_t i = 1; i <= n; ++i) t.entries_.push_back({Rank::integer(i), 1, EntryStatus::Live});
  return t;
}

const Entry* IndexHashTable::find(const Rank& rank) const {
  auto it = lower(entries_, rank);
  return it != entries_.end() && it->rank == rank ? &*it : nullptr;
}

std::vector<Rank> IndexHashTable::live_ranks() const {
  std::vector<Rank> out;
  for (const auto& e : entries_) {
    if (e.status == EntryStatus::Live) out.push_back(e.rank);
  }
  return out;
}

std::size_t IndexHashTable::live_count() const {
  return static_cast<std::size_t>(std::count_if(
      entries_.begin(), entries_.end(), [](const Entry& e) { return e.status == EntryStatus::Live; }));
}

Rank IndexHashTable::live_rank_at(std::size_t position) const {
  std::size_t seen = 0;
  for (const auto& e : entries_) {
    if (e.status == EntryStatus::Live && ++seen == position) return e.rank;
  }
  fail(Errc::InvalidPosition, "no live block at position " + std::to_string(position));
}

Rank IndexHashTable::insertion_rank(std::size_t position, const Rank& upper_bound) const {
  if (position == 0 || position > live_count() + 1) {
    fail(Errc::InvalidPosition, "insert position " + std::to_string(position));
  }
  Rank prev = position == 1 ? Rank{} : live_rank_at(position - 1);
  auto next = std::upper_bound(entries_.begin(), entries_.end(), prev,
                               [](const Rank& r, const Entry& e) { return r < e.rank; });
  return midpoint(prev, next == entries_.end() ? upper_bound : next->rank);
}

IndexHashTable apply(const IndexHashTable& table, OpKind kind, const Rank& rank) {
  IndexHashTable out = table;
  auto it = lower(out.entries_, rank);
  const bool found = it != out.entries_.end() && it->rank == rank;
  switch (kind) {
    case OpKind::Insert:
      if (found) fail(Errc::RankCollision, "rank " + rank.to_string() + " was already issued");
      out.entries_.insert(it, Entry{rank, 1, EntryStatus::Live});
      break;
    case OpKind::Modify:
      if (!found || it->status != EntryStatus::Live) fail(Errc::RankNotLive, rank.to_string());
      ++it->vnb;
      break;
    case OpKind::Delete:
      if (!found || it->status != EntryStatus::Live) fail(Errc::RankNotLive, rank.to_string());
      it->status = EntryStatus::Deleted;
      break;
  }
  return out;
}

std::pair<Rank, std::uint64_t> expected_entry(const IndexHashTable& table, OpKind kind,
                                              const Rank& rank) {
  if (kind == OpKind::Insert) {
    if (table.find(rank)) fail(Errc::RankCollision, rank.to_string());
    return {rank, 1};
  }
  const Entry* e = table.find(rank);
  if (!e) fail(Errc::UnknownRank, rank.to_string());
  if (e->status != EntryStatus::Live) fail(Errc::RankNotLive, rank.to_string());
  return {rank, kind == OpKind::Modify ? e->vnb + 1 : e->vnb};
}

G1 rank_hash(const Rank& rank, std::uint64_t vnb) {
  return hash_to_g1(kDomainH, encode_rank_version(rank, vnb));
}

G1 tag_block(const PublicKey& pk, const SecretKey& sk, const Block& block, const Rank& rank,
             std::uint64_t vnb) {
  if (vnb == 0) fail(Errc::InvalidArgument, "versions start at 1");
  return (rank_hash(rank, vnb) * original::block_commitment(pk, block)).pow(sk.a.inverse());
}

ServerStore make_store(const PublicKey& pk, const SecretKey& sk, const FileMatrix& matrix) {
  ServerStore store;
  for (std::size_t i = 0; i < matrix.n(); ++i) {
    Rank rank = Rank::integer(i + 1);
    store.tags.emplace(rank, tag_block(pk, sk, matrix.blocks[i], rank, 1));
    store.blocks.emplace(std::move(rank), matrix.blocks[i]);
  }
  return store;
}

bool check_update(const PublicKey& pk, const UpdateProof& proof, const Rank& rank,
                  std::uint64_t vnb) {
  if (proof.U.size() != pk.s() || proof.C.size() != pk.s()) {
    fail(Errc::MalformedProof, "update proof vectors must have length s");
  }
  if (proof.w.is_zero()) fail(Errc::MalformedProof, "zero w");
  const auto& g2 = pk.ctx.g2;
  PairingEquation eq;
  eq.lhs(proof.d, pk.g2a).lhs(product(proof.U), g2);
  eq.rhs(rank_hash(rank, vnb).pow(proof.w), g2).rhs(product(proof.C), g2);
  return eq.holds();
}

bool check_proof(const PublicKey& pk, const Challenge& chal, const PossessionProof& proof,
                 const IndexHashTable& table) {
  chal.validate();
  if (proof.R.size() != pk.s() || proof.B.size() != pk.s()) {
    fail(Errc::MalformedProof, "proof vectors must have length s");
  }
  std::vector<G1> hashes;
  std::vector<Scalar> coeffs;
  for (const auto& [rank, v] : chal.pairs) {
    const Entry* e = table.find(rank);
    if (!e) fail(Errc::UnknownRank, rank.to_string());
    if (e->status != EntryStatus::Live) fail(Errc::DeletedRankChallenged, rank.to_string());
    hashes.push_back(rank_hash(e->rank, e->vnb));
    coeffs.push_back(v);
  }
  const G1 hashed = multi_pow(hashes, coeffs);
  const auto& g2 = pk.ctx.g2;
  PairingEquation eq;
  eq.lhs(proof.c, pk.g2a).lhs(product(proof.R), g2);
  eq.rhs(hashed, g2).rhs(product(proof.B), g2);
  return eq.holds();
}

void write_table(wire::Writer& w, const IndexHashTable& table) {
  w.count(table.entries().size());
  for (const auto& e : table.entries()) {
    w.bytes(encode_rank_version(e.rank, e.vnb)).u8(static_cast<std::uint8_t>(e.status));
  }
}

IndexHashTable read_table(wire::Reader& r) {
  IndexHashTable t;
  const std::size_t n = r.count(5);
  t.entries_.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto [rank, vnb] = decode_rank_version(r.bytes());
    const auto status = r.u8();
    if (status > 1 || vnb == 0) fail(Errc::BadEncoding, "bad table record");
    if (!t.entries_.empty() && !(t.entries_.back().rank < rank)) {
      fail(Errc::BadEncoding, "table ranks not strictly increasing");
    }
    t.entries_.push_back({std::move(rank), vnb, static_cast<EntryStatus>(status)});
  }
  return t;
}

}  // namespace dpdp::iht
