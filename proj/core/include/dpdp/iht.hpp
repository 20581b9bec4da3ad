#pragma once

// Index-Hash-Table hardened scheme. Tags carry H(rank, vnb), so a tag only
// verifies at the rank and version it was issued for. Client and TPA keep
// identical tables; the server's side is unchanged from the baseline.

#include <cstdint>
#include <vector>

#include "dpdp/original.hpp"

namespace dpdp::iht {

enum class EntryStatus : std::uint8_t { Live = 0, Deleted = 1 };

struct Entry {
  Rank rank;
  std::uint64_t vnb = 1;
  EntryStatus status = EntryStatus::Live;

  bool operator==(const Entry&) const = default;
};

/// Ordered (rank, version, status) records. Deleted ranks stay as
/// tombstones and are never reissued.
class IndexHashTable {
 public:
  IndexHashTable() = default;
  /// Ranks 1..n, version 1, all live.
  static IndexHashTable initial(std::size_t n);

  const std::vector<Entry>& entries() const { return entries_; }
  const Entry* find(const Rank& rank) const;
  std::vector<Rank> live_ranks() const;
  std::size_t live_count() const;

  /// Rank a block must get to become the `position`-th live block
  /// (1-based; live_count()+1 appends). It is the midpoint between the
  /// preceding live rank (or 0) and the next recorded rank, tombstones
  /// included (or `upper_bound`). InvalidPosition when out of range.
  Rank insertion_rank(std::size_t position, const Rank& upper_bound) const;
  /// Rank of the `position`-th live block (1-based).
  Rank live_rank_at(std::size_t position) const;

  bool operator==(const IndexHashTable&) const = default;

 private:
  friend IndexHashTable apply(const IndexHashTable&, OpKind, const Rank&);
  friend IndexHashTable read_table(wire::Reader&);
  std::vector<Entry> entries_;
};

/// Insert adds (rank, 1, Live); Modify bumps vnb; Delete tombstones.
/// RankCollision when inserting a recorded rank, RankNotLive when modifying
/// or deleting anything but a live rank.
IndexHashTable apply(const IndexHashTable& table, OpKind kind, const Rank& rank);

/// The (rank, vnb) a verifier checks an update against: the post-operation
/// entry for Insert/Modify, the last live entry for Delete.
/// UnknownRank / RankNotLive when `table` (pre-operation) cannot supply it.
std::pair<Rank, std::uint64_t> expected_entry(const IndexHashTable& table, OpKind kind,
                                              const Rank& rank);

/// H(rank, vnb) = hash_to_g1("DPDP/H", encode_rank_version(rank, vnb)).
G1 rank_hash(const Rank& rank, std::uint64_t vnb);

/// (H(rank, vnb) * prod_j h_j^{m_j})^{1/a}.
G1 tag_block(const PublicKey& pk, const SecretKey& sk, const Block& block, const Rank& rank,
             std::uint64_t vnb);

/// Tags for ranks 1..n at version 1.
ServerStore make_store(const PublicKey& pk, const SecretKey& sk, const FileMatrix& matrix);

/// e(d, g2^a) e(prod U_j, g2) == e(H(rank, vnb)^w, g2) e(prod C_j, g2).
bool check_update(const PublicKey& pk, const UpdateProof& proof, const Rank& rank,
                  std::uint64_t vnb);

/// e(c, g2^a) e(prod R_j, g2) == e(prod H(i, vnb_i)^{v_i}, g2) e(prod B_j, g2),
/// with every H(i, vnb_i) taken from the verifier's own table.
/// DeletedRankChallenged / UnknownRank for a challenge the table cannot back.
bool check_proof(const PublicKey& pk, const Challenge& chal, const PossessionProof& proof,
                 const IndexHashTable& table);

void write_table(wire::Writer& w, const IndexHashTable& table);
IndexHashTable read_table(wire::Reader& r);

}  // namespace dpdp::iht
