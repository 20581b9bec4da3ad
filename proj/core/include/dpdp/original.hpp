#pragma once

// Baseline publicly verifiable dynamic PDP scheme. Its tags do not depend on
// the block's rank or version, which is what the replace and replay attacks
// exploit; the weakness is kept on purpose.
//
// The proof objects defined here (Challenge, PossessionProof, UpdateProof,
// UpdateRequest, ServerStore) are shared with the hardened schemes.

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "dpdp/algebra.hpp"
#include "dpdp/encoding.hpp"
#include "dpdp/rank.hpp"
#include "dpdp/wire.hpp"

namespace dpdp {

struct PublicKey {
  PairingContext ctx;
  std::vector<G1> h;  // h_1..h_s
  G2 g2a;             // g2^a

  std::size_t s() const { return h.size(); }
};

struct SecretKey {
  Scalar a;
};

struct KeyPair {
  PublicKey pk;
  SecretKey sk;
};

using TagVector = std::map<Rank, G1>;

struct Challenge {
  std::vector<std::pair<Rank, Scalar>> pairs;  // (rank, v), ranks distinct, v != 0

  /// EmptyChallenge / InvalidArgument on an invariant violation.
  void validate() const;
};

struct PossessionProof {
  std::vector<G1> R;
  std::vector<G1> B;
  G1 c;
};

struct UpdateProof {
  std::vector<G1> U;
  std::vector<G1> C;
  G1 d;
  Scalar w;
};

enum class OpKind : std::uint8_t { Insert = 0, Delete = 1, Modify = 2 };

std::string_view to_string(OpKind kind);
OpKind parse_op_kind(std::string_view text);

struct UpdateRequest {
  OpKind kind = OpKind::Modify;
  Rank rank;
  std::optional<Block> block;  // Insert / Modify only
  std::optional<G1> tag;       // Insert / Modify only
};

/// The server's collections of blocks and tags, keyed by rank.
struct ServerStore {
  std::map<Rank, Block> blocks;
  std::map<Rank, G1> tags;

  std::vector<Rank> ranks() const;
};

/// A challenged block as seen by the prover.
struct ProverInput {
  const Block* block;
  const G1* tag;
  Scalar v;
};

namespace original {

KeyPair keygen(const PairingContext& ctx, std::size_t s, SeededRng& rng);

/// prod_j h_j^{m_j}.
G1 block_commitment(const PublicKey& pk, const Block& block);

/// (prod_j h_j^{m_j})^{1/a}. An all-zero block gets the identity tag.
G1 tag_block(const PublicKey& pk, const SecretKey& sk, const Block& block);

/// Tags for ranks 1..n and the corresponding store.
ServerStore make_store(const PublicKey& pk, const SecretKey& sk, const FileMatrix& matrix);

/// `count` distinct ranks drawn without replacement, each with a uniform
/// non-zero coefficient; pairs come out sorted by rank.
Challenge gen_challenge(std::span<const Rank> rank_set, std::size_t count, SeededRng& rng);

/// Core prover. `masks` are the r_j; production callers draw them fresh.
PossessionProof prove(const PublicKey& pk, std::span<const ProverInput> inputs,
                      std::span<const Scalar> masks);

PossessionProof gen_proof(const PublicKey& pk, const ServerStore& store, const Challenge& chal,
                          SeededRng& rng);
/// gen_proof with caller-chosen r_j (test hook).
PossessionProof gen_proof_with_masks(const PublicKey& pk, const ServerStore& store,
                                     const Challenge& chal, std::span<const Scalar> masks);

/// e(c, g2^a) * e(prod R_j, g2) == e(prod B_j, g2).
bool check_proof(const PublicKey& pk, const Challenge& chal, const PossessionProof& proof);

/// Core update prover over one (block, tag) with caller-chosen u_j and w.
UpdateProof prove_update(const PublicKey& pk, const Block& block, const G1& tag,
                         std::span<const Scalar> masks, const Scalar& w);

/// Applies `req` to `store` and proves it. Delete proves with the block
/// being removed. RankNotFound / RankOccupied on a bad rank; the store is
/// untouched on error.
UpdateProof perform_update(const PublicKey& pk, ServerStore& store, const UpdateRequest& req,
                           SeededRng& rng);

/// e(d, g2^a) * e(prod U_j, g2) == e(prod C_j, g2). Binds neither the rank
/// nor the block content nor freshness.
bool check_update(const PublicKey& pk, const UpdateProof& proof);

}  // namespace original

// Wire codecs (length-prefixed element encodings, u32 counts).
void write_public_key(wire::Writer& w, const PublicKey& pk);
PublicKey read_public_key(wire::Reader& r);
void write_block(wire::Writer& w, const Block& block);
Block read_block(wire::Reader& r);
void write_challenge(wire::Writer& w, const Challenge& chal);
Challenge read_challenge(wire::Reader& r);
void write_possession_proof(wire::Writer& w, const PossessionProof& p);
PossessionProof read_possession_proof(wire::Reader& r);
void write_update_proof(wire::Writer& w, const UpdateProof& p);
UpdateProof read_update_proof(wire::Reader& r);
void write_update_request(wire::Writer& w, const UpdateRequest& req);
UpdateRequest read_update_request(wire::Reader& r);

}  // namespace dpdp
