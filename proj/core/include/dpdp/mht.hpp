#pragma once

// Merkle-tree hardened scheme. Tags bind block content through a secret
// keyed leaf hash H'; positions and freshness are bound by a hash tree over
// the H'(m_i) whose root the client signs. Ranks are 1-based positions that
// shift on insert and delete.

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "dpdp/merkle.hpp"
#include "dpdp/original.hpp"
#include "dpdp/signature.hpp"

namespace dpdp::mht {

struct HashKey {
  static constexpr std::size_t kSize = 32;
  std::array<std::uint8_t, kSize> bytes{};
  bool operator==(const HashKey&) const = default;
};

struct PublicKeys {
  PublicKey pk;
  SigVerifyKey pk_ss;
};

/// Client secrets. hkey is shared with the server, never with the TPA.
struct SecretKeys {
  SecretKey sk;
  SigSigningKey sk_ss;
  HashKey hkey;
};

struct Keys {
  PublicKeys pub;
  SecretKeys sec;
};

Keys keygen(const PairingContext& ctx, std::size_t s, SeededRng& rng);

/// H'(m) = keyed_hash_to_g1(hkey, block_bytes(m)).
G1 leaf_digest(const HashKey& hkey, const Block& block);

/// (H'(m) * prod_j h_j^{m_j})^{1/a}.
G1 tag_block(const PublicKey& pk, const SecretKey& sk, const HashKey& hkey, const Block& block);

struct SignedRoot {
  Digest root{};
  Signature sig;
  bool operator==(const SignedRoot&) const = default;
};

struct ServerState {
  std::vector<Block> blocks;
  std::vector<G1> tags;
  MerkleTree tree;
  SignedRoot signed_root;
  HashKey hkey;

  std::size_t n() const { return blocks.size(); }
};

/// What the client keeps after upload: the root it last signed and the leaf
/// count, enough to check the AAI of the next update.
struct ClientState {
  Digest root{};
  std::size_t n = 0;
  bool operator==(const ClientState&) const = default;
};

// Upload handshake: client -> server (F, E, H', sigma_rt); server -> client rt_server.

struct UploadPackage {
  std::vector<Block> blocks;
  std::vector<G1> tags;
  HashKey hkey;
  Signature sig;
};

struct PreparedUpload {
  UploadPackage package;
  Digest root{};
};

PreparedUpload prepare_upload(const Keys& keys, const FileMatrix& matrix);
/// Server side: rebuilds the tree from the received blocks.
ServerState accept_upload(UploadPackage package);
/// Client side: RootMismatch unless sigma_rt verifies on rt_server.
ClientState confirm_upload(const PublicKeys& pub, const PreparedUpload& prepared,
                           const Digest& server_root);

struct UploadResult {
  ServerState server;
  ClientState client;
};

UploadResult upload(const Keys& keys, const FileMatrix& matrix);

// Update flow: R, then Omega_i, then info, then rt_server'.

struct Request {
  OpKind kind = OpKind::Modify;
  std::size_t position = 1;  // 1-based
  bool operator==(const Request&) const = default;
};

/// AAI for one request. Modify carries the old leaf and its path. Insert and
/// Delete shift every later leaf, so they carry the frontier covering the
/// leaves before the position and the leaves from the position on.
struct Aai {
  std::optional<G1> leaf;
  AuthPath path;
  std::vector<FrontierNode> frontier;
  std::vector<G1> suffix;
};

struct UpdateInfo {
  std::optional<Block> block;  // Insert / Modify
  std::optional<G1> tag;       // Insert / Modify
  Signature sig;               // over rt'
};

struct PendingUpdate {
  Request request;
  UpdateInfo info;
  Digest new_root{};
  std::size_t new_n = 0;
};

/// RankOutOfRange unless 1 <= position <= n (n + 1 for Insert), and for a
/// Delete that would empty the file.
void check_position(const Request& req, std::size_t n);

/// Server side.
Aai select_aai(const ServerState& server, const Request& req);

/// Client side: checks the AAI against the stored root (RootMismatch),
/// computes rt' and signs it.
PendingUpdate prepare_update(const Keys& keys, const ClientState& client, const Request& req,
                             const Aai& aai, const std::optional<Block>& block);

/// Server side: applies the operation and returns rt_server'.
Digest apply_update(ServerState& server, const Request& req, const UpdateInfo& info);

/// Client side: RootMismatch unless sigma_rt' verifies on rt_server'.
void confirm_update(const PublicKeys& pub, ClientState& client, const PendingUpdate& pending,
                    const Digest& server_root);

/// The whole four-message flow against an honest server. On RootMismatch
/// neither party changes state.
void perform_update(const Keys& keys, ClientState& client, ServerState& server,
                    const Request& req, const std::optional<Block>& block);

// Proofs.

struct LeafWitness {
  G1 leaf;
  AuthPath path;
};

struct ProofBundle {
  PossessionProof proof;
  SignedRoot signed_root;
  Digest server_root{};
  std::vector<LeafWitness> leaves;  // one per challenged block, challenge order
};

/// Ranks must be integers in [1, n] (UnknownRank otherwise).
ProofBundle gen_proof(const PublicKey& pk, const ServerState& server, const Challenge& chal,
                      SeededRng& rng);

enum class Stage : std::uint8_t { RootReconstruction = 1, Signature = 2, PairingEquation = 3 };

std::string_view to_string(Stage stage);

struct CheckResult {
  bool accepted = false;
  std::optional<Stage> failed_stage;
};

/// (1) every (leaf, path) must sit at its challenged position in an n-leaf
/// tree and recompute rt_server; (2) rt_server must be `latest_root`, the
/// last root the client committed, and sigma_rt must verify on it;
/// (3) e(c, g2^a) e(prod R_j, g2) == e(prod H'(m_i)^{v_i}, g2) e(prod B_j, g2).
/// Stops at the first failing stage. MalformedProof on a shape mismatch.
CheckResult check_proof(const PublicKeys& pub, const Challenge& chal, const ProofBundle& bundle,
                        std::size_t n, const Digest& latest_root);

void write_hash_key(wire::Writer& w, const HashKey& key);
HashKey read_hash_key(wire::Reader& r);
void write_signed_root(wire::Writer& w, const SignedRoot& sr);
SignedRoot read_signed_root(wire::Reader& r);
void write_digest(wire::Writer& w, const Digest& d);
Digest read_digest(wire::Reader& r);
void write_public_keys(wire::Writer& w, const PublicKeys& pub);
PublicKeys read_public_keys(wire::Reader& r);
void write_request(wire::Writer& w, const Request& req);
Request read_request(wire::Reader& r);
void write_aai(wire::Writer& w, const Aai& aai);
Aai read_aai(wire::Reader& r);
void write_update_info(wire::Writer& w, const UpdateInfo& info);
UpdateInfo read_update_info(wire::Reader& r);
void write_upload_package(wire::Writer& w, const UploadPackage& p);
UploadPackage read_upload_package(wire::Reader& r);
/// nu | sigma_rt | root | count-prefixed (leaf, path) records.
void write_bundle(wire::Writer& w, const ProofBundle& b);
ProofBundle read_bundle(wire::Reader& r);

}  // namespace dpdp::mht
