#include "dpdp/mht.hpp"

#include <algorithm>

#include "dpdp/error.hpp"

namespace dpdp::mht {
namespace {

void require_sectors(const PublicKey& pk, const Block& block) {
  if (block.size() != pk.s()) {
    fail(Errc::SectorCountMismatch,
         "block has " + std::to_string(block.size()) + " sectors, key expects " + std::to_string(pk.s()));
  }
}

G1 product(const std::vector<G1>& xs) {
  G1 acc;
  for (const auto& x : xs) acc *= x;
  return acc;
}

std::vector<G1> leaves_of(const HashKey& hkey, const std::vector<Block>& blocks) {
  std::vector<G1> out;
  out.reserve(blocks.size());
  for (const auto& b : blocks) out.push_back(leaf_digest(hkey, b));
  return out;
}

std::size_t position_index(const Rank& rank, std::size_t n) {
  if (!rank.is_integer() || rank == Rank{} || rank > Rank::integer(n)) {
    fail(Errc::UnknownRank, "position " + rank.to_string() + " outside [1, " + std::to_string(n) + "]");
  }
  return static_cast<std::size_t>(rank.to_u64() - 1);
}

}  // namespace

Keys keygen(const PairingContext& ctx, std::size_t s, SeededRng& rng) {
  auto kp = original::keygen(ctx, s, rng);
  auto ss = sig_gen(rng);
  HashKey hkey;
  rng.fill(hkey.bytes);
  return {.pub = {.pk = std::move(kp.pk), .pk_ss = ss.vk},
          .sec = {.sk = kp.sk, .sk_ss = ss.sk, .hkey = hkey}};
}

G1 leaf_digest(const HashKey& hkey, const Block& block) {
  return keyed_hash_to_g1(hkey.bytes, block_bytes(block));
}

G1 tag_block(const PublicKey& pk, const SecretKey& sk, const HashKey& hkey, const Block& block) {
  require_sectors(pk, block);
  return (leaf_digest(hkey, block) * original::block_commitment(pk, block)).pow(sk.a.inverse());
}

PreparedUpload prepare_upload(const Keys& keys, const FileMatrix& matrix) {
  if (matrix.n() == 0) fail(Errc::EmptyLeafSet);
  PreparedUpload out;
  auto& pkg = out.package;
  pkg.blocks = matrix.blocks;
  pkg.hkey = keys.sec.hkey;
  pkg.tags.reserve(matrix.n());
  std::vector<G1> leaves;
  leaves.reserve(matrix.n());
  for (const auto& b : matrix.blocks) {
    require_sectors(keys.pub.pk, b);
    G1 leaf = leaf_digest(keys.sec.hkey, b);
    pkg.tags.push_back((leaf * original::block_commitment(keys.pub.pk, b)).pow(keys.sec.sk.a.inverse()));
    leaves.push_back(leaf);
  }
  out.root = MerkleTree::build(std::move(leaves)).root();
  pkg.sig = sig_sign(keys.sec.sk_ss, out.root);
  return out;
}

ServerState accept_upload(UploadPackage package) {
  if (package.blocks.size() != package.tags.size()) {
    fail(Errc::InvalidArgument, "block and tag counts differ");
  }
  ServerState st;
  st.tree = MerkleTree::build(leaves_of(package.hkey, package.blocks));
  st.blocks = std::move(package.blocks);
  st.tags = std::move(package.tags);
  st.hkey = package.hkey;
  st.signed_root = {st.tree.root(), package.sig};
  return st;
}

ClientState confirm_upload(const PublicKeys& pub, const PreparedUpload& prepared,
                           const Digest& server_root) {
  if (!sig_verify(pub.pk_ss, server_root, prepared.package.sig)) {
    fail(Errc::RootMismatch, "server root does not match the signed root");
  }
  return {.root = prepared.root, .n = prepared.package.blocks.size()};
}

UploadResult upload(const Keys& keys, const FileMatrix& matrix) {
  auto prepared = prepare_upload(keys, matrix);
  auto server = accept_upload(prepared.package);
  auto client = confirm_upload(keys.pub, prepared, server.tree.root());
  return {std::move(server), client};
}

void check_position(const Request& req, std::size_t n) {
  const std::size_t hi = req.kind == OpKind::Insert ? n + 1 : n;
  if (req.position == 0 || req.position > hi) {
    fail(Errc::RankOutOfRange, "position " + std::to_string(req.position) + " outside [1, " +
                                   std::to_string(hi) + "]");
  }
  if (req.kind == OpKind::Delete && n == 1) {
    fail(Errc::RankOutOfRange, "deleting the only block would leave an empty tree");
  }
}

Aai select_aai(const ServerState& server, const Request& req) {
  check_position(req, server.n());
  const std::size_t i = req.position - 1;
  Aai aai;
  if (req.kind == OpKind::Modify) {
    aai.leaf = server.tree.leaves()[i];
    aai.path = server.tree.auth_path(i);
  } else {
    aai.frontier = server.tree.prefix_frontier(i);
    const auto& leaves = server.tree.leaves();
    aai.suffix.assign(leaves.begin() + static_cast<std::ptrdiff_t>(i), leaves.end());
  }
  return aai;
}

PendingUpdate prepare_update(const Keys& keys, const ClientState& client, const Request& req,
                             const Aai& aai, const std::optional<Block>& block) {
  check_position(req, client.n);
  const std::size_t i = req.position - 1;
  PendingUpdate out;
  out.request = req;
  std::optional<G1> new_leaf;
  if (req.kind != OpKind::Delete) {
    if (!block) fail(Errc::InvalidArgument, "insert/modify need a block");
    require_sectors(keys.pub.pk, *block);
    new_leaf = leaf_digest(keys.sec.hkey, *block);
    out.info.block = *block;
    out.info.tag = (*new_leaf * original::block_commitment(keys.pub.pk, *block)).pow(keys.sec.sk.a.inverse());
  }

  if (req.kind == OpKind::Modify) {
    if (!aai.leaf || aai.path.leaf_index != i) fail(Errc::RootMismatch, "AAI is for another position");
    const auto sides = expected_sides(i, client.n);
    if (aai.path.siblings.size() != sides.size() ||
        !std::equal(sides.begin(), sides.end(), aai.path.siblings.begin(),
                    [](Side s, const PathStep& p) { return s == p.side; })) {
      fail(Errc::RootMismatch, "AAI path has the wrong shape");
    }
    if (recompute_root(*aai.leaf, aai.path) != client.root) {
      fail(Errc::RootMismatch, "AAI does not authenticate against the stored root");
    }
    out.new_root = recompute_root(*new_leaf, aai.path);
    out.new_n = client.n;
  } else {
    if (aai.suffix.size() != client.n - i) fail(Errc::RootMismatch, "AAI covers the wrong range");
    Digest old_root{};
    try {
      old_root = root_from_parts(client.n, aai.frontier, aai.suffix);
    } catch (const Error&) {
      fail(Errc::RootMismatch, "AAI does not fit the stored tree size");
    }
    if (old_root != client.root) {
      fail(Errc::RootMismatch, "AAI does not authenticate against the stored root");
    }
    auto suffix = aai.suffix;
    if (req.kind == OpKind::Insert) {
      suffix.insert(suffix.begin(), *new_leaf);
      out.new_n = client.n + 1;
    } else {
      suffix.erase(suffix.begin());
      out.new_n = client.n - 1;
    }
    out.new_root = root_from_parts(out.new_n, aai.frontier, suffix);
  }
  out.info.sig = sig_sign(keys.sec.sk_ss, out.new_root);
  return out;
}

Digest apply_update(ServerState& server, const Request& req, const UpdateInfo& info) {
  check_position(req, server.n());
  const std::size_t i = req.position - 1;
  const auto at = static_cast<std::ptrdiff_t>(i);
  if (req.kind != OpKind::Delete && (!info.block || !info.tag)) {
    fail(Errc::InvalidArgument, "insert/modify need a block and a tag");
  }
  switch (req.kind) {
    case OpKind::Modify:
      server.tree.replace(i, leaf_digest(server.hkey, *info.block));
      server.blocks[i] = *info.block;
      server.tags[i] = *info.tag;
      break;
    case OpKind::Insert:
      server.tree.insert(i, leaf_digest(server.hkey, *info.block));
      server.blocks.insert(server.blocks.begin() + at, *info.block);
      server.tags.insert(server.tags.begin() + at, *info.tag);
      break;
    case OpKind::Delete:
      server.tree.erase(i);
      server.blocks.erase(server.blocks.begin() + at);
      server.tags.erase(server.tags.begin() + at);
      break;
  }
  server.signed_root = {server.tree.root(), info.sig};
  return server.tree.root();
}

void confirm_update(const PublicKeys& pub, ClientState& client, const PendingUpdate& pending,
                    const Digest& server_root) {
  if (!sig_verify(pub.pk_ss, server_root, pending.info.sig)) {
    fail(Errc::RootMismatch, "server root does not match the signed root");
  }
  client.root = pending.new_root;
  client.n = pending.new_n;
}

void perform_update(const Keys& keys, ClientState& client, ServerState& server,
                    const Request& req, const std::optional<Block>& block) {
  auto aai = select_aai(server, req);
  auto pending = prepare_update(keys, client, req, aai, block);
  ServerState backup = server;
  auto root = apply_update(server, req, pending.info);
  try {
    confirm_update(keys.pub, client, pending, root);
  } catch (...) {
    server = std::move(backup);
    throw;
  }
}

ProofBundle gen_proof(const PublicKey& pk, const ServerState& server, const Challenge& chal,
                      SeededRng& rng) {
  chal.validate();
  std::vector<ProverInput> inputs;
  ProofBundle out;
  for (const auto& [rank, v] : chal.pairs) {
    const std::size_t i = position_index(rank, server.n());
    inputs.push_back({&server.blocks[i], &server.tags[i], v});
    out.leaves.push_back({server.tree.leaves()[i], server.tree.auth_path(i)});
  }
  std::vector<Scalar> masks;
  for (std::size_t j = 0; j < pk.s(); ++j) masks.push_back(Scalar::random(rng));
  out.proof = original::prove(pk, inputs, masks);
  out.signed_root = server.signed_root;
  out.server_root = server.tree.root();
  return out;
}

std::string_view to_string(Stage stage) {
  switch (stage) {
    case Stage::RootReconstruction: return "root-reconstruction";
    case Stage::Signature: return "signature";
    case Stage::PairingEquation: return "pairing-equation";
  }
  return "?";
}

CheckResult check_proof(const PublicKeys& pub, const Challenge& chal, const ProofBundle& bundle,
                        std::size_t n, const Digest& latest_root) {
  chal.validate();
  const auto& pk = pub.pk;
  if (bundle.leaves.size() != chal.pairs.size()) {
    fail(Errc::MalformedProof, "one leaf witness per challenged block expected");
  }
  if (bundle.proof.R.size() != pk.s() || bundle.proof.B.size() != pk.s()) {
    fail(Errc::MalformedProof, "proof vectors must have length s");
  }

  for (std::size_t k = 0; k < chal.pairs.size(); ++k) {
    const std::size_t i = position_index(chal.pairs[k].first, n);
    const auto& w = bundle.leaves[k];
    const auto sides = expected_sides(i, n);
    bool placed = w.path.leaf_index == i && w.path.siblings.size() == sides.size();
    for (std::size_t d = 0; placed && d < sides.size(); ++d) placed = w.path.siblings[d].side == sides[d];
    if (!placed || recompute_root(w.leaf, w.path) != bundle.server_root) {
      return {false, Stage::RootReconstruction};
    }
  }

  if (bundle.server_root != latest_root ||
      !sig_verify(pub.pk_ss, bundle.server_root, bundle.signed_root.sig)) {
    return {false, Stage::Signature};
  }

  std::vector<G1> leaves;
  std::vector<Scalar> coeffs;
  for (std::size_t k = 0; k < chal.pairs.size(); ++k) {
    leaves.push_back(bundle.leaves[k].leaf);
    coeffs.push_back(chal.pairs[k].second);
  }
  const G1 hashed = multi_pow(leaves, coeffs);
  const auto& g2 = pk.ctx.g2;
  PairingEquation eq;
  eq.lhs(bundle.proof.c, pk.g2a).lhs(product(bundle.proof.R), g2);
  eq.rhs(hashed, g2).rhs(product(bundle.proof.B), g2);
  if (!eq.holds()) return {false, Stage::PairingEquation};
  return {true, std::nullopt};
}

// ---------------------------------------------------------------- codecs

namespace {

template <std::size_t N>
void read_into(wire::Reader& r, std::array<std::uint8_t, N>& out) {
  auto raw = r.raw(N);
  std::copy(raw.begin(), raw.end(), out.begin());
}

void write_g1s(wire::Writer& w, const std::vector<G1>& xs) {
  w.count(xs.size());
  for (const auto& x : xs) w.g1(x);
}

std::vector<G1> read_g1s(wire::Reader& r) {
  std::vector<G1> xs(r.count(4 + G1::kEncodedSize));
  for (auto& x : xs) x = r.g1();
  return xs;
}

void write_blocks(wire::Writer& w, const std::vector<Block>& blocks) {
  w.count(blocks.size());
  for (const auto& b : blocks) write_block(w, b);
}

std::vector<Block> read_blocks(wire::Reader& r) {
  std::vector<Block> out(r.count(4));
  for (auto& b : out) b = read_block(r);
  return out;
}

}  // namespace

void write_hash_key(wire::Writer& w, const HashKey& key) { w.raw(key.bytes); }

HashKey read_hash_key(wire::Reader& r) {
  HashKey k;
  read_into(r, k.bytes);
  return k;
}

void write_digest(wire::Writer& w, const Digest& d) { w.raw(d); }

Digest read_digest(wire::Reader& r) {
  Digest d;
  read_into(r, d);
  return d;
}

void write_signed_root(wire::Writer& w, const SignedRoot& sr) { w.raw(sr.root).raw(sr.sig.bytes); }

SignedRoot read_signed_root(wire::Reader& r) {
  SignedRoot sr;
  read_into(r, sr.root);
  read_into(r, sr.sig.bytes);
  return sr;
}

void write_public_keys(wire::Writer& w, const PublicKeys& pub) {
  write_public_key(w, pub.pk);
  w.raw(pub.pk_ss.bytes);
}

PublicKeys read_public_keys(wire::Reader& r) {
  PublicKeys pub{.pk = read_public_key(r), .pk_ss = {}};
  read_into(r, pub.pk_ss.bytes);
  return pub;
}

void write_request(wire::Writer& w, const Request& req) {
  w.u8(static_cast<std::uint8_t>(req.kind)).u64(req.position);
}

Request read_request(wire::Reader& r) {
  const auto kind = r.u8();
  if (kind > 2) fail(Errc::BadEncoding, "bad operation kind");
  return {static_cast<OpKind>(kind), static_cast<std::size_t>(r.u64())};
}

void write_aai(wire::Writer& w, const Aai& aai) {
  w.u8(aai.leaf ? 1 : 0);
  if (aai.leaf) {
    w.g1(*aai.leaf);
    write_auth_path(w, aai.path);
  }
  write_frontier(w, aai.frontier);
  write_g1s(w, aai.suffix);
}

Aai read_aai(wire::Reader& r) {
  Aai aai;
  const auto has_leaf = r.u8();
  if (has_leaf > 1) fail(Errc::BadEncoding, "bad AAI flag");
  if (has_leaf) {
    aai.leaf = r.g1();
    aai.path = read_auth_path(r);
  }
  aai.frontier = read_frontier(r);
  aai.suffix = read_g1s(r);
  return aai;
}

void write_update_info(wire::Writer& w, const UpdateInfo& info) {
  w.u8(info.block ? 1 : 0);
  if (info.block) {
    write_block(w, *info.block);
    w.g1(info.tag.value());
  }
  w.raw(info.sig.bytes);
}

UpdateInfo read_update_info(wire::Reader& r) {
  UpdateInfo info;
  const auto has_block = r.u8();
  if (has_block > 1) fail(Errc::BadEncoding, "bad update info flag");
  if (has_block) {
    info.block = read_block(r);
    info.tag = r.g1();
  }
  read_into(r, info.sig.bytes);
  return info;
}

void write_upload_package(wire::Writer& w, const UploadPackage& p) {
  write_blocks(w, p.blocks);
  write_g1s(w, p.tags);
  write_hash_key(w, p.hkey);
  w.raw(p.sig.bytes);
}

UploadPackage read_upload_package(wire::Reader& r) {
  UploadPackage p;
  p.blocks = read_blocks(r);
  p.tags = read_g1s(r);
  p.hkey = read_hash_key(r);
  read_into(r, p.sig.bytes);
  return p;
}

void write_bundle(wire::Writer& w, const ProofBundle& b) {
  write_possession_proof(w, b.proof);
  w.raw(b.signed_root.sig.bytes);
  w.raw(b.server_root);
  w.count(b.leaves.size());
  for (const auto& lw : b.leaves) {
    w.g1(lw.leaf);
    write_auth_path(w, lw.path);
  }
}

ProofBundle read_bundle(wire::Reader& r) {
  ProofBundle b;
  b.proof = read_possession_proof(r);
  read_into(r, b.signed_root.sig.bytes);
  read_into(r, b.server_root);
  b.signed_root.root = b.server_root;
  b.leaves.resize(r.count(4 + G1::kEncodedSize + 6));
  for (auto& lw : b.leaves) {
    lw.leaf = r.g1();
    lw.path = read_auth_path(r);
  }
  return b;
}

}  // namespace dpdp::mht
