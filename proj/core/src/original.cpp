#include "dpdp/original.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "dpdp/error.hpp"

namespace dpdp {

void Challenge::validate() const {
  if (pairs.empty()) fail(Errc::EmptyChallenge, "challenge has no pairs");
  std::set<Rank> seen;
  for (const auto& [rank, v] : pairs) {
    if (!seen.insert(rank).second) fail(Errc::InvalidArgument, "duplicate rank " + rank.to_string());
    if (v.is_zero()) fail(Errc::InvalidArgument, "zero coefficient for rank " + rank.to_string());
  }
}

std::string_view to_string(OpKind kind) {
  switch (kind) {
    case OpKind::Insert: return "insert";
    case OpKind::Delete: return "delete";
    case OpKind::Modify: return "modify";
  }
  return "?";
}

OpKind parse_op_kind(std::string_view text) {
  if (text == "insert") return OpKind::Insert;
  if (text == "delete") return OpKind::Delete;
  if (text == "modify") return OpKind::Modify;
  fail(Errc::InvalidArgument, "unknown operation '" + std::string(text) + "'");
}

std::vector<Rank> ServerStore::ranks() const {
  std::vector<Rank> out;
  out.reserve(blocks.size());
  for (const auto& [rank, _] : blocks) out.push_back(rank);
  return out;
}

namespace original {
namespace {

void require_sectors(const PublicKey& pk, const Block& block) {
  if (block.size() != pk.s()) {
    fail(Errc::SectorCountMismatch,
         "block has " + std::to_string(block.size()) + " sectors, key expects " + std::to_string(pk.s()));
  }
}

std::vector<Scalar> draw(std::size_t n, SeededRng& rng) {
  std::vector<Scalar> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(Scalar::random(rng));
  return out;
}

G1 product(const std::vector<G1>& xs) {
  G1 acc;
  for (const auto& x : xs) acc *= x;
  return acc;
}

}  // namespace

KeyPair keygen(const PairingContext& ctx, std::size_t s, SeededRng& rng) {
  if (s == 0) fail(Errc::InvalidArgument, "sectors per block must be positive");
  KeyPair kp{.pk = {.ctx = ctx, .h = {}, .g2a = {}}, .sk = {}};
  kp.pk.h.reserve(s);
  for (std::size_t j = 0; j < s; ++j) kp.pk.h.push_back(G1::random(rng));
  kp.sk.a = Scalar::random_nonzero(rng);
  kp.pk.g2a = ctx.g2.pow(kp.sk.a);
  return kp;
}

G1 block_commitment(const PublicKey& pk, const Block& block) {
  require_sectors(pk, block);
  return multi_pow(pk.h, block);
}

G1 tag_block(const PublicKey& pk, const SecretKey& sk, const Block& block) {
  return block_commitment(pk, block).pow(sk.a.inverse());
}

ServerStore make_store(const PublicKey& pk, const SecretKey& sk, const FileMatrix& matrix) {
  ServerStore store;
  for (std::size_t i = 0; i < matrix.n(); ++i) {
    Rank rank = Rank::integer(i + 1);
    store.tags.emplace(rank, tag_block(pk, sk, matrix.blocks[i]));
    store.blocks.emplace(std::move(rank), matrix.blocks[i]);
  }
  return store;
}

Challenge gen_challenge(std::span<const Rank> rank_set, std::size_t count, SeededRng& rng) {
  if (rank_set.empty()) fail(Errc::EmptyRankSet, "no ranks to challenge");
  if (count == 0) fail(Errc::EmptyChallenge, "challenge size must be at least 1");
  if (count > rank_set.size()) {
    fail(Errc::CountTooLarge, std::to_string(count) + " > " + std::to_string(rank_set.size()));
  }
  std::vector<std::size_t> idx(rank_set.size());
  std::iota(idx.begin(), idx.end(), 0);
  for (std::size_t i = 0; i < count; ++i) {
    std::size_t j = i + rng.uniform(idx.size() - i);
    std::swap(idx[i], idx[j]);
  }
  idx.resize(count);
  std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return rank_set[a] < rank_set[b]; });

  Challenge chal;
  for (auto i : idx) chal.pairs.emplace_back(rank_set[i], Scalar::random_nonzero(rng));
  return chal;
}

PossessionProof prove(const PublicKey& pk, std::span<const ProverInput> inputs,
                      std::span<const Scalar> masks) {
  const std::size_t s = pk.s();
  if (masks.size() != s) fail(Errc::InvalidArgument, "need one mask per sector");
  PossessionProof proof;
  std::vector<Scalar> b(masks.begin(), masks.end());
  std::vector<G1> tags;
  std::vector<Scalar> coeffs;
  for (const auto& in : inputs) {
    require_sectors(pk, *in.block);
    for (std::size_t j = 0; j < s; ++j) b[j] += (*in.block)[j] * in.v;
    tags.push_back(*in.tag);
    coeffs.push_back(in.v);
  }
  proof.c = multi_pow(tags, coeffs);
  proof.R.reserve(s);
  proof.B.reserve(s);
  for (std::size_t j = 0; j < s; ++j) {
    proof.R.push_back(pk.h[j].pow(masks[j]));
    proof.B.push_back(pk.h[j].pow(b[j]));
  }
  return proof;
}

PossessionProof gen_proof(const PublicKey& pk, const ServerStore& store, const Challenge& chal,
                          SeededRng& rng) {
  auto masks = draw(pk.s(), rng);
  return gen_proof_with_masks(pk, store, chal, masks);
}

PossessionProof gen_proof_with_masks(const PublicKey& pk, const ServerStore& store,
                                     const Challenge& chal, std::span<const Scalar> masks) {
  chal.validate();
  std::vector<ProverInput> inputs;
  inputs.reserve(chal.pairs.size());
  for (const auto& [rank, v] : chal.pairs) {
    auto b = store.blocks.find(rank);
    auto t = store.tags.find(rank);
    if (b == store.blocks.end() || t == store.tags.end()) {
      fail(Errc::UnknownRank, "rank " + rank.to_string() + " not stored");
    }
    inputs.push_back({&b->second, &t->second, v});
  }
  return prove(pk, inputs, masks);
}

bool check_proof(const PublicKey& pk, const Challenge& chal, const PossessionProof& proof) {
  chal.validate();
  if (proof.R.size() != pk.s() || proof.B.size() != pk.s()) {
    fail(Errc::MalformedProof, "proof vectors must have length s");
  }
  PairingEquation eq;
  eq.lhs(proof.c, pk.g2a).lhs(product(proof.R), pk.ctx.g2).rhs(product(proof.B), pk.ctx.g2);
  return eq.holds();
}

UpdateProof prove_update(const PublicKey& pk, const Block& block, const G1& tag,
                         std::span<const Scalar> masks, const Scalar& w) {
  require_sectors(pk, block);
  if (masks.size() != pk.s()) fail(Errc::InvalidArgument, "need one mask per sector");
  UpdateProof proof;
  proof.w = w;
  proof.U.reserve(pk.s());
  proof.C.reserve(pk.s());
  for (std::size_t j = 0; j < pk.s(); ++j) {
    proof.U.push_back(pk.h[j].pow(masks[j]));
    proof.C.push_back(pk.h[j].pow(block[j] * w + masks[j]));
  }
  proof.d = tag.pow(w);
  return proof;
}

UpdateProof perform_update(const PublicKey& pk, ServerStore& store, const UpdateRequest& req,
                           SeededRng& rng) {
  const bool exists = store.blocks.contains(req.rank);
  if (req.kind == OpKind::Insert) {
    if (exists) fail(Errc::RankOccupied, "rank " + req.rank.to_string() + " already stored");
    if (req.rank == Rank{}) fail(Errc::InvalidArgument, "rank 0 is reserved");
  } else if (!exists) {
    fail(Errc::RankNotFound, "rank " + req.rank.to_string());
  }
  if (req.kind != OpKind::Delete) {
    if (!req.block || !req.tag) fail(Errc::InvalidArgument, "insert/modify need a block and a tag");
    require_sectors(pk, *req.block);
  }

  auto masks = draw(pk.s(), rng);
  Scalar w = Scalar::random_nonzero(rng);

  if (req.kind == OpKind::Delete) {
    auto proof = prove_update(pk, store.blocks.at(req.rank), store.tags.at(req.rank), masks, w);
    store.blocks.erase(req.rank);
    store.tags.erase(req.rank);
    return proof;
  }
  store.blocks.insert_or_assign(req.rank, *req.block);
  store.tags.insert_or_assign(req.rank, *req.tag);
  return prove_update(pk, *req.block, *req.tag, masks, w);
}

bool check_update(const PublicKey& pk, const UpdateProof& proof) {
  if (proof.U.size() != pk.s() || proof.C.size() != pk.s()) {
    fail(Errc::MalformedProof, "update proof vectors must have length s");
  }
  if (proof.w.is_zero()) fail(Errc::MalformedProof, "zero w");
  PairingEquation eq;
  eq.lhs(proof.d, pk.g2a).lhs(product(proof.U), pk.ctx.g2).rhs(product(proof.C), pk.ctx.g2);
  return eq.holds();
}

}  // namespace original

// ---------------------------------------------------------------- codecs

namespace {

void write_g1s(wire::Writer& w, const std::vector<G1>& xs) {
  w.count(xs.size());
  for (const auto& x : xs) w.g1(x);
}

std::vector<G1> read_g1s(wire::Reader& r) {
  std::vector<G1> xs(r.count(4 + G1::kEncodedSize));
  for (auto& x : xs) x = r.g1();
  return xs;
}

}  // namespace

void write_public_key(wire::Writer& w, const PublicKey& pk) {
  w.str(pk.ctx.curve);
  write_g1s(w, pk.h);
  w.g2(pk.g2a);
}

PublicKey read_public_key(wire::Reader& r) {
  auto curve = r.str();
  auto ctx = group_gen(128);
  if (curve != ctx.curve) fail(Errc::BadEncoding, "unknown curve '" + curve + "'");
  PublicKey pk{.ctx = std::move(ctx), .h = read_g1s(r), .g2a = r.g2()};
  if (pk.h.empty()) fail(Errc::BadEncoding, "public key without generators");
  return pk;
}

void write_block(wire::Writer& w, const Block& block) {
  w.count(block.size());
  for (const auto& x : block) w.scalar(x);
}

Block read_block(wire::Reader& r) {
  Block block(r.count(4 + Scalar::kEncodedSize));
  for (auto& x : block) x = r.scalar();
  return block;
}

void write_challenge(wire::Writer& w, const Challenge& chal) {
  w.count(chal.pairs.size());
  for (const auto& [rank, v] : chal.pairs) {
    write_rank(w, rank);
    w.scalar(v);
  }
}

Challenge read_challenge(wire::Reader& r) {
  Challenge chal;
  const std::size_t n = r.count(8);
  chal.pairs.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Rank rank = read_rank(r);
    chal.pairs.emplace_back(std::move(rank), r.scalar());
  }
  return chal;
}

void write_possession_proof(wire::Writer& w, const PossessionProof& p) {
  write_g1s(w, p.R);
  write_g1s(w, p.B);
  w.g1(p.c);
}

PossessionProof read_possession_proof(wire::Reader& r) {
  PossessionProof p;
  p.R = read_g1s(r);
  p.B = read_g1s(r);
  p.c = r.g1();
  return p;
}

void write_update_proof(wire::Writer& w, const UpdateProof& p) {
  write_g1s(w, p.U);
  write_g1s(w, p.C);
  w.g1(p.d).scalar(p.w);
}

UpdateProof read_update_proof(wire::Reader& r) {
  UpdateProof p;
  p.U = read_g1s(r);
  p.C = read_g1s(r);
  p.d = r.g1();
  p.w = r.scalar();
  return p;
}

void write_update_request(wire::Writer& w, const UpdateRequest& req) {
  w.u8(static_cast<std::uint8_t>(req.kind));
  write_rank(w, req.rank);
  w.u8(req.block ? 1 : 0);
  if (req.block) write_block(w, *req.block);
  w.u8(req.tag ? 1 : 0);
  if (req.tag) w.g1(*req.tag);
}

UpdateRequest read_update_request(wire::Reader& r) {
  UpdateRequest req;
  const auto kind = r.u8();
  if (kind > 2) fail(Errc::BadEncoding, "unknown operation kind");
  req.kind = static_cast<OpKind>(kind);
  req.rank = read_rank(r);
  if (r.u8()) req.block = read_block(r);
  if (r.u8()) req.tag = r.g1();
  return req;
}

}  // namespace dpdp
