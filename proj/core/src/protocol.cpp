#include "dpdp/protocol.hpp"

#include <nlohmann/json.hpp>

#include "dpdp/error.hpp"

namespace dpdp::protocol {

std::string_view to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::Original: return "original";
    case Scheme::Iht: return "iht";
    case Scheme::Mht: return "mht";
  }
  return "?";
}

Scheme parse_scheme(std::string_view text) {
  if (text == "original") return Scheme::Original;
  if (text == "iht") return Scheme::Iht;
  if (text == "mht") return Scheme::Mht;
  fail(Errc::InvalidArgument, "unknown scheme '" + std::string(text) + "'");
}

std::string_view to_string(Party party) {
  switch (party) {
    case Party::Client: return "client";
    case Party::Server: return "server";
    case Party::Tpa: return "tpa";
  }
  return "?";
}

std::string_view to_string(MessageType type) {
  switch (type) {
    case MessageType::Upload: return "Upload";
    case MessageType::UploadAck: return "UploadAck";
    case MessageType::UpdateRequest: return "UpdateRequest";
    case MessageType::AaiResponse: return "AaiResponse";
    case MessageType::UpdateInfo: return "UpdateInfo";
    case MessageType::UpdateAck: return "UpdateAck";
    case MessageType::Challenge: return "Challenge";
    case MessageType::ProofResponse: return "ProofResponse";
    case MessageType::Verdict: return "Verdict";
  }
  return "?";
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Accept: return "accept";
    case Verdict::Reject: return "reject";
    case Verdict::Abort: return "abort";
  }
  return "?";
}

bool legal(Scheme scheme, MessageType type, Party from, Party to) {
  using P = Party;
  const bool mht = scheme == Scheme::Mht;
  auto is = [&](P f, P t) { return from == f && to == t; };
  switch (type) {
    case MessageType::Upload: return is(P::Client, P::Server) || is(P::Client, P::Tpa);
    case MessageType::UploadAck: return is(P::Server, P::Client);
    case MessageType::UpdateRequest: return is(P::Client, P::Server);
    case MessageType::AaiResponse: return mht && is(P::Server, P::Client);
    case MessageType::UpdateInfo: return is(P::Client, P::Tpa) || (mht && is(P::Client, P::Server));
    case MessageType::UpdateAck: return mht ? is(P::Server, P::Client) : is(P::Server, P::Tpa);
    case MessageType::Challenge: return is(P::Tpa, P::Server);
    case MessageType::ProofResponse: return is(P::Server, P::Tpa);
    case MessageType::Verdict: return is(P::Tpa, P::Client);
  }
  return false;
}

// ---------------------------------------------------------------- transport

void LocalTransport::send(Message msg) {
  queues_[msg.env.receiver].push_back(std::move(msg));
}

Message LocalTransport::receive(Party receiver) {
  auto& q = queues_[receiver];
  if (q.empty()) fail(Errc::BadEncoding, "no message queued for " + std::string(to_string(receiver)));
  Message m = std::move(q.front());
  q.pop_front();
  return m;
}

void Transcript::record(const Message& msg) {
  records_.push_back({msg.env.seq, msg.env.sender, msg.env.receiver, msg.env.scheme, msg.env.file_id,
                      msg.type, sha256(msg.payload), msg.payload.size()});
}

std::string Transcript::to_jsonl(std::size_t from) const {
  std::string out;
  for (std::size_t i = from; i < records_.size(); ++i) {
    const auto& r = records_[i];
    nlohmann::ordered_json j;
    j["seq"] = r.seq;
    j["sender"] = to_string(r.sender);
    j["receiver"] = to_string(r.receiver);
    j["scheme"] = to_string(r.scheme);
    j["file_id"] = r.file_id;
    j["type"] = to_string(r.type);
    j["payload_sha256"] = to_hex(r.payload_sha256);
    j["payload_size"] = r.payload_size;
    out += j.dump();
    out += '\n';
  }
  return out;
}

Digest Transcript::digest(std::size_t from) const {
  return sha256(as_bytes(to_jsonl(from)));
}

// ---------------------------------------------------------------- states

ClientKeys generate_keys(std::size_t s, SeededRng& rng) {
  return mht::keygen(group_gen(128), s, rng);
}

std::size_t live_blocks(const Parties& p) {
  if (p.server.scheme == Scheme::Mht) return p.client.mht.n;
  return p.client.table.live_count();
}

// ---------------------------------------------------------------- honest server

UpdateProof ServerBehavior::on_update(const PublicKey& pk, ServerStore& store,
                                      const UpdateRequest& req, SeededRng& rng) {
  return original::perform_update(pk, store, req, rng);
}

PossessionProof ServerBehavior::on_challenge(const PublicKey& pk, const ServerStore& store,
                                             const Challenge& chal, SeededRng& rng) {
  return original::gen_proof(pk, store, chal, rng);
}

mht::ServerState ServerBehavior::on_mht_upload(mht::UploadPackage package) {
  return mht::accept_upload(std::move(package));
}

mht::Aai ServerBehavior::on_mht_request(const mht::ServerState& st, const mht::Request& req) {
  return mht::select_aai(st, req);
}

Digest ServerBehavior::on_mht_update(mht::ServerState& st, const mht::Request& req,
                                     const mht::UpdateInfo& info) {
  return mht::apply_update(st, req, info);
}

mht::ProofBundle ServerBehavior::on_mht_challenge(const PublicKey& pk, const mht::ServerState& st,
                                                  const Challenge& chal, SeededRng& rng) {
  return mht::gen_proof(pk, st, chal, rng);
}

// ---------------------------------------------------------------- report

std::string AuditReport::to_json() const {
  nlohmann::ordered_json j;
  j["format"] = "dpdp-report/1";
  j["file_id"] = file_id;
  j["scheme"] = to_string(scheme);
  j["operation"] = operation;
  j["verdict"] = to_string(verdict);
  j["reason"] = reason;
  if (challenge) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& [rank, v] : challenge->pairs) {
      arr.push_back({{"rank", rank.to_string()}, {"v", to_hex(v.encode())}});
    }
    j["challenge"] = std::move(arr);
  }
  j["first_seq"] = first_seq;
  j["last_seq"] = last_seq;
  j["transcript_sha256"] = to_hex(transcript_sha256);
  return j.dump();
}

// ---------------------------------------------------------------- payloads

namespace {

void write_verdict(wire::Writer& w, Verdict v, const std::string& reason) {
  w.u8(static_cast<std::uint8_t>(v)).str(reason);
}

std::pair<Verdict, std::string> read_verdict(wire::Reader& r) {
  const auto v = r.u8();
  if (v > 2) fail(Errc::BadEncoding, "bad verdict");
  auto reason = r.str();
  r.expect_done();
  return {static_cast<Verdict>(v), std::move(reason)};
}

void write_store(wire::Writer& w, const ServerStore& store) {
  w.count(store.blocks.size());
  for (const auto& [rank, block] : store.blocks) {
    write_rank(w, rank);
    write_block(w, block);
    w.g1(store.tags.at(rank));
  }
}

ServerStore read_store(wire::Reader& r) {
  ServerStore store;
  const std::size_t n = r.count(8);
  for (std::size_t i = 0; i < n; ++i) {
    Rank rank = read_rank(r);
    if (!store.blocks.empty() && !(store.blocks.rbegin()->first < rank)) {
      fail(Errc::BadEncoding, "store ranks not strictly increasing");
    }
    Block block = read_block(r);
    G1 tag = r.g1();
    store.blocks.emplace(rank, std::move(block));
    store.tags.emplace(std::move(rank), tag);
  }
  return store;
}

template <class F>
auto decode(const Bytes& payload, F&& f) {
  wire::Reader r(payload);
  auto out = f(r);
  r.expect_done();
  return out;
}

template <class F>
Bytes encode(F&& f) {
  wire::Writer w;
  f(w);
  return std::move(w).take();
}

}  // namespace

// ---------------------------------------------------------------- deployment

Deployment::Deployment(ClientKeys keys, SeededRng rng, std::shared_ptr<ServerBehavior> behavior,
                       std::unique_ptr<Transport> transport)
    : keys_(std::move(keys)),
      rng_(std::move(rng)),
      behavior_(behavior ? std::move(behavior) : std::make_shared<ServerBehavior>()),
      transport_(transport ? std::move(transport) : std::make_unique<LocalTransport>()) {}

void Deployment::set_behavior(std::shared_ptr<ServerBehavior> behavior) {
  behavior_ = behavior ? std::move(behavior) : std::make_shared<ServerBehavior>();
}

void Deployment::post(Party from, Party to, Scheme scheme, const std::string& file_id,
                      MessageType type, Bytes payload) {
  if (!legal(scheme, type, from, to)) {
    fail(Errc::InvalidArgument, std::string(to_string(type)) + " may not flow from " +
                                    std::string(to_string(from)) + " to " + std::string(to_string(to)));
  }
  Message msg{{next_seq_++, from, to, scheme, file_id}, type, std::move(payload)};
  transcript_.record(msg);
  transport_->send(std::move(msg));
}

Bytes Deployment::take(Party to, MessageType type) {
  Message msg = transport_->receive(to);
  if (msg.type != type) {
    fail(Errc::BadEncoding, "expected " + std::string(to_string(type)) + ", got " +
                                std::string(to_string(msg.type)));
  }
  return std::move(msg.payload);
}

AuditReport Deployment::begin(const std::string& file_id, Scheme scheme, std::string operation) const {
  AuditReport r;
  r.file_id = file_id;
  r.scheme = scheme;
  r.operation = std::move(operation);
  r.first_seq = next_seq_;
  return r;
}

void Deployment::finish(AuditReport& report, std::size_t first_record) const {
  report.last_seq = next_seq_ - 1;
  report.transcript_sha256 = transcript_.digest(first_record);
}

void Deployment::adopt(Parties parties) {
  const std::string id = parties.client.file_id;
  if (files_.contains(id)) fail(Errc::DuplicateFileId, id);
  files_.emplace(id, std::move(parties));
}

Parties& Deployment::parties(const std::string& file_id) {
  auto it = files_.find(file_id);
  if (it == files_.end()) fail(Errc::UnknownFileId, file_id);
  return it->second;
}

const Parties& Deployment::parties(const std::string& file_id) const {
  auto it = files_.find(file_id);
  if (it == files_.end()) fail(Errc::UnknownFileId, file_id);
  return it->second;
}

std::vector<std::string> Deployment::file_ids() const {
  std::vector<std::string> out;
  for (const auto& [id, p] : files_) out.push_back(id);
  return out;
}

AuditReport Deployment::upload(const std::string& file_id, Scheme scheme, ByteView file) {
  if (files_.contains(file_id)) fail(Errc::DuplicateFileId, file_id);
  const std::size_t mark = transcript_.records().size();
  AuditReport report = begin(file_id, scheme, "upload");
  const PublicKey& pk = keys_.pub.pk;
  FileMatrix matrix = chunk_file(file, pk.s());
  const std::size_t n = matrix.n();

  Parties p;
  p.client.scheme = p.server.scheme = p.tpa.scheme = scheme;
  p.client.file_id = p.server.file_id = p.tpa.file_id = file_id;
  p.client.keys = keys_;

  if (scheme != Scheme::Mht) {
    ServerStore store = scheme == Scheme::Original ? original::make_store(pk, keys_.sec.sk, matrix)
                                                   : iht::make_store(pk, keys_.sec.sk, matrix);
    post(Party::Client, Party::Server, scheme, file_id, MessageType::Upload, encode([&](auto& w) {
           write_public_key(w, pk);
           w.u64(matrix.original_length);
           write_store(w, store);
         }));
    {
      auto payload = take(Party::Server, MessageType::Upload);
      wire::Reader r(payload);
      p.server.pk = read_public_key(r);
      p.server.original_length = r.u64();
      p.server.store = read_store(r);
      r.expect_done();
    }
    post(Party::Server, Party::Client, scheme, file_id, MessageType::UploadAck,
         encode([&](auto& w) { w.u64(p.server.store.blocks.size()); }));
    const auto stored = decode(take(Party::Client, MessageType::UploadAck), [](auto& r) { return r.u64(); });
    if (stored != n) {
      report.verdict = Verdict::Abort;
      report.reason = "server acknowledged " + std::to_string(stored) + " of " + std::to_string(n) + " blocks";
      finish(report, mark);
      return report;
    }
    p.client.table = iht::IndexHashTable::initial(n);
    p.client.upper_bound = Rank::integer(n + 1);
    post(Party::Client, Party::Tpa, scheme, file_id, MessageType::Upload, encode([&](auto& w) {
           write_public_key(w, pk);
           iht::write_table(w, p.client.table);
         }));
    {
      auto payload = take(Party::Tpa, MessageType::Upload);
      wire::Reader r(payload);
      p.tpa.pk = read_public_key(r);
      p.tpa.table = iht::read_table(r);
      r.expect_done();
    }
  } else {
    auto prepared = mht::prepare_upload(keys_, matrix);
    post(Party::Client, Party::Server, scheme, file_id, MessageType::Upload, encode([&](auto& w) {
           write_public_key(w, pk);
           w.u64(matrix.original_length);
           mht::write_upload_package(w, prepared.package);
         }));
    {
      auto payload = take(Party::Server, MessageType::Upload);
      wire::Reader r(payload);
      p.server.pk = read_public_key(r);
      p.server.original_length = r.u64();
      auto package = mht::read_upload_package(r);
      r.expect_done();
      p.server.mht = behavior_->on_mht_upload(std::move(package));
    }
    post(Party::Server, Party::Client, scheme, file_id, MessageType::UploadAck,
         encode([&](auto& w) { mht::write_digest(w, p.server.mht->tree.root()); }));
    const Digest server_root =
        decode(take(Party::Client, MessageType::UploadAck), [](auto& r) { return mht::read_digest(r); });
    try {
      p.client.mht = mht::confirm_upload(keys_.pub, prepared, server_root);
    } catch (const Error& e) {
      report.verdict = Verdict::Abort;
      report.reason = e.what();
      finish(report, mark);
      return report;
    }
    post(Party::Client, Party::Tpa, scheme, file_id, MessageType::Upload, encode([&](auto& w) {
           mht::write_public_keys(w, keys_.pub);
           w.u64(n);
           mht::write_digest(w, p.client.mht.root);
         }));
    {
      auto payload = take(Party::Tpa, MessageType::Upload);
      wire::Reader r(payload);
      auto pub = mht::read_public_keys(r);
      p.tpa.pk = std::move(pub.pk);
      p.tpa.pk_ss = pub.pk_ss;
      p.tpa.n = static_cast<std::size_t>(r.u64());
      p.tpa.root = mht::read_digest(r);
      r.expect_done();
    }
  }
  files_.emplace(file_id, std::move(p));
  finish(report, mark);
  return report;
}

AuditReport Deployment::update(const std::string& file_id, OpKind kind, std::size_t position,
                               ByteView block_bytes) {
  Parties& p = parties(file_id);
  const std::size_t live = live_blocks(p);
  const std::size_t hi = kind == OpKind::Insert ? live + 1 : live;
  if (position == 0 || position > hi) {
    fail(Errc::InvalidPosition, "position " + std::to_string(position) + " outside [1, " +
                                    std::to_string(hi) + "]");
  }
  if (kind == OpKind::Delete && live == 1) fail(Errc::InvalidPosition, "cannot delete the last block");
  std::optional<Block> block;
  if (kind != OpKind::Delete) block = block_from_bytes(block_bytes, keys_.pub.pk.s());
  return p.server.scheme == Scheme::Mht ? update_mht(p, kind, position, block ? &*block : nullptr)
                                        : update_ranked(p, kind, position, block ? &*block : nullptr);
}

AuditReport Deployment::update_ranked(Parties& p, OpKind kind, std::size_t position,
                                      const Block* block) {
  const Scheme scheme = p.server.scheme;
  const std::string& id = p.client.file_id;
  const std::size_t mark = transcript_.records().size();
  AuditReport report = begin(id, scheme, "update");
  const Parties snapshot = p;
  const PublicKey& pk = keys_.pub.pk;

  UpdateRequest req;
  req.kind = kind;
  req.rank = kind == OpKind::Insert ? p.client.table.insertion_rank(position, p.client.upper_bound)
                                    : p.client.table.live_rank_at(position);
  if (block) {
    req.block = *block;
    if (scheme == Scheme::Original) {
      req.tag = original::tag_block(pk, keys_.sec.sk, *block);
    } else {
      auto [rank, vnb] = iht::expected_entry(p.client.table, kind, req.rank);
      req.tag = iht::tag_block(pk, keys_.sec.sk, *block, rank, vnb);
    }
  }

  auto fail_with = [&](Verdict v, std::string reason) {
    p = snapshot;
    report.verdict = v;
    report.reason = std::move(reason);
    finish(report, mark);
    return report;
  };

  post(Party::Client, Party::Server, scheme, id, MessageType::UpdateRequest,
       encode([&](auto& w) { write_update_request(w, req); }));
  UpdateProof proof;
  try {
    auto got = decode(take(Party::Server, MessageType::UpdateRequest),
                      [](auto& r) { return read_update_request(r); });
    proof = behavior_->on_update(p.server.pk, p.server.store, got, rng_);
  } catch (const Error& e) {
    return fail_with(Verdict::Abort, std::string("server: ") + e.what());
  }

  post(Party::Client, Party::Tpa, scheme, id, MessageType::UpdateInfo, encode([&](auto& w) {
         w.u8(static_cast<std::uint8_t>(req.kind));
         write_rank(w, req.rank);
       }));
  auto [info_kind, info_rank] = decode(take(Party::Tpa, MessageType::UpdateInfo), [](auto& r) {
    const auto k = r.u8();
    if (k > 2) fail(Errc::BadEncoding, "bad operation kind");
    return std::pair{static_cast<OpKind>(k), read_rank(r)};
  });

  post(Party::Server, Party::Tpa, scheme, id, MessageType::UpdateAck,
       encode([&](auto& w) { write_update_proof(w, proof); }));
  Verdict verdict = Verdict::Reject;
  std::string reason;
  try {
    auto got = decode(take(Party::Tpa, MessageType::UpdateAck), [](auto& r) { return read_update_proof(r); });
    bool ok = false;
    if (scheme == Scheme::Original) {
      ok = original::check_update(p.tpa.pk, got);
    } else {
      auto [rank, vnb] = iht::expected_entry(p.tpa.table, info_kind, info_rank);
      ok = iht::check_update(p.tpa.pk, got, rank, vnb);
    }
    if (ok) {
      p.tpa.table = iht::apply(p.tpa.table, info_kind, info_rank);
      verdict = Verdict::Accept;
    } else {
      reason = "update proof does not verify";
    }
  } catch (const Error& e) {
    reason = e.what();
  }

  post(Party::Tpa, Party::Client, scheme, id, MessageType::Verdict,
       encode([&](auto& w) { write_verdict(w, verdict, reason); }));
  auto [seen, why] = decode(take(Party::Client, MessageType::Verdict), [](auto& r) { return read_verdict(r); });
  if (seen != Verdict::Accept) return fail_with(seen, why);
  p.client.table = iht::apply(p.client.table, req.kind, req.rank);
  finish(report, mark);
  return report;
}

AuditReport Deployment::update_mht(Parties& p, OpKind kind, std::size_t position, const Block* block) {
  const Scheme scheme = Scheme::Mht;
  const std::string& id = p.client.file_id;
  const std::size_t mark = transcript_.records().size();
  AuditReport report = begin(id, scheme, "update");
  const Parties snapshot = p;
  const mht::Request req{kind, position};

  auto fail_with = [&](Verdict v, std::string reason) {
    p = snapshot;
    report.verdict = v;
    report.reason = std::move(reason);
    finish(report, mark);
    return report;
  };

  post(Party::Client, Party::Server, scheme, id, MessageType::UpdateRequest,
       encode([&](auto& w) { mht::write_request(w, req); }));
  mht::Request server_req;
  mht::Aai aai;
  try {
    server_req = decode(take(Party::Server, MessageType::UpdateRequest),
                        [](auto& r) { return mht::read_request(r); });
    aai = behavior_->on_mht_request(*p.server.mht, server_req);
  } catch (const Error& e) {
    return fail_with(Verdict::Abort, std::string("server: ") + e.what());
  }

  post(Party::Server, Party::Client, scheme, id, MessageType::AaiResponse,
       encode([&](auto& w) { mht::write_aai(w, aai); }));
  mht::PendingUpdate pending;
  try {
    auto got = decode(take(Party::Client, MessageType::AaiResponse), [](auto& r) { return mht::read_aai(r); });
    std::optional<Block> b;
    if (block) b = *block;
    pending = mht::prepare_update(keys_, p.client.mht, req, got, b);
  } catch (const Error& e) {
    return fail_with(Verdict::Abort, std::string("client: ") + e.what());
  }

  post(Party::Client, Party::Server, scheme, id, MessageType::UpdateInfo,
       encode([&](auto& w) { mht::write_update_info(w, pending.info); }));
  Digest server_root{};
  try {
    auto info = decode(take(Party::Server, MessageType::UpdateInfo),
                       [](auto& r) { return mht::read_update_info(r); });
    server_root = behavior_->on_mht_update(*p.server.mht, server_req, info);
  } catch (const Error& e) {
    return fail_with(Verdict::Abort, std::string("server: ") + e.what());
  }

  post(Party::Server, Party::Client, scheme, id, MessageType::UpdateAck,
       encode([&](auto& w) { mht::write_digest(w, server_root); }));
  try {
    auto root = decode(take(Party::Client, MessageType::UpdateAck), [](auto& r) { return mht::read_digest(r); });
    mht::confirm_update(keys_.pub, p.client.mht, pending, root);
  } catch (const Error& e) {
    return fail_with(Verdict::Reject, e.what());
  }

  post(Party::Client, Party::Tpa, scheme, id, MessageType::UpdateInfo,
       encode([&](auto& w) {
         mht::write_request(w, req);
         mht::write_digest(w, p.client.mht.root);
       }));
  auto [tpa_req, tpa_root] = decode(take(Party::Tpa, MessageType::UpdateInfo), [](auto& r) {
    auto got = mht::read_request(r);
    return std::pair(got, mht::read_digest(r));
  });
  p.tpa.root = tpa_root;
  if (tpa_req.kind == OpKind::Insert) ++p.tpa.n;
  if (tpa_req.kind == OpKind::Delete) --p.tpa.n;
  finish(report, mark);
  return report;
}

AuditReport Deployment::audit(const std::string& file_id, std::size_t chal_size) {
  Parties& p = parties(file_id);
  const Scheme scheme = p.server.scheme;
  const std::size_t mark = transcript_.records().size();
  AuditReport report = begin(file_id, scheme, "audit");

  std::vector<Rank> ranks;
  if (scheme == Scheme::Mht) {
    for (std::size_t i = 1; i <= p.tpa.n; ++i) ranks.push_back(Rank::integer(i));
  } else {
    ranks = p.tpa.table.live_ranks();
  }
  Challenge chal = original::gen_challenge(ranks, std::min(chal_size, ranks.size()), rng_);
  report.challenge = chal;

  post(Party::Tpa, Party::Server, scheme, file_id, MessageType::Challenge,
       encode([&](auto& w) { write_challenge(w, chal); }));
  Bytes response;
  try {
    auto got = decode(take(Party::Server, MessageType::Challenge), [](auto& r) { return read_challenge(r); });
    if (scheme == Scheme::Mht) {
      auto bundle = behavior_->on_mht_challenge(p.server.pk, *p.server.mht, got, rng_);
      response = encode([&](auto& w) { mht::write_bundle(w, bundle); });
    } else {
      auto proof = behavior_->on_challenge(p.server.pk, p.server.store, got, rng_);
      response = encode([&](auto& w) { write_possession_proof(w, proof); });
    }
  } catch (const Error& e) {
    report.verdict = Verdict::Abort;
    report.reason = std::string("server: ") + e.what();
    finish(report, mark);
    return report;
  }

  post(Party::Server, Party::Tpa, scheme, file_id, MessageType::ProofResponse, std::move(response));
  Verdict verdict = Verdict::Reject;
  std::string reason;
  try {
    auto payload = take(Party::Tpa, MessageType::ProofResponse);
    if (scheme == Scheme::Mht) {
      auto bundle = decode(payload, [](auto& r) { return mht::read_bundle(r); });
      auto res = mht::check_proof({p.tpa.pk, *p.tpa.pk_ss}, chal, bundle, p.tpa.n, p.tpa.root);
      if (res.accepted) {
        verdict = Verdict::Accept;
      } else {
        reason = std::string("failed at ") + std::string(mht::to_string(*res.failed_stage));
      }
    } else {
      auto proof = decode(payload, [](auto& r) { return read_possession_proof(r); });
      const bool ok = scheme == Scheme::Original ? original::check_proof(p.tpa.pk, chal, proof)
                                                 : iht::check_proof(p.tpa.pk, chal, proof, p.tpa.table);
      if (ok) {
        verdict = Verdict::Accept;
      } else {
        reason = "possession proof does not verify";
      }
    }
  } catch (const Error& e) {
    reason = e.what();
  }

  post(Party::Tpa, Party::Client, scheme, file_id, MessageType::Verdict,
       encode([&](auto& w) { write_verdict(w, verdict, reason); }));
  auto [seen, why] = decode(take(Party::Client, MessageType::Verdict), [](auto& r) { return read_verdict(r); });
  report.verdict = seen;
  report.reason = why;
  finish(report, mark);
  return report;
}

// ---------------------------------------------------------------- encodings

namespace {

template <std::size_t N>
void read_into(wire::Reader& r, std::array<std::uint8_t, N>& out) {
  auto raw = r.raw(N);
  std::copy(raw.begin(), raw.end(), out.begin());
}

Scheme read_scheme(wire::Reader& r) {
  const auto v = r.u8();
  if (v > 2) fail(Errc::BadEncoding, "bad scheme");
  return static_cast<Scheme>(v);
}

void write_mht_server(wire::Writer& w, const mht::ServerState& st) {
  w.count(st.blocks.size());
  for (std::size_t i = 0; i < st.blocks.size(); ++i) {
    write_block(w, st.blocks[i]);
    w.g1(st.tags[i]);
  }
  mht::write_hash_key(w, st.hkey);
  mht::write_signed_root(w, st.signed_root);
}

}  // namespace

void write_client_keys(wire::Writer& w, const ClientKeys& keys) {
  mht::write_public_keys(w, keys.pub);
  w.scalar(keys.sec.sk.a);
  w.raw(keys.sec.sk_ss.bytes);
  mht::write_hash_key(w, keys.sec.hkey);
}

ClientKeys read_client_keys(wire::Reader& r) {
  ClientKeys k;
  k.pub = mht::read_public_keys(r);
  k.sec.sk.a = r.scalar();
  read_into(r, k.sec.sk_ss.bytes);
  k.sec.hkey = mht::read_hash_key(r);
  return k;
}

void write_client_state(wire::Writer& w, const ClientState& c) {
  w.u8(static_cast<std::uint8_t>(c.scheme)).str(c.file_id);
  iht::write_table(w, c.table);
  write_rank(w, c.upper_bound);
  mht::write_digest(w, c.mht.root);
  w.u64(c.mht.n);
}

ClientState read_client_state(wire::Reader& r, const ClientKeys& keys) {
  ClientState c;
  c.scheme = read_scheme(r);
  c.file_id = r.str();
  c.keys = keys;
  c.table = iht::read_table(r);
  c.upper_bound = read_rank(r);
  c.mht.root = mht::read_digest(r);
  c.mht.n = static_cast<std::size_t>(r.u64());
  return c;
}

void write_tpa_state(wire::Writer& w, const TpaState& t) {
  w.u8(static_cast<std::uint8_t>(t.scheme)).str(t.file_id);
  write_public_key(w, t.pk);
  w.u8(t.pk_ss ? 1 : 0);
  if (t.pk_ss) w.raw(t.pk_ss->bytes);
  iht::write_table(w, t.table);
  w.u64(t.n);
  mht::write_digest(w, t.root);
}

TpaState read_tpa_state(wire::Reader& r) {
  TpaState t;
  t.scheme = read_scheme(r);
  t.file_id = r.str();
  t.pk = read_public_key(r);
  const auto has = r.u8();
  if (has > 1) fail(Errc::BadEncoding, "bad flag");
  if (has) {
    SigVerifyKey vk;
    read_into(r, vk.bytes);
    t.pk_ss = vk;
  }
  t.table = iht::read_table(r);
  t.n = static_cast<std::size_t>(r.u64());
  t.root = mht::read_digest(r);
  return t;
}

void write_server_state(wire::Writer& w, const ServerState& s) {
  w.u8(static_cast<std::uint8_t>(s.scheme)).str(s.file_id);
  write_public_key(w, s.pk);
  w.u64(s.original_length);
  write_store(w, s.store);
  w.u8(s.mht ? 1 : 0);
  if (s.mht) write_mht_server(w, *s.mht);
}

ServerState read_server_state(wire::Reader& r) {
  ServerState s;
  s.scheme = read_scheme(r);
  s.file_id = r.str();
  s.pk = read_public_key(r);
  s.original_length = r.u64();
  s.store = read_store(r);
  const auto has = r.u8();
  if (has > 1) fail(Errc::BadEncoding, "bad flag");
  if (has) {
    mht::ServerState st;
    const std::size_t n = r.count(8);
    for (std::size_t i = 0; i < n; ++i) {
      st.blocks.push_back(read_block(r));
      st.tags.push_back(r.g1());
    }
    st.hkey = mht::read_hash_key(r);
    st.signed_root = mht::read_signed_root(r);
    std::vector<G1> leaves;
    for (const auto& b : st.blocks) leaves.push_back(mht::leaf_digest(st.hkey, b));
    st.tree = MerkleTree::build(std::move(leaves));
    s.mht = std::move(st);
  }
  return s;
}

namespace {

template <class T, class F>
Bytes bytes_of(const T& x, F&& f) {
  wire::Writer w;
  f(w, x);
  return std::move(w).take();
}

}  // namespace

bool operator==(const ClientState& a, const ClientState& b) {
  return bytes_of(a, write_client_state) == bytes_of(b, write_client_state) &&
         bytes_of(a.keys, write_client_keys) == bytes_of(b.keys, write_client_keys);
}

bool operator==(const ServerState& a, const ServerState& b) {
  if (bytes_of(a, write_server_state) != bytes_of(b, write_server_state)) return false;
  return !a.mht || a.mht->tree == b.mht->tree;
}

bool operator==(const TpaState& a, const TpaState& b) {
  return bytes_of(a, write_tpa_state) == bytes_of(b, write_tpa_state);
}

}  // namespace dpdp::protocol
