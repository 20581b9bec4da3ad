#pragma once

// Three-party harness: Client, Server and TPA exchange typed messages over a
// transport. Every message is logged to a transcript; all randomness comes
// from one seeded stream, so equal seeds give byte-identical transcripts.

#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dpdp/iht.hpp"
#include "dpdp/mht.hpp"
#include "dpdp/original.hpp"

namespace dpdp::protocol {

enum class Scheme : std::uint8_t { Original = 0, Iht = 1, Mht = 2 };

std::string_view to_string(Scheme scheme);
/// "original", "iht", "mht" (InvalidArgument otherwise).
Scheme parse_scheme(std::string_view text);

enum class Party : std::uint8_t { Client = 0, Server = 1, Tpa = 2 };
std::string_view to_string(Party party);

enum class MessageType : std::uint8_t {
  Upload = 0,
  UploadAck = 1,
  UpdateRequest = 2,
  AaiResponse = 3,
  UpdateInfo = 4,
  UpdateAck = 5,
  Challenge = 6,
  ProofResponse = 7,
  Verdict = 8,
};
std::string_view to_string(MessageType type);

/// Whether `type` may flow from `from` to `to` under `scheme`.
bool legal(Scheme scheme, MessageType type, Party from, Party to);

struct Envelope {
  std::uint64_t seq = 0;
  Party sender = Party::Client;
  Party receiver = Party::Server;
  Scheme scheme = Scheme::Original;
  std::string file_id;
};

struct Message {
  Envelope env;
  MessageType type = MessageType::Upload;
  Bytes payload;  // wire encoding of the typed content
};

class Transport {
 public:
  virtual ~Transport() = default;
  virtual void send(Message msg) = 0;
  /// Next message addressed to `receiver`; BadEncoding when none is queued.
  virtual Message receive(Party receiver) = 0;
};

/// Synchronous in-process queues, one per receiver.
class LocalTransport final : public Transport {
 public:
  void send(Message msg) override;
  Message receive(Party receiver) override;

 private:
  std::map<Party, std::deque<Message>> queues_;
};

struct TranscriptRecord {
  std::uint64_t seq;
  Party sender;
  Party receiver;
  Scheme scheme;
  std::string file_id;
  MessageType type;
  Digest payload_sha256;
  std::size_t payload_size;
};

class Transcript {
 public:
  void record(const Message& msg);
  const std::vector<TranscriptRecord>& records() const { return records_; }
  /// One JSON object per line, records [from, end).
  std::string to_jsonl(std::size_t from = 0) const;
  Digest digest(std::size_t from = 0) const;

 private:
  std::vector<TranscriptRecord> records_;
};

/// Everything the client generates once: pairing key, root-signing key and
/// the H' key. Only the MHT scheme uses the last two.
using ClientKeys = mht::Keys;

ClientKeys generate_keys(std::size_t s, SeededRng& rng);

struct ClientState {
  Scheme scheme = Scheme::Original;
  std::string file_id;
  ClientKeys keys;
  iht::IndexHashTable table;  // Original / IHT: ranks, versions, tombstones
  Rank upper_bound;           // n0 + 1, the virtual bound for appends
  mht::ClientState mht;       // MHT: last signed root and leaf count
};

struct ServerState {
  Scheme scheme = Scheme::Original;
  std::string file_id;
  PublicKey pk;
  std::uint64_t original_length = 0;
  ServerStore store;                   // Original / IHT
  std::optional<mht::ServerState> mht;  // MHT
};

/// Public material only.
struct TpaState {
  Scheme scheme = Scheme::Original;
  std::string file_id;
  PublicKey pk;
  std::optional<SigVerifyKey> pk_ss;  // MHT
  iht::IndexHashTable table;          // Original: live ranks; IHT: the full table
  std::size_t n = 0;                  // MHT leaf count
  Digest root{};                      // MHT root the client last committed
};

struct Parties {
  ClientState client;
  ServerState server;
  TpaState tpa;
};

/// Number of blocks currently stored.
std::size_t live_blocks(const Parties& p);

/// Server-side decisions. The default is honest; attacks override single
/// steps. Each hook sees only server state.
class ServerBehavior {
 public:
  virtual ~ServerBehavior() = default;

  virtual UpdateProof on_update(const PublicKey& pk, ServerStore& store, const UpdateRequest& req,
                                SeededRng& rng);
  virtual PossessionProof on_challenge(const PublicKey& pk, const ServerStore& store,
                                       const Challenge& chal, SeededRng& rng);

  virtual mht::ServerState on_mht_upload(mht::UploadPackage package);
  virtual mht::Aai on_mht_request(const mht::ServerState& st, const mht::Request& req);
  virtual Digest on_mht_update(mht::ServerState& st, const mht::Request& req,
                               const mht::UpdateInfo& info);
  virtual mht::ProofBundle on_mht_challenge(const PublicKey& pk, const mht::ServerState& st,
                                            const Challenge& chal, SeededRng& rng);
};

enum class Verdict : std::uint8_t { Accept = 0, Reject = 1, Abort = 2 };
std::string_view to_string(Verdict v);

struct AuditReport {
  std::string file_id;
  Scheme scheme = Scheme::Original;
  std::string operation;  // upload, update, audit
  std::optional<Challenge> challenge;
  Verdict verdict = Verdict::Accept;
  std::string reason;
  std::uint64_t first_seq = 0;  // logical timestamps
  std::uint64_t last_seq = 0;
  Digest transcript_sha256{};

  bool accepted() const { return verdict == Verdict::Accept; }
  std::string to_json() const;
};

/// One client's files and the harness that runs their sessions.
class Deployment {
 public:
  Deployment(ClientKeys keys, SeededRng rng, std::shared_ptr<ServerBehavior> behavior = {},
             std::unique_ptr<Transport> transport = {});

  /// Tags and ships the file. DuplicateFileId for a known id. A failed MHT
  /// root handshake is reported as an abort and registers nothing.
  AuditReport upload(const std::string& file_id, Scheme scheme, ByteView file);

  /// `position` is 1-based over the live blocks; Insert accepts up to
  /// live + 1. Insert/Modify pack `block_bytes` (at most 31 s bytes) into one
  /// block. InvalidPosition on a bad position or when deleting the last
  /// block. A rejected update leaves all three states as they were.
  AuditReport update(const std::string& file_id, OpKind kind, std::size_t position,
                     ByteView block_bytes = {});

  /// Challenges min(chal_size, live blocks) blocks.
  AuditReport audit(const std::string& file_id, std::size_t chal_size);

  /// Registers previously persisted parties. DuplicateFileId for a known id.
  void adopt(Parties parties);
  bool contains(const std::string& file_id) const { return files_.contains(file_id); }
  Parties& parties(const std::string& file_id);
  const Parties& parties(const std::string& file_id) const;
  std::vector<std::string> file_ids() const;

  const ClientKeys& keys() const { return keys_; }
  const Transcript& transcript() const { return transcript_; }
  SeededRng& rng() { return rng_; }
  void set_behavior(std::shared_ptr<ServerBehavior> behavior);

 private:
  void post(Party from, Party to, Scheme scheme, const std::string& file_id, MessageType type,
            Bytes payload);
  Bytes take(Party to, MessageType type);
  AuditReport begin(const std::string& file_id, Scheme scheme, std::string operation) const;
  void finish(AuditReport& report, std::size_t first_record) const;

  AuditReport update_ranked(Parties& p, OpKind kind, std::size_t position, const Block* block);
  AuditReport update_mht(Parties& p, OpKind kind, std::size_t position, const Block* block);

  ClientKeys keys_;
  SeededRng rng_;
  std::shared_ptr<ServerBehavior> behavior_;
  std::unique_ptr<Transport> transport_;
  Transcript transcript_;
  std::uint64_t next_seq_ = 1;
  std::map<std::string, Parties> files_;
};

// Encodings used by persistence and equality checks.
void write_client_keys(wire::Writer& w, const ClientKeys& keys);
ClientKeys read_client_keys(wire::Reader& r);
/// Client state without its keys.
void write_client_state(wire::Writer& w, const ClientState& c);
ClientState read_client_state(wire::Reader& r, const ClientKeys& keys);
void write_tpa_state(wire::Writer& w, const TpaState& t);
TpaState read_tpa_state(wire::Reader& r);
/// The whole server state in one blob (the store splits it across files).
void write_server_state(wire::Writer& w, const ServerState& s);
ServerState read_server_state(wire::Reader& r);

bool operator==(const ClientState& a, const ClientState& b);
bool operator==(const ServerState& a, const ServerState& b);
bool operator==(const TpaState& a, const TpaState& b);

}  // namespace dpdp::protocol
