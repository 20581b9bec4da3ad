#include "dpdp/store.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>

#include "dpdp/error.hpp"

namespace dpdp::store {

namespace fs = std::filesystem;
using protocol::Scheme;

namespace {

constexpr std::size_t kMagicSize = 8;

constexpr std::string_view kKeysMagic = "DPDPKEYS";
constexpr std::string_view kClientMagic = "DPDPCLNT";
constexpr std::string_view kTpaMagic = "DPDPTPAS";
constexpr std::string_view kMatrixMagic = "DPDPMTRX";
constexpr std::string_view kTagsMagic = "DPDPTAGS";
constexpr std::string_view kMetaMagic = "DPDPMETA";
constexpr std::string_view kTreeMagic = "DPDPTREE";

template <class F>
Bytes encode(F&& f) {
  wire::Writer w;
  f(w);
  return std::move(w).take();
}

}  // namespace

Bytes seal(std::string_view magic, ByteView payload, std::uint8_t version) {
  if (magic.size() != kMagicSize) fail(Errc::InvalidArgument, "magic must be 8 bytes");
  Bytes out(magic.begin(), magic.end());
  out.push_back(version);
  out.insert(out.end(), payload.begin(), payload.end());
  const Digest sum = sha256(out);
  out.insert(out.end(), sum.begin(), sum.end());
  return out;
}

Bytes unseal(ByteView file, std::string_view magic, std::uint8_t version) {
  const std::size_t head = std::min(file.size(), kMagicSize);
  if (!std::equal(file.begin(), file.begin() + static_cast<std::ptrdiff_t>(head), magic.begin())) {
    fail(Errc::BadMagic, "expected " + std::string(magic));
  }
  if (file.size() < kMagicSize + 1 + 32) fail(Errc::ChecksumMismatch, "file truncated");
  if (file[kMagicSize] != version) {
    fail(Errc::VersionMismatch, "format version " + std::to_string(file[kMagicSize]) + ", expected " +
                                    std::to_string(version));
  }
  const auto body = file.first(file.size() - 32);
  const Digest sum = sha256(body);
  if (!std::equal(sum.begin(), sum.end(), file.end() - 32)) fail(Errc::ChecksumMismatch);
  return Bytes(body.begin() + kMagicSize + 1, body.end());
}

Bytes read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::IoError, "cannot open " + path.string());
  Bytes out((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) fail(Errc::IoError, "cannot read " + path.string());
  return out;
}

void write_file_atomic(const fs::path& path, ByteView data) {
  std::error_code ec;
  fs::create_directories(path.parent_path(), ec);
  if (ec) fail(Errc::IoError, "cannot create " + path.parent_path().string() + ": " + ec.message());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(Errc::IoError, "cannot write " + tmp.string());
    out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
    out.flush();
    if (!out) fail(Errc::IoError, "cannot write " + tmp.string());
  }
  fs::rename(tmp, path, ec);
  if (ec) fail(Errc::IoError, "cannot rename onto " + path.string() + ": " + ec.message());
}

// ---------------------------------------------------------------- server

void persist_server(const protocol::ServerState& state, const fs::path& dir) {
  FileMatrix matrix{.s = state.pk.s(), .blocks = {}, .original_length = state.original_length};
  std::vector<std::pair<Rank, G1>> tags;
  if (state.scheme == Scheme::Mht) {
    const auto& st = *state.mht;
    matrix.blocks = st.blocks;
    for (std::size_t i = 0; i < st.tags.size(); ++i) tags.emplace_back(Rank::integer(i + 1), st.tags[i]);
  } else {
    for (const auto& [rank, block] : state.store.blocks) {
      matrix.blocks.push_back(block);
      tags.emplace_back(rank, state.store.tags.at(rank));
    }
  }

  write_file_atomic(dir / "matrix.bin", seal(kMatrixMagic, encode_matrix(matrix)));
  write_file_atomic(dir / "tags.bin", seal(kTagsMagic, encode([&](auto& w) {
                                          w.count(tags.size());
                                          for (const auto& [rank, tag] : tags) {
                                            write_rank(w, rank);
                                            w.g1(tag);
                                          }
                                        })));
  write_file_atomic(dir / "meta.bin", seal(kMetaMagic, encode([&](auto& w) {
                                          w.u8(static_cast<std::uint8_t>(state.scheme)).str(state.file_id);
                                          write_public_key(w, state.pk);
                                          if (state.mht) {
                                            mht::write_hash_key(w, state.mht->hkey);
                                            mht::write_signed_root(w, state.mht->signed_root);
                                          }
                                        })));
  if (state.mht) {
    write_file_atomic(dir / "tree.bin", seal(kTreeMagic, encode([&](auto& w) {
                                            const auto& leaves = state.mht->tree.leaves();
                                            w.count(leaves.size());
                                            for (const auto& l : leaves) w.g1(l);
                                            mht::write_digest(w, state.mht->tree.root());
                                          })));
  }
}

protocol::ServerState load_server(const fs::path& dir) {
  protocol::ServerState state;

  const Bytes meta = unseal(read_file(dir / "meta.bin"), kMetaMagic);
  wire::Reader mr(meta);
  const auto scheme = mr.u8();
  if (scheme > 2) fail(Errc::BadEncoding, "bad scheme");
  state.scheme = static_cast<Scheme>(scheme);
  state.file_id = mr.str();
  state.pk = read_public_key(mr);
  mht::HashKey hkey;
  mht::SignedRoot signed_root;
  if (state.scheme == Scheme::Mht) {
    hkey = mht::read_hash_key(mr);
    signed_root = mht::read_signed_root(mr);
  }
  mr.expect_done();

  FileMatrix matrix = decode_matrix(unseal(read_file(dir / "matrix.bin"), kMatrixMagic));
  if (matrix.s != state.pk.s()) fail(Errc::SectorCountMismatch, "matrix does not match the key");
  state.original_length = matrix.original_length;

  const Bytes tag_bytes = unseal(read_file(dir / "tags.bin"), kTagsMagic);
  wire::Reader tr(tag_bytes);
  const std::size_t count = tr.count(8);
  if (count != matrix.n()) fail(Errc::BadEncoding, "tag count differs from block count");
  std::vector<std::pair<Rank, G1>> tags;
  for (std::size_t i = 0; i < count; ++i) {
    Rank rank = read_rank(tr);
    if (!tags.empty() && !(tags.back().first < rank)) fail(Errc::BadEncoding, "tag ranks out of order");
    tags.emplace_back(std::move(rank), tr.g1());
  }
  tr.expect_done();

  if (state.scheme != Scheme::Mht) {
    for (std::size_t i = 0; i < count; ++i) {
      state.store.blocks.emplace(tags[i].first, std::move(matrix.blocks[i]));
      state.store.tags.emplace(tags[i].first, tags[i].second);
    }
    return state;
  }

  mht::ServerState st;
  st.hkey = hkey;
  st.signed_root = signed_root;
  for (std::size_t i = 0; i < count; ++i) {
    if (tags[i].first != Rank::integer(i + 1)) fail(Errc::BadEncoding, "positional ranks expected");
    st.tags.push_back(tags[i].second);
  }
  st.blocks = std::move(matrix.blocks);

  std::vector<G1> leaves;
  if (fs::exists(dir / "tree.bin")) {
    const Bytes cache = unseal(read_file(dir / "tree.bin"), kTreeMagic);
    wire::Reader cr(cache);
    leaves.resize(cr.count(4 + G1::kEncodedSize));
    for (auto& l : leaves) l = cr.g1();
    const Digest root = mht::read_digest(cr);
    cr.expect_done();
    if (leaves.size() != st.blocks.size()) fail(Errc::BadEncoding, "tree cache size differs");
    st.tree = MerkleTree::build(std::move(leaves));
    if (st.tree.root() != root) fail(Errc::BadEncoding, "tree cache root differs");
  } else {
    for (const auto& b : st.blocks) leaves.push_back(mht::leaf_digest(st.hkey, b));
    st.tree = MerkleTree::build(std::move(leaves));
  }
  state.mht = std::move(st);
  return state;
}

// ---------------------------------------------------------------- store

void check_file_id(std::string_view id) {
  const bool ok = !id.empty() && id.size() <= 128 && id != "." && id != ".." &&
                  std::all_of(id.begin(), id.end(), [](char c) {
                    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                           c == '.' || c == '_' || c == '-';
                  });
  if (!ok) fail(Errc::InvalidArgument, "file id '" + std::string(id) + "' is not a plain name");
}

Store::Store(fs::path root) : root_(std::move(root)) {}

fs::path Store::server_dir(const std::string& file_id) const {
  check_file_id(file_id);
  return root_ / "server" / file_id;
}

fs::path Store::client_file(const std::string& file_id) const {
  check_file_id(file_id);
  return root_ / "client" / (file_id + ".bin");
}

fs::path Store::tpa_file(const std::string& file_id) const {
  check_file_id(file_id);
  return root_ / "tpa" / (file_id + ".bin");
}

bool Store::has_keys() const { return fs::exists(root_ / "client" / "keys.bin"); }

void Store::save_keys(const protocol::ClientKeys& keys) const {
  write_file_atomic(root_ / "client" / "keys.bin",
                    seal(kKeysMagic, encode([&](auto& w) { protocol::write_client_keys(w, keys); })));
}

protocol::ClientKeys Store::load_keys() const {
  const Bytes body = unseal(read_file(root_ / "client" / "keys.bin"), kKeysMagic);
  wire::Reader r(body);
  auto keys = protocol::read_client_keys(r);
  r.expect_done();
  return keys;
}

bool Store::contains(const std::string& file_id) const {
  return fs::exists(client_file(file_id));
}

std::vector<std::string> Store::file_ids() const {
  std::vector<std::string> out;
  std::error_code ec;
  for (const auto& e : fs::directory_iterator(root_ / "client", ec)) {
    if (e.path().extension() == ".bin" && e.path().stem() != "keys") out.push_back(e.path().stem().string());
  }
  std::sort(out.begin(), out.end());
  return out;
}

void Store::create(const protocol::Parties& parties) const {
  if (contains(parties.client.file_id)) fail(Errc::DuplicateFileId, parties.client.file_id);
  save(parties);
}

void Store::save(const protocol::Parties& parties) const {
  const auto& id = parties.client.file_id;
  persist_server(parties.server, server_dir(id));
  write_file_atomic(tpa_file(id),
                    seal(kTpaMagic, encode([&](auto& w) { protocol::write_tpa_state(w, parties.tpa); })));
  write_file_atomic(client_file(id), seal(kClientMagic, encode([&](auto& w) {
                                            protocol::write_client_state(w, parties.client);
                                          })));
}

protocol::Parties Store::load(const std::string& file_id, const protocol::ClientKeys& keys) const {
  if (!contains(file_id)) fail(Errc::UnknownFileId, file_id);
  protocol::Parties p;
  {
    const Bytes body = unseal(read_file(client_file(file_id)), kClientMagic);
    wire::Reader r(body);
    p.client = protocol::read_client_state(r, keys);
    r.expect_done();
  }
  {
    const Bytes body = unseal(read_file(tpa_file(file_id)), kTpaMagic);
    wire::Reader r(body);
    p.tpa = protocol::read_tpa_state(r);
    r.expect_done();
  }
  p.server = load_server(server_dir(file_id));
  if (p.client.file_id != file_id || p.tpa.file_id != file_id || p.server.file_id != file_id) {
    fail(Errc::BadEncoding, "state files disagree on the file id");
  }
  return p;
}

}  // namespace dpdp::store
