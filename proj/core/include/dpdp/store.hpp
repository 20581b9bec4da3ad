#pragma once

// On-disk state. Every file is sealed: 8-byte magic | u8 format version |
// payload | SHA-256 of everything before. Loads check magic, then length,
// version and checksum, and fail closed. A short file is a checksum failure. Writes go to a temporary file that is then
// renamed over the target.
//
// Layout under the store root:
//   client/keys.bin           client keys
//   client/<file-id>.bin      client state
//   tpa/<file-id>.bin         TPA state
//   server/<file-id>/         matrix.bin, tags.bin, meta.bin, tree.bin (MHT)
// tree.bin only caches the leaf digests; it is rebuilt when missing.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "dpdp/protocol.hpp"

namespace dpdp::store {

inline constexpr std::uint8_t kFormatVersion = 1;

Bytes seal(std::string_view magic, ByteView payload, std::uint8_t version = kFormatVersion);
/// BadMagic / VersionMismatch / ChecksumMismatch.
Bytes unseal(ByteView file, std::string_view magic, std::uint8_t version = kFormatVersion);

/// IoError on failure.
Bytes read_file(const std::filesystem::path& path);
void write_file_atomic(const std::filesystem::path& path, ByteView data);

void persist_server(const protocol::ServerState& state, const std::filesystem::path& dir);
protocol::ServerState load_server(const std::filesystem::path& dir);

/// InvalidArgument unless the id is a plain name ([A-Za-z0-9._-], no dots only).
void check_file_id(std::string_view id);

class Store {
 public:
  explicit Store(std::filesystem::path root);

  const std::filesystem::path& root() const { return root_; }

  bool has_keys() const;
  void save_keys(const protocol::ClientKeys& keys) const;
  protocol::ClientKeys load_keys() const;

  bool contains(const std::string& file_id) const;
  std::vector<std::string> file_ids() const;
  /// DuplicateFileId when the id is already stored.
  void create(const protocol::Parties& parties) const;
  void save(const protocol::Parties& parties) const;
  /// UnknownFileId when absent.
  protocol::Parties load(const std::string& file_id, const protocol::ClientKeys& keys) const;

  std::filesystem::path server_dir(const std::string& file_id) const;
  std::filesystem::path client_file(const std::string& file_id) const;
  std::filesystem::path tpa_file(const std::string& file_id) const;

 private:
  std::filesystem::path root_;
};

}  // namespace dpdp::store
