#pragma once

// Byte files as an n x s matrix of sectors in Z_p.

#include <cstdint>
#include <vector>

#include "dpdp/algebra.hpp"
#include "dpdp/bytes.hpp"

namespace dpdp {

/// Bytes packed into one sector. 31 bytes stay below 2^248 < p.
inline constexpr std::size_t kSectorBytes = 31;

using Block = std::vector<Scalar>;

struct FileMatrix {
  std::size_t s = 0;
  std::vector<Block> blocks;
  std::uint64_t original_length = 0;

  std::size_t n() const { return blocks.size(); }
};

/// Splits `bytes` into blocks of s sectors, zero-padding the final block.
/// An empty input still yields one all-zero block.
FileMatrix chunk_file(ByteView bytes, std::size_t s);

/// Inverse of chunk_file. CorruptPadding when the recorded length or the
/// padding does not match the content.
Bytes dechunk(const FileMatrix& matrix);

/// Up to 31*s bytes as a single zero-padded block.
Block block_from_bytes(ByteView bytes, std::size_t s);
/// The 31-byte payloads of each sector, concatenated.
Bytes block_payload(const Block& block);
/// Canonical scalar encoding of a block (32 bytes per sector), used as hash
/// input.
Bytes block_bytes(const Block& block);

/// "DPDPFM" | version u8 | s u32 | n u64 | original_length u64 | n*s scalars
/// (32-byte big-endian, row-major). Integers little-endian.
Bytes encode_matrix(const FileMatrix& matrix);
FileMatrix decode_matrix(ByteView bytes);

inline constexpr std::uint8_t kMatrixFormatVersion = 1;

}  // namespace dpdp
