#include "dpdp/encoding.hpp"

#include <algorithm>

#include "dpdp/error.hpp"
#include "dpdp/wire.hpp"

namespace dpdp {
namespace {

constexpr std::string_view kMatrixMagic = "DPDPFM";

Scalar sector_from_payload(ByteView payload) {
  std::array<std::uint8_t, Scalar::kEncodedSize> be{};
  std::copy(payload.begin(), payload.end(), be.begin() + (be.size() - payload.size()));
  return Scalar::decode(be);
}

}  // namespace

FileMatrix chunk_file(ByteView bytes, std::size_t s) {
  if (s == 0) fail(Errc::InvalidArgument, "sectors per block must be positive");
  const std::size_t block_len = kSectorBytes * s;
  const std::size_t n = std::max<std::size_t>(1, (bytes.size() + block_len - 1) / block_len);

  Bytes padded(n * block_len, 0);
  std::copy(bytes.begin(), bytes.end(), padded.begin());

  FileMatrix m{.s = s, .blocks = {}, .original_length = bytes.size()};
  m.blocks.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    m.blocks.push_back(block_from_bytes(ByteView(padded).subspan(i * block_len, block_len), s));
  }
  return m;
}

Bytes dechunk(const FileMatrix& matrix) {
  const std::size_t block_len = kSectorBytes * matrix.s;
  const std::size_t capacity = block_len * matrix.n();
  if (matrix.s == 0 || matrix.n() == 0) fail(Errc::CorruptPadding, "empty matrix");
  if (matrix.original_length > capacity) fail(Errc::CorruptPadding, "length exceeds capacity");
  const std::size_t expected_n =
      std::max<std::size_t>(1, (matrix.original_length + block_len - 1) / block_len);
  if (matrix.n() != expected_n) fail(Errc::CorruptPadding, "block count inconsistent with length");

  Bytes out;
  out.reserve(capacity);
  for (const auto& block : matrix.blocks) {
    if (block.size() != matrix.s) fail(Errc::CorruptPadding, "ragged block");
    Bytes payload = block_payload(block);
    out.insert(out.end(), payload.begin(), payload.end());
  }
  if (std::any_of(out.begin() + static_cast<std::ptrdiff_t>(matrix.original_length), out.end(),
                  [](std::uint8_t b) { return b != 0; })) {
    fail(Errc::CorruptPadding, "non-zero padding");
  }
  out.resize(matrix.original_length);
  return out;
}

Block block_from_bytes(ByteView bytes, std::size_t s) {
  if (s == 0) fail(Errc::InvalidArgument, "sectors per block must be positive");
  if (bytes.size() > kSectorBytes * s) {
    fail(Errc::InvalidArgument, "block payload larger than " + std::to_string(kSectorBytes * s));
  }
  Block block;
  block.reserve(s);
  for (std::size_t j = 0; j < s; ++j) {
    const std::size_t lo = std::min(bytes.size(), j * kSectorBytes);
    const std::size_t hi = std::min(bytes.size(), lo + kSectorBytes);
    std::array<std::uint8_t, kSectorBytes> sector{};
    std::copy(bytes.begin() + lo, bytes.begin() + hi, sector.begin());
    block.push_back(sector_from_payload(sector));
  }
  return block;
}

Bytes block_payload(const Block& block) {
  Bytes out;
  out.reserve(block.size() * kSectorBytes);
  for (const auto& sector : block) {
    auto be = sector.encode();
    if (be[0] != 0) fail(Errc::CorruptPadding, "sector exceeds 31 bytes");
    out.insert(out.end(), be.begin() + 1, be.end());
  }
  return out;
}

Bytes block_bytes(const Block& block) {
  Bytes out;
  out.reserve(block.size() * Scalar::kEncodedSize);
  for (const auto& sector : block) {
    auto be = sector.encode();
    out.insert(out.end(), be.begin(), be.end());
  }
  return out;
}

Bytes encode_matrix(const FileMatrix& matrix) {
  wire::Writer w;
  w.raw(as_bytes(kMatrixMagic)).u8(kMatrixFormatVersion);
  w.u32(static_cast<std::uint32_t>(matrix.s)).u64(matrix.n()).u64(matrix.original_length);
  for (const auto& block : matrix.blocks) {
    if (block.size() != matrix.s) fail(Errc::SectorCountMismatch, "ragged matrix");
    for (const auto& sector : block) w.raw(sector.encode());
  }
  return std::move(w).take();
}

FileMatrix decode_matrix(ByteView bytes) {
  wire::Reader r(bytes);
  if (bytes.size() < kMatrixMagic.size() ||
      !std::equal(kMatrixMagic.begin(), kMatrixMagic.end(), bytes.begin())) {
    fail(Errc::BadMagic, "not a file matrix");
  }
  r.raw(kMatrixMagic.size());
  if (r.u8() != kMatrixFormatVersion) fail(Errc::VersionMismatch, "file matrix version");
  FileMatrix m;
  m.s = r.u32();
  const std::uint64_t n = r.u64();
  m.original_length = r.u64();
  if (m.s == 0 || n == 0) fail(Errc::BadEncoding, "empty matrix dimensions");
  if (n > r.remaining() / (m.s * Scalar::kEncodedSize)) fail(Errc::BadEncoding, "truncated matrix");
  m.blocks.resize(n);
  for (auto& block : m.blocks) {
    block.reserve(m.s);
    for (std::size_t j = 0; j < m.s; ++j) block.push_back(Scalar::decode(r.raw(Scalar::kEncodedSize)));
  }
  r.expect_done();
  return m;
}

}  // namespace dpdp
