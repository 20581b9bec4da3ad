#include <gtest/gtest.h>

#include "dpdp/encoding.hpp"
#include "dpdp/error.hpp"
#include "support.hpp"

namespace dpdp {
namespace {

// Big-endian 32-byte field encoding of a 31-byte payload: one leading zero.
Bytes sector_oracle(ByteView payload31) {
  Bytes be(1, 0);
  be.insert(be.end(), payload31.begin(), payload31.end());
  return be;
}

TEST(Chunk, ExactFitIsOneBlock) {
  SeededRng rng = SeededRng::from_u64(1);
  auto bytes = test::random_bytes(62, rng);
  auto m = chunk_file(bytes, 2);
  ASSERT_EQ(m.n(), 1u);
  ASSERT_EQ(m.blocks[0].size(), 2u);
  EXPECT_EQ(m.original_length, 62u);
  for (std::size_t j = 0; j < 2; ++j) {
    auto enc = m.blocks[0][j].encode();
    EXPECT_EQ(Bytes(enc.begin(), enc.end()),
              sector_oracle(ByteView(bytes).subspan(j * 31, 31)));
  }
}

TEST(Chunk, EmptyFileIsOneZeroBlock) {
  auto m = chunk_file({}, 3);
  ASSERT_EQ(m.n(), 1u);
  ASSERT_EQ(m.blocks[0].size(), 3u);
  for (const auto& x : m.blocks[0]) EXPECT_TRUE(x.is_zero());
  EXPECT_EQ(dechunk(m), Bytes{});
}

TEST(Chunk, OneByteOverflowAddsBlock) {
  Bytes bytes(63, 0xab);
  auto m = chunk_file(bytes, 2);
  ASSERT_EQ(m.n(), 2u);
  auto enc = m.blocks[1][0].encode();
  EXPECT_EQ(enc[1], 0xab);
  for (std::size_t k = 2; k < enc.size(); ++k) EXPECT_EQ(enc[k], 0);
  EXPECT_TRUE(m.blocks[1][1].is_zero());
}

TEST(Chunk, ZeroSectorsRejected) {
  EXPECT_THROW(chunk_file(as_bytes("abc"), 0), Error);
}

TEST(Dechunk, ShortString) {
  auto m = chunk_file(as_bytes("abc"), 1);
  auto out = dechunk(m);
  EXPECT_EQ(std::string(out.begin(), out.end()), "abc");
}

TEST(Dechunk, AllZeroMatrixWithZeroLength) {
  FileMatrix m{.s = 2, .blocks = {Block(2)}, .original_length = 0};
  EXPECT_EQ(dechunk(m), Bytes{});
}

TEST(Dechunk, RoundTrip10KiB) {
  SeededRng rng = SeededRng::from_u64(2);
  auto bytes = test::random_bytes(10 * 1024, rng);
  EXPECT_EQ(dechunk(chunk_file(bytes, 4)), bytes);
}

TEST(Dechunk, FuzzRoundTrip) {
  SeededRng rng = SeededRng::from_u64(3);
  for (int t = 0; t < 1000; ++t) {
    auto len = rng.uniform(700);
    auto s = 1 + rng.uniform(8);
    auto bytes = test::random_bytes(len, rng);
    ASSERT_EQ(dechunk(chunk_file(bytes, s)), bytes) << "len=" << len << " s=" << s;
  }
}

TEST(Dechunk, CorruptPadding) {
  auto m = chunk_file(as_bytes("abc"), 1);
  // Sets the final payload byte, which lies beyond the 3-byte length.
  m.blocks[0][0] = m.blocks[0][0] + Scalar::from_u64(1);
  try {
    dechunk(m);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::CorruptPadding);
  }
}

TEST(Dechunk, InconsistentLengths) {
  auto m = chunk_file(Bytes(40, 1), 1);
  auto too_long = m;
  too_long.original_length = 63;
  auto too_short = m;
  too_short.original_length = 10;
  auto wide = m;
  wide.blocks[0][0] = Scalar::from_be_bytes_reduced(Bytes(32, 0xff));
  for (const auto* bad : {&too_long, &too_short, &wide}) {
    try {
      dechunk(*bad);
      ADD_FAILURE();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), Errc::CorruptPadding);
    }
  }
}

TEST(BlockFromBytes, RejectsOversizedPayload) {
  EXPECT_THROW(block_from_bytes(Bytes(63, 1), 2), Error);
  auto b = block_from_bytes(Bytes(62, 1), 2);
  EXPECT_EQ(block_payload(b), Bytes(62, 1));
}

TEST(BlockBytes, ConcatenatesScalarEncodings) {
  Block b{Scalar::from_u64(1), Scalar::from_u64(258)};
  auto out = block_bytes(b);
  ASSERT_EQ(out.size(), 64u);
  EXPECT_EQ(out[31], 1);
  EXPECT_EQ(out[62], 1);
  EXPECT_EQ(out[63], 2);
}

TEST(MatrixCodec, RoundTrip) {
  SeededRng rng = SeededRng::from_u64(4);
  auto m = chunk_file(test::random_bytes(500, rng), 3);
  auto enc = encode_matrix(m);
  EXPECT_EQ(enc.size(), 6u + 1 + 4 + 8 + 8 + m.n() * 3 * 32);
  auto back = decode_matrix(enc);
  EXPECT_EQ(back.s, m.s);
  EXPECT_EQ(back.original_length, m.original_length);
  EXPECT_EQ(back.blocks, m.blocks);
}

TEST(MatrixCodec, HeaderFaults) {
  auto enc = encode_matrix(chunk_file(as_bytes("hello"), 2));
  auto expect_code = [](const Bytes& b, Errc code) {
    try {
      decode_matrix(b);
      ADD_FAILURE();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), code);
    }
  };
  auto bad_magic = enc;
  bad_magic[0] ^= 1;
  expect_code(bad_magic, Errc::BadMagic);
  auto bad_version = enc;
  bad_version[6] = kMatrixFormatVersion + 1;
  expect_code(bad_version, Errc::VersionMismatch);
  expect_code(Bytes(enc.begin(), enc.end() - 1), Errc::BadEncoding);
  auto trailing = enc;
  trailing.push_back(0);
  expect_code(trailing, Errc::BadEncoding);
}

TEST(MatrixCodec, RaggedMatrixRejected) {
  FileMatrix m{.s = 2, .blocks = {Block(2), Block(1)}, .original_length = 0};
  try {
    encode_matrix(m);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::SectorCountMismatch);
  }
}

}  // namespace
}  // namespace dpdp
