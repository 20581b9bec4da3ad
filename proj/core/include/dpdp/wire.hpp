#pragma once

// Little-endian length-prefixed encoding shared by messages and store files.

#include <cstdint>
#include <string>
#include <string_view>

#include "dpdp/algebra.hpp"
#include "dpdp/bytes.hpp"

namespace dpdp::wire {

class Writer {
 public:
  Writer& u8(std::uint8_t v);
  Writer& u16(std::uint16_t v);
  Writer& u32(std::uint32_t v);
  Writer& u64(std::uint64_t v);
  /// Raw bytes, no prefix.
  Writer& raw(ByteView bytes);
  /// u32 length prefix, then bytes.
  Writer& bytes(ByteView bytes);
  Writer& str(std::string_view s) { return bytes(as_bytes(s)); }
  Writer& scalar(const Scalar& s) { return bytes(s.encode()); }
  Writer& g1(const G1& g) { return bytes(g.encode()); }
  Writer& g2(const G2& g) { return bytes(g.encode()); }
  Writer& count(std::size_t n);

  const Bytes& data() const& { return out_; }
  Bytes take() && { return std::move(out_); }

 private:
  Bytes out_;
};

/// Every read is bounds-checked; running short or a bad element encoding
/// raises Errc::BadEncoding.
class Reader {
 public:
  explicit Reader(ByteView in) : in_(in) {}

  std::uint8_t u8();
  std::uint16_t u16();
  std::uint32_t u32();
  std::uint64_t u64();
  ByteView raw(std::size_t n);
  ByteView bytes();
  std::string str();
  Scalar scalar() { return Scalar::decode(bytes()); }
  G1 g1() { return G1::decode(bytes()); }
  G2 g2() { return G2::decode(bytes()); }
  /// u32 count, sanity-limited by the bytes that remain.
  std::size_t count(std::size_t min_item_size = 1);

  std::size_t remaining() const { return in_.size() - pos_; }
  bool done() const { return remaining() == 0; }
  void expect_done() const;

 private:
  ByteView in_;
  std::size_t pos_ = 0;
};

}  // namespace dpdp::wire
