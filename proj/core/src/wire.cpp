#include "dpdp/wire.hpp"

#include "dpdp/error.hpp"

namespace dpdp::wire {

Writer& Writer::u8(std::uint8_t v) {
  out_.push_back(v);
  return *this;
}

Writer& Writer::u16(std::uint16_t v) {
  for (int i = 0; i < 2; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  return *this;
}

Writer& Writer::u32(std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  return *this;
}

Writer& Writer::u64(std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  return *this;
}

Writer& Writer::raw(ByteView bytes) {
  out_.insert(out_.end(), bytes.begin(), bytes.end());
  return *this;
}

Writer& Writer::bytes(ByteView bytes) {
  count(bytes.size());
  return raw(bytes);
}

Writer& Writer::count(std::size_t n) {
  if (n > UINT32_MAX) fail(Errc::InvalidArgument, "count exceeds u32");
  return u32(static_cast<std::uint32_t>(n));
}

ByteView Reader::raw(std::size_t n) {
  if (n > remaining()) fail(Errc::BadEncoding, "truncated input");
  ByteView v = in_.subspan(pos_, n);
  pos_ += n;
  return v;
}

std::uint8_t Reader::u8() { return raw(1)[0]; }

std::uint16_t Reader::u16() {
  auto b = raw(2);
  return static_cast<std::uint16_t>(b[0] | b[1] << 8);
}

std::uint32_t Reader::u32() {
  auto b = raw(4);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= std::uint32_t{b[i]} << (8 * i);
  return v;
}

std::uint64_t Reader::u64() {
  auto b = raw(8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= std::uint64_t{b[i]} << (8 * i);
  return v;
}

ByteView Reader::bytes() { return raw(u32()); }

std::string Reader::str() {
  auto b = bytes();
  return {b.begin(), b.end()};
}

std::size_t Reader::count(std::size_t min_item_size) {
  std::size_t n = u32();
  if (min_item_size > 0 && n > remaining() / min_item_size) {
    fail(Errc::BadEncoding, "count larger than remaining input");
  }
  return n;
}

void Reader::expect_done() const {
  if (!done()) fail(Errc::BadEncoding, "trailing bytes");
}

}  // namespace dpdp::wire
