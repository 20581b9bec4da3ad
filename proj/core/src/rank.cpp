#include "dpdp/rank.hpp"

#include <charconv>
#include <iterator>

#include "dpdp/error.hpp"
#include "dpdp/wire.hpp"

namespace dpdp {

Rank Rank::integer(std::uint64_t v) { return dyadic(Int(v), 0); }

Rank Rank::dyadic(Int num, std::uint32_t log2_den) {
  if (num < 0) fail(Errc::InvalidArgument, "ranks are non-negative");
  while (log2_den > 0 && num != 0 && !boost::multiprecision::bit_test(num, 0)) {
    num >>= 1;
    --log2_den;
  }
  if (num == 0) log2_den = 0;
  Rank r;
  r.num_ = std::move(num);
  r.log2_den_ = log2_den;
  return r;
}

Rank Rank::parse(std::string_view text) {
  auto parse_int = [&](std::string_view part) {
    if (part.empty() || part.find_first_not_of("0123456789") != std::string_view::npos) {
      fail(Errc::InvalidArgument, "malformed rank '" + std::string(text) + "'");
    }
    return Int(std::string(part));
  };
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) return dyadic(parse_int(text), 0);
  Int num = parse_int(text.substr(0, slash));
  Int den = parse_int(text.substr(slash + 1));
  if (den == 0 || (den & (den - 1)) != 0) {
    fail(Errc::InvalidArgument, "rank denominator must be a power of two");
  }
  return dyadic(std::move(num), static_cast<std::uint32_t>(boost::multiprecision::msb(den)));
}

std::uint64_t Rank::to_u64() const {
  if (!is_integer() || num_ > Int(UINT64_MAX)) fail(Errc::InvalidArgument, "rank is not a u64 integer");
  return static_cast<std::uint64_t>(num_);
}

std::string Rank::to_string() const {
  std::string out = num_.str();
  if (log2_den_ > 0) out += "/" + (Int(1) << log2_den_).str();
  return out;
}

std::strong_ordering Rank::operator<=>(const Rank& o) const {
  const std::uint32_t e = std::max(log2_den_, o.log2_den_);
  const Int a = num_ << (e - log2_den_);
  const Int b = o.num_ << (e - o.log2_den_);
  if (a < b) return std::strong_ordering::less;
  if (a > b) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

Rank midpoint(const Rank& lo, const Rank& hi) {
  if (!(lo < hi)) fail(Errc::NotOrdered, lo.to_string() + " >= " + hi.to_string());
  const std::uint32_t e = std::max(lo.log2_den(), hi.log2_den());
  Rank::Int sum = (lo.num() << (e - lo.log2_den())) + (hi.num() << (e - hi.log2_den()));
  return Rank::dyadic(std::move(sum), e + 1);
}

void write_rank(wire::Writer& w, const Rank& rank) {
  Bytes mag;
  if (rank.num() != 0) export_bits(rank.num(), std::back_inserter(mag), 8);
  w.bytes(mag).u32(rank.log2_den());
}

Rank read_rank(wire::Reader& r) {
  auto mag = r.bytes();
  if (!mag.empty() && mag[0] == 0) fail(Errc::BadEncoding, "rank magnitude has leading zero");
  Rank::Int num = 0;
  if (!mag.empty()) import_bits(num, mag.begin(), mag.end(), 8);
  const std::uint32_t log2_den = r.u32();
  Rank rank = Rank::dyadic(num, log2_den);
  if (rank.log2_den() != log2_den) fail(Errc::BadEncoding, "rank not in lowest terms");
  return rank;
}

Bytes encode_rank_version(const Rank& rank, std::uint64_t vnb) {
  wire::Writer w;
  write_rank(w, rank);
  w.u64(vnb);
  return std::move(w).take();
}

std::pair<Rank, std::uint64_t> decode_rank_version(ByteView bytes) {
  wire::Reader r(bytes);
  Rank rank = read_rank(r);
  std::uint64_t vnb = r.u64();
  r.expect_done();
  return {std::move(rank), vnb};
}

}  // namespace dpdp
