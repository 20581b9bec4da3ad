#pragma once

// Block ranks: dyadic rationals num / 2^log2_den, kept in lowest terms.
// Upload assigns 1..n; every later rank is a midpoint of two existing ones
// (or of a rank and a virtual bound 0 / n+1), so the dyadics are closed
// under everything the protocols can produce.

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>

#include <boost/multiprecision/cpp_int.hpp>

#include "dpdp/bytes.hpp"

namespace dpdp {

namespace wire {
class Writer;
class Reader;
}  // namespace wire

class Rank {
 public:
  using Int = boost::multiprecision::cpp_int;

  Rank() = default;  // zero, the virtual lower bound
  static Rank integer(std::uint64_t v);
  /// num / 2^log2_den, normalised. `num` must be non-negative.
  static Rank dyadic(Int num, std::uint32_t log2_den);
  /// Accepts "7", "3/2", "5/4"; the denominator must be a power of two.
  static Rank parse(std::string_view text);

  const Int& num() const { return num_; }
  std::uint32_t log2_den() const { return log2_den_; }
  bool is_integer() const { return log2_den_ == 0; }
  /// Integer value; InvalidArgument for a non-integer rank.
  std::uint64_t to_u64() const;

  std::string to_string() const;

  std::strong_ordering operator<=>(const Rank& o) const;
  bool operator==(const Rank& o) const = default;

 private:
  Int num_ = 0;
  std::uint32_t log2_den_ = 0;
};

/// (lo + hi) / 2. NotOrdered unless lo < hi.
Rank midpoint(const Rank& lo, const Rank& hi);

/// Injective byte encoding of (rank, version): the input of the rank hash.
/// u32 magnitude length | magnitude big-endian | u32 log2_den | u64 vnb.
Bytes encode_rank_version(const Rank& rank, std::uint64_t vnb);
std::pair<Rank, std::uint64_t> decode_rank_version(ByteView bytes);

void write_rank(wire::Writer& w, const Rank& rank);
Rank read_rank(wire::Reader& r);

}  // namespace dpdp
