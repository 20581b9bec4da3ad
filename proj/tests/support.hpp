#pragma once

#include <string>

#include "dpdp/algebra.hpp"
#include "dpdp/encoding.hpp"
#include "dpdp/rng.hpp"

namespace dpdp::test {

inline Bytes random_bytes(std::size_t n, SeededRng& rng) {
  Bytes out(n);
  rng.fill(out);
  return out;
}

inline Block random_block(std::size_t s, SeededRng& rng) {
  return block_from_bytes(random_bytes(kSectorBytes * s, rng), s);
}

inline FileMatrix random_matrix(std::size_t n, std::size_t s, SeededRng& rng) {
  return chunk_file(random_bytes(n * kSectorBytes * s, rng), s);
}

}  // namespace dpdp::test
