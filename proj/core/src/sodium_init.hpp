#pragma once

#include <sodium.h>

#include <stdexcept>

namespace dpdp::detail {

inline void ensure_sodium() {
  static const int rc = sodium_init();
  if (rc < 0) throw std::runtime_error("libsodium initialisation failed");
}

}  // namespace dpdp::detail
