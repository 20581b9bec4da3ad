#pragma once

// The three attacks as scripted adversaries against the protocol harness.
// Server-side adversaries act only through ServerBehavior hooks and the
// state a server holds; the privacy adversary sees the public key, the
// public rank hash and the challenge tag.

#include <cstdint>
#include <string>
#include <vector>

#include "dpdp/protocol.hpp"

namespace dpdp::attacks {

using protocol::Scheme;

enum class Attack : std::uint8_t { Replace = 0, Replay = 1, Privacy = 2 };

std::string_view to_string(Attack attack);
/// "replace", "replay", "privacy".
Attack parse_attack(std::string_view text);

struct AttackOutcome {
  Scheme scheme = Scheme::Original;
  Attack attack = Attack::Replace;
  SeededRng::Seed seed{};
  bool accepted = false;   // Replace / Replay: the verifier's decision
  std::size_t trials = 0;  // Privacy
  std::size_t correct = 0;
  std::string detail;      // verdict reason
  std::string transcript;  // JSON-lines

  double accuracy() const { return trials == 0 ? 0.0 : static_cast<double>(correct) / trials; }
  /// Replace / Replay: the forged proof was accepted. Privacy: the guess
  /// rate is above the 95% band around 1/2 for the trial count.
  bool succeeded() const;
  std::string to_json() const;
};

/// Whether `attack` is known to work against `scheme`.
bool expected_success(Scheme scheme, Attack attack);

/// Server keeps only block 1 and its tag and answers every challenged
/// position from them. Requires n >= 2 and chal_size >= 2.
AttackOutcome replace_attack(Scheme scheme, std::size_t n, std::size_t s, std::size_t chal_size,
                             SeededRng& rng);

/// Server acknowledges a modify but keeps the old block and tag, proving the
/// update with them.
AttackOutcome replay_attack(Scheme scheme, SeededRng& rng, std::size_t n = 4, std::size_t s = 4);

/// What the privacy adversary holds.
struct AdversaryView {
  const PublicKey& pk;
  Scheme scheme;
};

/// Guess b for a single-block file at rank 1, version 1, tagged with
/// m_b: compares e(T, g2^a) with e(candidate commitment, g2) for each
/// candidate and flips a coin if neither matches.
int guess(const AdversaryView& view, const G1& tag, const Block& m0, const Block& m1, SeededRng& coin);

AttackOutcome privacy_distinguisher(Scheme scheme, std::size_t trials, SeededRng& rng,
                                    std::size_t s = 4);

/// Band around 1/2 that counts as chance: the normal-approximation 95%
/// interval for `trials` guesses, widened to at least +-0.10.
std::pair<double, double> chance_band(std::size_t trials);

}  // namespace dpdp::attacks
