#include "dpdp/attacks.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

#include "dpdp/error.hpp"

namespace dpdp::attacks {

using protocol::Deployment;

std::string_view to_string(Attack attack) {
  switch (attack) {
    case Attack::Replace: return "replace";
    case Attack::Replay: return "replay";
    case Attack::Privacy: return "privacy";
  }
  return "?";
}

Attack parse_attack(std::string_view text) {
  if (text == "replace") return Attack::Replace;
  if (text == "replay") return Attack::Replay;
  if (text == "privacy") return Attack::Privacy;
  fail(Errc::InvalidArgument, "unknown attack '" + std::string(text) + "'");
}

std::pair<double, double> chance_band(std::size_t trials) {
  const double half = trials == 0 ? 0.5 : std::max(0.10, 1.96 * 0.5 / std::sqrt(static_cast<double>(trials)));
  return {0.5 - half, 0.5 + half};
}

bool AttackOutcome::succeeded() const {
  if (attack == Attack::Privacy) return trials > 0 && accuracy() > chance_band(trials).second;
  return accepted;
}

std::string AttackOutcome::to_json() const {
  nlohmann::ordered_json j;
  j["format"] = "dpdp-attack/1";
  j["scheme"] = protocol::to_string(scheme);
  j["attack"] = to_string(attack);
  j["seed"] = to_hex(seed);
  if (attack == Attack::Privacy) {
    j["trials"] = trials;
    j["correct"] = correct;
    j["accuracy"] = accuracy();
  } else {
    j["accepted"] = accepted;
  }
  j["succeeded"] = succeeded();
  j["expected"] = expected_success(scheme, attack);
  j["detail"] = detail;
  j["transcript_sha256"] = to_hex(sha256(as_bytes(transcript)));
  return j.dump();
}

bool expected_success(Scheme scheme, Attack attack) {
  switch (attack) {
    case Attack::Replace:
    case Attack::Replay: return scheme == Scheme::Original;
    case Attack::Privacy: return scheme != Scheme::Mht;
  }
  return false;
}

namespace {

Bytes random_bytes(std::size_t len, SeededRng& rng) {
  Bytes out(len);
  rng.fill(out);
  return out;
}

std::vector<Scalar> draw_masks(std::size_t s, SeededRng& rng) {
  std::vector<Scalar> out;
  for (std::size_t j = 0; j < s; ++j) out.push_back(Scalar::random(rng));
  return out;
}

/// Answers every challenged position with the one block it kept.
class ReplaceServer final : public protocol::ServerBehavior {
 public:
  PossessionProof on_challenge(const PublicKey& pk, const ServerStore& store, const Challenge& chal,
                               SeededRng& rng) override {
    const Block& block = store.blocks.begin()->second;
    const G1& tag = store.tags.begin()->second;
    std::vector<ProverInput> inputs;
    for (const auto& [rank, v] : chal.pairs) inputs.push_back({&block, &tag, v});
    return original::prove(pk, inputs, draw_masks(pk.s(), rng));
  }

  mht::ProofBundle on_mht_challenge(const PublicKey& pk, const mht::ServerState& st,
                                    const Challenge& chal, SeededRng& rng) override {
    mht::ProofBundle out;
    std::vector<ProverInput> inputs;
    for (const auto& [rank, v] : chal.pairs) {
      inputs.push_back({&st.blocks[0], &st.tags[0], v});
      const std::size_t i = static_cast<std::size_t>(rank.to_u64() - 1);
      out.leaves.push_back({st.tree.leaves()[0], st.tree.auth_path(i)});
    }
    out.proof = original::prove(pk, inputs, draw_masks(pk.s(), rng));
    out.signed_root = st.signed_root;
    out.server_root = st.tree.root();
    return out;
  }
};

/// Ignores modifications and proves them with the block it still has.
class ReplayServer final : public protocol::ServerBehavior {
 public:
  UpdateProof on_update(const PublicKey& pk, ServerStore& store, const UpdateRequest& req,
                        SeededRng& rng) override {
    if (req.kind != OpKind::Modify) return ServerBehavior::on_update(pk, store, req, rng);
    const Block& old_block = store.blocks.at(req.rank);
    const G1& old_tag = store.tags.at(req.rank);
    auto masks = draw_masks(pk.s(), rng);
    return original::prove_update(pk, old_block, old_tag, masks, Scalar::random_nonzero(rng));
  }

  Digest on_mht_update(mht::ServerState& st, const mht::Request& req,
                       const mht::UpdateInfo& info) override {
    if (req.kind != OpKind::Modify) return ServerBehavior::on_mht_update(st, req, info);
    return st.tree.root();
  }
};

}  // namespace

AttackOutcome replace_attack(Scheme scheme, std::size_t n, std::size_t s, std::size_t chal_size,
                             SeededRng& rng) {
  if (n < 2 || chal_size < 2) fail(Errc::InvalidArgument, "replace attack needs n >= 2 and chal_size >= 2");
  AttackOutcome out;
  out.scheme = scheme;
  out.attack = Attack::Replace;
  out.seed = rng.seed();

  auto keys = protocol::generate_keys(s, rng);
  Deployment d(std::move(keys), rng.derive("replace/session"));
  const std::string id = "replace";
  const Bytes file = random_bytes(n * kSectorBytes * s, rng);
  auto up = d.upload(id, scheme, file);
  if (!up.accepted()) fail(Errc::InvalidArgument, "upload failed: " + up.reason);

  // The server throws away everything except block 1 and its tag.
  auto& server = d.parties(id).server;
  if (scheme == Scheme::Mht) {
    server.mht->blocks.resize(1);
    server.mht->tags.resize(1);
  } else {
    const Rank first = server.store.blocks.begin()->first;
    std::erase_if(server.store.blocks, [&](const auto& kv) { return kv.first != first; });
    std::erase_if(server.store.tags, [&](const auto& kv) { return kv.first != first; });
  }
  d.set_behavior(std::make_shared<ReplaceServer>());

  auto report = d.audit(id, chal_size);
  out.accepted = report.accepted();
  out.detail = report.reason;
  out.transcript = d.transcript().to_jsonl();
  return out;
}

AttackOutcome replay_attack(Scheme scheme, SeededRng& rng, std::size_t n, std::size_t s) {
  AttackOutcome out;
  out.scheme = scheme;
  out.attack = Attack::Replay;
  out.seed = rng.seed();

  auto keys = protocol::generate_keys(s, rng);
  Deployment d(std::move(keys), rng.derive("replay/session"));
  const std::string id = "replay";
  auto up = d.upload(id, scheme, random_bytes(n * kSectorBytes * s, rng));
  if (!up.accepted()) fail(Errc::InvalidArgument, "upload failed: " + up.reason);

  d.set_behavior(std::make_shared<ReplayServer>());
  const std::size_t position = 1 + rng.uniform(n);
  auto report = d.update(id, OpKind::Modify, position, random_bytes(kSectorBytes * s, rng));
  out.accepted = report.accepted();
  out.detail = report.reason;
  out.transcript = d.transcript().to_jsonl();
  return out;
}

int guess(const AdversaryView& view, const G1& tag, const Block& m0, const Block& m1, SeededRng& coin) {
  G1 extra;
  if (view.scheme == Scheme::Iht) extra = iht::rank_hash(Rank::integer(1), 1);
  auto matches = [&](const Block& m) {
    PairingEquation eq;
    eq.lhs(tag, view.pk.g2a).rhs(extra * original::block_commitment(view.pk, m), view.pk.ctx.g2);
    return eq.holds();
  };
  if (matches(m0)) return 0;
  if (matches(m1)) return 1;
  return coin.coin() ? 1 : 0;
}

AttackOutcome privacy_distinguisher(Scheme scheme, std::size_t trials, SeededRng& rng, std::size_t s) {
  if (trials == 0) fail(Errc::InvalidArgument, "need at least one trial");
  AttackOutcome out;
  out.scheme = scheme;
  out.attack = Attack::Privacy;
  out.seed = rng.seed();
  out.trials = trials;

  const auto keys = protocol::generate_keys(s, rng);
  SeededRng challenger = rng.derive("privacy/challenger");
  SeededRng adversary = rng.derive("privacy/adversary");
  const AdversaryView view{keys.pub.pk, scheme};

  for (std::size_t t = 0; t < trials; ++t) {
    Block m0, m1;
    do {
      m0 = block_from_bytes(random_bytes(kSectorBytes * s, adversary), s);
      m1 = block_from_bytes(random_bytes(kSectorBytes * s, adversary), s);
    } while (m0 == m1);

    const int b = challenger.coin() ? 1 : 0;
    const Block& mb = b == 0 ? m0 : m1;
    G1 tag;
    switch (scheme) {
      case Scheme::Original: tag = original::tag_block(keys.pub.pk, keys.sec.sk, mb); break;
      case Scheme::Iht: tag = iht::tag_block(keys.pub.pk, keys.sec.sk, mb, Rank::integer(1), 1); break;
      case Scheme::Mht: tag = mht::tag_block(keys.pub.pk, keys.sec.sk, keys.sec.hkey, mb); break;
    }

    const int g = guess(view, tag, m0, m1, adversary);
    if (g == b) ++out.correct;

    nlohmann::ordered_json j;
    j["trial"] = t;
    j["tag_sha256"] = to_hex(sha256(tag.encode()));
    j["b"] = b;
    j["guess"] = g;
    out.transcript += j.dump();
    out.transcript += '\n';
  }
  return out;
}

}  // namespace dpdp::attacks
