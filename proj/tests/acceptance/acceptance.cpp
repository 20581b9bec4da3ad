// Acceptance gate: prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include "dpdp/attacks.hpp"
#include "dpdp/error.hpp"
#include "dpdp/iht.hpp"
#include "dpdp/merkle.hpp"
#include "dpdp/mht.hpp"
#include "dpdp/original.hpp"
#include "dpdp/protocol.hpp"
#include "dpdp/store.hpp"
#include "merkle_oracle.hpp"
#include "support.hpp"

namespace dpdp {
namespace {

namespace fs = std::filesystem;
using protocol::Deployment;
using protocol::Scheme;
using protocol::Verdict;

// Pinned parameters.
constexpr std::size_t kCorrectnessRuns = 100;
constexpr std::size_t kMaxBlocks = 64;
constexpr std::size_t kMaxSectors = 8;
constexpr std::size_t kMaxOps = 100;
constexpr std::size_t kAuditEvery = 25;
constexpr double kCorrectnessBudgetSeconds = 60.0;
constexpr std::size_t kAttackTrials = 50;
constexpr std::size_t kPrivacyTrials = 200;
constexpr double kPrivacyLow = 0.40;
constexpr double kPrivacyHigh = 0.60;
constexpr std::size_t kMerkleMaxLeaves = 33;
constexpr std::size_t kMerkleOps = 20;
constexpr std::size_t kCorruptionTrials = 50;

constexpr Scheme kSchemes[] = {Scheme::Original, Scheme::Iht, Scheme::Mht};

struct Criterion {
  int id;
  std::string name;
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) detail << "first failure: " << what << "; ";
    pass = pass && ok;
  }
};

std::uint64_t seed_for(int criterion, Scheme scheme, std::size_t trial) {
  return static_cast<std::uint64_t>(criterion) * 1'000'000 + static_cast<std::uint64_t>(scheme) * 10'000 + trial;
}

Deployment make_deployment(SeededRng& rng, std::size_t s) {
  auto keys = protocol::generate_keys(s, rng);
  return Deployment(std::move(keys), rng.derive("session"));
}

OpKind random_op(SeededRng& rng, std::size_t live) {
  auto kind = static_cast<OpKind>(rng.uniform(3));
  if (kind == OpKind::Delete && live == 1) kind = OpKind::Insert;
  return kind;
}

std::string label(Scheme scheme) { return std::string(protocol::to_string(scheme)); }

// 1. Honest end-to-end runs accept every update and every audit.
void correctness(Criterion& c) {
  const auto start = std::chrono::steady_clock::now();
  std::size_t updates = 0, audits = 0, total_ops = 0;
  for (auto scheme : kSchemes) {
    std::size_t accepted_updates = 0, accepted_audits = 0, scheme_updates = 0, scheme_audits = 0;
    for (std::size_t run = 0; run < kCorrectnessRuns; ++run) {
      SeededRng rng = SeededRng::from_u64(seed_for(1, scheme, run));
      const std::size_t n = 1 + rng.uniform(kMaxBlocks);
      const std::size_t s = 1 + rng.uniform(kMaxSectors);
      const std::size_t ops = rng.uniform(kMaxOps + 1);
      auto d = make_deployment(rng, s);
      const std::size_t block_len = kSectorBytes * s;
      auto file = test::random_bytes((n - 1) * block_len + 1 + rng.uniform(block_len), rng);
      if (!d.upload("f", scheme, file).accepted()) {
        c.require(false, label(scheme) + " upload, run " + std::to_string(run));
        continue;
      }
      for (std::size_t op = 0; op < ops; ++op) {
        const std::size_t live = protocol::live_blocks(d.parties("f"));
        const OpKind kind = random_op(rng, live);
        const std::size_t pos = 1 + rng.uniform(live + (kind == OpKind::Insert ? 1 : 0));
        Bytes block;
        if (kind != OpKind::Delete) block = test::random_bytes(rng.uniform(block_len + 1), rng);
        ++scheme_updates;
        if (d.update("f", kind, pos, block).accepted()) ++accepted_updates;
        if ((op + 1) % kAuditEvery == 0) {
          ++scheme_audits;
          if (d.audit("f", 1 + rng.uniform(protocol::live_blocks(d.parties("f")))).accepted()) ++accepted_audits;
        }
      }
      ++scheme_audits;
      if (d.audit("f", protocol::live_blocks(d.parties("f"))).accepted()) ++accepted_audits;
      total_ops += ops;
    }
    c.require(accepted_updates == scheme_updates, label(scheme) + " update rejected");
    c.require(accepted_audits == scheme_audits, label(scheme) + " audit rejected");
    c.detail << label(scheme) << " " << accepted_updates << "/" << scheme_updates << " updates, "
             << accepted_audits << "/" << scheme_audits << " audits; ";
    updates += scheme_updates;
    audits += scheme_audits;
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  c.require(secs < kCorrectnessBudgetSeconds, "runtime over budget");
  c.detail << total_ops << " ops, " << std::fixed;
  c.detail.precision(1);
  c.detail << secs << " s (budget " << kCorrectnessBudgetSeconds << " s)";
}

// 2. Server keeps one block.
void replace(Criterion& c) {
  for (auto scheme : kSchemes) {
    std::size_t accepted = 0;
    for (std::size_t t = 0; t < kAttackTrials; ++t) {
      SeededRng rng = SeededRng::from_u64(seed_for(2, scheme, t));
      const std::size_t n = 2 + rng.uniform(15);
      const std::size_t s = 1 + rng.uniform(kMaxSectors);
      const std::size_t chal = 2 + rng.uniform(n - 1);
      if (attacks::replace_attack(scheme, n, s, chal, rng).accepted) ++accepted;
    }
    const bool want_accept = scheme == Scheme::Original;
    c.require(accepted == (want_accept ? kAttackTrials : 0), label(scheme));
    c.detail << label(scheme) << " accepted " << accepted << "/" << kAttackTrials << "; ";
  }
}

// 3. Server ignores a modify.
void replay(Criterion& c) {
  for (auto scheme : kSchemes) {
    std::size_t accepted = 0;
    for (std::size_t t = 0; t < kAttackTrials; ++t) {
      SeededRng rng = SeededRng::from_u64(seed_for(3, scheme, t));
      const std::size_t n = 1 + rng.uniform(16);
      const std::size_t s = 1 + rng.uniform(kMaxSectors);
      if (attacks::replay_attack(scheme, rng, n, s).accepted) ++accepted;
    }
    const bool want_accept = scheme == Scheme::Original;
    c.require(accepted == (want_accept ? kAttackTrials : 0), label(scheme));
    c.detail << label(scheme) << " accepted " << accepted << "/" << kAttackTrials << "; ";
  }
}

// 4. Tag distinguisher.
void privacy(Criterion& c) {
  for (auto scheme : kSchemes) {
    SeededRng rng = SeededRng::from_u64(seed_for(4, scheme, 0));
    auto out = attacks::privacy_distinguisher(scheme, kPrivacyTrials, rng);
    if (scheme == Scheme::Mht) {
      c.require(out.accuracy() >= kPrivacyLow && out.accuracy() <= kPrivacyHigh, label(scheme));
    } else {
      c.require(out.correct == kPrivacyTrials, label(scheme));
    }
    c.detail << label(scheme) << " " << out.correct << "/" << out.trials << "; ";
  }
  c.detail << "mht band [" << kPrivacyLow << ", " << kPrivacyHigh << "]";
}

// 5. Incremental tree against a from-scratch reference.
void merkle(Criterion& c) {
  std::size_t checks = 0;
  for (std::size_t n0 = 1; n0 <= kMerkleMaxLeaves; ++n0) {
    SeededRng rng = SeededRng::from_u64(seed_for(5, Scheme::Mht, n0));
    std::vector<G1> leaves;
    for (std::size_t i = 0; i < n0; ++i) leaves.push_back(G1::random(rng));
    auto tree = MerkleTree::build(leaves);
    c.require(tree.root() == test::oracle_root(leaves), "initial build n=" + std::to_string(n0));
    for (std::size_t op = 0; op < kMerkleOps; ++op) {
      const OpKind kind = random_op(rng, leaves.size());
      if (kind == OpKind::Insert) {
        const auto i = rng.uniform(leaves.size() + 1);
        const auto g = G1::random(rng);
        leaves.insert(leaves.begin() + static_cast<std::ptrdiff_t>(i), g);
        tree.insert(i, g);
      } else if (kind == OpKind::Modify) {
        const auto i = rng.uniform(leaves.size());
        leaves[i] = G1::random(rng);
        tree.replace(i, leaves[i]);
      } else {
        const auto i = rng.uniform(leaves.size());
        leaves.erase(leaves.begin() + static_cast<std::ptrdiff_t>(i));
        tree.erase(i);
      }
      const Digest expected = test::oracle_root(leaves);
      c.require(tree.root() == expected, "n0=" + std::to_string(n0) + " op=" + std::to_string(op));
      for (std::size_t i = 0; i < leaves.size(); ++i) {
        c.require(recompute_root(leaves[i], tree.auth_path(i)) == expected,
                  "path n0=" + std::to_string(n0) + " i=" + std::to_string(i));
        ++checks;
      }
      for (std::size_t p = 0; p <= leaves.size(); ++p) {
        std::vector<G1> suffix(leaves.begin() + static_cast<std::ptrdiff_t>(p), leaves.end());
        c.require(root_from_parts(leaves.size(), tree.prefix_frontier(p), suffix) == expected,
                  "frontier n0=" + std::to_string(n0) + " p=" + std::to_string(p));
        ++checks;
      }
    }
  }
  c.detail << kMerkleMaxLeaves * kMerkleOps << " operations, " << checks << " path and frontier checks";
}

Scalar& sector_at(protocol::Parties& p, std::size_t block, std::size_t sector) {
  if (p.server.mht) return p.server.mht->blocks[block][sector];
  return std::next(p.server.store.blocks.begin(), static_cast<std::ptrdiff_t>(block))->second[sector];
}

void flip_byte(Scalar& x, SeededRng& rng) {
  auto enc = x.encode();
  enc[1 + rng.uniform(kSectorBytes)] ^= static_cast<std::uint8_t>(1 + rng.uniform(255));
  x = Scalar::decode(enc);
}

// 6. One flipped byte in storage is caught by a full audit.
void corruption(Criterion& c) {
  for (auto scheme : kSchemes) {
    std::size_t rejected = 0;
    for (std::size_t t = 0; t < kCorruptionTrials; ++t) {
      SeededRng rng = SeededRng::from_u64(seed_for(6, scheme, t));
      const std::size_t s = 1 + rng.uniform(kMaxSectors);
      const std::size_t n = 1 + rng.uniform(16);
      auto d = make_deployment(rng, s);
      d.upload("f", scheme, test::random_bytes(n * kSectorBytes * s, rng));
      auto& p = d.parties("f");
      flip_byte(sector_at(p, rng.uniform(n), rng.uniform(s)), rng);
      if (d.audit("f", n).verdict == Verdict::Reject) ++rejected;
    }
    c.require(rejected == kCorruptionTrials, label(scheme));
    c.detail << label(scheme) << " rejected " << rejected << "/" << kCorruptionTrials << "; ";
  }
}

// 7. All-zero block tags.
void zero_block(Criterion& c) {
  for (std::size_t s = 1; s <= kMaxSectors; ++s) {
    SeededRng rng = SeededRng::from_u64(seed_for(7, Scheme::Original, s));
    auto keys = protocol::generate_keys(s, rng);
    const Block zero(s);
    const auto& pk = keys.pub.pk;
    c.require(original::tag_block(pk, keys.sec.sk, zero).is_identity(), "original s=" + std::to_string(s));
    c.require(!iht::tag_block(pk, keys.sec.sk, zero, Rank::integer(1), 1).is_identity(),
              "iht s=" + std::to_string(s));
    c.require(!mht::tag_block(pk, keys.sec.sk, keys.sec.hkey, zero).is_identity(),
              "mht s=" + std::to_string(s));
  }
  c.detail << "s = 1.." << kMaxSectors << ": original identity, iht and mht not";
}

// 8. Same seeds, same bytes; persisted state audits the same; damaged files refuse to load.
void determinism(Criterion& c) {
  const fs::path root = fs::temp_directory_path() / "dpdp_acceptance_store";
  std::size_t fail_closed = 0, damaged = 0;
  for (auto scheme : kSchemes) {
    auto session = [&](std::uint64_t seed) {
      SeededRng rng = SeededRng::from_u64(seed);
      auto d = make_deployment(rng, 4);
      std::string reports;
      reports += d.upload("f", scheme, test::random_bytes(2000, rng)).to_json();
      reports += d.update("f", OpKind::Insert, 3, test::random_bytes(50, rng)).to_json();
      reports += d.update("f", OpKind::Modify, 1, test::random_bytes(80, rng)).to_json();
      reports += d.update("f", OpKind::Delete, 2).to_json();
      reports += d.audit("f", 8).to_json();
      return std::pair(d.transcript().to_jsonl(), reports);
    };
    const auto seed = seed_for(8, scheme, 0);
    auto a = session(seed), b = session(seed), other = session(seed + 1);
    c.require(a == b, label(scheme) + " transcripts differ");
    c.require(a.first != other.first, label(scheme) + " seed ignored");

    for (bool corrupt : {false, true}) {
      fs::remove_all(root);
      SeededRng rng = SeededRng::from_u64(seed + 2);
      auto d = make_deployment(rng, 3);
      d.upload("f", scheme, test::random_bytes(600, rng));
      d.update("f", OpKind::Insert, 2, test::random_bytes(10, rng));
      if (corrupt) flip_byte(sector_at(d.parties("f"), 1, 0), rng);
      store::Store st(root);
      st.save_keys(d.keys());
      st.create(d.parties("f"));
      const auto before = d.audit("f", 100).verdict;
      Deployment loaded(st.load_keys(), SeededRng::from_u64(seed + 3));
      loaded.adopt(st.load("f", st.load_keys()));
      const auto after = loaded.audit("f", 100).verdict;
      c.require(before == after, label(scheme) + " audit outcome changed by persistence");
      c.require(before == (corrupt ? Verdict::Reject : Verdict::Accept), label(scheme) + " audit outcome");
    }

    std::vector<fs::path> files{root / "client" / "keys.bin", store::Store(root).client_file("f"),
                                store::Store(root).tpa_file("f")};
    for (const auto& e : fs::directory_iterator(store::Store(root).server_dir("f"))) files.push_back(e.path());
    for (const auto& path : files) {
      const Bytes good = store::read_file(path);
      SeededRng rng = SeededRng::from_u64(seed + 4);
      for (int mode = 0; mode < 3; ++mode) {
        Bytes bad = good;
        if (mode == 0) bad.resize(rng.uniform(bad.size()));
        if (mode == 1) bad[rng.uniform(bad.size())] ^= static_cast<std::uint8_t>(1 + rng.uniform(255));
        if (mode == 2) bad.push_back(0);
        std::ofstream(path, std::ios::binary | std::ios::trunc)
            .write(reinterpret_cast<const char*>(bad.data()), static_cast<std::streamsize>(bad.size()));
        ++damaged;
        try {
          store::Store st(root);
          st.load("f", st.load_keys());
        } catch (const Error& e) {
          if (e.code() == Errc::BadMagic || e.code() == Errc::VersionMismatch ||
              e.code() == Errc::ChecksumMismatch) {
            ++fail_closed;
          }
        }
      }
      std::ofstream(path, std::ios::binary | std::ios::trunc)
          .write(reinterpret_cast<const char*>(good.data()), static_cast<std::streamsize>(good.size()));
    }
  }
  fs::remove_all(root);
  c.require(fail_closed == damaged, "a damaged file loaded");
  c.detail << "transcripts identical per seed; persisted audits unchanged; " << fail_closed << "/" << damaged
           << " damaged files refused";
}

}  // namespace
}  // namespace dpdp

int main() {
  using namespace dpdp;
  struct Entry {
    int id;
    const char* name;
    std::function<void(Criterion&)> run;
  };
  const Entry entries[] = {
      {1, "honest correctness", correctness},
      {2, "replace attack", replace},
      {3, "replay attack", replay},
      {4, "privacy distinguisher", privacy},
      {5, "merkle oracle equivalence", merkle},
      {6, "corruption detection", corruption},
      {7, "zero-block tags", zero_block},
      {8, "determinism and persistence", determinism},
  };
  bool all = true;
  for (const auto& e : entries) {
    Criterion c{e.id, e.name};
    try {
      e.run(c);
    } catch (const std::exception& ex) {
      c.require(false, std::string("exception: ") + ex.what());
    }
    std::cout << (c.pass ? "PASS" : "FAIL") << " [" << c.id << "] " << c.name << ": " << c.detail.str()
              << std::endl;
    all = all && c.pass;
  }
  return all ? 0 : 1;
}
