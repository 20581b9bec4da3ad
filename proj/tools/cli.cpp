#include "dpdp/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "dpdp/attacks.hpp"
#include "dpdp/error.hpp"
#include "dpdp/protocol.hpp"
#include "dpdp/store.hpp"

namespace dpdp::cli {
namespace {

using attacks::Attack;
using protocol::AuditReport;
using protocol::Scheme;

struct Config {
  std::string store;
  std::string scheme = "mht";
  std::size_t s = 8;
  std::optional<std::uint64_t> seed;
  std::string format = "human";
  std::string transcript;

  std::string file_id;
  std::string input;
  std::string op;
  std::size_t position = 0;
  std::size_t challenge = 0;
  bool force = false;

  std::string attack;
  std::size_t blocks = 8;
  std::size_t trials = 200;
  std::string expect;
};

bool json(const Config& c) { return c.format == "json"; }

SeededRng make_rng(const Config& c) {
  return c.seed ? SeededRng::from_u64(*c.seed) : SeededRng::from_os();
}

Bytes read_input(const std::string& path) {
  return store::read_file(path);
}

void dump_transcript(const Config& c, const protocol::Deployment& d) {
  if (c.transcript.empty()) return;
  std::ofstream f(c.transcript, std::ios::binary | std::ios::trunc);
  if (!f) fail(Errc::IoError, "cannot write " + c.transcript);
  f << d.transcript().to_jsonl();
}

int report_exit(const Config& c, const AuditReport& r, std::ostream& out) {
  if (json(c)) {
    out << r.to_json() << '\n';
  } else {
    out << r.operation << ' ' << r.file_id << " [" << protocol::to_string(r.scheme)
        << "]: " << protocol::to_string(r.verdict);
    if (!r.reason.empty()) out << " (" << r.reason << ')';
    out << '\n';
    if (r.challenge) out << "  challenged blocks: " << r.challenge->pairs.size() << '\n';
    out << "  messages " << r.first_seq << ".." << r.last_seq << ", transcript sha256 "
        << to_hex(r.transcript_sha256) << '\n';
  }
  return r.accepted() ? kOk : kRejected;
}

int cmd_keygen(const Config& c, std::ostream& out) {
  store::Store st(c.store);
  if (st.has_keys() && !c.force) fail(Errc::InvalidArgument, "keys already exist in " + c.store + " (use --force)");
  auto rng = make_rng(c);
  auto keys = protocol::generate_keys(c.s, rng);
  st.save_keys(keys);
  if (json(c)) {
    nlohmann::ordered_json j;
    j["format"] = "dpdp-keygen/1";
    j["store"] = c.store;
    j["s"] = c.s;
    j["pk_ss"] = to_hex(keys.pub.pk_ss.bytes);
    out << j.dump() << '\n';
  } else {
    out << "keys written to " << c.store << " (s = " << c.s << ")\n";
  }
  return kOk;
}

struct Loaded {
  store::Store st;
  protocol::Deployment d;
};

Loaded open(const Config& c) {
  store::Store st(c.store);
  if (!st.has_keys()) fail(Errc::IoError, "no keys in " + c.store + "; run `dpdp keygen` first");
  auto keys = st.load_keys();
  return {std::move(st), protocol::Deployment(std::move(keys), make_rng(c))};
}

int cmd_upload(const Config& c, std::ostream& out) {
  auto [st, d] = open(c);
  store::check_file_id(c.file_id);
  if (st.contains(c.file_id)) fail(Errc::DuplicateFileId, c.file_id);
  const Bytes data = read_input(c.input);
  auto report = d.upload(c.file_id, protocol::parse_scheme(c.scheme), data);
  if (report.accepted()) st.create(d.parties(c.file_id));
  dump_transcript(c, d);
  return report_exit(c, report, out);
}

int cmd_update(const Config& c, std::ostream& out) {
  auto [st, d] = open(c);
  d.adopt(st.load(c.file_id, d.keys()));
  const OpKind kind = parse_op_kind(c.op);
  Bytes data;
  if (kind != OpKind::Delete) {
    if (c.input.empty()) fail(Errc::InvalidArgument, "--input is required for insert and modify");
    data = read_input(c.input);
  }
  auto report = d.update(c.file_id, kind, c.position, data);
  if (report.accepted()) st.save(d.parties(c.file_id));
  dump_transcript(c, d);
  return report_exit(c, report, out);
}

int cmd_audit(const Config& c, std::ostream& out) {
  auto [st, d] = open(c);
  d.adopt(st.load(c.file_id, d.keys()));
  auto report = d.audit(c.file_id, c.challenge);
  dump_transcript(c, d);
  return report_exit(c, report, out);
}

attacks::AttackOutcome run_attack(Scheme scheme, Attack attack, const Config& c, SeededRng& rng) {
  switch (attack) {
    case Attack::Replace: return attacks::replace_attack(scheme, c.blocks, c.s, c.blocks, rng);
    case Attack::Replay: return attacks::replay_attack(scheme, rng, c.blocks, c.s);
    case Attack::Privacy: return attacks::privacy_distinguisher(scheme, c.trials, rng, c.s);
  }
  fail(Errc::InvalidArgument, "unknown attack");
}

std::string cell(const attacks::AttackOutcome& o) {
  if (o.attack == Attack::Privacy) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(3) << o.accuracy()
      << (o.succeeded() ? " distinguishable" : " indistinguishable");
    return s.str();
  }
  return o.accepted ? "accept" : "reject";
}

int cmd_attack(const Config& c, std::ostream& out) {
  const Scheme scheme = protocol::parse_scheme(c.scheme);
  const Attack attack = attacks::parse_attack(c.attack);
  auto rng = make_rng(c);
  auto outcome = run_attack(scheme, attack, c, rng);
  bool expected = attacks::expected_success(scheme, attack);
  if (c.expect == "succeed") expected = true;
  if (c.expect == "fail") expected = false;
  const bool as_expected = outcome.succeeded() == expected;
  if (!c.transcript.empty()) {
    std::ofstream f(c.transcript, std::ios::binary | std::ios::trunc);
    if (!f) fail(Errc::IoError, "cannot write " + c.transcript);
    f << outcome.transcript;
  }
  if (json(c)) {
    out << outcome.to_json() << '\n';
  } else {
    out << attacks::to_string(attack) << " vs " << protocol::to_string(scheme) << ": "
        << (outcome.succeeded() ? "ATTACK SUCCEEDED" : "ATTACK FAILED") << " [" << cell(outcome) << ']';
    if (!outcome.detail.empty()) out << " (" << outcome.detail << ')';
    out << (as_expected ? "" : " UNEXPECTED") << '\n';
  }
  return as_expected ? kOk : kRejected;
}

int cmd_matrix(const Config& c, std::ostream& out) {
  const SeededRng root = make_rng(c);
  constexpr Scheme kSchemes[] = {Scheme::Original, Scheme::Iht, Scheme::Mht};
  constexpr Attack kAttacks[] = {Attack::Replace, Attack::Replay, Attack::Privacy};
  std::vector<attacks::AttackOutcome> cells;
  bool all = true;
  for (Scheme scheme : kSchemes) {
    for (Attack attack : kAttacks) {
      auto rng = root.derive("matrix/" + std::string(protocol::to_string(scheme)) + "/" +
                             std::string(attacks::to_string(attack)));
      cells.push_back(run_attack(scheme, attack, c, rng));
      all = all && cells.back().succeeded() == attacks::expected_success(scheme, attack);
    }
  }
  if (json(c)) {
    nlohmann::ordered_json j;
    j["format"] = "dpdp-matrix/1";
    j["seed"] = to_hex(root.seed());
    auto arr = nlohmann::ordered_json::array();
    for (const auto& o : cells) arr.push_back(nlohmann::ordered_json::parse(o.to_json()));
    j["cells"] = std::move(arr);
    j["matches_expected"] = all;
    out << j.dump() << '\n';
  } else {
    out << std::left << std::setw(10) << "scheme" << std::setw(10) << "replace" << std::setw(10) << "replay"
        << "privacy\n";
    for (std::size_t r = 0; r < 3; ++r) {
      out << std::setw(10) << protocol::to_string(kSchemes[r]);
      for (std::size_t k = 0; k < 3; ++k) {
        const auto& o = cells[r * 3 + k];
        std::string text = cell(o);
        if (o.succeeded() != attacks::expected_success(o.scheme, o.attack)) text += " (!)";
        out << (k < 2 ? std::setw(10) : std::setw(0)) << text;
      }
      out << '\n';
    }
    out << (all ? "matrix matches the expected outcomes\n" : "matrix DIFFERS from the expected outcomes\n");
  }
  return all ? kOk : kRejected;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Config c;
  if (const char* env = std::getenv("DPDP_STORE")) c.store = env;
  if (c.store.empty()) c.store = "dpdp-store";

  CLI::App app{"Dynamic provable data possession: three schemes, their attacks and a client/server/TPA harness",
               "dpdp"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--store", c.store, "Store directory (env DPDP_STORE)");
  app.add_option("--scheme", c.scheme, "original | iht | mht")
      ->check(CLI::IsMember({"original", "iht", "mht"}))
      ->capture_default_str();
  app.add_option("--s", c.s, "Sectors per block")->check(CLI::Range(1, 256))->capture_default_str();
  app.add_option("--seed", c.seed, "Seed for all randomness (random when absent)");
  app.add_option("--format", c.format, "human | json")
      ->check(CLI::IsMember({"human", "json"}))
      ->capture_default_str();
  app.add_option("--transcript", c.transcript, "Write the message transcript (JSON lines) here");

  auto* keygen = app.add_subcommand("keygen", "Generate client keys in the store");
  keygen->add_flag("--force", c.force, "Overwrite existing keys");

  auto* upload = app.add_subcommand("upload", "Tag a file and hand it to the server");
  upload->add_option("--file", c.file_id, "File id")->required();
  upload->add_option("--input", c.input, "Path of the file to upload")->required();

  auto* update = app.add_subcommand("update", "Insert, delete or modify one block");
  update->add_option("--file", c.file_id, "File id")->required();
  update->add_option("--op", c.op, "insert | delete | modify")
      ->required()
      ->check(CLI::IsMember({"insert", "delete", "modify"}));
  update->add_option("--position", c.position, "1-based block position")->required();
  update->add_option("--input", c.input, "New block content (at most 31*s bytes)");

  auto* audit = app.add_subcommand("audit", "Have the TPA challenge the server");
  audit->add_option("--file", c.file_id, "File id")->required();
  audit->add_option("--challenge", c.challenge, "Number of blocks to challenge")
      ->required()
      ->check(CLI::PositiveNumber);

  auto* attack = app.add_subcommand("attack", "Run one attack; exits 0 when the expected outcome reproduces");
  attack->add_option("kind", c.attack, "replace | replay | privacy")
      ->required()
      ->check(CLI::IsMember({"replace", "replay", "privacy"}));
  attack->add_option("--blocks", c.blocks, "Blocks in the attacked file")->check(CLI::Range(2, 4096))->capture_default_str();
  attack->add_option("--trials", c.trials, "Privacy game trials")->check(CLI::PositiveNumber)->capture_default_str();
  attack->add_option("--expect", c.expect, "Override the expected outcome")
      ->check(CLI::IsMember({"succeed", "fail"}));

  auto* matrix = app.add_subcommand("matrix", "Run every attack against every scheme");
  matrix->add_option("--blocks", c.blocks, "Blocks in the attacked files")->check(CLI::Range(2, 4096))->capture_default_str();
  matrix->add_option("--trials", c.trials, "Privacy game trials")->check(CLI::PositiveNumber)->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*keygen) return cmd_keygen(c, out);
    if (*upload) return cmd_upload(c, out);
    if (*update) return cmd_update(c, out);
    if (*audit) return cmd_audit(c, out);
    if (*attack) return cmd_attack(c, out);
    if (*matrix) return cmd_matrix(c, out);
  } catch (const Error& e) {
    err << "dpdp: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "dpdp: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}

}  // namespace dpdp::cli
