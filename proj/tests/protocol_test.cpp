#include <algorithm>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "dpdp/error.hpp"
#include "dpdp/protocol.hpp"
#include "support.hpp"

namespace dpdp::protocol {
namespace {

constexpr Scheme kSchemes[] = {Scheme::Original, Scheme::Iht, Scheme::Mht};

Errc code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return Errc::InvalidArgument;
}

bool contains_bytes(const Bytes& haystack, ByteView needle) {
  return std::search(haystack.begin(), haystack.end(), needle.begin(), needle.end()) != haystack.end();
}

template <class T, class W>
Bytes encoded(const T& value, W write) {
  wire::Writer w;
  write(w, value);
  return std::move(w).take();
}

Deployment make_deployment(std::uint64_t seed, std::size_t s = 4,
                           std::shared_ptr<ServerBehavior> behavior = {}) {
  SeededRng rng = SeededRng::from_u64(seed);
  auto keys = generate_keys(s, rng);
  return Deployment(std::move(keys), rng.derive("session"), std::move(behavior));
}

// Ignores Modify requests and answers with the data it already has.
class StaleServer : public ServerBehavior {
 public:
  UpdateProof on_update(const PublicKey& pk, ServerStore& store, const UpdateRequest& req,
                        SeededRng& rng) override {
    if (req.kind != OpKind::Modify) return ServerBehavior::on_update(pk, store, req, rng);
    std::vector<Scalar> masks;
    for (std::size_t j = 0; j < pk.s(); ++j) masks.push_back(Scalar::random(rng));
    return original::prove_update(pk, store.blocks.at(req.rank), store.tags.at(req.rank), masks,
                                  Scalar::random_nonzero(rng));
  }
  Digest on_mht_update(mht::ServerState& st, const mht::Request& req,
                       const mht::UpdateInfo& info) override {
    if (req.kind != OpKind::Modify) return ServerBehavior::on_mht_update(st, req, info);
    return st.tree.root();
  }
};

class PerScheme : public ::testing::TestWithParam<Scheme> {};

TEST_P(PerScheme, UploadThenAuditAccepts) {
  auto d = make_deployment(71);
  SeededRng data = SeededRng::from_u64(72);
  auto file = test::random_bytes(4096, data);
  auto up = d.upload("f", GetParam(), file);
  EXPECT_TRUE(up.accepted()) << up.reason;
  const std::size_t n = (4096 + 123) / 124;
  EXPECT_EQ(live_blocks(d.parties("f")), n);
  auto report = d.audit("f", n);
  EXPECT_TRUE(report.accepted()) << report.reason;
  ASSERT_TRUE(report.challenge);
  EXPECT_EQ(report.challenge->pairs.size(), n);
}

TEST_P(PerScheme, ClientKeepsNoBlocks) {
  auto d = make_deployment(73);
  SeededRng data = SeededRng::from_u64(74);
  auto file = test::random_bytes(1000, data);
  d.upload("f", GetParam(), file);
  auto client = encoded(d.parties("f").client, write_client_state);
  auto matrix = chunk_file(file, 4);
  for (const auto& block : matrix.blocks) {
    EXPECT_FALSE(contains_bytes(client, block[0].encode()));
  }
  EXPECT_FALSE(contains_bytes(client, ByteView(file).subspan(0, 31)));
}

TEST_P(PerScheme, DuplicateFileId) {
  auto d = make_deployment(75);
  d.upload("f", GetParam(), as_bytes("hello"));
  EXPECT_EQ(code_of([&] { d.upload("f", GetParam(), as_bytes("again")); }), Errc::DuplicateFileId);
}

TEST_P(PerScheme, UpdatesThenAudit) {
  auto d = make_deployment(76);
  SeededRng data = SeededRng::from_u64(77);
  d.upload("f", GetParam(), test::random_bytes(124 * 5, data));
  EXPECT_TRUE(d.update("f", OpKind::Modify, 2, test::random_bytes(100, data)).accepted());
  EXPECT_TRUE(d.update("f", OpKind::Insert, 1, test::random_bytes(124, data)).accepted());
  EXPECT_TRUE(d.update("f", OpKind::Insert, 7, test::random_bytes(5, data)).accepted());
  EXPECT_TRUE(d.update("f", OpKind::Delete, 3).accepted());
  EXPECT_TRUE(d.update("f", OpKind::Modify, 6, {}).accepted());
  EXPECT_EQ(live_blocks(d.parties("f")), 6u);
  EXPECT_TRUE(d.audit("f", 6).accepted());
  EXPECT_TRUE(d.audit("f", 2).accepted());
}

TEST_P(PerScheme, InvalidPositions) {
  auto d = make_deployment(78);
  d.upload("f", GetParam(), Bytes(124 * 2, 1));
  EXPECT_EQ(code_of([&] { d.update("f", OpKind::Modify, 0, {}); }), Errc::InvalidPosition);
  EXPECT_EQ(code_of([&] { d.update("f", OpKind::Modify, 3, {}); }), Errc::InvalidPosition);
  EXPECT_EQ(code_of([&] { d.update("f", OpKind::Insert, 4, {}); }), Errc::InvalidPosition);
  EXPECT_TRUE(d.update("f", OpKind::Delete, 1).accepted());
  EXPECT_EQ(code_of([&] { d.update("f", OpKind::Delete, 1); }), Errc::InvalidPosition);
  EXPECT_EQ(code_of([&] { d.audit("nope", 1); }), Errc::UnknownFileId);
}

TEST_P(PerScheme, ChallengeSizeIsClamped) {
  auto d = make_deployment(79);
  d.upload("f", GetParam(), Bytes(124 * 3, 7));
  auto report = d.audit("f", 100);
  EXPECT_TRUE(report.accepted());
  EXPECT_EQ(report.challenge->pairs.size(), 3u);
}

TEST_P(PerScheme, IgnoredModify) {
  auto d = make_deployment(80, 4, std::make_shared<StaleServer>());
  SeededRng data = SeededRng::from_u64(81);
  d.upload("f", GetParam(), test::random_bytes(124 * 3, data));
  const Parties before = d.parties("f");
  auto report = d.update("f", OpKind::Modify, 2, test::random_bytes(50, data));
  if (GetParam() == Scheme::Original) {
    EXPECT_TRUE(report.accepted());
  } else {
    EXPECT_EQ(report.verdict, Verdict::Reject);
    const Parties& after = d.parties("f");
    EXPECT_TRUE(after.client == before.client);
    EXPECT_TRUE(after.server == before.server);
    EXPECT_TRUE(after.tpa == before.tpa);
    d.set_behavior(std::make_shared<ServerBehavior>());
    EXPECT_TRUE(d.audit("f", 3).accepted());
  }
}

TEST_P(PerScheme, CorruptedSectorDetected) {
  SeededRng data = SeededRng::from_u64(82);
  for (int t = 0; t < 5; ++t) {
    auto d = make_deployment(83 + t);
    d.upload("f", GetParam(), test::random_bytes(124 * 4, data));
    auto& server = d.parties("f").server;
    const std::size_t i = data.uniform(4), j = data.uniform(4);
    Scalar* sector = nullptr;
    if (GetParam() == Scheme::Mht) {
      sector = &server.mht->blocks[i][j];
    } else {
      sector = &std::next(server.store.blocks.begin(), static_cast<std::ptrdiff_t>(i))->second[j];
    }
    auto enc = sector->encode();
    enc[1 + data.uniform(31)] ^= static_cast<std::uint8_t>(1 + data.uniform(255));
    *sector = Scalar::decode(enc);
    EXPECT_EQ(d.audit("f", 4).verdict, Verdict::Reject);
  }
}

TEST_P(PerScheme, TranscriptsAreDeterministic) {
  auto run = [&] {
    auto d = make_deployment(90);
    SeededRng data = SeededRng::from_u64(91);
    std::vector<std::string> reports;
    reports.push_back(d.upload("f", GetParam(), test::random_bytes(600, data)).to_json());
    reports.push_back(d.update("f", OpKind::Insert, 2, test::random_bytes(30, data)).to_json());
    reports.push_back(d.audit("f", 3).to_json());
    return std::pair(d.transcript().to_jsonl(), reports);
  };
  auto a = run(), b = run();
  EXPECT_EQ(a.first, b.first);
  EXPECT_EQ(a.second, b.second);
  EXPECT_FALSE(a.first.empty());
}

TEST_P(PerScheme, TpaHoldsNoSecrets) {
  auto d = make_deployment(92);
  d.upload("f", GetParam(), Bytes(300, 3));
  d.update("f", OpKind::Insert, 1, as_bytes("x"));
  auto tpa = encoded(d.parties("f").tpa, write_tpa_state);
  const auto& sec = d.keys().sec;
  EXPECT_FALSE(contains_bytes(tpa, sec.sk.a.encode()));
  EXPECT_FALSE(contains_bytes(tpa, ByteView(sec.sk_ss.bytes).subspan(0, 32)));
  EXPECT_FALSE(contains_bytes(tpa, sec.hkey.bytes));
}

TEST_P(PerScheme, StateCodecsRoundTrip) {
  auto d = make_deployment(93);
  d.upload("f", GetParam(), Bytes(500, 9));
  d.update("f", OpKind::Delete, 2);
  const auto& p = d.parties("f");
  auto c = encoded(p.client, write_client_state);
  wire::Reader rc(c);
  EXPECT_TRUE(read_client_state(rc, d.keys()) == p.client);
  auto s = encoded(p.server, write_server_state);
  wire::Reader rs(s);
  EXPECT_TRUE(read_server_state(rs) == p.server);
  auto t = encoded(p.tpa, write_tpa_state);
  wire::Reader rt(t);
  EXPECT_TRUE(read_tpa_state(rt) == p.tpa);
  auto k = encoded(d.keys(), write_client_keys);
  wire::Reader rk(k);
  EXPECT_EQ(read_client_keys(rk).sec.hkey, d.keys().sec.hkey);
}

INSTANTIATE_TEST_SUITE_P(Schemes, PerScheme, ::testing::ValuesIn(kSchemes),
                         [](const auto& info) { return std::string(to_string(info.param)); });

TEST(Protocol, AppendUsesVirtualUpperBound) {
  for (auto scheme : {Scheme::Original, Scheme::Iht}) {
    auto d = make_deployment(94);
    d.upload("f", scheme, Bytes(124 * 3, 1));
    EXPECT_EQ(d.parties("f").client.upper_bound, Rank::integer(4));
    ASSERT_TRUE(d.update("f", OpKind::Insert, 4, as_bytes("tail")).accepted());
    auto ranks = d.parties("f").client.table.live_ranks();
    EXPECT_EQ(ranks.back(), midpoint(Rank::integer(3), Rank::integer(4)));
    EXPECT_EQ(d.parties("f").tpa.table.live_ranks(), ranks);
    EXPECT_TRUE(d.parties("f").server.store.blocks.contains(Rank::parse("7/2")));
  }
}

TEST(Protocol, IhtTablesStaySynchronised) {
  auto d = make_deployment(95);
  SeededRng data = SeededRng::from_u64(96);
  d.upload("f", Scheme::Iht, Bytes(124 * 4, 2));
  for (int op = 0; op < 20; ++op) {
    const std::size_t live = live_blocks(d.parties("f"));
    auto kind = static_cast<OpKind>(data.uniform(3));
    if (kind == OpKind::Delete && live == 1) kind = OpKind::Insert;
    const std::size_t pos = 1 + data.uniform(live + (kind == OpKind::Insert ? 1 : 0));
    ASSERT_TRUE(d.update("f", kind, pos, test::random_bytes(40, data)).accepted());
    ASSERT_EQ(d.parties("f").client.table, d.parties("f").tpa.table);
  }
  EXPECT_TRUE(d.audit("f", 100).accepted());
}

TEST(Protocol, ReportJson) {
  auto d = make_deployment(97);
  d.upload("f", Scheme::Mht, as_bytes("payload"));
  auto report = d.audit("f", 1);
  auto j = nlohmann::json::parse(report.to_json());
  EXPECT_EQ(j.at("format"), "dpdp-report/1");
  EXPECT_EQ(j.at("file_id"), "f");
  EXPECT_EQ(j.at("scheme"), "mht");
  EXPECT_EQ(j.at("operation"), "audit");
  EXPECT_EQ(j.at("verdict"), "accept");
  EXPECT_EQ(j.at("transcript_sha256"), to_hex(report.transcript_sha256));
  EXPECT_EQ(j.at("challenge").size(), 1u);

  auto lines = d.transcript().to_jsonl(report.first_seq - 1);
  std::size_t count = 0;
  for (std::size_t pos = 0; pos < lines.size(); pos = lines.find('\n', pos) + 1) {
    auto rec = nlohmann::json::parse(lines.substr(pos, lines.find('\n', pos) - pos));
    for (const char* key : {"seq", "sender", "receiver", "scheme", "file_id", "type",
                            "payload_sha256", "payload_size"}) {
      EXPECT_TRUE(rec.contains(key)) << key;
    }
    ++count;
  }
  EXPECT_EQ(count, report.last_seq - report.first_seq + 1);
  EXPECT_EQ(d.transcript().digest(report.first_seq - 1), report.transcript_sha256);
}

TEST(Protocol, SequenceNumbersIncrease) {
  auto d = make_deployment(98);
  d.upload("a", Scheme::Iht, as_bytes("one"));
  d.upload("b", Scheme::Mht, as_bytes("two"));
  d.audit("a", 1);
  std::uint64_t last = 0;
  for (const auto& rec : d.transcript().records()) {
    EXPECT_GT(rec.seq, last);
    last = rec.seq;
    EXPECT_TRUE(legal(rec.scheme, rec.type, rec.sender, rec.receiver));
  }
}

TEST(Protocol, MessageLegality) {
  EXPECT_TRUE(legal(Scheme::Mht, MessageType::AaiResponse, Party::Server, Party::Client));
  EXPECT_FALSE(legal(Scheme::Iht, MessageType::AaiResponse, Party::Server, Party::Client));
  EXPECT_TRUE(legal(Scheme::Iht, MessageType::UpdateAck, Party::Server, Party::Tpa));
  EXPECT_FALSE(legal(Scheme::Mht, MessageType::UpdateAck, Party::Server, Party::Tpa));
  EXPECT_TRUE(legal(Scheme::Original, MessageType::Challenge, Party::Tpa, Party::Server));
  EXPECT_FALSE(legal(Scheme::Original, MessageType::Challenge, Party::Client, Party::Server));
  EXPECT_FALSE(legal(Scheme::Mht, MessageType::Verdict, Party::Server, Party::Client));
}

TEST(Protocol, EmptyQueue) {
  LocalTransport t;
  EXPECT_EQ(code_of([&] { t.receive(Party::Tpa); }), Errc::BadEncoding);
}

TEST(Protocol, SchemeNames) {
  for (auto s : kSchemes) EXPECT_EQ(parse_scheme(to_string(s)), s);
  EXPECT_THROW(parse_scheme("pdp"), Error);
}

}  // namespace
}  // namespace dpdp::protocol
