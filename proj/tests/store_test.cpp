#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "dpdp/error.hpp"
#include "dpdp/store.hpp"
#include "support.hpp"

namespace dpdp::store {
namespace {

namespace fs = std::filesystem;
using protocol::Deployment;
using protocol::Scheme;

Errc code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return Errc::InvalidArgument;
}

void write_raw(const fs::path& path, const Bytes& data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
}

class StoreTest : public ::testing::TestWithParam<Scheme> {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    std::string name = std::string(info->test_suite_name()) + "_" + info->name();
    std::replace(name.begin(), name.end(), '/', '_');
    dir = fs::temp_directory_path() / ("dpdp_store_test_" + name);
    fs::remove_all(dir);
  }
  void TearDown() override { fs::remove_all(dir); }

  // Uploads a file, applies a few updates and persists everything.
  Deployment populate(Store& st) {
    SeededRng rng = SeededRng::from_u64(101);
    auto keys = protocol::generate_keys(3, rng);
    st.save_keys(keys);
    Deployment d(keys, rng.derive("session"));
    SeededRng data = SeededRng::from_u64(102);
    d.upload("doc", GetParam(), test::random_bytes(93 * 6, data));
    d.update("doc", OpKind::Insert, 3, test::random_bytes(20, data));
    d.update("doc", OpKind::Delete, 1);
    d.update("doc", OpKind::Modify, 2, test::random_bytes(93, data));
    st.create(d.parties("doc"));
    return d;
  }

  fs::path dir;
};

TEST_P(StoreTest, RoundTripKeepsAuditOutcome) {
  Store st(dir);
  auto d = populate(st);
  ASSERT_TRUE(st.has_keys());
  auto keys = st.load_keys();
  auto loaded = st.load("doc", keys);
  const auto& orig = d.parties("doc");
  EXPECT_TRUE(loaded.client == orig.client);
  EXPECT_TRUE(loaded.server == orig.server);
  EXPECT_TRUE(loaded.tpa == orig.tpa);

  Deployment again(keys, SeededRng::from_u64(103));
  again.adopt(std::move(loaded));
  EXPECT_TRUE(again.audit("doc", 100).accepted());
  EXPECT_TRUE(again.update("doc", OpKind::Insert, 1, as_bytes("new")).accepted());
  st.save(again.parties("doc"));
  Deployment third(keys, SeededRng::from_u64(104));
  third.adopt(st.load("doc", keys));
  EXPECT_TRUE(third.audit("doc", 100).accepted());
}

TEST_P(StoreTest, CorruptedFilesFailClosed) {
  Store st(dir);
  populate(st);
  std::vector<fs::path> files{dir / "client" / "keys.bin", st.client_file("doc"), st.tpa_file("doc")};
  for (const auto& entry : fs::directory_iterator(st.server_dir("doc"))) files.push_back(entry.path());

  for (const auto& path : files) {
    const Bytes good = read_file(path);
    auto load_all = [&] {
      auto keys = st.load_keys();
      st.load("doc", keys);
    };

    Bytes truncated(good.begin(), good.end() - 5);
    write_raw(path, truncated);
    EXPECT_EQ(code_of(load_all), Errc::ChecksumMismatch) << path;

    Bytes magic = good;
    magic[0] ^= 0x20;
    write_raw(path, magic);
    EXPECT_EQ(code_of(load_all), Errc::BadMagic) << path;

    Bytes version = good;
    version[8] = kFormatVersion + 1;
    write_raw(path, version);
    EXPECT_EQ(code_of(load_all), Errc::VersionMismatch) << path;

    Bytes flipped = good;
    flipped[9 + (good.size() - 41) / 2] ^= 0x01;
    write_raw(path, flipped);
    EXPECT_EQ(code_of(load_all), Errc::ChecksumMismatch) << path;

    write_raw(path, good);
  }
}

TEST_P(StoreTest, TreeCacheIsAdvisory) {
  Store st(dir);
  auto d = populate(st);
  const auto tree = st.server_dir("doc") / "tree.bin";
  if (GetParam() != Scheme::Mht) {
    EXPECT_FALSE(fs::exists(tree));
    return;
  }
  ASSERT_TRUE(fs::exists(tree));
  fs::remove(tree);
  auto keys = st.load_keys();
  auto loaded = st.load("doc", keys);
  EXPECT_TRUE(loaded.server == d.parties("doc").server);
  EXPECT_EQ(loaded.server.mht->tree, d.parties("doc").server.mht->tree);
}

INSTANTIATE_TEST_SUITE_P(Schemes, StoreTest,
                         ::testing::Values(Scheme::Original, Scheme::Iht, Scheme::Mht),
                         [](const auto& info) { return std::string(protocol::to_string(info.param)); });

class StoreBasics : public ::testing::Test {
 protected:
  void SetUp() override {
    dir = fs::temp_directory_path() /
          ("dpdp_store_basics_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir);
  }
  void TearDown() override { fs::remove_all(dir); }
  fs::path dir;
};

TEST_F(StoreBasics, SealLayout) {
  Bytes payload{1, 2, 3};
  auto sealed = seal("ABCDEFGH", payload);
  ASSERT_EQ(sealed.size(), 8u + 1 + 3 + 32);
  EXPECT_EQ(std::string(sealed.begin(), sealed.begin() + 8), "ABCDEFGH");
  EXPECT_EQ(sealed[8], kFormatVersion);
  auto digest = sha256(ByteView(sealed).subspan(0, 12));
  EXPECT_TRUE(std::equal(digest.begin(), digest.end(), sealed.begin() + 12));
  EXPECT_EQ(unseal(sealed, "ABCDEFGH"), payload);
  EXPECT_EQ(code_of([&] { unseal(sealed, "ABCDEFGX"); }), Errc::BadMagic);
  EXPECT_EQ(code_of([&] { unseal(ByteView(sealed).subspan(0, 5), "ABCDEFGH"); }), Errc::ChecksumMismatch);
  EXPECT_EQ(code_of([&] { unseal(ByteView(sealed).subspan(0, 5), "XBCDEFGH"); }), Errc::BadMagic);
}

TEST_F(StoreBasics, AtomicWriteReplacesFile) {
  fs::create_directories(dir);
  write_file_atomic(dir / "x.bin", Bytes{1, 2});
  write_file_atomic(dir / "x.bin", Bytes{3});
  EXPECT_EQ(read_file(dir / "x.bin"), Bytes{3});
  std::size_t count = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir)) ++count;
  EXPECT_EQ(count, 1u);
  EXPECT_EQ(code_of([&] { read_file(dir / "missing.bin"); }), Errc::IoError);
}

TEST_F(StoreBasics, FileIds) {
  for (const char* ok : {"a", "doc.v2", "A-b_c.9"}) EXPECT_NO_THROW(check_file_id(ok)) << ok;
  for (const std::string& bad : std::vector<std::string>{"", ".", "..", "a/b", "a b", "x\\y", std::string(129, 'a')}) {
    EXPECT_THROW(check_file_id(bad), Error) << bad;
  }
}

TEST_F(StoreBasics, CatalogueAndErrors) {
  Store st(dir);
  EXPECT_FALSE(st.has_keys());
  SeededRng rng = SeededRng::from_u64(105);
  auto keys = protocol::generate_keys(2, rng);
  st.save_keys(keys);
  Deployment d(keys, rng.derive("session"));
  d.upload("b", Scheme::Iht, as_bytes("bee"));
  d.upload("a", Scheme::Mht, as_bytes("ay"));
  st.create(d.parties("b"));
  st.create(d.parties("a"));
  EXPECT_EQ(st.file_ids(), (std::vector<std::string>{"a", "b"}));
  EXPECT_TRUE(st.contains("a"));
  EXPECT_FALSE(st.contains("c"));
  EXPECT_EQ(code_of([&] { st.create(d.parties("a")); }), Errc::DuplicateFileId);
  EXPECT_EQ(code_of([&] { st.load("c", keys); }), Errc::UnknownFileId);
}

}  // namespace
}  // namespace dpdp::store
