#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "dpdp/cli.hpp"

namespace dpdp::cli {
namespace {

namespace fs = std::filesystem;

struct Result {
  int code;
  std::string out;
  std::string err;
};

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir = fs::temp_directory_path() /
          ("dpdp_cli_test_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir);
    fs::create_directories(dir);
    store = (dir / "store").string();
  }
  void TearDown() override { fs::remove_all(dir); }

  Result run_cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    int code = run(args, out, err);
    return {code, out.str(), err.str()};
  }

  std::string write_input(const std::string& name, std::size_t size) {
    auto path = (dir / name).string();
    std::ofstream f(path, std::ios::binary);
    for (std::size_t i = 0; i < size; ++i) f.put(static_cast<char>((i * 131 + 7) & 0xff));
    return path;
  }

  fs::path dir;
  std::string store;
};

TEST_F(CliTest, AuditIsDeterministic) {
  ASSERT_EQ(run_cli({"--store", store, "--seed", "1", "keygen"}).code, kOk);
  auto input = write_input("demo.bin", 4000);
  ASSERT_EQ(run_cli({"--store", store, "--scheme", "iht", "--seed", "2", "upload", "--file", "demo",
                     "--input", input})
                .code,
            kOk);
  std::vector<std::string> audit{"--store", store, "--scheme", "iht", "--format", "json", "--seed",
                                 "7", "audit", "--file", "demo", "--challenge", "16"};
  auto a = run_cli(audit), b = run_cli(audit);
  EXPECT_EQ(a.code, kOk) << a.err;
  EXPECT_EQ(a.out, b.out);
  auto j = nlohmann::json::parse(a.out);
  EXPECT_EQ(j.at("format"), "dpdp-report/1");
  EXPECT_EQ(j.at("verdict"), "accept");
  EXPECT_EQ(j.at("challenge").size(), 16u);
}

TEST_F(CliTest, UpdateFlowPerScheme) {
  ASSERT_EQ(run_cli({"--store", store, "--seed", "3", "--s", "4", "keygen"}).code, kOk);
  auto input = write_input("f.bin", 1000);
  auto block = write_input("b.bin", 100);
  for (std::string scheme : {"original", "iht", "mht"}) {
    auto base = std::vector<std::string>{"--store", store, "--scheme", scheme, "--seed", "4"};
    auto with = [&](std::vector<std::string> rest) {
      auto args = base;
      args.insert(args.end(), rest.begin(), rest.end());
      return run_cli(args);
    };
    ASSERT_EQ(with({"upload", "--file", scheme, "--input", input}).code, kOk);
    EXPECT_EQ(with({"update", "--file", scheme, "--op", "modify", "--position", "2", "--input", block}).code, kOk);
    EXPECT_EQ(with({"update", "--file", scheme, "--op", "insert", "--position", "1", "--input", block}).code, kOk);
    EXPECT_EQ(with({"update", "--file", scheme, "--op", "delete", "--position", "3"}).code, kOk);
    auto r = with({"audit", "--file", scheme, "--challenge", "100"});
    EXPECT_EQ(r.code, kOk) << r.out << r.err;
    EXPECT_NE(r.out.find("accept"), std::string::npos);
    auto bad = with({"update", "--file", scheme, "--op", "modify", "--position", "99", "--input", block});
    EXPECT_EQ(bad.code, kUsage);
    EXPECT_NE(bad.err.find("InvalidPosition"), std::string::npos) << bad.err;
  }
}

TEST_F(CliTest, StoreFromEnvironment) {
  ::setenv("DPDP_STORE", store.c_str(), 1);
  auto r = run_cli({"--seed", "5", "keygen"});
  ::unsetenv("DPDP_STORE");
  EXPECT_EQ(r.code, kOk);
  EXPECT_TRUE(fs::exists(fs::path(store) / "client" / "keys.bin"));
  EXPECT_EQ(run_cli({"--store", store, "keygen"}).code, kUsage);
  EXPECT_EQ(run_cli({"--store", store, "keygen", "--force"}).code, kOk);
}

TEST_F(CliTest, CorruptedStoreFailsClosed) {
  run_cli({"--store", store, "--seed", "6", "keygen"});
  auto input = write_input("f.bin", 300);
  ASSERT_EQ(run_cli({"--store", store, "upload", "--file", "x", "--input", input}).code, kOk);
  auto matrix = fs::path(store) / "server" / "x" / "matrix.bin";
  fs::resize_file(matrix, fs::file_size(matrix) - 3);
  auto r = run_cli({"--store", store, "audit", "--file", "x", "--challenge", "1"});
  EXPECT_EQ(r.code, kUsage);
  EXPECT_NE(r.err.find("ChecksumMismatch"), std::string::npos) << r.err;
}

TEST_F(CliTest, AttackCommands) {
  auto replace = run_cli({"--scheme", "original", "--seed", "1", "attack", "replace"});
  EXPECT_EQ(replace.code, kOk);
  EXPECT_NE(replace.out.find("ATTACK SUCCEEDED"), std::string::npos) << replace.out;

  auto replay = run_cli({"--scheme", "mht", "--seed", "1", "attack", "replay"});
  EXPECT_EQ(replay.code, kOk);
  EXPECT_NE(replay.out.find("ATTACK FAILED"), std::string::npos) << replay.out;

  auto forced = run_cli({"--scheme", "iht", "--seed", "1", "attack", "replay", "--expect", "succeed"});
  EXPECT_EQ(forced.code, kRejected);

  auto privacy = run_cli({"--scheme", "iht", "--seed", "1", "--format", "json", "attack", "privacy",
                          "--trials", "20"});
  EXPECT_EQ(privacy.code, kOk);
  auto j = nlohmann::json::parse(privacy.out);
  EXPECT_EQ(j.at("correct"), 20);

  auto path = (dir / "t.jsonl").string();
  EXPECT_EQ(run_cli({"--scheme", "iht", "--seed", "1", "--transcript", path, "attack", "replace"}).code, kOk);
  std::ifstream f(path);
  std::string line;
  ASSERT_TRUE(std::getline(f, line));
  EXPECT_TRUE(nlohmann::json::parse(line).contains("payload_sha256"));
}

TEST_F(CliTest, Matrix) {
  auto r = run_cli({"--seed", "3", "--format", "json", "matrix", "--trials", "100"});
  EXPECT_EQ(r.code, kOk) << r.out;
  auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j.at("format"), "dpdp-matrix/1");
  EXPECT_EQ(j.at("matches_expected"), true);
  ASSERT_EQ(j.at("cells").size(), 9u);
  for (const auto& cell : j.at("cells")) EXPECT_EQ(cell.at("succeeded"), cell.at("expected"));

  auto human = run_cli({"--seed", "3", "matrix", "--trials", "100"});
  EXPECT_NE(human.out.find("matrix matches the expected outcomes"), std::string::npos) << human.out;
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(run_cli({}).code, kUsage);
  EXPECT_EQ(run_cli({"frobnicate"}).code, kUsage);
  EXPECT_EQ(run_cli({"--scheme", "pdp", "keygen"}).code, kUsage);
  EXPECT_EQ(run_cli({"attack"}).code, kUsage);
  EXPECT_EQ(run_cli({"--store", store, "audit", "--file", "none", "--challenge", "1"}).code, kUsage);
  EXPECT_EQ(run_cli({"--help"}).code, kOk);
}

}  // namespace
}  // namespace dpdp::cli
