#include <benchmark/benchmark.h>

#include "dpdp/algebra.hpp"
#include "dpdp/iht.hpp"
#include "dpdp/merkle.hpp"
#include "dpdp/mht.hpp"
#include "dpdp/original.hpp"
#include "dpdp/protocol.hpp"

namespace dpdp {
namespace {

Block random_block(std::size_t s, SeededRng& rng) {
  Bytes raw(kSectorBytes * s);
  rng.fill(raw);
  return block_from_bytes(raw, s);
}

FileMatrix random_matrix(std::size_t n, std::size_t s, SeededRng& rng) {
  Bytes raw(kSectorBytes * s * n);
  rng.fill(raw);
  return chunk_file(raw, s);
}

void BM_G1Pow(benchmark::State& state) {
  SeededRng rng = SeededRng::from_u64(1);
  G1 g = G1::random(rng);
  Scalar x = Scalar::random(rng);
  for (auto _ : state) benchmark::DoNotOptimize(g.pow(x));
}
BENCHMARK(BM_G1Pow);

void BM_MultiPow(benchmark::State& state) {
  SeededRng rng = SeededRng::from_u64(2);
  std::vector<G1> bases;
  std::vector<Scalar> exps;
  for (int i = 0; i < state.range(0); ++i) {
    bases.push_back(G1::random(rng));
    exps.push_back(Scalar::random(rng));
  }
  for (auto _ : state) benchmark::DoNotOptimize(multi_pow(bases, exps));
}
BENCHMARK(BM_MultiPow)->Arg(1)->Arg(8)->Arg(64);

void BM_Pairing(benchmark::State& state) {
  SeededRng rng = SeededRng::from_u64(3);
  G1 a = G1::random(rng);
  G2 b = G2::generator();
  for (auto _ : state) benchmark::DoNotOptimize(pairing(a, b));
}
BENCHMARK(BM_Pairing);

void BM_PairingEquation(benchmark::State& state) {
  SeededRng rng = SeededRng::from_u64(4);
  auto ctx = group_gen(128);
  Scalar a = Scalar::random_nonzero(rng);
  G1 x = G1::random(rng);
  PairingEquation eq;
  eq.lhs(x, ctx.g2.pow(a)).lhs(G1::random(rng), ctx.g2).rhs(x.pow(a), ctx.g2);
  for (auto _ : state) benchmark::DoNotOptimize(eq.holds());
}
BENCHMARK(BM_PairingEquation);

void BM_HashToG1(benchmark::State& state) {
  Bytes input(64, 7);
  for (auto _ : state) {
    input[0]++;
    benchmark::DoNotOptimize(hash_to_g1(kDomainH, input));
  }
}
BENCHMARK(BM_HashToG1);

void BM_TagBlock(benchmark::State& state) {
  const auto scheme = state.range(0);
  const auto s = static_cast<std::size_t>(state.range(1));
  SeededRng rng = SeededRng::from_u64(5);
  auto keys = mht::keygen(group_gen(128), s, rng);
  auto block = random_block(s, rng);
  for (auto _ : state) {
    if (scheme == 0) benchmark::DoNotOptimize(original::tag_block(keys.pub.pk, keys.sec.sk, block));
    if (scheme == 1) benchmark::DoNotOptimize(iht::tag_block(keys.pub.pk, keys.sec.sk, block, Rank::integer(1), 1));
    if (scheme == 2) benchmark::DoNotOptimize(mht::tag_block(keys.pub.pk, keys.sec.sk, keys.sec.hkey, block));
  }
}
BENCHMARK(BM_TagBlock)->ArgsProduct({{0, 1, 2}, {1, 8}});

void BM_ProveAndCheck(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  SeededRng rng = SeededRng::from_u64(6);
  auto kp = original::keygen(group_gen(128), 4, rng);
  auto store = iht::make_store(kp.pk, kp.sk, random_matrix(n, 4, rng));
  auto table = iht::IndexHashTable::initial(n);
  auto ranks = table.live_ranks();
  auto chal = original::gen_challenge(ranks, n, rng);
  for (auto _ : state) {
    auto proof = original::gen_proof(kp.pk, store, chal, rng);
    benchmark::DoNotOptimize(iht::check_proof(kp.pk, chal, proof, table));
  }
}
BENCHMARK(BM_ProveAndCheck)->Arg(1)->Arg(16)->Arg(64);

void BM_MhtProveAndCheck(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  SeededRng rng = SeededRng::from_u64(7);
  auto keys = mht::keygen(group_gen(128), 4, rng);
  auto up = mht::upload(keys, random_matrix(n, 4, rng));
  std::vector<Rank> ranks;
  for (std::size_t i = 1; i <= n; ++i) ranks.push_back(Rank::integer(i));
  auto chal = original::gen_challenge(ranks, n, rng);
  for (auto _ : state) {
    auto bundle = mht::gen_proof(keys.pub.pk, up.server, chal, rng);
    benchmark::DoNotOptimize(mht::check_proof(keys.pub, chal, bundle, n, up.client.root));
  }
}
BENCHMARK(BM_MhtProveAndCheck)->Arg(1)->Arg(16)->Arg(64);

void BM_MerkleBuild(benchmark::State& state) {
  SeededRng rng = SeededRng::from_u64(8);
  std::vector<G1> leaves;
  for (int i = 0; i < state.range(0); ++i) leaves.push_back(G1::random(rng));
  for (auto _ : state) benchmark::DoNotOptimize(MerkleTree::build(leaves));
}
BENCHMARK(BM_MerkleBuild)->Arg(64)->Arg(1024);

void BM_MerkleInsert(benchmark::State& state) {
  SeededRng rng = SeededRng::from_u64(9);
  std::vector<G1> leaves;
  for (int i = 0; i < state.range(0); ++i) leaves.push_back(G1::random(rng));
  auto tree = MerkleTree::build(leaves);
  G1 leaf = G1::random(rng);
  for (auto _ : state) {
    tree.insert(0, leaf);
    tree.erase(0);
  }
}
BENCHMARK(BM_MerkleInsert)->Arg(64)->Arg(1024);

void BM_SessionUpdate(benchmark::State& state) {
  const auto scheme = static_cast<protocol::Scheme>(state.range(0));
  SeededRng rng = SeededRng::from_u64(10);
  protocol::Deployment d(protocol::generate_keys(4, rng), rng.derive("session"));
  Bytes file(124 * 32, 1);
  d.upload("f", scheme, file);
  Bytes block(100, 2);
  for (auto _ : state) benchmark::DoNotOptimize(d.update("f", OpKind::Modify, 7, block));
}
BENCHMARK(BM_SessionUpdate)->Arg(0)->Arg(1)->Arg(2);

}  // namespace
}  // namespace dpdp

BENCHMARK_MAIN();
