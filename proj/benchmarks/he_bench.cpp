#include <benchmark/benchmark.h>

#include <numeric>

#include "medclaim/he/evaluator.hpp"
#include "medclaim/he/keys.hpp"

namespace {

using namespace medclaim;

struct Fixture {
  he::HeParams params = he::default_params();
  he::KeyBundle keys = he::keygen(params, 1);
  he::Evaluator ev{he::HeContext::create(params)};
  Prng prng{2};

  he::Ciphertext fresh(double v) {
    std::vector<double> slots(8, v);
    auto pt = ev.encoder().encode(slots, params.max_level(), params.scale);
    return he::encrypt(ev.context(), pt, keys.public_key, prng);
  }
};

Fixture& fixture() {
  static Fixture f;
  return f;
}

void BM_NttForward(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  auto params = he::make_params(n, 60, {40, 40, 40}, 60, 40);
  auto ctx = he::HeContext::create(params);
  const auto& tables = ctx->ntt(0);
  std::vector<he::u64> a(n);
  std::iota(a.begin(), a.end(), 1);
  for (auto _ : state) {
    tables.forward(a);
    benchmark::DoNotOptimize(a.data());
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_NttForward)->Arg(2048)->Arg(8192)->Arg(16384);

void BM_Encode(benchmark::State& state) {
  auto& f = fixture();
  std::vector<double> slots(7, 0.25);
  for (auto _ : state) benchmark::DoNotOptimize(f.ev.encoder().encode(slots, f.params.max_level(), f.params.scale));
}
BENCHMARK(BM_Encode);

void BM_Encrypt(benchmark::State& state) {
  auto& f = fixture();
  auto pt = f.ev.encoder().encode(std::vector<double>(7, 0.25), f.params.max_level(), f.params.scale);
  for (auto _ : state) benchmark::DoNotOptimize(he::encrypt(f.ev.context(), pt, f.keys.public_key, f.prng));
}
BENCHMARK(BM_Encrypt);

void BM_Decrypt(benchmark::State& state) {
  auto& f = fixture();
  auto ct = f.fresh(0.5);
  for (auto _ : state) benchmark::DoNotOptimize(he::decrypt(f.ev.context(), ct, f.keys.secret_key));
}
BENCHMARK(BM_Decrypt);

void BM_MulRelinRescale(benchmark::State& state) {
  auto& f = fixture();
  auto a = f.fresh(0.5), b = f.fresh(-0.75);
  for (auto _ : state) benchmark::DoNotOptimize(f.ev.mul(a, b, f.keys.relin_key));
}
BENCHMARK(BM_MulRelinRescale);

void BM_Rotate(benchmark::State& state) {
  auto& f = fixture();
  auto a = f.fresh(0.5);
  for (auto _ : state) benchmark::DoNotOptimize(f.ev.rotate(a, 1, f.keys.galois_keys));
}
BENCHMARK(BM_Rotate);

void BM_InnerProduct7(benchmark::State& state) {
  auto& f = fixture();
  auto x = f.fresh(0.5), w = f.fresh(0.1);
  for (auto _ : state) benchmark::DoNotOptimize(f.ev.inner_product(x, w, 7, f.keys.relin_key, f.keys.galois_keys));
}
BENCHMARK(BM_InnerProduct7);

}  // namespace
BENCHMARK_MAIN();
