#include <benchmark/benchmark.h>

#include <vector>

#include "metaphor/layers.hpp"
#include "metaphor/ops.hpp"
#include "metaphor/random.hpp"

using namespace metaphor;

namespace {

Tensor random_tensor(Shape shape, Rng& rng, bool trainable) {
  std::size_t n = 1;
  for (auto d : shape) n *= d;
  std::vector<double> v(n);
  for (auto& x : v) x = rng.uniform(-1, 1);
  return trainable ? Tensor::parameter(std::move(shape), std::move(v))
                   : Tensor::constant(std::move(shape), std::move(v));
}

std::vector<Tensor> sentence(std::size_t length, std::size_t dim, Rng& rng) {
  std::vector<Tensor> xs;
  for (std::size_t i = 0; i < length; ++i) xs.push_back(random_tensor({dim}, rng, false));
  return xs;
}

void BM_Linear(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(1);
  const auto w = random_tensor({n, n}, rng, true);
  const auto b = random_tensor({n}, rng, true);
  const auto x = random_tensor({n}, rng, false);
  for (auto _ : state) benchmark::DoNotOptimize(linear(x, w, b));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n * n));
}
BENCHMARK(BM_Linear)->Arg(64)->Arg(300)->Arg(1200);

void BM_LinearBackward(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(2);
  const auto w = random_tensor({n, n}, rng, true);
  const auto x = random_tensor({n}, rng, true);
  for (auto _ : state) {
    backward(sum(tanh(linear(x, w))));
    w.zero_grad();
    x.zero_grad();
  }
}
BENCHMARK(BM_LinearBackward)->Arg(64)->Arg(300);

// One LSTM step at the sequence model's width (word + contextual input, 300 hidden).
void BM_LstmStep(benchmark::State& state) {
  Rng rng(3);
  const LstmCell cell(1324, 300, InitScheme::xavier, rng);
  const auto x = random_tensor({1324}, rng, false);
  const auto s0 = cell.initial_state();
  for (auto _ : state) benchmark::DoNotOptimize(cell.step(x, s0));
}
BENCHMARK(BM_LstmStep);

void BM_BiLstmSentence(benchmark::State& state) {
  const auto length = static_cast<std::size_t>(state.range(0));
  const auto dim = static_cast<std::size_t>(state.range(1));
  const auto hidden = static_cast<std::size_t>(state.range(2));
  Rng rng(4);
  const BiLstm bilstm(dim, hidden, InitScheme::xavier, rng);
  const auto xs = sentence(length, dim, rng);
  for (auto _ : state) benchmark::DoNotOptimize(bilstm.run(xs));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(length));
}
BENCHMARK(BM_BiLstmSentence)->Args({20, 64, 32})->Args({25, 1324, 300});

void BM_BiLstmForwardBackward(benchmark::State& state) {
  const auto length = static_cast<std::size_t>(state.range(0));
  const auto dim = static_cast<std::size_t>(state.range(1));
  const auto hidden = static_cast<std::size_t>(state.range(2));
  Rng rng(5);
  const BiLstm bilstm(dim, hidden, InitScheme::xavier, rng);
  const auto xs = sentence(length, dim, rng);
  const auto params = bilstm.named_parameters("bilstm");
  for (auto _ : state) {
    const auto hs = bilstm.run(xs);
    backward(sum(add_all(std::vector<Tensor>{sum(hs.front()), sum(hs.back())})));
    for (const auto& [name, p] : params) p.zero_grad();
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(length));
}
BENCHMARK(BM_BiLstmForwardBackward)->Args({20, 64, 32})->Args({25, 1324, 300});

}  // namespace

BENCHMARK_MAIN();
