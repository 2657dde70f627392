#include <random>

#include <benchmark/benchmark.h>

#include "tldc/augment.hpp"
#include "tldc/layers.hpp"
#include "tldc/model.hpp"
#include "tldc/tensor.hpp"

using namespace tldc;

namespace {

Tensor random_tensor(const std::vector<std::size_t>& shape, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<float> d(0.0f, 1.0f);
    Tensor t(shape);
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = d(rng);
    return t;
}

}  // namespace

static void BM_Matmul(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    Tensor a = random_tensor({n, n}, 1);
    Tensor b = random_tensor({n, n}, 2);
    for (auto _ : state) {
        benchmark::DoNotOptimize(matmul(a, b));
    }
    state.SetItemsProcessed(state.iterations() *
                            static_cast<std::int64_t>(n * n * n));
}
BENCHMARK(BM_Matmul)->Arg(64)->Arg(256)->Arg(512)->Unit(benchmark::kMicrosecond);

static void BM_ConvForward(benchmark::State& state) {
    const auto side = static_cast<std::size_t>(state.range(0));
    const auto filters = static_cast<std::size_t>(state.range(1));
    Conv2dLayer conv(3, filters, 7);
    Tensor x = random_tensor({1, side, side, 3}, 3);
    ForwardCtx ctx{Mode::Infer, 0, false};
    for (auto _ : state) {
        benchmark::DoNotOptimize(conv.forward(x, ctx));
    }
}
BENCHMARK(BM_ConvForward)
    ->Args({56, 64})
    ->Args({112, 32})
    ->Args({224, 16})
    ->Unit(benchmark::kMillisecond);

static void BM_ConvBackward(benchmark::State& state) {
    const auto side = static_cast<std::size_t>(state.range(0));
    const auto filters = static_cast<std::size_t>(state.range(1));
    Conv2dLayer conv(3, filters, 7);
    Tensor x = random_tensor({1, side, side, 3}, 3);
    ForwardCtx ctx{Mode::Train, 0, false};
    Tensor y = conv.forward(x, ctx);
    Tensor up = random_tensor(y.shape(), 4);
    for (auto _ : state) {
        benchmark::DoNotOptimize(conv.backward(up));
    }
}
BENCHMARK(BM_ConvBackward)
    ->Args({56, 64})
    ->Args({112, 32})
    ->Args({224, 16})
    ->Unit(benchmark::kMillisecond);

static void BM_MaxPool(benchmark::State& state) {
    const auto side = static_cast<std::size_t>(state.range(0));
    MaxPool2dLayer pool;
    Tensor x = random_tensor({1, side, side, 32}, 5);
    ForwardCtx ctx{Mode::Infer, 0, false};
    for (auto _ : state) {
        benchmark::DoNotOptimize(pool.forward(x, ctx));
    }
}
BENCHMARK(BM_MaxPool)->Arg(112)->Arg(224)->Unit(benchmark::kMicrosecond);

static void BM_ModelForward(benchmark::State& state) {
    Model model = Model::build(default_model_config(), 11);
    Tensor batch = random_tensor({1, 224, 224, 3}, 6);
    ForwardCtx ctx{Mode::Infer, 0, false};
    for (auto _ : state) {
        benchmark::DoNotOptimize(model.forward(batch, ctx));
    }
}
BENCHMARK(BM_ModelForward)->Unit(benchmark::kMillisecond);

static void BM_ModelTrainStep(benchmark::State& state) {
    Model model = Model::build(default_model_config(), 11);
    Tensor batch = random_tensor({4, 224, 224, 3}, 6);
    ForwardCtx ctx{Mode::Train, 0, false};
    for (auto _ : state) {
        Tensor probs = model.forward(batch, ctx);
        Tensor d(probs.shape());
        for (std::size_t i = 0; i < d.size(); ++i)
            d[i] = (probs[i] - 0.5f) / 4.0f;
        benchmark::DoNotOptimize(model.backward_from_logits(d));
    }
}
BENCHMARK(BM_ModelTrainStep)->Unit(benchmark::kMillisecond);

static void BM_Augment(benchmark::State& state) {
    Tensor img = random_tensor({224, 224, 3}, 9);
    AugmentSpec spec;
    std::uint64_t index = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(augment(img, spec, 42, index++));
    }
}
BENCHMARK(BM_Augment)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
