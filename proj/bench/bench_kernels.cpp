// Parallel vs serial reference dense kernels at the actor's layer sizes.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "inferedge/neural/kernels.hpp"

namespace k = inferedge::kernels;

namespace {

struct Buffers {
    std::vector<double> x, w, b, y, dy, dx, dw, db;
    Buffers(int batch, int in, int out)
        : x(static_cast<std::size_t>(batch) * in), w(static_cast<std::size_t>(out) * in), b(out),
          y(static_cast<std::size_t>(batch) * out), dy(y.size()), dx(x.size()), dw(w.size()), db(out) {
        std::mt19937_64 rng(7);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        for (auto* v : {&x, &w, &b, &dy})
            for (double& e : *v) e = u(rng);
    }
};

template <bool Parallel>
void BM_forward(benchmark::State& state) {
    const int batch = static_cast<int>(state.range(0));
    const int in = static_cast<int>(state.range(1));
    const int out = static_cast<int>(state.range(2));
    Buffers buf(batch, in, out);
    for (auto _ : state) {
        if constexpr (Parallel)
            k::dense_forward(buf.x, buf.w, buf.b, buf.y, batch, in, out);
        else
            k::reference::dense_forward(buf.x, buf.w, buf.b, buf.y, batch, in, out);
        benchmark::DoNotOptimize(buf.y.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long>(batch) * in * out);
}

template <bool Parallel>
void BM_backward(benchmark::State& state) {
    const int batch = static_cast<int>(state.range(0));
    const int in = static_cast<int>(state.range(1));
    const int out = static_cast<int>(state.range(2));
    Buffers buf(batch, in, out);
    for (auto _ : state) {
        if constexpr (Parallel) {
            k::dense_backward_input(buf.dy, buf.w, buf.dx, batch, in, out);
            k::dense_backward_params(buf.dy, buf.x, buf.dw, buf.db, batch, in, out);
        } else {
            k::reference::dense_backward_input(buf.dy, buf.w, buf.dx, batch, in, out);
            k::reference::dense_backward_params(buf.dy, buf.x, buf.dw, buf.db, batch, in, out);
        }
        benchmark::DoNotOptimize(buf.dw.data());
    }
    state.SetItemsProcessed(state.iterations() * 2L * batch * in * out);
}

void shapes(benchmark::internal::Benchmark* b) {
    b->Args({1, 28, 512})->Args({1, 512, 256})->Args({100, 512, 256})->Args({100, 256, 128});
}

}  // namespace

BENCHMARK(BM_forward<true>)->Apply(shapes);
BENCHMARK(BM_forward<false>)->Apply(shapes);
BENCHMARK(BM_backward<true>)->Apply(shapes);
BENCHMARK(BM_backward<false>)->Apply(shapes);

BENCHMARK_MAIN();
