// Serial reference vs OpenMP kernels: dense layers and the renderer.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "cogman/nn/kernels.hpp"
#include "cogman/vision.hpp"

namespace {

struct Layer {
  std::vector<double> x, w, b, y, dy, dx, dw, db;
  Layer(int batch, int in, int out) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    auto fill = [&](std::vector<double>& v, std::size_t n) {
      v.resize(n);
      for (double& e : v) e = u(rng);
    };
    fill(x, static_cast<std::size_t>(batch) * in);
    fill(w, static_cast<std::size_t>(in) * out);
    fill(b, static_cast<std::size_t>(out));
    fill(dy, static_cast<std::size_t>(batch) * out);
    y.resize(static_cast<std::size_t>(batch) * out);
    dx.resize(static_cast<std::size_t>(batch) * in);
    dw.assign(w.size(), 0.0);
    db.assign(b.size(), 0.0);
  }
};

template <bool Omp>
void BM_Forward(benchmark::State& st) {
  const int batch = static_cast<int>(st.range(0)), in = static_cast<int>(st.range(1)), out = 64;
  Layer l(batch, in, out);
  for (auto _ : st) {
    if (Omp) {
      cogman::nn::omp::linear_forward(l.x.data(), batch, in, l.w.data(), l.b.data(), out, l.y.data());
    } else {
      cogman::nn::ref::linear_forward(l.x.data(), batch, in, l.w.data(), l.b.data(), out, l.y.data());
    }
    benchmark::DoNotOptimize(l.y.data());
  }
  st.SetItemsProcessed(st.iterations() * batch * in * out);
}

template <bool Omp>
void BM_Backward(benchmark::State& st) {
  const int batch = static_cast<int>(st.range(0)), in = static_cast<int>(st.range(1)), out = 64;
  Layer l(batch, in, out);
  for (auto _ : st) {
    if (Omp) {
      cogman::nn::omp::linear_backward_params(l.x.data(), l.dy.data(), batch, in, out, l.dw.data(), l.db.data());
      cogman::nn::omp::linear_backward_input(l.dy.data(), batch, out, l.w.data(), in, l.dx.data());
    } else {
      cogman::nn::ref::linear_backward_params(l.x.data(), l.dy.data(), batch, in, out, l.dw.data(), l.db.data());
      cogman::nn::ref::linear_backward_input(l.dy.data(), batch, out, l.w.data(), in, l.dx.data());
    }
    benchmark::DoNotOptimize(l.dx.data());
  }
  st.SetItemsProcessed(st.iterations() * 2 * batch * in * out);
}

template <bool Omp>
void BM_Render(benchmark::State& st) {
  const cogman::World world;
  const cogman::WorkspaceSpec ws;
  const cogman::WorldState s = world.place_board(ws, 3);
  const cogman::CameraModel cam = cogman::CameraModel::eye_to_hand();
  for (auto _ : st) {
    cogman::Image img = Omp ? cogman::render(s, cam, world.geometry())
                            : cogman::render_serial(s, cam, world.geometry());
    benchmark::DoNotOptimize(img.pixels.data());
  }
}

}  // namespace

BENCHMARK(BM_Forward<false>)->Args({64, 288})->Args({64, 4128})->Args({1, 288});
BENCHMARK(BM_Forward<true>)->Args({64, 288})->Args({64, 4128})->Args({1, 288});
BENCHMARK(BM_Backward<false>)->Args({64, 288})->Args({64, 4128});
BENCHMARK(BM_Backward<true>)->Args({64, 288})->Args({64, 4128});
BENCHMARK(BM_Render<false>)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Render<true>)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
