#include <vector>

#include "cogman/nn/kernels.hpp"

namespace cogman::nn::omp {

// Small problems are not worth waking the thread team for.
constexpr long kParallelWork = 1 << 15;

void linear_forward(const double* X, int batch, int in, const double* W, const double* bias,
                    int out, double* Y) {
  const bool par = static_cast<long>(batch) * in * out >= kParallelWork;
#pragma omp parallel for schedule(static) if (par)
  for (int b = 0; b < batch; ++b) {
    double* y = Y + b * out;
    const double* x = X + b * in;
    for (int j = 0; j < out; ++j) y[j] = bias[j];
    for (int i = 0; i < in; ++i) {
      const double xi = x[i];
      const double* w = W + i * out;
#pragma omp simd
      for (int j = 0; j < out; ++j) y[j] += xi * w[j];
    }
  }
}

void linear_backward_input(const double* dY, int batch, int out, const double* W, int in,
                           double* dX) {
  // Transpose once so the inner update runs along contiguous memory.
  std::vector<double> Wt(static_cast<std::size_t>(in) * out);
  for (int i = 0; i < in; ++i) {
    for (int j = 0; j < out; ++j) Wt[static_cast<std::size_t>(j) * in + i] = W[i * out + j];
  }
  const bool par = static_cast<long>(batch) * in * out >= kParallelWork;
#pragma omp parallel for schedule(static) if (par)
  for (int b = 0; b < batch; ++b) {
    double* dx = dX + b * in;
    const double* dy = dY + b * out;
    for (int i = 0; i < in; ++i) dx[i] = 0.0;
    for (int j = 0; j < out; ++j) {
      const double g = dy[j];
      const double* wt = Wt.data() + static_cast<std::size_t>(j) * in;
#pragma omp simd
      for (int i = 0; i < in; ++i) dx[i] += g * wt[i];
    }
  }
}

void linear_backward_params(const double* X, const double* dY, int batch, int in, int out,
                            double* dW, double* dbias) {
  const bool par = static_cast<long>(batch) * in * out >= kParallelWork;
#pragma omp parallel for schedule(static) if (par)
  for (int i = 0; i < in; ++i) {
    double* dw = dW + i * out;
    for (int b = 0; b < batch; ++b) {
      const double xi = X[b * in + i];
      const double* dy = dY + b * out;
#pragma omp simd
      for (int j = 0; j < out; ++j) dw[j] += xi * dy[j];
    }
  }
  for (int b = 0; b < batch; ++b) {
    const double* dy = dY + b * out;
    for (int j = 0; j < out; ++j) dbias[j] += dy[j];
  }
}

}  // namespace cogman::nn::omp
