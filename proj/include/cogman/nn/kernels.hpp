#pragma once

// Dense-layer kernels. Weights are stored input-major (in x out), so the
// forward pass is a sequence of row updates y += x_i * W[i, :].
//
// nn::ref is the plain serial implementation. nn::omp parallelizes over
// independent rows; every output element is accumulated in the same order in
// both, so results do not depend on the thread count.

namespace cogman::nn {

namespace ref {

// Y[b, :] = bias + sum_i X[b, i] * W[i, :]
void linear_forward(const double* X, int batch, int in, const double* W, const double* bias,
                    int out, double* Y);
// dX[b, i] = sum_j dY[b, j] * W[i, j]
void linear_backward_input(const double* dY, int batch, int out, const double* W, int in,
                           double* dX);
// dW[i, j] += sum_b X[b, i] * dY[b, j];  dbias[j] += sum_b dY[b, j]
void linear_backward_params(const double* X, const double* dY, int batch, int in, int out,
                            double* dW, double* dbias);

}  // namespace ref

namespace omp {

void linear_forward(const double* X, int batch, int in, const double* W, const double* bias,
                    int out, double* Y);
void linear_backward_input(const double* dY, int batch, int out, const double* W, int in,
                           double* dX);
void linear_backward_params(const double* X, const double* dY, int batch, int in, int out,
                            double* dW, double* dbias);

}  // namespace omp

enum class Backend { Reference, OpenMP };

}  // namespace cogman::nn
