#include "cogman/nn/kernels.hpp"

namespace cogman::nn::ref {

void linear_forward(const double* X, int batch, int in, const double* W, const double* bias,
                    int out, double* Y) {
  for (int b = 0; b < batch; ++b) {
    for (int j = 0; j < out; ++j) {
      double acc = bias[j];
      for (int i = 0; i < in; ++i) acc += X[b * in + i] * W[i * out + j];
      Y[b * out + j] = acc;
    }
  }
}

void linear_backward_input(const double* dY, int batch, int out, const double* W, int in,
                           double* dX) {
  for (int b = 0; b < batch; ++b) {
    for (int i = 0; i < in; ++i) {
      double acc = 0.0;
      for (int j = 0; j < out; ++j) acc += dY[b * out + j] * W[i * out + j];
      dX[b * in + i] = acc;
    }
  }
}

void linear_backward_params(const double* X, const double* dY, int batch, int in, int out,
                            double* dW, double* dbias) {
  for (int i = 0; i < in; ++i) {
    for (int j = 0; j < out; ++j) {
      double acc = dW[i * out + j];
      for (int b = 0; b < batch; ++b) acc += X[b * in + i] * dY[b * out + j];
      dW[i * out + j] = acc;
    }
  }
  for (int j = 0; j < out; ++j) {
    double acc = dbias[j];
    for (int b = 0; b < batch; ++b) acc += dY[b * out + j];
    dbias[j] = acc;
  }
}

}  // namespace cogman::nn::ref
