#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "cogman/nn/kernels.hpp"

namespace cogman::nn {

/// Fully connected network, ReLU on hidden layers, identity output. All
/// parameters live in one flat vector: per layer W (in x out) then bias.
class Mlp {
 public:
  Mlp() = default;
  Mlp(std::vector<int> sizes, std::uint64_t seed, Backend backend = Backend::OpenMP);

  struct Cache {
    int batch = 0;
    std::vector<std::vector<double>> act;  // act[0] = input, act[l + 1] = layer l output
  };

  const std::vector<int>& sizes() const { return sizes_; }
  int input_dim() const { return sizes_.front(); }
  int output_dim() const { return sizes_.back(); }
  int num_layers() const { return static_cast<int>(sizes_.size()) - 1; }

  std::vector<double>& params() { return params_; }
  const std::vector<double>& params() const { return params_; }
  std::size_t weight_offset(int layer) const { return offsets_[static_cast<std::size_t>(layer)]; }
  std::size_t bias_offset(int layer) const;

  void set_backend(Backend b) { backend_ = b; }
  Backend backend() const { return backend_; }

  /// Forward pass over `batch` rows of `x`; the output is cache.act.back().
  void forward(const double* x, int batch, Cache& cache) const;

  /// Back-propagates dL/d(output). Parameter gradients are accumulated into
  /// `grad` (same layout as params) when non-null; dL/d(input) is written to
  /// `dx` when non-null.
  void backward(const Cache& cache, const double* dout, double* grad, double* dx) const;

  /// Zeroes the last layer's weights and bias.
  void zero_output_layer();

  bool finite() const;

 private:
  std::vector<int> sizes_;
  std::vector<std::size_t> offsets_;
  std::vector<double> params_;
  Backend backend_ = Backend::OpenMP;
};

struct AdamConfig {
  double lr = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

class Adam {
 public:
  Adam() = default;
  Adam(std::size_t n, AdamConfig cfg = {});
  void step(std::vector<double>& params, const std::vector<double>& grad);

  std::vector<double>& m() { return m_; }
  std::vector<double>& v() { return v_; }
  const std::vector<double>& m() const { return m_; }
  const std::vector<double>& v() const { return v_; }
  std::int64_t& t() { return t_; }
  std::int64_t t() const { return t_; }

 private:
  AdamConfig cfg_;
  std::vector<double> m_, v_;
  std::int64_t t_ = 0;
};

/// target <- (1 - tau) target + tau source, elementwise.
void polyak(std::vector<double>& target, const std::vector<double>& source, double tau);

double l2_norm(const std::vector<double>& v);

}  // namespace cogman::nn
