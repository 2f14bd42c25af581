#include "cogman/nn/mlp.hpp"

#include <algorithm>
#include <cmath>

#include "cogman/errors.hpp"
#include "cogman/geometry.hpp"

namespace cogman::nn {

namespace {

void forward_kernel(Backend be, const double* X, int batch, int in, const double* W,
                    const double* b, int out, double* Y) {
  if (be == Backend::Reference) {
    ref::linear_forward(X, batch, in, W, b, out, Y);
  } else {
    omp::linear_forward(X, batch, in, W, b, out, Y);
  }
}

}  // namespace

Mlp::Mlp(std::vector<int> sizes, std::uint64_t seed, Backend backend)
    : sizes_(std::move(sizes)), backend_(backend) {
  if (sizes_.size() < 2) throw ConfigError("network needs at least an input and an output size");
  for (int s : sizes_) {
    if (s <= 0) throw ConfigError("layer sizes must be positive");
  }
  std::size_t total = 0;
  for (int l = 0; l < num_layers(); ++l) {
    offsets_.push_back(total);
    total += static_cast<std::size_t>(sizes_[l]) * sizes_[l + 1] + sizes_[l + 1];
  }
  params_.assign(total, 0.0);
  // Uniform fan-in initialization, biases zero.
  std::mt19937_64 rng(seed);
  for (int l = 0; l < num_layers(); ++l) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(sizes_[l]));
    const std::size_t nw = static_cast<std::size_t>(sizes_[l]) * sizes_[l + 1];
    for (std::size_t k = 0; k < nw; ++k) {
      params_[offsets_[l] + k] = bound * (2.0 * uniform01(rng) - 1.0);
    }
  }
}

std::size_t Mlp::bias_offset(int layer) const {
  return offsets_[static_cast<std::size_t>(layer)] +
         static_cast<std::size_t>(sizes_[layer]) * sizes_[layer + 1];
}

void Mlp::forward(const double* x, int batch, Cache& cache) const {
  const int L = num_layers();
  cache.batch = batch;
  cache.act.resize(static_cast<std::size_t>(L) + 1);
  cache.act[0].assign(x, x + static_cast<std::size_t>(batch) * sizes_[0]);
  for (int l = 0; l < L; ++l) {
    const int in = sizes_[l], out = sizes_[l + 1];
    auto& y = cache.act[l + 1];
    y.resize(static_cast<std::size_t>(batch) * out);
    forward_kernel(backend_, cache.act[l].data(), batch, in, params_.data() + weight_offset(l),
                   params_.data() + bias_offset(l), out, y.data());
    if (l + 1 < L) {
      for (double& v : y) v = v > 0.0 ? v : 0.0;
    }
  }
}

void Mlp::backward(const Cache& cache, const double* dout, double* grad, double* dx) const {
  const int L = num_layers();
  const int batch = cache.batch;
  std::vector<double> delta(dout, dout + static_cast<std::size_t>(batch) * sizes_[L]);
  std::vector<double> prev;
  for (int l = L - 1; l >= 0; --l) {
    const int in = sizes_[l], out = sizes_[l + 1];
    if (grad != nullptr) {
      if (backend_ == Backend::Reference) {
        ref::linear_backward_params(cache.act[l].data(), delta.data(), batch, in, out,
                                    grad + weight_offset(l), grad + bias_offset(l));
      } else {
        omp::linear_backward_params(cache.act[l].data(), delta.data(), batch, in, out,
                                    grad + weight_offset(l), grad + bias_offset(l));
      }
    }
    if (l == 0 && dx == nullptr) break;
    prev.resize(static_cast<std::size_t>(batch) * in);
    if (backend_ == Backend::Reference) {
      ref::linear_backward_input(delta.data(), batch, out, params_.data() + weight_offset(l), in,
                                 prev.data());
    } else {
      omp::linear_backward_input(delta.data(), batch, out, params_.data() + weight_offset(l), in,
                                 prev.data());
    }
    if (l > 0) {
      // ReLU derivative from the stored post-activation.
      const auto& a = cache.act[l];
      for (std::size_t k = 0; k < prev.size(); ++k) {
        if (!(a[k] > 0.0)) prev[k] = 0.0;
      }
      delta.swap(prev);
    } else {
      std::copy(prev.begin(), prev.end(), dx);
    }
  }
}

void Mlp::zero_output_layer() {
  const int l = num_layers() - 1;
  std::fill(params_.begin() + static_cast<std::ptrdiff_t>(weight_offset(l)), params_.end(), 0.0);
}

bool Mlp::finite() const {
  return std::all_of(params_.begin(), params_.end(), [](double v) { return std::isfinite(v); });
}

Adam::Adam(std::size_t n, AdamConfig cfg) : cfg_(cfg), m_(n, 0.0), v_(n, 0.0) {}

void Adam::step(std::vector<double>& params, const std::vector<double>& grad) {
  ++t_;
  const double c1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  const double step = cfg_.lr * std::sqrt(c2) / c1;
  const double eps = cfg_.eps * std::sqrt(c2);
  for (std::size_t k = 0; k < params.size(); ++k) {
    m_[k] = cfg_.beta1 * m_[k] + (1.0 - cfg_.beta1) * grad[k];
    v_[k] = cfg_.beta2 * v_[k] + (1.0 - cfg_.beta2) * grad[k] * grad[k];
    params[k] -= step * m_[k] / (std::sqrt(v_[k]) + eps);
  }
}

void polyak(std::vector<double>& target, const std::vector<double>& source, double tau) {
  for (std::size_t k = 0; k < target.size(); ++k) {
    target[k] = (1.0 - tau) * target[k] + tau * source[k];
  }
}

double l2_norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace cogman::nn
