#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <vector>

#include "cogman/nn/mlp.hpp"
#include "cogman/replay_buffer.hpp"

namespace cogman {

struct SacConfig {
  std::vector<int> hidden{64, 64};
  double gamma = 0.99;
  double tau = 0.005;
  double lr = 3e-4;
  int batch = 64;
  double target_entropy = -4.0;
  double init_alpha = 0.1;
  double log_std_min = -5.0;
  double log_std_max = 2.0;
  double log_std_init = -1.0;  // log std of a fresh actor
  std::size_t replay_capacity = 100000;
  nn::Backend backend = nn::Backend::OpenMP;

  void validate() const;
};

enum class ActMode { Stochastic, Deterministic };

struct UpdateDiagnostics {
  double critic_loss = 0.0;  // mean of both critics
  double actor_loss = 0.0;
  double alpha = 0.0;
  double entropy = 0.0;      // -mean log pi of the actor batch
  double mean_q = 0.0;
  double critic_grad_norm = 0.0;
  double actor_grad_norm = 0.0;
};

/// Soft actor-critic with a tanh-squashed Gaussian actor, twin critics with
/// Polyak-averaged targets and an automatically tuned temperature. Actions
/// live in [-1, 1]^act_dim.
class SacAgent {
 public:
  SacAgent(int obs_dim, int act_dim, SacConfig cfg, std::uint64_t seed);

  int obs_dim() const { return obs_dim_; }
  int act_dim() const { return act_dim_; }
  const SacConfig& config() const { return cfg_; }

  /// Throws NumericalError when parameters or the observation are not finite.
  std::vector<double> act(const std::vector<double>& obs, ActMode mode, std::mt19937_64& rng) const;

  /// One gradient step of critics, actor and temperature, then the target
  /// update. Throws OutOfRange when the buffer holds fewer than `batch`
  /// transitions and NumericalError when anything turns non-finite.
  UpdateDiagnostics update(const ReplayBuffer& buffer, std::mt19937_64& rng);
  UpdateDiagnostics update_on(const Batch& batch, std::mt19937_64& rng);

  // Building blocks, exposed for gradient checks. `eps` holds the standard
  // normal draws of the reparameterization, batch x act_dim.
  std::vector<double> critic_targets(const Batch& batch, const std::vector<double>& eps_next) const;
  double critic_loss(int which, const Batch& batch, const std::vector<double>& y,
                     std::vector<double>* grad) const;
  double actor_loss(const Batch& batch, const std::vector<double>& eps, std::vector<double>* grad,
                    double* mean_log_prob = nullptr) const;

  double alpha() const;
  double& log_alpha() { return log_alpha_; }
  double log_alpha() const { return log_alpha_; }

  nn::Mlp& actor() { return actor_; }
  const nn::Mlp& actor() const { return actor_; }
  nn::Mlp& critic(int i) { return critic_[static_cast<std::size_t>(i)]; }
  const nn::Mlp& critic(int i) const { return critic_[static_cast<std::size_t>(i)]; }
  nn::Mlp& target(int i) { return target_[static_cast<std::size_t>(i)]; }
  const nn::Mlp& target(int i) const { return target_[static_cast<std::size_t>(i)]; }
  nn::Adam& actor_opt() { return actor_opt_; }
  nn::Adam& critic_opt(int i) { return critic_opt_[static_cast<std::size_t>(i)]; }
  nn::Adam& alpha_opt() { return alpha_opt_; }

  void set_backend(nn::Backend b);
  bool finite() const;

 private:
  struct Sample {
    std::vector<double> action;    // batch x act_dim
    std::vector<double> log_prob;  // batch
  };
  Sample sample_actions(const std::vector<double>& out, int batch,
                        const std::vector<double>& eps) const;
  std::vector<double> critic_input(const std::vector<double>& obs, const std::vector<double>& act,
                                   int batch) const;

  int obs_dim_;
  int act_dim_;
  SacConfig cfg_;
  nn::Mlp actor_;
  std::array<nn::Mlp, 2> critic_;
  std::array<nn::Mlp, 2> target_;
  nn::Adam actor_opt_;
  std::array<nn::Adam, 2> critic_opt_;
  nn::Adam alpha_opt_;
  double log_alpha_ = 0.0;
};

std::vector<double> standard_normal(std::size_t n, std::mt19937_64& rng);

}  // namespace cogman
