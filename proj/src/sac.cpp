#include "cogman/sac.hpp"

#include <algorithm>
#include <cmath>

#include "cogman/errors.hpp"
#include "cogman/geometry.hpp"

namespace cogman {

namespace {

constexpr double kHalfLog2Pi = 0.91893853320467274178;
constexpr double kLog2 = 0.69314718055994530942;

double softplus(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

std::vector<int> layer_sizes(int in, const std::vector<int>& hidden, int out) {
  std::vector<int> s{in};
  s.insert(s.end(), hidden.begin(), hidden.end());
  s.push_back(out);
  return s;
}

bool all_finite(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace

void SacConfig::validate() const {
  if (!(gamma >= 0.0 && gamma < 1.0) || !(tau > 0.0 && tau <= 1.0) || !(lr > 0.0) || batch <= 0) {
    throw ConfigError("sac needs gamma in [0, 1), tau in (0, 1], lr > 0, batch > 0");
  }
  if (!(log_std_min < log_std_max) || !(init_alpha > 0.0) || replay_capacity == 0) {
    throw ConfigError("sac needs log_std_min < log_std_max, init_alpha > 0, replay capacity > 0");
  }
  for (int h : hidden) {
    if (h <= 0) throw ConfigError("hidden sizes must be positive");
  }
}

std::vector<double> standard_normal(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> N(0.0, 1.0);
  std::vector<double> v(n);
  for (double& x : v) x = N(rng);
  return v;
}

SacAgent::SacAgent(int obs_dim, int act_dim, SacConfig cfg, std::uint64_t seed)
    : obs_dim_(obs_dim), act_dim_(act_dim), cfg_(std::move(cfg)) {
  cfg_.validate();
  if (obs_dim <= 0 || act_dim <= 0) throw ConfigError("sac needs positive dimensions");
  actor_ = nn::Mlp(layer_sizes(obs_dim, cfg_.hidden, 2 * act_dim), derive_seed(seed, 1), cfg_.backend);
  actor_.zero_output_layer();
  for (int i = 0; i < 2; ++i) {
    critic_[i] = nn::Mlp(layer_sizes(obs_dim + act_dim, cfg_.hidden, 1),
                         derive_seed(seed, 2 + static_cast<std::uint64_t>(i)), cfg_.backend);
    target_[i] = critic_[i];
    critic_opt_[i] = nn::Adam(critic_[i].params().size(), {cfg_.lr});
  }
  actor_opt_ = nn::Adam(actor_.params().size(), {cfg_.lr});
  alpha_opt_ = nn::Adam(1, {cfg_.lr});
  log_alpha_ = std::log(cfg_.init_alpha);
}

double SacAgent::alpha() const { return std::exp(log_alpha_); }

void SacAgent::set_backend(nn::Backend b) {
  cfg_.backend = b;
  actor_.set_backend(b);
  for (int i = 0; i < 2; ++i) {
    critic_[i].set_backend(b);
    target_[i].set_backend(b);
  }
}

bool SacAgent::finite() const {
  return actor_.finite() && critic_[0].finite() && critic_[1].finite() && target_[0].finite() &&
         target_[1].finite() && std::isfinite(log_alpha_);
}

SacAgent::Sample SacAgent::sample_actions(const std::vector<double>& out, int batch,
                                          const std::vector<double>& eps) const {
  const int A = act_dim_;
  Sample s;
  s.action.resize(static_cast<std::size_t>(batch) * A);
  s.log_prob.assign(static_cast<std::size_t>(batch), 0.0);
  for (int b = 0; b < batch; ++b) {
    const double* o = out.data() + static_cast<std::size_t>(b) * 2 * A;
    double lp = 0.0;
    for (int k = 0; k < A; ++k) {
      const double ls = std::clamp(o[A + k] + cfg_.log_std_init, cfg_.log_std_min, cfg_.log_std_max);
      const double e = eps[static_cast<std::size_t>(b) * A + k];
      const double u = o[k] + std::exp(ls) * e;
      s.action[static_cast<std::size_t>(b) * A + k] = std::tanh(u);
      // log N(u) - log(1 - tanh(u)^2), the latter in a stable form.
      lp += -0.5 * e * e - ls - kHalfLog2Pi - 2.0 * (kLog2 - u - softplus(-2.0 * u));
    }
    s.log_prob[static_cast<std::size_t>(b)] = lp;
  }
  return s;
}

std::vector<double> SacAgent::critic_input(const std::vector<double>& obs,
                                           const std::vector<double>& act, int batch) const {
  const std::size_t D = static_cast<std::size_t>(obs_dim_), A = static_cast<std::size_t>(act_dim_);
  std::vector<double> x(static_cast<std::size_t>(batch) * (D + A));
  for (std::size_t b = 0; b < static_cast<std::size_t>(batch); ++b) {
    std::copy(obs.begin() + static_cast<std::ptrdiff_t>(b * D),
              obs.begin() + static_cast<std::ptrdiff_t>((b + 1) * D), x.begin() + static_cast<std::ptrdiff_t>(b * (D + A)));
    std::copy(act.begin() + static_cast<std::ptrdiff_t>(b * A),
              act.begin() + static_cast<std::ptrdiff_t>((b + 1) * A),
              x.begin() + static_cast<std::ptrdiff_t>(b * (D + A) + D));
  }
  return x;
}

std::vector<double> SacAgent::act(const std::vector<double>& obs, ActMode mode,
                                  std::mt19937_64& rng) const {
  if (static_cast<int>(obs.size()) != obs_dim_) throw OutOfRange("observation size mismatch");
  if (!all_finite(obs)) throw NumericalError("non-finite observation");
  if (!actor_.finite()) throw NumericalError("non-finite policy parameters");
  nn::Mlp::Cache cache;
  actor_.forward(obs.data(), 1, cache);
  const auto& out = cache.act.back();
  std::vector<double> a(static_cast<std::size_t>(act_dim_));
  if (mode == ActMode::Deterministic) {
    for (int k = 0; k < act_dim_; ++k) a[static_cast<std::size_t>(k)] = std::tanh(out[static_cast<std::size_t>(k)]);
    return a;
  }
  const auto eps = standard_normal(static_cast<std::size_t>(act_dim_), rng);
  return sample_actions(out, 1, eps).action;
}

std::vector<double> SacAgent::critic_targets(const Batch& batch,
                                             const std::vector<double>& eps_next) const {
  const int B = batch.size;
  nn::Mlp::Cache ac;
  actor_.forward(batch.next_obs.data(), B, ac);
  const Sample s = sample_actions(ac.act.back(), B, eps_next);
  const auto x = critic_input(batch.next_obs, s.action, B);
  nn::Mlp::Cache c1, c2;
  target_[0].forward(x.data(), B, c1);
  target_[1].forward(x.data(), B, c2);
  const double a = alpha();
  std::vector<double> y(static_cast<std::size_t>(B));
  for (std::size_t b = 0; b < y.size(); ++b) {
    const double q = std::min(c1.act.back()[b], c2.act.back()[b]) - a * s.log_prob[b];
    y[b] = batch.reward[b] + cfg_.gamma * (1.0 - batch.terminal[b]) * q;
  }
  return y;
}

double SacAgent::critic_loss(int which, const Batch& batch, const std::vector<double>& y,
                             std::vector<double>* grad) const {
  const int B = batch.size;
  const nn::Mlp& net = critic_[static_cast<std::size_t>(which)];
  const auto x = critic_input(batch.obs, batch.action, B);
  nn::Mlp::Cache cache;
  net.forward(x.data(), B, cache);
  const auto& q = cache.act.back();
  std::vector<double> dq(static_cast<std::size_t>(B));
  double loss = 0.0;
  for (std::size_t b = 0; b < dq.size(); ++b) {
    const double d = q[b] - y[b];
    loss += 0.5 * d * d / B;
    dq[b] = d / B;
  }
  if (grad != nullptr) {
    grad->assign(net.params().size(), 0.0);
    net.backward(cache, dq.data(), grad->data(), nullptr);
  }
  return loss;
}

double SacAgent::actor_loss(const Batch& batch, const std::vector<double>& eps,
                            std::vector<double>* grad, double* mean_log_prob) const {
  const int B = batch.size;
  const int A = act_dim_;
  const std::size_t D = static_cast<std::size_t>(obs_dim_);
  nn::Mlp::Cache ac;
  actor_.forward(batch.obs.data(), B, ac);
  const auto& out = ac.act.back();
  const Sample s = sample_actions(out, B, eps);
  const auto x = critic_input(batch.obs, s.action, B);
  nn::Mlp::Cache c1, c2;
  critic_[0].forward(x.data(), B, c1);
  critic_[1].forward(x.data(), B, c2);
  const double a = alpha();

  double loss = 0.0, lp_sum = 0.0;
  std::vector<double> pick1(static_cast<std::size_t>(B)), pick2(static_cast<std::size_t>(B));
  for (std::size_t b = 0; b < pick1.size(); ++b) {
    const double q1 = c1.act.back()[b], q2 = c2.act.back()[b];
    const bool first = q1 <= q2;
    pick1[b] = first ? 1.0 : 0.0;
    pick2[b] = first ? 0.0 : 1.0;
    loss += (a * s.log_prob[b] - std::min(q1, q2)) / B;
    lp_sum += s.log_prob[b];
  }
  if (mean_log_prob != nullptr) *mean_log_prob = lp_sum / B;
  if (grad == nullptr) return loss;

  // dQ_min/da via whichever critic is the minimum for each row.
  std::vector<double> dx1(x.size()), dx2(x.size());
  critic_[0].backward(c1, pick1.data(), nullptr, dx1.data());
  critic_[1].backward(c2, pick2.data(), nullptr, dx2.data());

  std::vector<double> dout(out.size());
  for (int b = 0; b < B; ++b) {
    const double* o = out.data() + static_cast<std::size_t>(b) * 2 * A;
    double* d = dout.data() + static_cast<std::size_t>(b) * 2 * A;
    for (int k = 0; k < A; ++k) {
      const std::size_t ia = static_cast<std::size_t>(b) * A + k;
      const std::size_t ix = static_cast<std::size_t>(b) * (D + A) + D + k;
      const double act = s.action[ia];
      const double g = dx1[ix] + dx2[ix];
      const double raw = o[A + k] + cfg_.log_std_init;
      const double ls = std::clamp(raw, cfg_.log_std_min, cfg_.log_std_max);
      const double se = std::exp(ls) * eps[ia];
      const double du = (a * 2.0 * act - g * (1.0 - act * act)) / B;
      d[k] = du;
      const bool inside = raw > cfg_.log_std_min && raw < cfg_.log_std_max;
      d[A + k] = inside ? (-a / B + du * se) : 0.0;
    }
  }
  grad->assign(actor_.params().size(), 0.0);
  actor_.backward(ac, dout.data(), grad->data(), nullptr);
  return loss;
}

UpdateDiagnostics SacAgent::update(const ReplayBuffer& buffer, std::mt19937_64& rng) {
  if (buffer.size() < static_cast<std::size_t>(cfg_.batch)) {
    throw OutOfRange("replay buffer holds fewer transitions than one batch");
  }
  return update_on(buffer.sample(cfg_.batch, rng), rng);
}

UpdateDiagnostics SacAgent::update_on(const Batch& batch, std::mt19937_64& rng) {
  const std::size_t n = static_cast<std::size_t>(batch.size) * static_cast<std::size_t>(act_dim_);
  UpdateDiagnostics diag;
  diag.alpha = alpha();

  const auto y = critic_targets(batch, standard_normal(n, rng));
  std::vector<double> grad;
  double gn = 0.0;
  for (int i = 0; i < 2; ++i) {
    diag.critic_loss += 0.5 * critic_loss(i, batch, y, &grad);
    gn += nn::l2_norm(grad);
    critic_opt_[i].step(critic_[i].params(), grad);
  }
  diag.critic_grad_norm = 0.5 * gn;
  for (double v : y) diag.mean_q += v / batch.size;

  double mean_lp = 0.0;
  diag.actor_loss = actor_loss(batch, standard_normal(n, rng), &grad, &mean_lp);
  diag.actor_grad_norm = nn::l2_norm(grad);
  actor_opt_.step(actor_.params(), grad);
  diag.entropy = -mean_lp;

  std::vector<double> la{log_alpha_};
  alpha_opt_.step(la, {-(mean_lp + cfg_.target_entropy)});
  log_alpha_ = la[0];

  for (int i = 0; i < 2; ++i) nn::polyak(target_[i].params(), critic_[i].params(), cfg_.tau);

  if (!finite() || !std::isfinite(diag.critic_loss) || !std::isfinite(diag.actor_loss)) {
    throw NumericalError("soft actor-critic update produced non-finite values");
  }
  return diag;
}

}  // namespace cogman
