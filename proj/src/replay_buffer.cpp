#include "cogman/replay_buffer.hpp"

#include <cmath>

#include "cogman/errors.hpp"

namespace cogman {

ReplayBuffer::ReplayBuffer(int obs_dim, int act_dim, std::size_t capacity)
    : obs_dim_(obs_dim), act_dim_(act_dim), capacity_(capacity), frame_capacity_(2 * capacity) {
  if (obs_dim <= 0 || act_dim <= 0 || capacity == 0) {
    throw ConfigError("replay buffer needs positive dimensions and capacity");
  }
  entries_.resize(capacity);
  actions_.resize(capacity * static_cast<std::size_t>(act_dim));
}

std::size_t ReplayBuffer::push_frame(const std::vector<double>& obs) {
  if (static_cast<int>(obs.size()) != obs_dim_) throw OutOfRange("observation size mismatch");
  // Frames grow lazily up to the ring size; every live transition refers to
  // at most two frames, so the last 2 * capacity frames cover all of them.
  const std::size_t slot = next_frame_ % frame_capacity_;
  const std::size_t d = static_cast<std::size_t>(obs_dim_);
  if (frames_.size() < (slot + 1) * d) frames_.resize((slot + 1) * d);
  for (std::size_t i = 0; i < d; ++i) frames_[slot * d + i] = static_cast<float>(obs[i]);
  ++next_frame_;
  return slot;
}

void ReplayBuffer::begin_episode(const std::vector<double>& obs) {
  current_frame_ = push_frame(obs);
  has_current_ = true;
}

void ReplayBuffer::append(const std::vector<double>& action, double reward,
                          const std::vector<double>& next_obs, bool done, bool terminal) {
  if (!has_current_) throw OutOfRange("append() before begin_episode()");
  if (static_cast<int>(action.size()) != act_dim_) throw OutOfRange("action size mismatch");
  if (!std::isfinite(reward)) throw NumericalError("non-finite reward");
  const std::size_t next = push_frame(next_obs);
  Entry& e = entries_[head_];
  e.obs = current_frame_;
  e.next = next;
  e.reward = reward;
  e.done = done;
  e.terminal = terminal;
  for (int k = 0; k < act_dim_; ++k) {
    actions_[head_ * static_cast<std::size_t>(act_dim_) + static_cast<std::size_t>(k)] =
        static_cast<float>(action[static_cast<std::size_t>(k)]);
  }
  head_ = (head_ + 1) % capacity_;
  if (size_ < capacity_) ++size_;
  current_frame_ = next;
  has_current_ = !done;
}

void ReplayBuffer::add(const Transition& t) {
  begin_episode(t.obs);
  append(t.action, t.reward, t.next_obs, t.done, t.terminal);
  has_current_ = false;
}

Batch ReplayBuffer::sample(int batch, std::mt19937_64& rng) const {
  if (size_ == 0) throw OutOfRange("sampling an empty replay buffer");
  Batch b;
  b.size = batch;
  const std::size_t d = static_cast<std::size_t>(obs_dim_);
  const std::size_t a = static_cast<std::size_t>(act_dim_);
  b.obs.resize(static_cast<std::size_t>(batch) * d);
  b.next_obs.resize(static_cast<std::size_t>(batch) * d);
  b.action.resize(static_cast<std::size_t>(batch) * a);
  b.reward.resize(static_cast<std::size_t>(batch));
  b.terminal.resize(static_cast<std::size_t>(batch));
  std::uniform_int_distribution<std::size_t> pick(0, size_ - 1);
  for (std::size_t i = 0; i < static_cast<std::size_t>(batch); ++i) {
    const std::size_t j = pick(rng);
    const Entry& e = entries_[j];
    for (std::size_t k = 0; k < d; ++k) {
      b.obs[i * d + k] = frames_[e.obs * d + k];
      b.next_obs[i * d + k] = frames_[e.next * d + k];
    }
    for (std::size_t k = 0; k < a; ++k) b.action[i * a + k] = actions_[j * a + k];
    b.reward[i] = e.reward;
    b.terminal[i] = e.terminal ? 1.0 : 0.0;
  }
  return b;
}

Transition ReplayBuffer::get(std::size_t i) const {
  if (i >= size_) throw OutOfRange("replay index out of range");
  const std::size_t j = (head_ + capacity_ - size_ + i) % capacity_;
  const Entry& e = entries_[j];
  const std::size_t d = static_cast<std::size_t>(obs_dim_);
  const std::size_t a = static_cast<std::size_t>(act_dim_);
  Transition t;
  t.obs.assign(frames_.begin() + static_cast<std::ptrdiff_t>(e.obs * d),
               frames_.begin() + static_cast<std::ptrdiff_t>((e.obs + 1) * d));
  t.next_obs.assign(frames_.begin() + static_cast<std::ptrdiff_t>(e.next * d),
                    frames_.begin() + static_cast<std::ptrdiff_t>((e.next + 1) * d));
  t.action.assign(actions_.begin() + static_cast<std::ptrdiff_t>(j * a),
                  actions_.begin() + static_cast<std::ptrdiff_t>((j + 1) * a));
  t.reward = e.reward;
  t.done = e.done;
  t.terminal = e.terminal;
  return t;
}

}  // namespace cogman
