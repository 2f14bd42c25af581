#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace cogman {

struct Transition {
  std::vector<double> obs;
  std::vector<double> action;
  double reward = 0.0;
  std::vector<double> next_obs;
  bool done = false;      // success or step cap
  bool terminal = false;  // success only; cuts the bootstrap
};

struct Batch {
  int size = 0;
  std::vector<double> obs;       // size x obs_dim
  std::vector<double> action;    // size x act_dim
  std::vector<double> reward;
  std::vector<double> next_obs;
  std::vector<double> terminal;  // 1.0 when the bootstrap is cut
};

/// Ring buffer of transitions. Observations are stored once as float frames;
/// consecutive transitions of an episode share the frame between them.
class ReplayBuffer {
 public:
  ReplayBuffer(int obs_dim, int act_dim, std::size_t capacity);

  int obs_dim() const { return obs_dim_; }
  int act_dim() const { return act_dim_; }
  std::size_t capacity() const { return capacity_; }
  std::size_t size() const { return size_; }

  /// Starts an episode at `obs`; subsequent append() calls chain from it.
  void begin_episode(const std::vector<double>& obs);
  void append(const std::vector<double>& action, double reward,
              const std::vector<double>& next_obs, bool done, bool terminal);

  /// Standalone transition (stores both frames).
  void add(const Transition& t);

  /// Uniform sample with replacement. Throws OutOfRange when empty.
  Batch sample(int batch, std::mt19937_64& rng) const;

  /// Transition i in insertion order among the stored ones, 0 = oldest.
  Transition get(std::size_t i) const;

 private:
  std::size_t push_frame(const std::vector<double>& obs);

  int obs_dim_;
  int act_dim_;
  std::size_t capacity_;
  std::size_t frame_capacity_;
  std::vector<float> frames_;
  std::size_t next_frame_ = 0;
  std::size_t current_frame_ = 0;
  bool has_current_ = false;

  struct Entry {
    std::size_t obs = 0;
    std::size_t next = 0;
    double reward = 0.0;
    bool done = false;
    bool terminal = false;
  };
  std::vector<Entry> entries_;
  std::vector<float> actions_;
  std::size_t head_ = 0;  // next slot to write
  std::size_t size_ = 0;
};

}  // namespace cogman
