#pragma once

#include <cstdint>
#include <filesystem>

#include "cogman/observation.hpp"
#include "cogman/sac.hpp"

namespace cogman {

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  std::uint64_t config_hash = 0;
  ObservationSpec obs;
  Vec4 final_E_r = Vec4::Zero();  // curriculum range at the end of training
  SacAgent agent;
};

/// Binary layout, little endian: magic "COGMANCK", u32 version, u64 config
/// hash, observation spec, final error range, actor-relevant SAC settings,
/// then per network (actor, critic 1-2, target 1-2) the layer sizes and f64
/// parameters, the temperature and the optimizer moments.
void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);

/// Throws MissingCheckpoint when the file is absent and IoError when it is
/// truncated, has the wrong magic or version.
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace cogman
