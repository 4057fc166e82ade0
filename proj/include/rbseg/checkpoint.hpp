#ifndef RBSEG_CHECKPOINT_HPP
#define RBSEG_CHECKPOINT_HPP

#include <cstdint>
#include <string>

#include "rbseg/neural/model.hpp"

namespace rbseg::io {

// Model checkpoint: 8-byte magic "RBCKPT\0\0", u32 little-endian header
// length, JSON header (architecture, width factor, depth, channels, seeds,
// parameter count, payload CRC-32), then the parameter vector as
// little-endian 32-bit floats. Byte-stable across platforms.
struct Checkpoint {
  neural::ModelSpec spec;
  std::vector<float> params;
  std::uint64_t train_seed = 0;
};

void save_checkpoint(const std::string& path, const Checkpoint& ckpt);

// Validates the header against the recomputed parameter count for the
// declared architecture and the payload CRC; tampering with either fails.
Checkpoint load_checkpoint(const std::string& path);

}  // namespace rbseg::io

#endif  // RBSEG_CHECKPOINT_HPP
