#pragma once

#include <cstdint>
#include <string>

#include "mpc/gpc.hpp"
#include "mpc/network.hpp"

namespace mpc {

// Checkpoints are a flat little-endian float32 blob (`base.f32`, matrices in
// a fixed column-major order) plus a JSON manifest (`base.json`) recording
// the architecture, seeds, training progress, and an FNV-1a hash of the blob.

struct CheckpointMeta {
  std::string kind;  // "mpc" | "gpc"
  uint64_t config_hash = 0;
  int epochs_done = 0;
  uint64_t blob_hash = 0;
};

uint64_t save_checkpoint(const MpcNetwork<float>& net, const std::string& base,
                         uint64_t config_hash, int epochs_done);
uint64_t save_checkpoint(const GpcNetwork<float>& net, const std::string& base,
                         uint64_t config_hash, int epochs_done);

CheckpointMeta peek_checkpoint(const std::string& base);

// Loaders rebuild the network from the manifest (the stored architecture is
// authoritative) and verify the blob hash.
MpcNetwork<float> load_mpc_checkpoint(const std::string& base,
                                      CheckpointMeta* meta = nullptr);
GpcNetwork<float> load_gpc_checkpoint(const std::string& base,
                                      CheckpointMeta* meta = nullptr);

}  // namespace mpc
