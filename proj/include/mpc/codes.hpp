#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace mpc {

// A set of latent codes, one sample per column. Codes from NWTA models are
// ~6% dense, so they are held in compressed sparse columns in memory; on
// disk the format is flat little-endian float32 (sample-major) plus a JSON
// sidecar.
class CodeSet {
 public:
  CodeSet() = default;
  explicit CodeSet(int dim) : dim_(dim) {}

  int dim() const { return dim_; }
  int count() const { return static_cast<int>(starts_.size()) - 1; }

  // Append a dense batch (dim x B); zero entries are dropped.
  void append(const Eigen::MatrixXf& batch);

  // Gather columns `idx` into a dense dim x |idx| block.
  Eigen::MatrixXf gather(const std::vector<int>& idx) const;
  Eigen::MatrixXf gather_range(int first, int n) const;

  // Restrict to the first n samples (sweep protocols).
  CodeSet head(int n) const;

  // Keep only the first new_dim rows of every code. Codes stack per-glimpse
  // blocks, so this recovers the codes of a shorter glimpse sequence.
  CodeSet first_rows(int new_dim) const;

  void save(const std::string& path_base, uint64_t config_hash,
            uint64_t checkpoint_hash, uint64_t glimpse_seed) const;
  static CodeSet load(const std::string& path_base);

 private:
  int dim_ = 0;
  std::vector<uint64_t> starts_ = {0};  // per-column extents into idx_/val_
  std::vector<uint32_t> idx_;
  std::vector<float> val_;
};

}  // namespace mpc
