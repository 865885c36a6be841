#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace mpc {

enum class Split { train, validation, test };

// Immutable after load; safe to share across workers.
struct ImageCorpus {
  int side = 0;  // D: images are D x D
  std::vector<float> pixels;  // count * side * side, row-major, in [0,1]
  std::vector<uint8_t> labels;
  Split split = Split::train;

  std::size_t count() const { return labels.size(); }
  const float* image(std::size_t i) const {
    return pixels.data() + i * static_cast<std::size_t>(side) * side;
  }
};

// IDX binary readers/writers (big-endian headers, magic 0x803 / 0x801).
ImageCorpus load_idx(const std::string& images_path,
                     const std::string& labels_path);
void save_idx(const ImageCorpus& corpus, const std::string& images_path,
              const std::string& labels_path);

// Deterministic shuffled split; validation takes the last `validation_count`
// shuffled indices.
std::pair<ImageCorpus, ImageCorpus> split_corpus(const ImageCorpus& corpus,
                                                 std::size_t validation_count,
                                                 uint64_t seed);

// Subsample without replacement (sample-efficiency sweeps).
ImageCorpus subsample(const ImageCorpus& corpus, std::size_t n, uint64_t seed);

}  // namespace mpc
