#include "mpc/idx.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>

#include "mpc/errors.hpp"

namespace mpc {

namespace {

constexpr uint32_t kImagesMagic = 0x00000803;
constexpr uint32_t kLabelsMagic = 0x00000801;

uint32_t read_be32(std::istream& in, const std::string& path) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  if (!in) fail(ErrorKind::format, path + ": truncated header");
  return (uint32_t(b[0]) << 24) | (uint32_t(b[1]) << 16) |
         (uint32_t(b[2]) << 8) | uint32_t(b[3]);
}

void write_be32(std::ostream& out, uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v >> 24),
                        static_cast<unsigned char>(v >> 16),
                        static_cast<unsigned char>(v >> 8),
                        static_cast<unsigned char>(v)};
  out.write(reinterpret_cast<char*>(b), 4);
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::io, "cannot open " + path);
  return in;
}

}  // namespace

ImageCorpus load_idx(const std::string& images_path,
                     const std::string& labels_path) {
  auto img = open_input(images_path);
  uint32_t magic = read_be32(img, images_path);
  if (magic != kImagesMagic)
    fail(ErrorKind::format,
         images_path + ": bad magic number " + std::to_string(magic));
  uint32_t n = read_be32(img, images_path);
  uint32_t rows = read_be32(img, images_path);
  uint32_t cols = read_be32(img, images_path);
  if (rows != cols)
    fail(ErrorKind::format, images_path + ": non-square images");

  auto lab = open_input(labels_path);
  uint32_t lmagic = read_be32(lab, labels_path);
  if (lmagic != kLabelsMagic)
    fail(ErrorKind::format,
         labels_path + ": bad magic number " + std::to_string(lmagic));
  uint32_t ln = read_be32(lab, labels_path);
  if (ln != n)
    fail(ErrorKind::consistency,
         "image/label count mismatch: " + std::to_string(n) + " vs " +
             std::to_string(ln));

  std::size_t npix = std::size_t(n) * rows * cols;
  std::vector<unsigned char> raw(npix);
  img.read(reinterpret_cast<char*>(raw.data()), npix);
  if (static_cast<std::size_t>(img.gcount()) != npix)
    fail(ErrorKind::format, images_path + ": truncated payload");

  ImageCorpus corpus;
  corpus.side = static_cast<int>(rows);
  corpus.pixels.resize(npix);
  for (std::size_t i = 0; i < npix; ++i)
    corpus.pixels[i] = raw[i] * (1.0f / 255.0f);

  corpus.labels.resize(n);
  lab.read(reinterpret_cast<char*>(corpus.labels.data()), n);
  if (static_cast<std::size_t>(lab.gcount()) != n)
    fail(ErrorKind::format, labels_path + ": truncated payload");
  return corpus;
}

void save_idx(const ImageCorpus& corpus, const std::string& images_path,
              const std::string& labels_path) {
  std::ofstream img(images_path, std::ios::binary);
  if (!img) fail(ErrorKind::io, "cannot write " + images_path);
  uint32_t n = static_cast<uint32_t>(corpus.count());
  write_be32(img, kImagesMagic);
  write_be32(img, n);
  write_be32(img, corpus.side);
  write_be32(img, corpus.side);
  for (float v : corpus.pixels) {
    auto b = static_cast<unsigned char>(std::lround(v * 255.0f));
    img.write(reinterpret_cast<char*>(&b), 1);
  }

  std::ofstream lab(labels_path, std::ios::binary);
  if (!lab) fail(ErrorKind::io, "cannot write " + labels_path);
  write_be32(lab, kLabelsMagic);
  write_be32(lab, n);
  lab.write(reinterpret_cast<const char*>(corpus.labels.data()), n);
}

namespace {

ImageCorpus gather(const ImageCorpus& corpus, const std::vector<uint32_t>& idx,
                   Split split) {
  ImageCorpus out;
  out.side = corpus.side;
  out.split = split;
  std::size_t d2 = std::size_t(corpus.side) * corpus.side;
  out.pixels.resize(idx.size() * d2);
  out.labels.resize(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    std::copy_n(corpus.image(idx[i]), d2, out.pixels.data() + i * d2);
    out.labels[i] = corpus.labels[idx[i]];
  }
  return out;
}

}  // namespace

std::pair<ImageCorpus, ImageCorpus> split_corpus(const ImageCorpus& corpus,
                                                 std::size_t validation_count,
                                                 uint64_t seed) {
  if (validation_count >= corpus.count())
    fail(ErrorKind::argument, "validation_count >= corpus size");
  std::vector<uint32_t> idx(corpus.count());
  std::iota(idx.begin(), idx.end(), 0u);
  std::mt19937_64 rng(seed);
  std::shuffle(idx.begin(), idx.end(), rng);
  std::size_t ntrain = corpus.count() - validation_count;
  std::vector<uint32_t> train_idx(idx.begin(), idx.begin() + ntrain);
  std::vector<uint32_t> val_idx(idx.begin() + ntrain, idx.end());
  return {gather(corpus, train_idx, Split::train),
          gather(corpus, val_idx, Split::validation)};
}

ImageCorpus subsample(const ImageCorpus& corpus, std::size_t n,
                      uint64_t seed) {
  if (n > corpus.count()) fail(ErrorKind::argument, "subsample larger than corpus");
  std::vector<uint32_t> idx(corpus.count());
  std::iota(idx.begin(), idx.end(), 0u);
  std::mt19937_64 rng(seed);
  std::shuffle(idx.begin(), idx.end(), rng);
  idx.resize(n);
  return gather(corpus, idx, corpus.split);
}

}  // namespace mpc
