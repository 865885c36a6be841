#include "mpc/codes.hpp"

#include <fstream>

#include "json.hpp"
#include "mpc/errors.hpp"

namespace mpc {

void CodeSet::append(const Eigen::MatrixXf& batch) {
  if (dim_ == 0) dim_ = static_cast<int>(batch.rows());
  if (batch.rows() != dim_)
    fail(ErrorKind::dimension, "code batch dimension mismatch");
  for (int c = 0; c < batch.cols(); ++c) {
    for (int r = 0; r < dim_; ++r) {
      float v = batch(r, c);
      if (v != 0.0f) {
        idx_.push_back(static_cast<uint32_t>(r));
        val_.push_back(v);
      }
    }
    starts_.push_back(idx_.size());
  }
}

Eigen::MatrixXf CodeSet::gather(const std::vector<int>& idx) const {
  Eigen::MatrixXf out = Eigen::MatrixXf::Zero(dim_, idx.size());
  for (std::size_t c = 0; c < idx.size(); ++c) {
    if (idx[c] < 0 || idx[c] >= count())
      fail(ErrorKind::argument, "code index out of range");
    for (uint64_t k = starts_[idx[c]]; k < starts_[idx[c] + 1]; ++k)
      out(idx_[k], c) = val_[k];
  }
  return out;
}

Eigen::MatrixXf CodeSet::gather_range(int first, int n) const {
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = first + i;
  return gather(idx);
}

CodeSet CodeSet::head(int n) const {
  if (n > count()) fail(ErrorKind::argument, "head beyond code count");
  CodeSet out(dim_);
  out.starts_.assign(starts_.begin(), starts_.begin() + n + 1);
  out.idx_.assign(idx_.begin(), idx_.begin() + starts_[n]);
  out.val_.assign(val_.begin(), val_.begin() + starts_[n]);
  return out;
}

CodeSet CodeSet::first_rows(int new_dim) const {
  if (new_dim < 1 || new_dim > dim_)
    fail(ErrorKind::argument, "first_rows dimension out of range");
  CodeSet out(new_dim);
  for (int c = 0; c < count(); ++c) {
    for (uint64_t k = starts_[c]; k < starts_[c + 1]; ++k)
      if (idx_[k] < static_cast<uint32_t>(new_dim)) {
        out.idx_.push_back(idx_[k]);
        out.val_.push_back(val_[k]);
      }
    out.starts_.push_back(out.idx_.size());
  }
  return out;
}

void CodeSet::save(const std::string& path_base, uint64_t config_hash,
                   uint64_t checkpoint_hash, uint64_t glimpse_seed) const {
  std::ofstream out(path_base + ".f32", std::ios::binary);
  if (!out) fail(ErrorKind::io, "cannot write " + path_base + ".f32");
  std::vector<float> col(dim_);
  for (int c = 0; c < count(); ++c) {
    std::fill(col.begin(), col.end(), 0.0f);
    for (uint64_t k = starts_[c]; k < starts_[c + 1]; ++k)
      col[idx_[k]] = val_[k];
    out.write(reinterpret_cast<const char*>(col.data()),
              static_cast<std::streamsize>(col.size() * sizeof(float)));
  }

  nlohmann::json sidecar = {
      {"count", count()},
      {"dim", dim_},
      {"config_hash", config_hash},
      {"checkpoint_hash", checkpoint_hash},
      {"glimpse_seed", glimpse_seed},
      {"layout", "sample-major little-endian float32"},
  };
  std::ofstream js(path_base + ".json");
  js << sidecar.dump(2) << "\n";
}

CodeSet CodeSet::load(const std::string& path_base) {
  std::ifstream js(path_base + ".json");
  if (!js) fail(ErrorKind::io, "cannot open " + path_base + ".json");
  nlohmann::json sidecar = nlohmann::json::parse(js);
  int dim = sidecar.at("dim").get<int>();
  int count = sidecar.at("count").get<int>();

  std::ifstream in(path_base + ".f32", std::ios::binary);
  if (!in) fail(ErrorKind::io, "cannot open " + path_base + ".f32");
  CodeSet set(dim);
  std::vector<float> col(dim);
  for (int c = 0; c < count; ++c) {
    in.read(reinterpret_cast<char*>(col.data()),
            static_cast<std::streamsize>(col.size() * sizeof(float)));
    if (!in) fail(ErrorKind::format, path_base + ".f32: truncated payload");
    for (int r = 0; r < dim; ++r)
      if (col[r] != 0.0f) {
        set.idx_.push_back(static_cast<uint32_t>(r));
        set.val_.push_back(col[r]);
      }
    set.starts_.push_back(set.idx_.size());
  }
  return set;
}

}  // namespace mpc
