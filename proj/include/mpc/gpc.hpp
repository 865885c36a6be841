#pragma once

#include <Eigen/Dense>
#include <random>
#include <string>
#include <vector>

#include "mpc/activation.hpp"
#include "mpc/dynamics.hpp"
#include "mpc/errors.hpp"

namespace mpc {

enum class GpcVariant { classical, relu, nwta, fov };

GpcVariant parse_gpc_variant(const std::string& name);
std::string gpc_variant_name(GpcVariant v);

// Generative predictive coding: W[l] (J_{l-1} x J_l) predicts layer l-1 from
// layer l, errors attach to layers 0..L-1, the top layer has none. The fov
// variant clamps glimpse vectors instead of whole images and constrains the
// lower weight matrices to per-stream blocks via a binary mask.
template <typename Scalar>
class GpcNetwork {
 public:
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  struct Config {
    std::vector<int> widths;  // J0..JL
    GpcVariant variant = GpcVariant::nwta;
    Activation act;           // identity for classical, relu / nwta otherwise
    DynamicsConfig dyn;
    double lambda_l = 1e-3;   // Laplacian latent prior (classical only)
    int blocks = 0;           // fov: per-stream block count
    int mask_depth = 1;       // fov: how many lower matrices are masked
    uint64_t seed = 42;

    int layers() const { return static_cast<int>(widths.size()) - 1; }
  };

  struct State {
    std::vector<Mat> z;     // l = 0..L; z[0] clamped
    std::vector<Mat> e;     // l = 0..L-1
    std::vector<Mat> phi;   // l = 1..L
    std::vector<Mat> mask;  // l = 1..L
    std::vector<Mat> dz;
    int batch = 0;
    bool frozen_masks = false;
  };

  explicit GpcNetwork(Config cfg) : cfg_(std::move(cfg)) {
    if (cfg_.layers() < 1) fail(ErrorKind::config, "need at least one layer");
    cfg_.dyn.steps();
    if (cfg_.variant == GpcVariant::fov) {
      if (cfg_.blocks < 2) fail(ErrorKind::config, "fov needs >= 2 blocks");
      if (cfg_.mask_depth < 1 || cfg_.mask_depth >= cfg_.layers())
        fail(ErrorKind::config, "fov mask depth must be in [1, L-1]");
      for (int l = 0; l <= cfg_.mask_depth; ++l)
        if (cfg_.widths[l] % cfg_.blocks != 0)
          fail(ErrorKind::config, "masked layer widths must tile the blocks");
    }
    init_params(cfg_.seed);
  }

  const Config& config() const { return cfg_; }
  int layers() const { return cfg_.layers(); }
  std::vector<Mat>& weights() { return W_; }
  const std::vector<Mat>& weights() const { return W_; }
  const Mat& block_mask(int l) const { return masks_[l]; }
  bool layer_masked(int l) const {
    return cfg_.variant == GpcVariant::fov && l >= 1 && l <= cfg_.mask_depth;
  }

  State make_state(int batch) const {
    State s;
    s.batch = batch;
    const int L = layers();
    s.z.resize(L + 1);
    s.e.resize(L);
    s.phi.resize(L + 1);
    s.mask.resize(L + 1);
    s.dz.resize(L + 1);
    for (int l = 0; l <= L; ++l) s.z[l] = Mat::Zero(cfg_.widths[l], batch);
    return s;
  }

  void set_input(State& s, const Mat& input) const {
    if (input.rows() != cfg_.widths[0] || input.cols() != s.batch)
      fail(ErrorKind::dimension, "input shape does not match state");
    s.z[0] = input;
  }

  void reset_latents(State& s) const {
    for (int l = 1; l <= layers(); ++l) s.z[l].setZero();
    s.frozen_masks = false;
  }

  void compute_errors(State& s) const {
    const int L = layers();
    for (int l = 1; l <= L; ++l) {
      if (!s.frozen_masks) s.mask[l] = derivative_mask(cfg_.act, s.z[l]);
      if (cfg_.act.kind == ActKind::identity)
        s.phi[l] = s.z[l];
      else
        s.phi[l] = s.z[l].cwiseProduct(s.mask[l]);
    }
    for (int l = 0; l < L; ++l) {
      s.e[l].noalias() = -(W_[l + 1] * s.phi[l + 1]);
      s.e[l] += s.z[l];
    }
  }

  void freeze_masks(State& s) const {
    compute_errors(s);
    s.frozen_masks = true;
  }

  double free_energy(State& s) const {
    compute_errors(s);
    return free_energy_of_current_errors(s);
  }

  std::vector<double> e_step(State& s, bool record_trace = false) const {
    const int L = layers();
    const int E = cfg_.dyn.steps();
    const Scalar rate = static_cast<Scalar>(cfg_.dyn.dt / cfg_.dyn.tau_z);
    const Scalar inv_sigma = static_cast<Scalar>(1.0 / cfg_.dyn.sigma);
    const Scalar lap = static_cast<Scalar>(cfg_.lambda_l);
    std::vector<double> trace;
    for (int step = 0; step < E; ++step) {
      compute_errors(s);
      if (record_trace) trace.push_back(free_energy_of_current_errors(s));
      for (int l = 1; l <= L; ++l) {
        Mat& d = s.dz[l];
        d.noalias() = W_[l].transpose() * s.e[l - 1];
        d = d.cwiseProduct(s.mask[l]);
        if (l < L) d -= s.e[l];
        d *= inv_sigma;
        if (cfg_.variant == GpcVariant::classical && lap != Scalar(0))
          d -= lap * s.z[l].array().sign().matrix();
      }
      for (int l = 1; l <= L; ++l) {
        s.z[l] += rate * s.dz[l];
        if (!s.z[l].allFinite())
          fail(ErrorKind::divergence,
               "non-finite state at gpc e_step step " + std::to_string(step));
      }
    }
    compute_errors(s);
    if (record_trace) trace.push_back(free_energy_of_current_errors(s));
    return trace;
  }

  // -dF/dz at the current state (lambda_l excluded), for gradient checks.
  Mat state_gradient(State& s, int l) const {
    compute_errors(s);
    const Scalar inv_sigma = static_cast<Scalar>(1.0 / cfg_.dyn.sigma);
    Mat d = (W_[l].transpose() * s.e[l - 1]).cwiseProduct(s.mask[l]);
    if (l < layers()) d -= s.e[l];
    return d * inv_sigma;
  }

  void m_step(const State& s) {
    const Scalar lr = static_cast<Scalar>(cfg_.dyn.lr_w);
    const Scalar decay = static_cast<Scalar>(cfg_.dyn.lambda_w);
    const Scalar scale = static_cast<Scalar>(1.0 / (cfg_.dyn.sigma * s.batch));
    for (int l = 1; l <= layers(); ++l) {
      W_[l] *= (Scalar(1) - lr * decay);
      W_[l].noalias() += (lr * scale) * (s.e[l - 1] * s.phi[l].transpose());
      if (layer_masked(l)) W_[l] = W_[l].cwiseProduct(masks_[l]);
      normalize_columns_of(W_[l]);
    }
  }

  Mat update_direction(const State& s, int l) const {
    return (s.e[l - 1] * s.phi[l].transpose()) /
               static_cast<Scalar>(cfg_.dyn.sigma * s.batch) -
           static_cast<Scalar>(cfg_.dyn.lambda_w) * W_[l];
  }

  // Sensory-layer prediction of the settled state.
  Mat reconstruct(const State& s) const { return W_[1] * s.phi[1]; }

  // Whole-image variants: one settle, phi(z^L). fov callers concatenate
  // per-glimpse codes themselves (harness).
  Mat encode(State& s, const Mat& input) const {
    reset_latents(s);
    set_input(s, input);
    e_step(s);
    return apply(cfg_.act, s.z[layers()]);
  }

  static void normalize_columns_of(Mat& m) {
    for (int c = 0; c < m.cols(); ++c) {
      Scalar n = m.col(c).norm();
      if (n > Scalar(0)) m.col(c) /= n;
    }
  }

 private:
  void init_params(uint64_t seed) {
    const int L = layers();
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> dist(0.0, 0.05);
    W_.resize(L + 1);
    masks_.resize(L + 1);
    for (int l = 1; l <= L; ++l) {
      Mat& m = W_[l];
      m.resize(cfg_.widths[l - 1], cfg_.widths[l]);
      for (int c = 0; c < m.cols(); ++c)
        for (int r = 0; r < m.rows(); ++r) m(r, c) = static_cast<Scalar>(dist(rng));
      if (layer_masked(l)) {
        masks_[l] = make_block_mask(cfg_.widths[l - 1], cfg_.widths[l]);
        m = m.cwiseProduct(masks_[l]);
      }
      normalize_columns_of(m);
    }
  }

  Mat make_block_mask(int rows, int cols) const {
    Mat mask = Mat::Zero(rows, cols);
    int rb = rows / cfg_.blocks, cb = cols / cfg_.blocks;
    for (int b = 0; b < cfg_.blocks; ++b)
      mask.block(b * rb, b * cb, rb, cb).setOnes();
    return mask;
  }

  double free_energy_of_current_errors(const State& s) const {
    double data = 0.0;
    for (int l = 0; l < layers(); ++l)
      data += s.e[l].template cast<double>().squaredNorm();
    double f = 0.5 * data / cfg_.dyn.sigma / s.batch;
    for (int l = 1; l <= layers(); ++l)
      f += 0.5 * cfg_.dyn.lambda_w * W_[l].template cast<double>().squaredNorm();
    return f;
  }

  Config cfg_;
  std::vector<Mat> W_;
  std::vector<Mat> masks_;
};

template <typename Scalar>
using GpcState = typename GpcNetwork<Scalar>::State;

inline GpcVariant parse_gpc_variant(const std::string& name) {
  if (name == "classical" || name == "gpc") return GpcVariant::classical;
  if (name == "relu" || name == "gpc-relu") return GpcVariant::relu;
  if (name == "nwta" || name == "gpc-nwta") return GpcVariant::nwta;
  if (name == "fov" || name == "gpc-fov") return GpcVariant::fov;
  fail(ErrorKind::config, "unknown gpc variant: " + name);
}

inline std::string gpc_variant_name(GpcVariant v) {
  switch (v) {
    case GpcVariant::classical: return "gpc";
    case GpcVariant::relu: return "gpc-relu";
    case GpcVariant::nwta: return "gpc-nwta";
    case GpcVariant::fov: return "gpc-fov";
  }
  return "?";
}

}  // namespace mpc
