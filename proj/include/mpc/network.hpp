#pragma once

#include <Eigen/Dense>
#include <random>
#include <string>
#include <vector>

#include "mpc/activation.hpp"
#include "mpc/dynamics.hpp"
#include "mpc/errors.hpp"
#include "mpc/topology.hpp"

namespace mpc {

// V parallel hierarchical streams with intra-stream top-down prediction and
// cross-stream lateral prediction conditioned on the saccade action. Latent
// dynamics follow the free-energy gradient flow; plasticity is Hebbian with
// synaptic decay and a unit-column-norm constraint.
//
// States are batched: each latent/error buffer is J x B with one sample per
// column. Parameters are read-only during e_step, so batches may run
// concurrently; m_step is a single-writer aggregation.
template <typename Scalar>
class MpcNetwork {
 public:
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  struct Config {
    std::vector<int> widths;  // J0..JL, J0 = per-stream input dim
    TopologyPattern topology;
    DynamicsConfig dyn;
    Activation act;
    uint64_t seed = 42;

    int layers() const { return static_cast<int>(widths.size()) - 1; }
  };

  struct State {
    // z[v][l], l = 0..L; l = 0 stays clamped through an e_step.
    std::vector<std::vector<Mat>> z;
    Mat action;  // 2 x B
    int batch = 0;

    // Error populations and scratch, refreshed by compute_errors.
    std::vector<std::vector<Mat>> e;     // [v][l], l >= 1
    std::vector<std::vector<Mat>> ec;    // [edge][l], l >= 1
    std::vector<std::vector<Mat>> phi;   // [v][l], l = 0..L
    std::vector<std::vector<Mat>> mask;  // [v][l], l >= 1
    std::vector<std::vector<Mat>> dz;    // [v][l], l >= 1
    bool frozen_masks = false;
  };

  explicit MpcNetwork(Config cfg) : cfg_(std::move(cfg)) {
    const int L = cfg_.layers();
    const int V = cfg_.topology.streams;
    if (L < 1) fail(ErrorKind::config, "need at least one hidden layer");
    if (V < 2) fail(ErrorKind::config, "need at least two streams");
    cfg_.dyn.steps();
    out_edges_.resize(V);
    in_edges_.resize(V);
    for (int e = 0; e < num_edges(); ++e) {
      out_edges_[cfg_.topology.edges[e].src].push_back(e);
      in_edges_[cfg_.topology.edges[e].dst].push_back(e);
    }
    init_params(cfg_.seed);
  }

  const Config& config() const { return cfg_; }
  int num_edges() const { return static_cast<int>(cfg_.topology.edges.size()); }
  int layers() const { return cfg_.layers(); }
  int streams() const { return cfg_.topology.streams; }
  int code_dim_per_glimpse() const { return streams() * cfg_.widths.back(); }

  // Parameter access (checkpointing, tests). W[v][l], l in 1..L.
  std::vector<std::vector<Mat>>& intra_weights() { return W_; }
  std::vector<std::vector<Mat>>& cross_weights() { return R_; }
  std::vector<std::vector<Mat>>& action_weights() { return A_; }
  const std::vector<std::vector<Mat>>& intra_weights() const { return W_; }
  const std::vector<std::vector<Mat>>& cross_weights() const { return R_; }
  const std::vector<std::vector<Mat>>& action_weights() const { return A_; }

  State make_state(int batch) const {
    const int L = layers(), V = streams();
    State s;
    s.batch = batch;
    s.z.assign(V, std::vector<Mat>(L + 1));
    s.e.assign(V, std::vector<Mat>(L + 1));
    s.phi.assign(V, std::vector<Mat>(L + 1));
    s.mask.assign(V, std::vector<Mat>(L + 1));
    s.dz.assign(V, std::vector<Mat>(L + 1));
    s.ec.assign(num_edges(), std::vector<Mat>(L + 1));
    for (int v = 0; v < V; ++v)
      for (int l = 0; l <= L; ++l) s.z[v][l] = Mat::Zero(cfg_.widths[l], batch);
    s.action = Mat::Zero(2, batch);
    return s;
  }

  // Clamp the sensory layers: `glimpses` stacks the per-stream views
  // (V * J0 rows), `actions` is 2 x B.
  void set_input(State& s, const Mat& glimpses, const Mat& actions) const {
    const int j0 = cfg_.widths[0];
    if (glimpses.rows() != streams() * j0 || glimpses.cols() != s.batch ||
        actions.cols() != s.batch)
      fail(ErrorKind::dimension, "input shape does not match state");
    for (int v = 0; v < streams(); ++v)
      s.z[v][0] = glimpses.middleRows(v * j0, j0);
    s.action = actions;
  }

  void reset_latents(State& s) const {
    for (int v = 0; v < streams(); ++v)
      for (int l = 1; l <= layers(); ++l) s.z[v][l].setZero();
    s.frozen_masks = false;
  }

  // mu[l,v] = W[l,v] * phi(z_below); phi is identity at the sensory layer.
  Mat predict_intra(int v, int l, const Mat& z_below) const {
    check_layer(v, l);
    if (W_[v][l].cols() != z_below.rows())
      fail(ErrorKind::dimension, "predict_intra: shape mismatch");
    if (l == 1) return W_[v][l] * z_below;
    return W_[v][l] * apply(cfg_.act, z_below);
  }

  // mu_C[l,v->q] = R * phi(z_v) + A * a.
  Mat predict_cross(int v, int q, int l, const Mat& z_v, const Mat& a) const {
    check_layer(v, l);
    int e = find_edge(v, q);
    return R_[e][l] * apply(cfg_.act, z_v) + A_[e][l] * a;
  }

  // Refresh phi, masks, e and ec from the current z. With frozen masks the
  // stored winner sets are reused and phi = z (.) mask.
  void compute_errors(State& s) const {
    const int L = layers(), V = streams();
    for (int v = 0; v < V; ++v) {
      s.phi[v][0] = s.z[v][0];
      for (int l = 1; l <= L; ++l) {
        if (!s.frozen_masks) s.mask[v][l] = derivative_mask(cfg_.act, s.z[v][l]);
        if (cfg_.act.kind == ActKind::identity)
          s.phi[v][l] = s.z[v][l];
        else
          s.phi[v][l] = s.z[v][l].cwiseProduct(s.mask[v][l]);
      }
    }
    for (int v = 0; v < V; ++v)
      for (int l = 1; l <= L; ++l) {
        s.e[v][l] = s.z[v][l];
        s.e[v][l].noalias() -= W_[v][l] * s.phi[v][l - 1];
      }
    for (int e = 0; e < num_edges(); ++e) {
      const auto [src, dst] = cfg_.topology.edges[e];
      for (int l = 1; l <= L; ++l) {
        s.ec[e][l] = s.z[dst][l];
        s.ec[e][l].noalias() -= R_[e][l] * s.phi[src][l];
        s.ec[e][l].noalias() -= A_[e][l] * s.action;
      }
    }
  }

  void freeze_masks(State& s) const {
    compute_errors(s);
    s.frozen_masks = true;
  }

  // Ensemble free energy, averaged over the batch; recomputes errors.
  double free_energy(State& s) const {
    compute_errors(s);
    return free_energy_of_current_errors(s);
  }

  // Free energy from the errors already stored in `s`, valid right after
  // e_step() or compute_errors(); skips the error recomputation.
  double settled_free_energy(const State& s) const {
    return free_energy_of_current_errors(s);
  }

  struct EStepOptions {
    bool record_trace = false;
  };

  // Euler-integrate the state dynamics for E = T/dt steps (synchronous
  // within-step updates computed from the pre-step state). Returns the
  // free-energy trace (E + 1 values) when requested.
  std::vector<double> e_step(State& s, EStepOptions opts = {}) const {
    const int L = layers(), V = streams();
    const int E = cfg_.dyn.steps();
    const Scalar rate = static_cast<Scalar>(cfg_.dyn.dt / cfg_.dyn.tau_z);
    const Scalar inv_sigma = static_cast<Scalar>(1.0 / cfg_.dyn.sigma);
    std::vector<double> trace;
    if (opts.record_trace) trace.reserve(E + 1);

    if (!opts.record_trace) {
      settle_fast(s, E, rate * inv_sigma);
      compute_errors(s);
      return trace;
    }

    for (int step = 0; step < E; ++step) {
      compute_errors(s);
      if (opts.record_trace) trace.push_back(free_energy_of_current_errors(s));
      for (int v = 0; v < V; ++v) {
        for (int l = 1; l <= L; ++l) {
          Mat& d = s.dz[v][l];
          d = -s.e[v][l];
          for (int e : in_edges_[v]) d -= s.ec[e][l];
          // Feedback through transposed prediction synapses, gated by the
          // activation derivative.
          Mat fb = Mat::Zero(cfg_.widths[l], s.batch);
          if (l < L) fb.noalias() += W_[v][l + 1].transpose() * s.e[v][l + 1];
          for (int e : out_edges_[v])
            fb.noalias() += R_[e][l].transpose() * s.ec[e][l];
          d += fb.cwiseProduct(s.mask[v][l]);
          d *= inv_sigma;
        }
      }
      for (int v = 0; v < V; ++v)
        for (int l = 1; l <= L; ++l) {
          s.z[v][l] += rate * s.dz[v][l];
          if (!s.z[v][l].allFinite())
            fail(ErrorKind::divergence,
                 "non-finite state at e_step step " + std::to_string(step));
        }
    }
    compute_errors(s);
    if (opts.record_trace) trace.push_back(free_energy_of_current_errors(s));
    return trace;
  }

  // Gradient flow right-hand side at the current state (before tau_z / dt
  // scaling); equals -dF/dz. Exposed for gradient checking.
  Mat state_gradient(State& s, int v, int l) const {
    compute_errors(s);
    const Scalar inv_sigma = static_cast<Scalar>(1.0 / cfg_.dyn.sigma);
    Mat d = -s.e[v][l];
    for (int e : in_edges_[v]) d -= s.ec[e][l];
    Mat fb = Mat::Zero(cfg_.widths[l], s.batch);
    if (l < layers()) fb.noalias() += W_[v][l + 1].transpose() * s.e[v][l + 1];
    for (int e : out_edges_[v])
      fb.noalias() += R_[e][l].transpose() * s.ec[e][l];
    d += fb.cwiseProduct(s.mask[v][l]);
    return d * inv_sigma;
  }

  // One Hebbian update per matrix from the settled state's errors, then
  // column renormalization. Errors must be current (e_step leaves them so).
  void m_step(const State& s) {
    const int L = layers(), V = streams();
    const Scalar lr = static_cast<Scalar>(cfg_.dyn.lr_w);
    const Scalar decay = static_cast<Scalar>(cfg_.dyn.lambda_w);
    const Scalar scale =
        static_cast<Scalar>(1.0 / (cfg_.dyn.sigma * s.batch));
    for (int v = 0; v < V; ++v)
      for (int l = 1; l <= L; ++l) {
        W_[v][l] *= (Scalar(1) - lr * decay);
        W_[v][l].noalias() += (lr * scale) * (s.e[v][l] * s.phi[v][l - 1].transpose());
      }
    for (int e = 0; e < num_edges(); ++e) {
      const int src = cfg_.topology.edges[e].src;
      for (int l = 1; l <= L; ++l) {
        R_[e][l] *= (Scalar(1) - lr * decay);
        R_[e][l].noalias() += (lr * scale) * (s.ec[e][l] * s.phi[src][l].transpose());
        A_[e][l] *= (Scalar(1) - lr * decay);
        A_[e][l].noalias() += (lr * scale) * (s.ec[e][l] * s.action.transpose());
      }
    }
    normalize_columns();
  }

  // Raw update direction for one matrix at batch size 1 (gradient checks);
  // equals -dF/dTheta before renormalization.
  Mat intra_update_direction(const State& s, int v, int l) const {
    return (s.e[v][l] * s.phi[v][l - 1].transpose()) /
               static_cast<Scalar>(cfg_.dyn.sigma * s.batch) -
           static_cast<Scalar>(cfg_.dyn.lambda_w) * W_[v][l];
  }
  Mat cross_update_direction(const State& s, int e, int l) const {
    const int src = cfg_.topology.edges[e].src;
    return (s.ec[e][l] * s.phi[src][l].transpose()) /
               static_cast<Scalar>(cfg_.dyn.sigma * s.batch) -
           static_cast<Scalar>(cfg_.dyn.lambda_w) * R_[e][l];
  }
  Mat action_update_direction(const State& s, int e, int l) const {
    return (s.ec[e][l] * s.action.transpose()) /
               static_cast<Scalar>(cfg_.dyn.sigma * s.batch) -
           static_cast<Scalar>(cfg_.dyn.lambda_w) * A_[e][l];
  }

  // Latent code for one glimpse: post-activation top-layer state of every
  // stream, concatenated. The state must be settled.
  Mat glimpse_code(const State& s) const {
    const int jl = cfg_.widths.back();
    Mat code(streams() * jl, s.batch);
    for (int v = 0; v < streams(); ++v)
      code.middleRows(v * jl, jl) = apply(cfg_.act, s.z[v][layers()]);
    return code;
  }

  // Full trajectory encoding: per glimpse k, reset latents, clamp inputs,
  // settle with plasticity disabled, and stack the glimpse codes over k.
  Mat encode(State& s, const std::vector<Mat>& glimpses,
             const std::vector<Mat>& actions) const {
    const int per = code_dim_per_glimpse();
    const int K = static_cast<int>(glimpses.size());
    Mat code(K * per, s.batch);
    for (int k = 0; k < K; ++k) {
      reset_latents(s);
      set_input(s, glimpses[k], actions[k]);
      e_step(s);
      code.middleRows(k * per, per) = glimpse_code(s);
    }
    return code;
  }

  void normalize_columns() {
    for (auto& sw : W_)
      for (auto& m : sw) normalize_columns_of(m);
    for (auto& se : R_)
      for (auto& m : se) normalize_columns_of(m);
    for (auto& se : A_)
      for (auto& m : se) normalize_columns_of(m);
  }

  static void normalize_columns_of(Mat& m) {
    for (int c = 0; c < m.cols(); ++c) {
      Scalar n = m.col(c).norm();
      if (n > Scalar(0)) m.col(c) /= n;
    }
  }

 private:
  // C.col(c) -= sum over winners j of M.col(j) * z(j, c): the product of M
  // with the NWTA-sparse phi(z), one gathered AXPY per winner.
  static void subtract_gathered(const Mat& M, const Mat& z,
                                const Eigen::MatrixXi& win, Mat& C) {
    const int rows = static_cast<int>(M.rows());
    const int zr = static_cast<int>(z.rows());
    const int n = static_cast<int>(win.rows());
    const Scalar* zp = z.data();
    const Scalar* mp = M.data();
    for (int c = 0; c < C.cols(); ++c) {
      Eigen::Map<Vec> out(C.data() + static_cast<size_t>(c) * rows, rows);
      for (int k = 0; k < n; ++k) {
        const int j = win(k, c);
        const Scalar zv = zp[static_cast<size_t>(c) * zr + j];
        Eigen::Map<const Vec> m(mp + static_cast<size_t>(j) * rows, rows);
        out -= zv * m;
      }
    }
  }

  // F(i, c) (+)= dot(M.col(i), E.col(c)) for the winner rows i of column c;
  // the transposed product restricted to the rows the mask keeps. Non-winner
  // entries of F are left untouched (the caller multiplies by the mask).
  static void masked_transposed(const Mat& M, const Mat& E,
                                const Eigen::MatrixXi& win, Mat& F,
                                bool accumulate) {
    const int rows = static_cast<int>(M.rows());
    const int n = static_cast<int>(win.rows());
    const Scalar* mp = M.data();
    for (int c = 0; c < E.cols(); ++c) {
      Eigen::Map<const Vec> e(E.data() + static_cast<size_t>(c) * rows, rows);
      for (int k = 0; k < n; ++k) {
        const int i = win(k, c);
        Eigen::Map<const Vec> m(mp + static_cast<size_t>(i) * rows, rows);
        const Scalar acc = m.dot(e);
        if (accumulate)
          F(i, c) += acc;
        else
          F(i, c) = acc;
      }
    }
  }

  static void winners_from_mask(const Mat& mask, int nw, Eigen::MatrixXi& win) {
    win.resize(nw, mask.cols());
    for (int c = 0; c < mask.cols(); ++c) {
      int k = 0;
      for (int r = 0; r < mask.rows() && k < nw; ++r)
        if (mask(r, c) != Scalar(0)) win(k++, c) = r;
      if (k != nw)
        fail(ErrorKind::consistency, "frozen mask winner count mismatch");
    }
  }

  static void mask_from_winners(const Eigen::MatrixXi& win, Mat& mask,
                                int rows) {
    mask.setZero(rows, win.cols());
    for (int c = 0; c < win.cols(); ++c)
      for (int k = 0; k < win.rows(); ++k) mask(win(k, c), c) = Scalar(1);
  }

  // Settling loop used when no per-step trace is requested. Identical
  // dynamics to the traced loop, but cross-stream products are batched: all
  // outgoing edges of a stream share one stacked gemm per layer, both for
  // the forward prediction and for the transposed feedback.
  void settle_fast(State& s, int E, Scalar step_scale) const {
    const int L = layers(), V = streams();
    const int B = s.batch;

    // This loop is limited by parameter traffic, not arithmetic: per-core
    // cache is ~1 MB and bandwidth collapses beyond it, while each Euler
    // step must touch every weight matrix twice (prediction and transposed
    // feedback). Running the two products of one matrix back to back keeps
    // that matrix cache-resident, so every parameter streams in only once
    // per step.
    std::vector<std::vector<Mat>> fbc(V, std::vector<Mat>(L + 1));
    std::vector<std::vector<Mat>> fbi(V, std::vector<Mat>(L + 1));
    for (int v = 0; v < V; ++v)
      for (int l = 1; l <= L; ++l) {
        fbc[v][l] = Mat::Zero(out_edges_[v].empty() ? 0 : cfg_.widths[l], B);
        fbi[v][l] = Mat::Zero(l < L ? cfg_.widths[l] : 0, B);
      }

    // NWTA makes phi column-sparse (n_winners nonzeros) and gates feedback
    // to the same winner rows, so the heavy products reduce to per-column
    // gathered AXPYs and dot products against the winner columns.
    const bool sparse = cfg_.act.kind == ActKind::nwta;
    const int nw = cfg_.act.n_winners;
    std::vector<std::vector<Eigen::MatrixXi>> win;
    std::vector<int> scratch;
    if (sparse) {
      win.assign(V, std::vector<Eigen::MatrixXi>(L + 1));
      if (s.frozen_masks)
        for (int v = 0; v < V; ++v)
          for (int l = 1; l <= L; ++l)
            winners_from_mask(s.mask[v][l], nw, win[v][l]);
    }

    for (int step = 0; step < E; ++step) {
      for (int v = 0; v < V; ++v) {
        if (!sparse) s.phi[v][0] = s.z[v][0];
        for (int l = 1; l <= L; ++l) {
          if (sparse) {
            if (!s.frozen_masks) {
              detail::nwta_winners(s.z[v][l], nw, win[v][l], scratch);
              mask_from_winners(win[v][l], s.mask[v][l], cfg_.widths[l]);
            }
            continue;
          }
          if (!s.frozen_masks)
            s.mask[v][l] = derivative_mask(cfg_.act, s.z[v][l]);
          if (cfg_.act.kind == ActKind::identity)
            s.phi[v][l] = s.z[v][l];
          else
            s.phi[v][l] = s.z[v][l].cwiseProduct(s.mask[v][l]);
        }
      }
      // Intra-stream errors; W[v][l] feeds the error below and the feedback
      // to layer l-1 while it is hot.
      for (int v = 0; v < V; ++v) {
        for (int l = 1; l <= L; ++l) {
          s.e[v][l] = s.z[v][l];
          if (sparse && l >= 2)
            subtract_gathered(W_[v][l], s.z[v][l - 1], win[v][l - 1],
                              s.e[v][l]);
          else
            s.e[v][l].noalias() -=
                W_[v][l] * (sparse ? s.z[v][0] : s.phi[v][l - 1]);
          if (l >= 2) {
            if (sparse)
              masked_transposed(W_[v][l], s.e[v][l], win[v][l - 1],
                                fbi[v][l - 1], /*accumulate=*/false);
            else
              fbi[v][l - 1].noalias() = W_[v][l].transpose() * s.e[v][l];
          }
        }
      }
      // Cross-stream errors, accumulating the transposed feedback into the
      // source stream right after each forward product.
      for (int v = 0; v < V; ++v)
        for (int l = 1; l <= L; ++l)
          if (!out_edges_[v].empty()) fbc[v][l].setZero();
      for (int v = 0; v < V; ++v) {
        for (int e : out_edges_[v]) {
          const int dst = cfg_.topology.edges[e].dst;
          for (int l = 1; l <= L; ++l) {
            s.ec[e][l] = s.z[dst][l];
            if (sparse)
              subtract_gathered(R_[e][l], s.z[v][l], win[v][l], s.ec[e][l]);
            else
              s.ec[e][l].noalias() -= R_[e][l] * s.phi[v][l];
            s.ec[e][l].noalias() -= A_[e][l] * s.action;
            if (sparse)
              masked_transposed(R_[e][l], s.ec[e][l], win[v][l], fbc[v][l],
                                /*accumulate=*/true);
            else
              fbc[v][l].noalias() += R_[e][l].transpose() * s.ec[e][l];
          }
        }
      }
      // Assemble the update and integrate (all terms are pre-step values).
      for (int v = 0; v < V; ++v) {
        for (int l = 1; l <= L; ++l) {
          Mat& d = s.dz[v][l];
          d = -s.e[v][l];
          for (int e : in_edges_[v]) d -= s.ec[e][l];
          if (l < L) d += fbi[v][l].cwiseProduct(s.mask[v][l]);
          if (!out_edges_[v].empty())
            d += fbc[v][l].cwiseProduct(s.mask[v][l]);
          s.z[v][l] += step_scale * d;
          if (!s.z[v][l].allFinite())
            fail(ErrorKind::divergence,
                 "non-finite state at e_step step " + std::to_string(step));
        }
      }
    }
  }

  void check_layer(int v, int l) const {
    if (v < 0 || v >= streams() || l < 1 || l > layers())
      fail(ErrorKind::argument, "stream/layer index out of range");
  }

  int find_edge(int src, int dst) const {
    for (int e = 0; e < num_edges(); ++e)
      if (cfg_.topology.edges[e].src == src &&
          cfg_.topology.edges[e].dst == dst)
        return e;
    fail(ErrorKind::topology, "no edge " + std::to_string(src) + "->" +
                                  std::to_string(dst) + " in pattern");
  }

  void init_params(uint64_t seed) {
    const int L = layers(), V = streams();
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> dist(0.0, 0.05);
    auto fill = [&](Mat& m, int rows, int cols) {
      m.resize(rows, cols);
      for (int c = 0; c < cols; ++c)
        for (int r = 0; r < rows; ++r) m(r, c) = static_cast<Scalar>(dist(rng));
      normalize_columns_of(m);
    };
    W_.assign(V, std::vector<Mat>(L + 1));
    for (int v = 0; v < V; ++v)
      for (int l = 1; l <= L; ++l)
        fill(W_[v][l], cfg_.widths[l], cfg_.widths[l - 1]);
    R_.assign(num_edges(), std::vector<Mat>(L + 1));
    A_.assign(num_edges(), std::vector<Mat>(L + 1));
    for (int e = 0; e < num_edges(); ++e)
      for (int l = 1; l <= L; ++l) {
        fill(R_[e][l], cfg_.widths[l], cfg_.widths[l]);
        fill(A_[e][l], cfg_.widths[l], 2);
      }
  }

  double free_energy_of_current_errors(const State& s) const {
    double data = 0.0;
    for (int v = 0; v < streams(); ++v)
      for (int l = 1; l <= layers(); ++l)
        data += s.e[v][l].template cast<double>().squaredNorm();
    for (int e = 0; e < num_edges(); ++e)
      for (int l = 1; l <= layers(); ++l)
        data += s.ec[e][l].template cast<double>().squaredNorm();
    double f = 0.5 * data / cfg_.dyn.sigma / s.batch;
    f += 0.5 * cfg_.dyn.lambda_w * param_sq_norm();
    return f;
  }

  double param_sq_norm() const {
    double p = 0.0;
    for (const auto& sw : W_)
      for (const auto& m : sw) p += m.template cast<double>().squaredNorm();
    for (const auto& se : R_)
      for (const auto& m : se) p += m.template cast<double>().squaredNorm();
    for (const auto& se : A_)
      for (const auto& m : se) p += m.template cast<double>().squaredNorm();
    return p;
  }

  Config cfg_;
  std::vector<std::vector<Mat>> W_, R_, A_;
  std::vector<std::vector<int>> out_edges_, in_edges_;
};

}  // namespace mpc
