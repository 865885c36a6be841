#pragma once

// Finite-difference scaffolding and small random model builders shared by
// the unit suites and the property acceptance binary. All checks run in
// double precision.

#include <cmath>
#include <random>

#include "mpc/gpc.hpp"
#include "mpc/network.hpp"

namespace fdcheck {

// With frozen winner masks every energy here is exactly quadratic in any
// single coordinate, so central differences are exact for any step size and
// a large h (default 0.1) only suppresses cancellation roundoff.
inline double rel_err(double got, double want) {
  double denom = std::max({std::abs(got), std::abs(want), 1e-6});
  return std::abs(got - want) / denom;
}

// Random multi-stream instance: 2 streams, `layers` hidden layers, widths
// drawn from [2, max_width], edges 0->1, 1->0, 0->0.
inline mpc::MpcNetwork<double>::Config small_mpc_config(std::mt19937_64& rng,
                                                        int layers,
                                                        int max_width,
                                                        bool nwta) {
  mpc::MpcNetwork<double>::Config cfg;
  auto width = [&] { return 2 + int(rng() % (max_width - 1)); };
  cfg.widths.push_back(width());
  for (int l = 0; l < layers; ++l) cfg.widths.push_back(width());
  cfg.topology.id = mpc::PatternId::custom;
  cfg.topology.streams = 2;
  cfg.topology.edges = {{0, 1}, {1, 0}, {0, 0}};
  if (nwta) {
    int min_w = cfg.widths[1];
    for (int l = 2; l < (int)cfg.widths.size(); ++l)
      min_w = std::min(min_w, cfg.widths[l]);
    cfg.act = mpc::Activation{mpc::ActKind::nwta, 1 + int(rng() % min_w)};
  } else {
    cfg.act = mpc::Activation{mpc::ActKind::identity, 0};
  }
  cfg.dyn.tau_z = 10;
  cfg.dyn.dt = 1;
  cfg.dyn.T = 30;
  cfg.dyn.sigma = 0.5 + (rng() % 100) / 50.0;
  cfg.dyn.lambda_w = 1e-4;
  cfg.seed = rng();
  return cfg;
}

inline mpc::GpcNetwork<double>::Config small_gpc_config(std::mt19937_64& rng,
                                                        mpc::GpcVariant variant) {
  mpc::GpcNetwork<double>::Config cfg;
  auto width = [&] { return 4 + int(rng() % 5); };
  cfg.widths = {width(), width(), width(), width()};
  cfg.variant = variant;
  switch (variant) {
    case mpc::GpcVariant::classical:
      cfg.act = mpc::Activation{mpc::ActKind::identity, 0};
      break;
    case mpc::GpcVariant::relu:
      cfg.act = mpc::Activation{mpc::ActKind::relu, 0};
      break;
    default: {
      int min_w = std::min({cfg.widths[1], cfg.widths[2], cfg.widths[3]});
      cfg.act = mpc::Activation{mpc::ActKind::nwta, 1 + int(rng() % min_w)};
    }
  }
  if (variant == mpc::GpcVariant::fov) {
    // blocks must tile the masked widths
    cfg.widths[0] = 8;
    cfg.widths[1] = 6;
    cfg.blocks = 2;
    cfg.mask_depth = 1;
    if (cfg.act.kind == mpc::ActKind::nwta)
      cfg.act.n_winners = 1 + int(rng() % 4);
  }
  cfg.dyn.tau_z = 10;
  cfg.dyn.dt = 1;
  cfg.dyn.T = 30;
  cfg.dyn.sigma = 0.5 + (rng() % 100) / 50.0;
  cfg.dyn.lambda_w = 1e-4;
  cfg.lambda_l = 0.0;  // the Laplacian prior is excluded from gradient checks
  cfg.seed = rng();
  return cfg;
}

template <typename Mat>
void randomize(Mat& m, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> dist(0.0, scale);
  for (int c = 0; c < m.cols(); ++c)
    for (int r = 0; r < m.rows(); ++r) m(r, c) = dist(rng);
}

// Fills a state (batch 1) with random clamped inputs and latents.
inline void random_mpc_state(const mpc::MpcNetwork<double>& net,
                             mpc::MpcNetwork<double>::State& s,
                             std::mt19937_64& rng) {
  for (int v = 0; v < net.streams(); ++v)
    for (int l = 0; l <= net.layers(); ++l) randomize(s.z[v][l], rng);
  randomize(s.action, rng);
}

// Max relative error of the analytic state gradient vs central differences
// of the free energy, with frozen winner masks.
inline double mpc_state_grad_err(mpc::MpcNetwork<double>& net,
                                 mpc::MpcNetwork<double>::State& s,
                                 double h = 1e-1) {
  net.freeze_masks(s);
  double worst = 0.0;
  for (int v = 0; v < net.streams(); ++v)
    for (int l = 1; l <= net.layers(); ++l) {
      auto grad = net.state_gradient(s, v, l);
      for (int i = 0; i < s.z[v][l].rows(); ++i) {
        double orig = s.z[v][l](i, 0);
        s.z[v][l](i, 0) = orig + h;
        double fp = net.free_energy(s);
        s.z[v][l](i, 0) = orig - h;
        double fm = net.free_energy(s);
        s.z[v][l](i, 0) = orig;
        double fd = -(fp - fm) / (2 * h);
        worst = std::max(worst, rel_err(grad(i, 0), fd));
      }
    }
  return worst;
}

// Same for the three plasticity rules: perturb weight entries and compare
// -dF/dTheta with the exposed update directions.
inline double mpc_weight_grad_err(mpc::MpcNetwork<double>& net,
                                  mpc::MpcNetwork<double>::State& s,
                                  double h = 1e-1) {
  net.freeze_masks(s);
  double worst = 0.0;
  auto probe_entries = [&](auto& m, const auto& direction) {
    for (int c = 0; c < m.cols(); ++c)
      for (int r = 0; r < m.rows(); ++r) {
        double orig = m(r, c);
        m(r, c) = orig + h;
        double fp = net.free_energy(s);
        m(r, c) = orig - h;
        double fm = net.free_energy(s);
        m(r, c) = orig;
        double fd = -(fp - fm) / (2 * h);
        worst = std::max(worst, rel_err(direction(r, c), fd));
      }
  };
  for (int v = 0; v < net.streams(); ++v)
    for (int l = 1; l <= net.layers(); ++l) {
      net.compute_errors(s);
      auto dir = net.intra_update_direction(s, v, l);
      probe_entries(net.intra_weights()[v][l], dir);
    }
  for (int e = 0; e < net.num_edges(); ++e)
    for (int l = 1; l <= net.layers(); ++l) {
      net.compute_errors(s);
      auto dir_r = net.cross_update_direction(s, e, l);
      probe_entries(net.cross_weights()[e][l], dir_r);
      net.compute_errors(s);
      auto dir_a = net.action_update_direction(s, e, l);
      probe_entries(net.action_weights()[e][l], dir_a);
    }
  return worst;
}

inline double gpc_state_grad_err(mpc::GpcNetwork<double>& net,
                                 mpc::GpcNetwork<double>::State& s,
                                 double h = 1e-1) {
  net.freeze_masks(s);
  double worst = 0.0;
  for (int l = 1; l <= net.layers(); ++l) {
    auto grad = net.state_gradient(s, l);
    for (int i = 0; i < s.z[l].rows(); ++i) {
      double orig = s.z[l](i, 0);
      s.z[l](i, 0) = orig + h;
      double fp = net.free_energy(s);
      s.z[l](i, 0) = orig - h;
      double fm = net.free_energy(s);
      s.z[l](i, 0) = orig;
      double fd = -(fp - fm) / (2 * h);
      worst = std::max(worst, rel_err(grad(i, 0), fd));
    }
  }
  return worst;
}

inline double gpc_weight_grad_err(mpc::GpcNetwork<double>& net,
                                  mpc::GpcNetwork<double>::State& s,
                                  double h = 1e-1) {
  net.freeze_masks(s);
  double worst = 0.0;
  for (int l = 1; l <= net.layers(); ++l) {
    net.compute_errors(s);
    auto dir = net.update_direction(s, l);
    auto& m = net.weights()[l];
    for (int c = 0; c < m.cols(); ++c)
      for (int r = 0; r < m.rows(); ++r) {
        if (net.layer_masked(l) && net.block_mask(l)(r, c) == 0.0) continue;
        double orig = m(r, c);
        m(r, c) = orig + h;
        double fp = net.free_energy(s);
        m(r, c) = orig - h;
        double fm = net.free_energy(s);
        m(r, c) = orig;
        double fd = -(fp - fm) / (2 * h);
        worst = std::max(worst, rel_err(dir(r, c), fd));
      }
  }
  return worst;
}

}  // namespace fdcheck
