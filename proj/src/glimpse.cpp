#include "mpc/glimpse.hpp"

#include <random>

#include "mpc/errors.hpp"

namespace mpc {

void GlimpseConfig::validate(int image_side) const {
  if (streams() < 2) fail(ErrorKind::config, "need at least 2 views");
  if (!(S_P > S_F && S_F > S) || S_C != S)
    fail(ErrorKind::config, "view sides must satisfy S_P > S_F > S = S_C");
  if (S_F % S != 0 || S_P % S != 0)
    fail(ErrorKind::config, "pooling factors S_F/S and S_P/S must be integral");
  if (C != 0 && C != 1 && C != 2 && C != 4)
    fail(ErrorKind::config, "foveal count must be 0, 1, 2 or 4");
  if (center_lo > center_hi || center_hi >= image_side)
    fail(ErrorKind::config, "empty or out-of-range center sampling range");
  if (K < 1) fail(ErrorKind::config, "K must be >= 1");
}

std::vector<std::pair<int, int>> sample_saccade_centers(
    int image_side, int k, const GlimpseConfig& cfg, uint64_t seed) {
  cfg.validate(image_side);
  std::mt19937_64 rng(seed);
  uint64_t span = static_cast<uint64_t>(cfg.center_hi - cfg.center_lo + 1);
  std::vector<std::pair<int, int>> centers;
  centers.reserve(k);
  for (int i = 0; i < k; ++i) {
    int cx = cfg.center_lo + static_cast<int>(rng() % span);
    int cy = cfg.center_lo + static_cast<int>(rng() % span);
    centers.emplace_back(cx, cy);
  }
  return centers;
}

namespace {

// Patch with top-left (x0, y0), side `s`, zero outside the image, pooled by
// `f` then mean-centered. Output appended row-major.
void emit_view(const float* image, int side, int x0, int y0, int s, int f,
               float* out, int out_dim) {
  int pooled = s / f;
  float inv = 1.0f / (f * f);
  double mean = 0.0;
  for (int py = 0; py < pooled; ++py) {
    for (int px = 0; px < pooled; ++px) {
      float acc = 0.0f;
      for (int dy = 0; dy < f; ++dy) {
        int y = y0 + py * f + dy;
        if (y < 0 || y >= side) continue;
        for (int dx = 0; dx < f; ++dx) {
          int x = x0 + px * f + dx;
          if (x < 0 || x >= side) continue;
          acc += image[y * side + x];
        }
      }
      float v = acc * inv;
      out[py * pooled + px] = v;
      mean += v;
    }
  }
  float m = static_cast<float>(mean / out_dim);
  for (int i = 0; i < out_dim; ++i) out[i] -= m;
}

}  // namespace

Eigen::VectorXf extract_glimpse(const float* image, int image_side,
                                std::pair<int, int> center,
                                const GlimpseConfig& cfg) {
  auto [cx, cy] = center;
  Eigen::VectorXf g(cfg.glimpse_dim());
  int dim = cfg.view_dim();
  float* out = g.data();

  // Foveal grid, row-major. C=4 is a 2x2 grid; C=2 a horizontal pair; C=1 a
  // single centered patch.
  int gx = cx - (cfg.stride + cfg.S_C) / 2;
  int gy = cy - (cfg.stride + cfg.S_C) / 2;
  for (int v = 0; v < cfg.C; ++v) {
    int r = (cfg.C == 4) ? v / 2 : 0;
    int c = (cfg.C == 4) ? v % 2 : v;
    int x0 = (cfg.C == 1) ? cx - cfg.S_C / 2 : gx + c * cfg.stride;
    int y0 = (cfg.C == 1) ? cy - cfg.S_C / 2 : gy + r * cfg.stride;
    emit_view(image, image_side, x0, y0, cfg.S_C, cfg.S_C / cfg.S, out, dim);
    out += dim;
  }
  for (int v = 0; v < cfg.F; ++v) {
    emit_view(image, image_side, cx - cfg.S_F / 2, cy - cfg.S_F / 2, cfg.S_F,
              cfg.S_F / cfg.S, out, dim);
    out += dim;
  }
  for (int v = 0; v < cfg.P; ++v) {
    emit_view(image, image_side, cx - cfg.S_P / 2, cy - cfg.S_P / 2, cfg.S_P,
              cfg.S_P / cfg.S, out, dim);
    out += dim;
  }
  return g;
}

Eigen::Vector2f normalize_action(std::pair<int, int> center, int image_side) {
  return Eigen::Vector2f(2.0f * center.first / image_side - 1.0f,
                         2.0f * center.second / image_side - 1.0f);
}

GlimpseTrajectory make_trajectory(const float* image, int image_side,
                                  const GlimpseConfig& cfg, uint64_t seed) {
  auto centers = sample_saccade_centers(image_side, cfg.K, cfg, seed);
  GlimpseTrajectory traj;
  traj.steps.reserve(cfg.K);
  for (auto& c : centers) {
    GlimpseStep step;
    step.g = extract_glimpse(image, image_side, c, cfg);
    step.action = normalize_action(c, image_side);
    step.cx = c.first;
    step.cy = c.second;
    traj.steps.push_back(std::move(step));
  }
  return traj;
}

}  // namespace mpc
