#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace mpc {

// Multi-resolution saccade glimpse extraction. A glimpse concatenates C
// foveal views (2x2 grid around the fixation point), F parafoveal and P
// peripheral views, each average-pooled to S x S and mean-centered.
struct GlimpseConfig {
  int C = 4;    // foveal view count (2x2 grid)
  int F = 1;    // parafoveal view count
  int P = 1;    // peripheral view count
  int S = 8;    // pooled output side
  int S_C = 8;  // foveal patch side
  int S_F = 16; // parafoveal patch side
  int S_P = 24; // peripheral patch side
  int K = 10;   // saccades per trajectory
  int stride = 6;        // foveal grid stride (2-pixel overlap at S_C = 8)
  int center_lo = 4;     // inclusive center sampling bounds
  int center_hi = 23;    // D=28 default: [4, D-5]
  uint64_t seed = 1234;

  int streams() const { return C + F + P; }
  int view_dim() const { return S * S; }
  int glimpse_dim() const { return streams() * S * S; }
  void validate(int image_side) const;
};

struct GlimpseStep {
  Eigen::VectorXf g;       // glimpse vector, streams()*S*S
  Eigen::Vector2f action;  // normalized fixation coordinates in [-1,1]
  int cx = 0, cy = 0;      // raw center (x = column, y = row)
};

struct GlimpseTrajectory {
  std::vector<GlimpseStep> steps;
};

std::vector<std::pair<int, int>> sample_saccade_centers(
    int image_side, int k, const GlimpseConfig& cfg, uint64_t seed);

// View `v` of the glimpse at `center`; views are extracted with zero padding
// outside the image, pooled to S x S, then mean-centered.
Eigen::VectorXf extract_glimpse(const float* image, int image_side,
                                std::pair<int, int> center,
                                const GlimpseConfig& cfg);

Eigen::Vector2f normalize_action(std::pair<int, int> center, int image_side);

GlimpseTrajectory make_trajectory(const float* image, int image_side,
                                  const GlimpseConfig& cfg, uint64_t seed);

}  // namespace mpc
