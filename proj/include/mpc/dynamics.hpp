#pragma once

#include <cmath>

#include "mpc/errors.hpp"

namespace mpc {

// Euler-integration constants shared by the MPC and GPC circuits. Times are
// in milliseconds; lr_w is the effective plasticity rate dt_w / tau_w.
struct DynamicsConfig {
  double tau_z = 10.0;
  double dt = 1.0;
  double T = 30.0;
  double lr_w = 0.02;
  double lambda_w = 1e-4;
  double sigma = 1.0;

  int steps() const {
    double e = T / dt;
    double r = std::round(e);
    if (!(tau_z > 0 && dt > 0 && T > 0 && sigma > 0) || lambda_w < 0 ||
        r < 1 || std::abs(e - r) > 1e-9)
      fail(ErrorKind::config, "E = T/dt must be a positive integer");
    return static_cast<int>(r);
  }
};

}  // namespace mpc
