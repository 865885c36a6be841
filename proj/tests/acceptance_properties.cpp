// Property acceptance suite. Each numbered check prints one PASS/FAIL line;
// the exit code is the number of failures. Everything here runs on small
// random instances in double precision and finishes in well under a minute.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <vector>

#include "fd_checks.hpp"
#include "mpc/glimpse.hpp"
#include "mpc/gpc.hpp"
#include "mpc/idx.hpp"
#include "mpc/network.hpp"
#include "oracle.hpp"

using namespace mpc;
using Net = MpcNetwork<double>;
using Gpc = GpcNetwork<double>;

namespace {

int failures = 0;

void report(int criterion, const char* what, bool ok) {
  std::printf("criterion %2d: %s — %s\n", criterion, ok ? "PASS" : "FAIL",
              what);
  if (!ok) ++failures;
}

// ---- 1: gradient checks ---------------------------------------------------

bool gradient_checks() {
  std::mt19937_64 rng(2024);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    Net net(fdcheck::small_mpc_config(rng, 3, 8, true));
    auto s = net.make_state(1);
    fdcheck::random_mpc_state(net, s, rng);
    worst = std::max(worst, fdcheck::mpc_state_grad_err(net, s));
    worst = std::max(worst, fdcheck::mpc_weight_grad_err(net, s));
  }
  for (auto variant : {GpcVariant::classical, GpcVariant::relu,
                       GpcVariant::nwta, GpcVariant::fov})
    for (int trial = 0; trial < 5; ++trial) {
      Gpc net(fdcheck::small_gpc_config(rng, variant));
      auto s = net.make_state(1);
      for (int l = 0; l <= net.layers(); ++l) fdcheck::randomize(s.z[l], rng);
      worst = std::max(worst, fdcheck::gpc_state_grad_err(net, s));
      worst = std::max(worst, fdcheck::gpc_weight_grad_err(net, s));
    }
  std::printf("  max relative error %.3g\n", worst);
  return worst <= 1e-5;
}

// ---- 2: free-energy descent -----------------------------------------------

bool descent() {
  // Winner masks are frozen after a short pre-roll away from the all-zero
  // reset state; the descent guarantee applies to settling between winner
  // reassignments (mask flips can raise the objective transiently).
  std::mt19937_64 rng(7);
  long steps = 0, drops = 0;
  for (int trial = 0; trial < 50; ++trial) {
    auto cfg = fdcheck::small_mpc_config(rng, 3, 8, true);
    cfg.dyn.tau_z = 10;
    cfg.dyn.dt = 0.5;  // dt/tau_z = 0.05
    cfg.dyn.T = 2;     // 4 Euler steps per e_step call
    Net net(cfg);
    auto s = net.make_state(2);
    for (int v = 0; v < net.streams(); ++v) fdcheck::randomize(s.z[v][0], rng);
    fdcheck::randomize(s.action, rng);
    net.reset_latents(s);
    net.e_step(s);  // pre-roll
    net.freeze_masks(s);
    std::vector<double> trace;
    for (int rep = 0; rep < 8; ++rep) {  // 32 traced steps
      auto t = net.e_step(s, {true});
      if (trace.empty())
        trace = t;
      else
        trace.insert(trace.end(), t.begin() + 1, t.end());
    }
    for (std::size_t i = 1; i < trace.size(); ++i) {
      ++steps;
      if (trace[i] <= trace[i - 1] + 1e-12) ++drops;
    }
  }
  std::printf("  non-increasing steps: %ld/%ld (%.2f%%)\n", drops, steps,
              100.0 * drops / steps);
  return drops >= 0.95 * steps;
}

// ---- 3: scalar-loop oracle ------------------------------------------------

bool oracle_match() {
  Net::Config cfg;
  cfg.widths = {2, 2, 2};
  cfg.topology.id = PatternId::custom;
  cfg.topology.streams = 2;
  cfg.topology.edges = {{0, 1}, {1, 0}};
  cfg.act = Activation{ActKind::nwta, 1};
  cfg.dyn.T = 3;
  cfg.seed = 5;
  Net net(cfg);

  oracle::MpcOracle ref;
  ref.V = 2;
  ref.L = 2;
  ref.widths = {2, 2, 2};
  ref.edges = {{0, 1}, {1, 0}};
  ref.n_winners = 1;
  ref.tau_z = cfg.dyn.tau_z;
  ref.dt = cfg.dyn.dt;
  ref.sigma = cfg.dyn.sigma;
  auto to_mat = [](const Net::Mat& m) {
    oracle::Mat out(m.rows(), oracle::Vec(m.cols()));
    for (int r = 0; r < m.rows(); ++r)
      for (int c = 0; c < m.cols(); ++c) out[r][c] = m(r, c);
    return out;
  };
  ref.W.resize(2, std::vector<oracle::Mat>(3));
  ref.R.resize(2, std::vector<oracle::Mat>(3));
  ref.A.resize(2, std::vector<oracle::Mat>(3));
  for (int v = 0; v < 2; ++v)
    for (int l = 1; l <= 2; ++l) ref.W[v][l] = to_mat(net.intra_weights()[v][l]);
  for (int e = 0; e < 2; ++e)
    for (int l = 1; l <= 2; ++l) {
      ref.R[e][l] = to_mat(net.cross_weights()[e][l]);
      ref.A[e][l] = to_mat(net.action_weights()[e][l]);
    }

  std::mt19937_64 rng(9);
  auto s = net.make_state(1);
  fdcheck::random_mpc_state(net, s, rng);
  std::vector<std::vector<oracle::Vec>> z(2, std::vector<oracle::Vec>(3));
  for (int v = 0; v < 2; ++v)
    for (int l = 0; l <= 2; ++l)
      z[v][l] = {s.z[v][l](0, 0), s.z[v][l](1, 0)};
  oracle::Vec a = {s.action(0, 0), s.action(1, 0)};

  net.e_step(s);
  for (int step = 0; step < 3; ++step) ref.euler_step(z, a);

  double worst = 0.0;
  for (int v = 0; v < 2; ++v)
    for (int l = 1; l <= 2; ++l)
      for (int i = 0; i < 2; ++i)
        worst = std::max(worst, std::abs(z[v][l][i] - s.z[v][l](i, 0)));
  std::printf("  max deviation %.3g\n", worst);
  return worst <= 1e-12;
}

// ---- 4: winner-take-all properties ----------------------------------------

bool nwta_properties() {
  using Mat = Eigen::MatrixXd;
  for (int n = 1; n <= 5; ++n) {
    long total = 1;
    for (int i = 0; i < n; ++i) total *= 5;
    for (long pattern = 0; pattern < total; ++pattern) {
      Mat z(n, 1);
      long p = pattern;
      for (int i = 0; i < n; ++i, p /= 5) z(i, 0) = double(p % 5) - 2.0;
      for (int nw = 1; nw <= n; ++nw) {
        Activation act{ActKind::nwta, nw};
        Mat mask = derivative_mask(act, z);
        if (std::lround(mask.sum()) != nw) return false;
        // winners by definition: repeated strict-max scan, lowest index ties
        std::vector<char> taken(n, 0);
        for (int k = 0; k < nw; ++k) {
          int best = -1;
          for (int i = 0; i < n; ++i)
            if (!taken[i] && (best < 0 || z(i, 0) > z(best, 0))) best = i;
          taken[best] = 1;
          if (mask(best, 0) != 1.0) return false;
        }
        Mat phi = apply(act, z);
        for (int i = 0; i < n; ++i)
          if (phi(i, 0) != z(i, 0) * mask(i, 0)) return false;
        Mat scaled = 2.5 * z;
        if (!(derivative_mask(act, scaled).array() == mask.array()).all())
          return false;
      }
    }
  }
  return true;
}

// ---- 5: constraints -------------------------------------------------------

bool constraints() {
  std::mt19937_64 rng(55);
  // multi-stream: unit columns after every M-step, clamped input bit-stable
  Net net(fdcheck::small_mpc_config(rng, 3, 8, true));
  auto s = net.make_state(3);
  for (int round = 0; round < 5; ++round) {
    for (int v = 0; v < net.streams(); ++v) fdcheck::randomize(s.z[v][0], rng);
    fdcheck::randomize(s.action, rng);
    net.reset_latents(s);
    std::vector<Net::Mat> clamped;
    for (int v = 0; v < net.streams(); ++v) clamped.push_back(s.z[v][0]);
    net.e_step(s);
    for (int v = 0; v < net.streams(); ++v)
      if (!(s.z[v][0].array() == clamped[v].array()).all()) return false;
    net.m_step(s);
    auto unit_cols = [](const Net::Mat& m) {
      for (int c = 0; c < m.cols(); ++c)
        if (std::abs(m.col(c).norm() - 1.0) > 1e-6) return false;
      return true;
    };
    for (int v = 0; v < net.streams(); ++v)
      for (int l = 1; l <= net.layers(); ++l)
        if (!unit_cols(net.intra_weights()[v][l])) return false;
    for (int e = 0; e < net.num_edges(); ++e)
      for (int l = 1; l <= net.layers(); ++l)
        if (!unit_cols(net.cross_weights()[e][l]) ||
            !unit_cols(net.action_weights()[e][l]))
          return false;
  }

  // generative fov variant: masked entries exactly zero through E/M rounds
  Gpc gpc(fdcheck::small_gpc_config(rng, GpcVariant::fov));
  auto gs = gpc.make_state(3);
  for (int round = 0; round < 5; ++round) {
    fdcheck::randomize(gs.z[0], rng);
    gpc.reset_latents(gs);
    gpc.e_step(gs);
    gpc.m_step(gs);
    const auto& w = gpc.weights()[1];
    const auto& mask = gpc.block_mask(1);
    for (int c = 0; c < w.cols(); ++c)
      for (int r = 0; r < w.rows(); ++r)
        if (mask(r, c) == 0.0 && w(r, c) != 0.0) return false;
  }
  return true;
}

// ---- 6: glimpse geometry --------------------------------------------------

bool glimpse_geometry() {
  GlimpseConfig cfg;
  std::mt19937_64 rng(66);
  std::vector<float> img(28 * 28);
  for (auto& p : img) p = float(rng() % 256) / 255.0f;

  for (auto center : sample_saccade_centers(28, 20, cfg, 3)) {
    if (center.first < 4 || center.first > 23 || center.second < 4 ||
        center.second > 23)
      return false;
    auto g = extract_glimpse(img.data(), 28, center, cfg);
    if (g.size() != (cfg.C + cfg.F + cfg.P) * cfg.S * cfg.S) return false;
    for (int v = 0; v < cfg.streams(); ++v)
      if (std::abs(g.segment(v * 64, 64).sum() / 64.0) > 1e-6) return false;
  }

  if (normalize_action({14, 14}, 28) != Eigen::Vector2f(0, 0)) return false;
  if (normalize_action({0, 0}, 28) != Eigen::Vector2f(-1, -1)) return false;
  if (normalize_action({28, 28}, 28) != Eigen::Vector2f(1, 1)) return false;

  // pooling preserves block means: parafoveal view at an interior center
  auto g = extract_glimpse(img.data(), 28, {14, 14}, cfg);
  double mean = 0.0;
  std::vector<double> expect(64);
  for (int py = 0; py < 8; ++py)
    for (int px = 0; px < 8; ++px) {
      double acc = 0.0;
      for (int dy = 0; dy < 2; ++dy)
        for (int dx = 0; dx < 2; ++dx)
          acc += img[(6 + 2 * py + dy) * 28 + (6 + 2 * px + dx)];
      expect[py * 8 + px] = acc / 4.0;
      mean += acc / 4.0;
    }
  mean /= 64.0;
  for (int i = 0; i < 64; ++i)
    if (std::abs(g[4 * 64 + i] - (expect[i] - mean)) > 1e-6) return false;
  return true;
}

// ---- 7: idx round trip ----------------------------------------------------

bool idx_roundtrip() {
  namespace fs = std::filesystem;
  auto dir = fs::temp_directory_path() / "acceptance_idx";
  fs::create_directories(dir);
  ImageCorpus c;
  c.side = 28;
  std::mt19937_64 rng(77);
  c.pixels.resize(std::size_t(64) * 28 * 28);
  for (auto& p : c.pixels) p = float(rng() % 256) * (1.0f / 255.0f);
  c.labels.resize(64);
  for (auto& l : c.labels) l = uint8_t(rng() % 10);

  std::string ip = (dir / "i.idx").string(), lp = (dir / "l.idx").string();
  save_idx(c, ip, lp);
  auto loaded = load_idx(ip, lp);
  if (loaded.pixels != c.pixels || loaded.labels != c.labels) return false;

  std::string ip2 = (dir / "i2.idx").string(), lp2 = (dir / "l2.idx").string();
  save_idx(loaded, ip2, lp2);
  auto slurp = [](const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
  };
  return slurp(ip) == slurp(ip2) && slurp(lp) == slurp(lp2);
}

}  // namespace

int main() {
  report(1, "dynamics and plasticity match finite differences (<= 1e-5)",
         gradient_checks());
  report(2, "free energy non-increasing for >= 95% of Euler steps", descent());
  report(3, "batched settling matches scalar-loop reference (<= 1e-12)",
         oracle_match());
  report(4, "winner selection: count, ties, phi = z (.) mask, scale invariance",
         nwta_properties());
  report(5, "unit columns, masked synapses stay zero, clamped input stable",
         constraints());
  report(6, "glimpse dimensions, centering, action range, pooling means",
         glimpse_geometry());
  report(7, "idx save/load round trip is bit exact", idx_roundtrip());
  std::printf("%s (%d failure%s)\n", failures == 0 ? "ALL PASS" : "FAILED",
              failures, failures == 1 ? "" : "s");
  return failures;
}
