#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "mpc/codes.hpp"
#include "mpc/config.hpp"
#include "mpc/errors.hpp"

namespace mpc {

// Downstream heads fit to frozen latent codes by plain mini-batch gradient
// descent with hand-derived gradients. Hyperparameters are selected on the
// validation codes. Probe training never touches the upstream encoder.

template <typename Scalar>
struct LinearProbe {
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  Mat W;  // classes x dim
  Vec b;
  double lr = 0.0, l2 = 0.0;
};

template <typename Scalar>
struct DecoderProbe {
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  Mat W1;  // hidden x dim
  Vec b1;
  Mat W2;  // output x hidden
  Vec b2;
  double lr = 0.0, tikhonov = 0.0;
};

namespace probe_detail {

template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
Mat<Scalar> softmax_cols(const Mat<Scalar>& scores) {
  Mat<Scalar> p = scores;
  for (int c = 0; c < p.cols(); ++c) {
    p.col(c).array() -= p.col(c).maxCoeff();
    p.col(c) = p.col(c).array().exp();
    p.col(c) /= p.col(c).sum();
  }
  return p;
}

inline std::vector<int> shuffled_indices(int n, std::mt19937_64& rng) {
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::shuffle(idx.begin(), idx.end(), rng);
  return idx;
}

}  // namespace probe_detail

// Cross-entropy + L2 gradient step on one dense batch; returns batch loss.
// Exposed separately for gradient checking.
template <typename Scalar>
double linear_probe_step(LinearProbe<Scalar>& p,
                         const probe_detail::Mat<Scalar>& X,
                         const std::vector<uint8_t>& y, double lr,
                         double l2, bool update) {
  using Mat = probe_detail::Mat<Scalar>;
  const int B = static_cast<int>(X.cols());
  Mat scores = (p.W * X).colwise() + p.b;
  Mat prob = probe_detail::softmax_cols(scores);
  double loss = 0.0;
  for (int c = 0; c < B; ++c)
    loss -= std::log(std::max(double(prob(y[c], c)), 1e-300));
  loss /= B;
  loss += 0.5 * l2 * double(p.W.squaredNorm());
  if (update) {
    Mat delta = prob;  // softmax - one-hot
    for (int c = 0; c < B; ++c) delta(y[c], c) -= Scalar(1);
    delta /= Scalar(B);
    p.W -= Scalar(lr) * (delta * X.transpose() + Scalar(l2) * p.W);
    p.b -= Scalar(lr) * delta.rowwise().sum();
  }
  return loss;
}

template <typename Scalar>
double eval_accuracy(const LinearProbe<Scalar>& p, const CodeSet& codes,
                     const std::vector<uint8_t>& labels, int batch = 500) {
  if (codes.count() != static_cast<int>(labels.size()))
    fail(ErrorKind::dimension, "codes/labels count mismatch");
  int correct = 0;
  for (int first = 0; first < codes.count(); first += batch) {
    int n = std::min(batch, codes.count() - first);
    auto X = codes.gather_range(first, n).template cast<Scalar>().eval();
    auto scores = ((p.W * X).colwise() + p.b).eval();
    for (int c = 0; c < n; ++c) {
      int arg = 0;
      scores.col(c).maxCoeff(&arg);
      if (arg == labels[first + c]) ++correct;
    }
  }
  return 100.0 * correct / codes.count();
}

template <typename Scalar>
LinearProbe<Scalar> fit_linear(const CodeSet& train_codes,
                               const std::vector<uint8_t>& train_labels,
                               const CodeSet& val_codes,
                               const std::vector<uint8_t>& val_labels,
                               const ProbeOptions& opt, int classes = 10) {
  using Mat = probe_detail::Mat<Scalar>;
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  const int dim = train_codes.dim();
  LinearProbe<Scalar> best;
  double best_acc = -1.0;
  for (double lr : opt.lr_grid)
    for (double l2 : opt.l2_grid) {
      LinearProbe<Scalar> p;
      p.W = Mat::Zero(classes, dim);
      p.b = Vec::Zero(classes);
      p.lr = lr;
      p.l2 = l2;
      std::mt19937_64 rng(opt.seed);
      bool diverged = false;
      for (int epoch = 0; epoch < opt.linear_epochs && !diverged; ++epoch) {
        auto order = probe_detail::shuffled_indices(train_codes.count(), rng);
        for (std::size_t first = 0; first < order.size();
             first += opt.batch) {
          std::size_t n = std::min<std::size_t>(opt.batch, order.size() - first);
          std::vector<int> idx(order.begin() + first, order.begin() + first + n);
          auto X = train_codes.gather(idx).template cast<Scalar>().eval();
          std::vector<uint8_t> yb(n);
          for (std::size_t i = 0; i < n; ++i) yb[i] = train_labels[idx[i]];
          double loss = linear_probe_step(p, X, yb, lr, l2, true);
          if (!std::isfinite(loss)) {
            diverged = true;
            break;
          }
        }
      }
      if (diverged) continue;
      double acc = val_codes.count() > 0
                       ? eval_accuracy(p, val_codes, val_labels)
                       : eval_accuracy(p, train_codes, train_labels);
      if (acc > best_acc) {
        best_acc = acc;
        best = std::move(p);
      }
    }
  if (best_acc < 0.0)
    fail(ErrorKind::divergence, "linear probe diverged for every candidate");
  return best;
}

// One MSE + Tikhonov step; loss is mean over the batch of the summed squared
// pixel error plus tikhonov * (||W1||^2 + ||W2||^2).
template <typename Scalar>
double decoder_probe_step(DecoderProbe<Scalar>& p,
                          const probe_detail::Mat<Scalar>& X,
                          const probe_detail::Mat<Scalar>& Y, double lr,
                          double tik, bool update) {
  using Mat = probe_detail::Mat<Scalar>;
  const int B = static_cast<int>(X.cols());
  Mat pre = (p.W1 * X).colwise() + p.b1;
  Mat H = pre.cwiseMax(Scalar(0));
  Mat out = (p.W2 * H).colwise() + p.b2;
  Mat diff = out - Y;
  double loss = double(diff.squaredNorm()) / B +
                tik * (double(p.W1.squaredNorm()) + double(p.W2.squaredNorm()));
  if (update) {
    Mat dout = (Scalar(2) / Scalar(B)) * diff;
    Mat dH = p.W2.transpose() * dout;
    Mat dpre = dH.cwiseProduct(
        (pre.array() > Scalar(0)).template cast<Scalar>().matrix());
    p.W2 -= Scalar(lr) * (dout * H.transpose() + Scalar(2 * tik) * p.W2);
    p.b2 -= Scalar(lr) * dout.rowwise().sum();
    p.W1 -= Scalar(lr) * (dpre * X.transpose() + Scalar(2 * tik) * p.W1);
    p.b1 -= Scalar(lr) * dpre.rowwise().sum();
  }
  return loss;
}

// Mean over samples of the summed squared pixel error.
template <typename Scalar>
double eval_mse(const DecoderProbe<Scalar>& p, const CodeSet& codes,
                const Eigen::MatrixXf& images, int batch = 500) {
  if (codes.count() != images.cols())
    fail(ErrorKind::dimension, "codes/images count mismatch");
  double total = 0.0;
  for (int first = 0; first < codes.count(); first += batch) {
    int n = std::min(batch, codes.count() - first);
    auto X = codes.gather_range(first, n).template cast<Scalar>().eval();
    auto Y = images.middleCols(first, n).template cast<Scalar>().eval();
    auto H = (((p.W1 * X).colwise() + p.b1).cwiseMax(Scalar(0))).eval();
    auto out = (((p.W2 * H).colwise() + p.b2)).eval();
    total += double((out - Y).squaredNorm());
  }
  return total / codes.count();
}

template <typename Scalar>
DecoderProbe<Scalar> fit_decoder(const CodeSet& train_codes,
                                 const Eigen::MatrixXf& train_images,
                                 const CodeSet& val_codes,
                                 const Eigen::MatrixXf& val_images,
                                 const ProbeOptions& opt) {
  using Mat = probe_detail::Mat<Scalar>;
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  const int dim = train_codes.dim();
  const int out_dim = static_cast<int>(train_images.rows());
  DecoderProbe<Scalar> best;
  double best_mse = -1.0;
  for (double lr : opt.lr_grid)
    for (double tik : opt.tikhonov_grid) {
      DecoderProbe<Scalar> p;
      std::mt19937_64 rng(opt.seed);
      std::normal_distribution<double> dist(0.0, 0.01);
      p.W1 = Mat::Zero(opt.decoder_hidden, dim).unaryExpr(
          [&](Scalar) { return static_cast<Scalar>(dist(rng)); });
      p.b1 = Vec::Zero(opt.decoder_hidden);
      p.W2 = Mat::Zero(out_dim, opt.decoder_hidden).unaryExpr(
          [&](Scalar) { return static_cast<Scalar>(dist(rng)); });
      p.b2 = Vec::Zero(out_dim);
      p.lr = lr;
      p.tikhonov = tik;
      bool diverged = false;
      for (int epoch = 0; epoch < opt.decoder_epochs && !diverged; ++epoch) {
        auto order = probe_detail::shuffled_indices(train_codes.count(), rng);
        for (std::size_t first = 0; first < order.size();
             first += opt.batch) {
          std::size_t n = std::min<std::size_t>(opt.batch, order.size() - first);
          std::vector<int> idx(order.begin() + first, order.begin() + first + n);
          auto X = train_codes.gather(idx).template cast<Scalar>().eval();
          Mat Y(out_dim, n);
          for (std::size_t i = 0; i < n; ++i)
            Y.col(i) = train_images.col(idx[i]).template cast<Scalar>();
          double loss = decoder_probe_step(p, X, Y, lr, tik, true);
          if (!std::isfinite(loss)) {
            diverged = true;
            break;
          }
        }
      }
      if (diverged) continue;
      double mse = val_codes.count() > 0
                       ? eval_mse(p, val_codes, val_images)
                       : eval_mse(p, train_codes, train_images);
      if (best_mse < 0.0 || mse < best_mse) {
        best_mse = mse;
        best = std::move(p);
      }
    }
  if (best_mse < 0.0)
    fail(ErrorKind::divergence, "decoder probe diverged for every candidate");
  return best;
}

}  // namespace mpc
