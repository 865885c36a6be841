#include "mpc/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>

#include "json.hpp"
#include "mpc/checkpoint.hpp"
#include "mpc/errors.hpp"
#include "mpc/glimpse.hpp"
#include "mpc/gpc.hpp"
#include "mpc/network.hpp"
#include "mpc/probes.hpp"

namespace mpc {

namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

MpcNetwork<float>::Config mpc_config(const ExperimentConfig& cfg) {
  MpcNetwork<float>::Config net;
  net.widths.push_back(cfg.glimpse.view_dim());
  net.widths.insert(net.widths.end(), cfg.mpc_widths.begin(),
                    cfg.mpc_widths.end());
  net.topology = build_topology(cfg.topology, cfg.glimpse.C, cfg.glimpse.F,
                                cfg.glimpse.P);
  net.act = Activation{ActKind::nwta, cfg.n_winners};
  net.dyn = cfg.dyn;
  net.seed = cfg.model_seed;
  return net;
}

GpcNetwork<float>::Config gpc_config(const ExperimentConfig& cfg,
                                     int image_side) {
  GpcNetwork<float>::Config net;
  net.variant = parse_gpc_variant(cfg.model);
  bool fov = net.variant == GpcVariant::fov;
  net.widths.push_back(fov ? cfg.glimpse.glimpse_dim()
                           : image_side * image_side);
  net.widths.insert(net.widths.end(), cfg.gpc_widths.begin(),
                    cfg.gpc_widths.end());
  switch (net.variant) {
    case GpcVariant::classical:
      net.act = Activation{ActKind::identity, 0};
      break;
    case GpcVariant::relu:
      net.act = Activation{ActKind::relu, 0};
      break;
    default:
      // Winner budget scales with the number of fused streams so sparsity
      // per unit matches the multi-stream layers.
      net.act = Activation{ActKind::nwta,
                           cfg.glimpse.streams() * cfg.n_winners};
  }
  net.dyn = cfg.dyn;
  net.lambda_l = cfg.lambda_l;
  net.blocks = fov ? cfg.glimpse.streams() : 0;
  net.mask_depth = cfg.mask_depth;
  net.seed = cfg.model_seed;
  return net;
}

// Per-glimpse stacked input matrices for a batch of images: glimpses[k] is
// glimpse_dim x B, actions[k] is 2 x B.
void build_glimpse_batch(const ImageCorpus& corpus,
                         const std::vector<int>& index, int K,
                         const GlimpseConfig& g, uint64_t seed_base,
                         uint64_t tag,
                         std::vector<Eigen::MatrixXf>& glimpses,
                         std::vector<Eigen::MatrixXf>& actions) {
  const int B = static_cast<int>(index.size());
  glimpses.assign(K, Eigen::MatrixXf(g.glimpse_dim(), B));
  actions.assign(K, Eigen::MatrixXf(2, B));
  for (int c = 0; c < B; ++c) {
    uint64_t seed = mix_seed(seed_base, tag, index[c]);
    auto centers = sample_saccade_centers(corpus.side, K, g, seed);
    const float* img = corpus.image(index[c]);
    for (int k = 0; k < K; ++k) {
      glimpses[k].col(c) = extract_glimpse(img, corpus.side, centers[k], g);
      actions[k].col(c) = normalize_action(centers[k], corpus.side);
    }
  }
}

Eigen::MatrixXf image_batch(const ImageCorpus& corpus,
                            const std::vector<int>& index) {
  const int dim = corpus.side * corpus.side;
  Eigen::MatrixXf out(dim, index.size());
  for (std::size_t c = 0; c < index.size(); ++c) {
    const float* img = corpus.image(index[c]);
    out.col(c) = Eigen::Map<const Eigen::VectorXf>(img, dim);
  }
  return out;
}

std::vector<int> epoch_order(int n, uint64_t seed) {
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(idx.begin(), idx.end(), rng);
  return idx;
}

void write_train_log(const std::string& path, uint64_t config_hash,
                     const std::vector<double>& f_per_epoch) {
  std::ofstream out(path);
  out << "# config_hash = " << config_hash << "\n";
  out << "epoch,free_energy\n";
  for (std::size_t e = 0; e < f_per_epoch.size(); ++e)
    out << (e + 1) << "," << f_per_epoch[e] << "\n";
}

void write_run_record(const std::string& path, const RunRecord& rec) {
  nlohmann::json j = {
      {"config_hash", rec.config_hash},
      {"model", rec.model},
      {"epoch_free_energy", rec.epoch_free_energy},
      {"checkpoint", rec.checkpoint_base},
      {"checkpoint_hash", rec.checkpoint_hash},
      {"epochs_done", rec.epochs_done},
      {"wall_seconds", rec.wall_seconds},
  };
  std::ofstream out(path);
  out << j.dump(2) << "\n";
}

// Tiles square grayscale fields into one PGM. Fields are min-max normalized
// individually; a flat field renders mid-gray.
void write_field_grid(const std::string& path,
                      const std::vector<Eigen::VectorXf>& fields, int side) {
  const int n = static_cast<int>(fields.size());
  const int gcols = static_cast<int>(std::ceil(std::sqrt(double(n))));
  const int grows = (n + gcols - 1) / gcols;
  std::vector<uint8_t> canvas(std::size_t(grows) * side * gcols * side, 0);
  for (int i = 0; i < n; ++i) {
    const auto& f = fields[i];
    float lo = f.minCoeff(), hi = f.maxCoeff();
    int r0 = (i / gcols) * side, c0 = (i % gcols) * side;
    for (int r = 0; r < side; ++r)
      for (int c = 0; c < side; ++c) {
        float v = f[r * side + c];
        uint8_t px = hi > lo
                         ? static_cast<uint8_t>(std::lround(
                               255.0 * (v - lo) / (hi - lo)))
                         : uint8_t(128);
        canvas[std::size_t(r0 + r) * gcols * side + c0 + c] = px;
      }
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::io, "cannot write " + path);
  out << "P5\n" << gcols * side << " " << grows * side << "\n255\n";
  out.write(reinterpret_cast<const char*>(canvas.data()),
            static_cast<std::streamsize>(canvas.size()));
}

constexpr uint64_t kExportTag = 1000;  // + split ordinal
constexpr uint64_t kOrderTag = 0xA11C;

// Keeps a copy of the rolling checkpoint after each epoch so earlier-epoch
// models stay available after a long run finishes.
void snapshot_epoch_checkpoint(const std::string& base, int epoch) {
  const std::string tag = base + "_ep" + std::to_string(epoch);
  for (const char* ext : {".f32", ".json"})
    fs::copy_file(base + ext, tag + ext, fs::copy_options::overwrite_existing);
}

}  // namespace

uint64_t mix_seed(uint64_t base, uint64_t tag, uint64_t index) {
  uint64_t words[3] = {base, tag, index};
  return fnv1a(words, sizeof(words));
}

Datasets load_datasets(const ExperimentConfig& cfg) {
  if (cfg.train_images.empty() || cfg.test_images.empty())
    fail(ErrorKind::config, "dataset paths are not set");
  ImageCorpus full = load_idx(cfg.train_images, cfg.train_labels);
  Datasets d;
  auto [train, val] = split_corpus(full, cfg.val_count, cfg.data_seed);
  d.train = std::move(train);
  d.val = std::move(val);
  d.test = load_idx(cfg.test_images, cfg.test_labels);
  d.test.split = Split::test;
  return d;
}

RunRecord train_model(const ExperimentConfig& cfg, const Datasets& data) {
  const auto t0 = Clock::now();
  fs::create_directories(cfg.out_dir);
  cfg.glimpse.validate(data.train.side);

  RunRecord rec;
  rec.config_hash = cfg.config_hash;
  rec.model = cfg.model;
  rec.checkpoint_base = cfg.out_dir + "/checkpoint";

  const int n = static_cast<int>(data.train.count());
  const int K = cfg.glimpse.K;
  const bool is_mpc = cfg.model == "mpc";

  if (is_mpc) {
    MpcNetwork<float> net(mpc_config(cfg));
    rec.checkpoint_hash =
        save_checkpoint(net, rec.checkpoint_base, cfg.config_hash, 0);
    snapshot_epoch_checkpoint(rec.checkpoint_base, 0);
    std::vector<Eigen::MatrixXf> glimpses, actions;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
      auto order = epoch_order(n, mix_seed(cfg.model_seed, kOrderTag, epoch));
      double f_sum = 0.0;
      long f_count = 0;
      for (int first = 0; first < n; first += cfg.batch) {
        int B = std::min(cfg.batch, n - first);
        std::vector<int> index(order.begin() + first,
                               order.begin() + first + B);
        build_glimpse_batch(data.train, index, K, cfg.glimpse,
                            cfg.glimpse.seed, epoch + 1, glimpses, actions);
        auto s = net.make_state(B);
        for (int k = 0; k < K; ++k) {
          net.reset_latents(s);
          net.set_input(s, glimpses[k], actions[k]);
          net.e_step(s);
          f_sum += net.settled_free_energy(s);
          ++f_count;
          net.m_step(s);
        }
        if ((first / cfg.batch) % 100 == 0) {
          std::printf("[%s] epoch %d/%d batch %d/%d F=%.4f t=%.0fs\n",
                      cfg.model.c_str(), epoch + 1, cfg.epochs,
                      first / cfg.batch + 1, (n + cfg.batch - 1) / cfg.batch,
                      f_sum / std::max(1L, f_count), seconds_since(t0));
          std::fflush(stdout);
        }
      }
      rec.epoch_free_energy.push_back(f_sum / std::max(1L, f_count));
      rec.checkpoint_hash = save_checkpoint(net, rec.checkpoint_base,
                                            cfg.config_hash, epoch + 1);
      snapshot_epoch_checkpoint(rec.checkpoint_base, epoch + 1);
      rec.epochs_done = epoch + 1;
      write_train_log(cfg.out_dir + "/train_log.csv", cfg.config_hash,
                      rec.epoch_free_energy);
    }
  } else {
    GpcNetwork<float> net(gpc_config(cfg, data.train.side));
    const bool fov = net.config().variant == GpcVariant::fov;
    rec.checkpoint_hash =
        save_checkpoint(net, rec.checkpoint_base, cfg.config_hash, 0);
    snapshot_epoch_checkpoint(rec.checkpoint_base, 0);
    std::vector<Eigen::MatrixXf> glimpses, actions;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
      auto order = epoch_order(n, mix_seed(cfg.model_seed, kOrderTag, epoch));
      double f_sum = 0.0;
      long f_count = 0;
      for (int first = 0; first < n; first += cfg.batch) {
        int B = std::min(cfg.batch, n - first);
        std::vector<int> index(order.begin() + first,
                               order.begin() + first + B);
        auto s = net.make_state(B);
        if (fov) {
          build_glimpse_batch(data.train, index, K, cfg.glimpse,
                              cfg.glimpse.seed, epoch + 1, glimpses, actions);
          for (int k = 0; k < K; ++k) {
            net.reset_latents(s);
            net.set_input(s, glimpses[k]);
            net.e_step(s);
            f_sum += net.free_energy(s);
            ++f_count;
            net.m_step(s);
          }
        } else {
          net.reset_latents(s);
          net.set_input(s, image_batch(data.train, index));
          net.e_step(s);
          f_sum += net.free_energy(s);
          ++f_count;
          net.m_step(s);
        }
        if ((first / cfg.batch) % 100 == 0) {
          std::printf("[%s] epoch %d/%d batch %d/%d F=%.4f t=%.0fs\n",
                      cfg.model.c_str(), epoch + 1, cfg.epochs,
                      first / cfg.batch + 1, (n + cfg.batch - 1) / cfg.batch,
                      f_sum / std::max(1L, f_count), seconds_since(t0));
          std::fflush(stdout);
        }
      }
      rec.epoch_free_energy.push_back(f_sum / std::max(1L, f_count));
      rec.checkpoint_hash = save_checkpoint(net, rec.checkpoint_base,
                                            cfg.config_hash, epoch + 1);
      snapshot_epoch_checkpoint(rec.checkpoint_base, epoch + 1);
      rec.epochs_done = epoch + 1;
      write_train_log(cfg.out_dir + "/train_log.csv", cfg.config_hash,
                      rec.epoch_free_energy);
    }
  }

  rec.wall_seconds = seconds_since(t0);
  write_run_record(cfg.out_dir + "/run.json", rec);
  return rec;
}

CodeSet encode_corpus(const ExperimentConfig& cfg, const std::string& ckpt_base,
                      const ImageCorpus& corpus, uint64_t tag,
                      int k_override) {
  cfg.glimpse.validate(corpus.side);
  const int n = static_cast<int>(corpus.count());
  const int K = k_override > 0 ? k_override : cfg.glimpse.K;
  CheckpointMeta meta = peek_checkpoint(ckpt_base);
  CodeSet codes;
  std::vector<Eigen::MatrixXf> glimpses, actions;

  if (meta.kind == "mpc") {
    MpcNetwork<float> net = load_mpc_checkpoint(ckpt_base);
    for (int first = 0; first < n; first += cfg.batch) {
      int B = std::min(cfg.batch, n - first);
      std::vector<int> index(B);
      std::iota(index.begin(), index.end(), first);
      build_glimpse_batch(corpus, index, K, cfg.glimpse, cfg.glimpse.seed,
                          tag, glimpses, actions);
      auto s = net.make_state(B);
      codes.append(net.encode(s, glimpses, actions));
    }
  } else {
    GpcNetwork<float> net = load_gpc_checkpoint(ckpt_base);
    const bool fov = net.config().variant == GpcVariant::fov;
    const int top = net.config().widths.back();
    for (int first = 0; first < n; first += cfg.batch) {
      int B = std::min(cfg.batch, n - first);
      std::vector<int> index(B);
      std::iota(index.begin(), index.end(), first);
      auto s = net.make_state(B);
      if (fov) {
        build_glimpse_batch(corpus, index, K, cfg.glimpse, cfg.glimpse.seed,
                            tag, glimpses, actions);
        Eigen::MatrixXf code(K * top, B);
        for (int k = 0; k < K; ++k)
          code.middleRows(k * top, top) = net.encode(s, glimpses[k]);
        codes.append(code);
      } else {
        codes.append(net.encode(s, image_batch(corpus, index)));
      }
    }
  }
  return codes;
}

void export_latents(const ExperimentConfig& cfg, const std::string& ckpt_base,
                    const Datasets& data, const std::string& out_base,
                    int k_override) {
  CheckpointMeta meta = peek_checkpoint(ckpt_base);
  const struct {
    const ImageCorpus* corpus;
    const char* name;
    uint64_t tag;
  } splits[] = {{&data.train, "train", kExportTag + 0},
                {&data.val, "val", kExportTag + 1},
                {&data.test, "test", kExportTag + 2}};
  for (const auto& sp : splits) {
    if (sp.corpus->count() == 0) continue;
    CodeSet codes = encode_corpus(cfg, ckpt_base, *sp.corpus, sp.tag,
                                  k_override);
    codes.save(out_base + "_" + sp.name, cfg.config_hash, meta.blob_hash,
               cfg.glimpse.seed);
  }
}

std::vector<std::string> export_receptive_fields(const std::string& ckpt_base,
                                                 const std::string& out_dir) {
  fs::create_directories(out_dir);
  CheckpointMeta meta = peek_checkpoint(ckpt_base);
  std::vector<std::string> paths;

  if (meta.kind == "mpc") {
    MpcNetwork<float> net = load_mpc_checkpoint(ckpt_base);
    const int j0 = net.config().widths[0];
    const int side = static_cast<int>(std::lround(std::sqrt(double(j0))));
    if (side * side != j0)
      fail(ErrorKind::dimension, "sensory width is not a square");
    for (int v = 0; v < net.streams(); ++v) {
      const auto& w = net.intra_weights()[v][1];  // J1 x J0
      std::vector<Eigen::VectorXf> fields;
      fields.reserve(w.rows());
      for (int r = 0; r < w.rows(); ++r)
        fields.push_back(w.row(r).transpose());
      std::string path =
          out_dir + "/rf_stream" + std::to_string(v) + ".pgm";
      write_field_grid(path, fields, side);
      paths.push_back(path);
    }
    return paths;
  }

  GpcNetwork<float> net = load_gpc_checkpoint(ckpt_base);
  const auto& w = net.weights()[1];  // J0 x J1, one field per column
  const int j0 = static_cast<int>(w.rows());
  std::vector<Eigen::VectorXf> fields;
  int side;
  if (net.config().variant == GpcVariant::fov) {
    // Masked columns live in one per-stream block; show that block.
    const int blocks = net.config().blocks;
    const int rb = j0 / blocks, cb = static_cast<int>(w.cols()) / blocks;
    side = static_cast<int>(std::lround(std::sqrt(double(rb))));
    if (side * side != rb)
      fail(ErrorKind::dimension, "per-stream block is not a square");
    for (int c = 0; c < w.cols(); ++c)
      fields.push_back(w.block((c / cb) * rb, c, rb, 1));
  } else {
    side = static_cast<int>(std::lround(std::sqrt(double(j0))));
    if (side * side != j0)
      fail(ErrorKind::dimension, "sensory width is not a square");
    for (int c = 0; c < w.cols(); ++c) fields.push_back(w.col(c));
  }
  std::string path = out_dir + "/rf_fields.pgm";
  write_field_grid(path, fields, side);
  paths.push_back(path);
  return paths;
}

double probe_accuracy(const CodeSet& train_codes,
                      const std::vector<uint8_t>& train_labels,
                      const CodeSet& val_codes,
                      const std::vector<uint8_t>& val_labels,
                      const CodeSet& test_codes,
                      const std::vector<uint8_t>& test_labels,
                      const ProbeOptions& opt) {
  auto probe = fit_linear<float>(train_codes, train_labels, val_codes,
                                 val_labels, opt);
  return eval_accuracy(probe, test_codes, test_labels);
}

Eigen::MatrixXf corpus_pixels(const ImageCorpus& corpus) {
  const int dim = corpus.side * corpus.side;
  Eigen::MatrixXf out(dim, corpus.count());
  for (std::size_t i = 0; i < corpus.count(); ++i)
    out.col(i) = Eigen::Map<const Eigen::VectorXf>(corpus.image(i), dim);
  return out;
}

double probe_decoder_mse(const CodeSet& train_codes, const ImageCorpus& train,
                         const CodeSet& val_codes, const ImageCorpus& val,
                         const CodeSet& test_codes, const ImageCorpus& test,
                         const ProbeOptions& opt) {
  Eigen::MatrixXf train_px = corpus_pixels(train);
  Eigen::MatrixXf val_px = corpus_pixels(val);
  auto probe =
      fit_decoder<float>(train_codes, train_px, val_codes, val_px, opt);
  return eval_mse(probe, test_codes, corpus_pixels(test));
}

std::vector<SweepRow> sweep_glimpses(const ExperimentConfig& cfg,
                                     const std::string& ckpt_base,
                                     const Datasets& data,
                                     const std::vector<int>& k_values) {
  if (k_values.empty()) fail(ErrorKind::argument, "no K values");
  const int k_max = *std::max_element(k_values.begin(), k_values.end());

  CodeSet train_codes =
      encode_corpus(cfg, ckpt_base, data.train, kExportTag + 0, k_max);
  CodeSet val_codes =
      encode_corpus(cfg, ckpt_base, data.val, kExportTag + 1, k_max);
  CodeSet test_codes =
      encode_corpus(cfg, ckpt_base, data.test, kExportTag + 2, k_max);
  const int per = train_codes.dim() / k_max;

  std::vector<SweepRow> rows;
  for (int k : k_values) {
    if (k < 1 || k > k_max) fail(ErrorKind::argument, "bad K value");
    double acc = probe_accuracy(
        train_codes.first_rows(k * per), data.train.labels,
        val_codes.first_rows(k * per), data.val.labels,
        test_codes.first_rows(k * per), data.test.labels, cfg.probe);
    rows.push_back({double(k), acc});
    std::printf("[sweep-glimpses] K=%d acc=%.2f\n", k, acc);
    std::fflush(stdout);
  }
  return rows;
}

std::vector<SweepRow> sweep_samples(const ExperimentConfig& cfg,
                                    const Datasets& data,
                                    const std::vector<int>& sizes) {
  std::vector<SweepRow> rows;
  for (int size : sizes) {
    Datasets sub;
    sub.train = subsample(data.train, size, mix_seed(cfg.data_seed, 555, size));
    sub.val = data.val;
    sub.test = data.test;

    ExperimentConfig run_cfg = cfg;
    run_cfg.out_dir = cfg.out_dir + "/n" + std::to_string(size);
    RunRecord rec = train_model(run_cfg, sub);

    CodeSet train_codes = encode_corpus(run_cfg, rec.checkpoint_base,
                                        sub.train, kExportTag + 0);
    CodeSet val_codes = encode_corpus(run_cfg, rec.checkpoint_base, sub.val,
                                      kExportTag + 1);
    CodeSet test_codes = encode_corpus(run_cfg, rec.checkpoint_base, sub.test,
                                       kExportTag + 2);
    double acc = probe_accuracy(train_codes, sub.train.labels, val_codes,
                                sub.val.labels, test_codes, sub.test.labels,
                                cfg.probe);
    rows.push_back({double(size), acc});
    std::printf("[sweep-samples] n=%d acc=%.2f\n", size, acc);
    std::fflush(stdout);
  }
  return rows;
}

void write_sweep_csv(const std::string& path, const std::string& x_name,
                     const std::vector<SweepRow>& rows, uint64_t config_hash) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::io, "cannot write " + path);
  out << "# config_hash = " << config_hash << "\n";
  out << x_name << ",accuracy\n";
  for (const auto& r : rows) out << r.x << "," << r.accuracy << "\n";
}

}  // namespace mpc
