#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mpc/codes.hpp"
#include "mpc/config.hpp"
#include "mpc/idx.hpp"

namespace mpc {

struct Datasets {
  ImageCorpus train, val, test;
};

// Loads the IDX files named in the config and carves the validation split
// off the training set.
Datasets load_datasets(const ExperimentConfig& cfg);

struct RunRecord {
  uint64_t config_hash = 0;
  std::string model;
  std::vector<double> epoch_free_energy;  // settled value, mean over epoch
  std::string checkpoint_base;            // final checkpoint (no extension)
  uint64_t checkpoint_hash = 0;
  int epochs_done = 0;
  double wall_seconds = 0.0;
};

// Trains the configured model from scratch, writing a checkpoint after every
// epoch (`<out_dir>/checkpoint`, overwritten) and a free-energy log
// (`<out_dir>/train_log.csv`).
RunRecord train_model(const ExperimentConfig& cfg, const Datasets& data);

// Deterministic per-image randomness: every image gets its own saccade
// sequence seeded from (base, tag, index).
uint64_t mix_seed(uint64_t base, uint64_t tag, uint64_t index);

// Encode a corpus with plasticity off. `tag` separates the saccade seeds of
// different passes (epoch number during training, 1000+split for exports).
// `k_override` (> 0) replaces the configured glimpse count.
CodeSet encode_corpus(const ExperimentConfig& cfg, const std::string& ckpt_base,
                      const ImageCorpus& corpus, uint64_t tag,
                      int k_override = 0);

// Writes `<out_base>_{train,val,test}.f32/.json` code files.
void export_latents(const ExperimentConfig& cfg, const std::string& ckpt_base,
                    const Datasets& data, const std::string& out_base,
                    int k_override = 0);

// Bottom-layer prediction weights as tiled 8-bit PGM grids, one file per
// stream for the multi-stream model, one file total for the generative ones.
// Each field is min-max normalized (degenerate fields render mid-gray).
std::vector<std::string> export_receptive_fields(const std::string& ckpt_base,
                                                 const std::string& out_dir);

struct SweepRow {
  double x = 0.0;       // K or training-set size
  double accuracy = 0.0;  // linear-probe test accuracy, percent
};

// Fig.-8-style protocol: encode once at max(K values) from one checkpoint,
// then probe on row-truncated codes per K.
std::vector<SweepRow> sweep_glimpses(const ExperimentConfig& cfg,
                                     const std::string& ckpt_base,
                                     const Datasets& data,
                                     const std::vector<int>& k_values);

// Fig.-6-style protocol: retrain on subsampled training sets, probe on the
// full test set per size.
std::vector<SweepRow> sweep_samples(const ExperimentConfig& cfg,
                                    const Datasets& data,
                                    const std::vector<int>& sizes);

void write_sweep_csv(const std::string& path, const std::string& x_name,
                     const std::vector<SweepRow>& rows, uint64_t config_hash);

// Linear-probe test accuracy for exported codes (fit on train, select on
// val, report test).
double probe_accuracy(const CodeSet& train_codes,
                      const std::vector<uint8_t>& train_labels,
                      const CodeSet& val_codes,
                      const std::vector<uint8_t>& val_labels,
                      const CodeSet& test_codes,
                      const std::vector<uint8_t>& test_labels,
                      const ProbeOptions& opt);

// Decoder-probe test MSE (summed squared pixel error per image, averaged).
double probe_decoder_mse(const CodeSet& train_codes, const ImageCorpus& train,
                         const CodeSet& val_codes, const ImageCorpus& val,
                         const CodeSet& test_codes, const ImageCorpus& test,
                         const ProbeOptions& opt);

// Column-major pixel matrix (side*side x count) for decoder targets.
Eigen::MatrixXf corpus_pixels(const ImageCorpus& corpus);

}  // namespace mpc
