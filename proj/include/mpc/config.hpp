#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "mpc/dynamics.hpp"
#include "mpc/glimpse.hpp"
#include "mpc/topology.hpp"

namespace mpc {

// Flat `key = value` text config; '#' starts a comment, keys are dotted
// (`mpc.topology`, `glimpse.K`, ...).
class KeyValueConfig {
 public:
  static KeyValueConfig parse_file(const std::string& path);
  static KeyValueConfig parse_string(const std::string& text);

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  void set(const std::string& key, const std::string& value) {
    values_[key] = value;
  }
  std::string get(const std::string& key, const std::string& fallback) const;
  int64_t get_i(const std::string& key, int64_t fallback) const;
  double get_f(const std::string& key, double fallback) const;
  std::vector<int> get_ints(const std::string& key,
                            const std::vector<int>& fallback) const;

  // Sorted `key = value` lines; the config hash is FNV-1a over this.
  std::string canonical() const;
  uint64_t hash() const;

  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

uint64_t fnv1a(const void* data, std::size_t n, uint64_t seed = 0xcbf29ce484222325ull);

struct ProbeOptions {
  std::vector<double> lr_grid = {0.1, 0.01, 0.001};
  std::vector<double> l2_grid = {0.0, 1e-4};
  int linear_epochs = 50;
  std::vector<double> tikhonov_grid = {1e-5, 1e-4, 1e-3};
  int decoder_epochs = 30;
  int decoder_hidden = 1024;
  int batch = 100;
  uint64_t seed = 11;
};

// Full experiment description (model family + dataset + schedule); defaults
// follow the benchmark protocol: 5 epochs, mini-batches of 100, K = 10.
struct ExperimentConfig {
  std::string model = "mpc";  // mpc | gpc | gpc-relu | gpc-nwta | gpc-fov
  std::string train_images, train_labels, test_images, test_labels;
  int val_count = 10000;
  uint64_t data_seed = 7;

  GlimpseConfig glimpse;

  // mpc
  std::vector<int> mpc_widths = {256, 256, 256};  // hidden layers
  PatternId topology = PatternId::st2;
  int n_winners = 15;
  DynamicsConfig dyn;
  uint64_t model_seed = 42;

  // gpc
  std::vector<int> gpc_widths = {360, 360, 360};
  double lambda_l = 1e-3;
  int mask_depth = 1;

  int epochs = 5;
  int batch = 100;
  std::string out_dir = "out";

  ProbeOptions probe;

  uint64_t config_hash = 0;
  KeyValueConfig raw;

  static ExperimentConfig from_kv(const KeyValueConfig& kv);
  bool glimpse_driven() const {
    return model == "mpc" || model == "gpc-fov";
  }
};

}  // namespace mpc
