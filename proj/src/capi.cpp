#include "mpc_capi.h"

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mpc/errors.hpp"
#include "mpc/harness.hpp"

struct mpc_session {
  mpc::ExperimentConfig cfg;
  std::optional<mpc::Datasets> data;
  std::string last_error;
  std::string out_dir_buf;
  bool configured = false;
};

namespace {

int status_of(mpc::ErrorKind kind) {
  using mpc::ErrorKind;
  switch (kind) {
    case ErrorKind::io: return MPC_ERR_IO;
    case ErrorKind::format: return MPC_ERR_FORMAT;
    case ErrorKind::consistency: return MPC_ERR_CONSISTENCY;
    case ErrorKind::argument: return MPC_ERR_ARGUMENT;
    case ErrorKind::config: return MPC_ERR_CONFIG;
    case ErrorKind::dimension: return MPC_ERR_DIMENSION;
    case ErrorKind::topology: return MPC_ERR_TOPOLOGY;
    case ErrorKind::divergence: return MPC_ERR_DIVERGENCE;
  }
  return MPC_ERR_UNKNOWN;
}

// Runs `fn`, translating exceptions into status codes + session message.
template <typename Fn>
int guarded(mpc_session* s, Fn&& fn) {
  if (!s) return MPC_ERR_ARGUMENT;
  if (!s->configured) return MPC_ERR_CONFIG;
  try {
    fn();
    s->last_error.clear();
    return MPC_OK;
  } catch (const mpc::Error& ex) {
    s->last_error = ex.what();
    return status_of(ex.kind());
  } catch (const std::exception& ex) {
    s->last_error = ex.what();
    return MPC_ERR_UNKNOWN;
  }
}

mpc::Datasets& datasets(mpc_session* s) {
  if (!s->data) s->data = mpc::load_datasets(s->cfg);
  return *s->data;
}

mpc::CodeSet load_split(const std::string& base, const char* split) {
  return mpc::CodeSet::load(base + "_" + split);
}

}  // namespace

extern "C" {

const char* mpc_version(void) { return "0.1.0"; }

mpc_session* mpc_session_open(const char* config_path,
                              const char* const* overrides, int n_overrides) {
  auto s = std::make_unique<mpc_session>();
  try {
    mpc::KeyValueConfig kv;
    if (config_path) kv = mpc::KeyValueConfig::parse_file(config_path);
    for (int i = 0; i < n_overrides; ++i) {
      std::string line = overrides[i];
      auto eq = line.find('=');
      if (eq == std::string::npos)
        mpc::fail(mpc::ErrorKind::config, "override must be key=value: " + line);
      kv.set(line.substr(0, eq), line.substr(eq + 1));
    }
    s->cfg = mpc::ExperimentConfig::from_kv(kv);
    s->configured = true;
  } catch (const mpc::Error& ex) {
    s->last_error = ex.what();
  } catch (const std::exception& ex) {
    s->last_error = ex.what();
  }
  return s.release();
}

void mpc_session_close(mpc_session* s) { delete s; }

int mpc_session_ok(mpc_session* s) {
  if (!s) return MPC_ERR_ARGUMENT;
  return s->configured ? MPC_OK : MPC_ERR_CONFIG;
}

const char* mpc_last_error(mpc_session* s) {
  return s ? s->last_error.c_str() : "null session";
}

const char* mpc_out_dir(mpc_session* s) {
  if (!s) return "";
  s->out_dir_buf = s->cfg.out_dir;
  return s->out_dir_buf.c_str();
}

int mpc_train(mpc_session* s) {
  return guarded(s, [&] { mpc::train_model(s->cfg, datasets(s)); });
}

int mpc_export_latents(mpc_session* s, const char* checkpoint_base,
                       const char* out_base, int k_override) {
  return guarded(s, [&] {
    mpc::export_latents(s->cfg, checkpoint_base, datasets(s), out_base,
                        k_override);
  });
}

int mpc_export_rfields(mpc_session* s, const char* checkpoint_base,
                       const char* out_dir) {
  return guarded(s, [&] {
    mpc::export_receptive_fields(checkpoint_base, out_dir);
  });
}

int mpc_probe_linear(mpc_session* s, const char* codes_base,
                     double* accuracy_out) {
  return guarded(s, [&] {
    auto& d = datasets(s);
    double acc = mpc::probe_accuracy(
        load_split(codes_base, "train"), d.train.labels,
        load_split(codes_base, "val"), d.val.labels,
        load_split(codes_base, "test"), d.test.labels, s->cfg.probe);
    if (accuracy_out) *accuracy_out = acc;
  });
}

int mpc_probe_decoder(mpc_session* s, const char* codes_base,
                      double* mse_out) {
  return guarded(s, [&] {
    auto& d = datasets(s);
    double mse = mpc::probe_decoder_mse(
        load_split(codes_base, "train"), d.train,
        load_split(codes_base, "val"), d.val,
        load_split(codes_base, "test"), d.test, s->cfg.probe);
    if (mse_out) *mse_out = mse;
  });
}

int mpc_sweep_glimpses(mpc_session* s, const char* checkpoint_base,
                       const int* k_values, int n_values,
                       const char* csv_path) {
  return guarded(s, [&] {
    std::vector<int> ks(k_values, k_values + n_values);
    auto rows = mpc::sweep_glimpses(s->cfg, checkpoint_base, datasets(s), ks);
    mpc::write_sweep_csv(csv_path, "glimpses", rows, s->cfg.config_hash);
  });
}

int mpc_sweep_samples(mpc_session* s, const int* sizes, int n_sizes,
                      const char* csv_path) {
  return guarded(s, [&] {
    std::vector<int> ns(sizes, sizes + n_sizes);
    auto rows = mpc::sweep_samples(s->cfg, datasets(s), ns);
    mpc::write_sweep_csv(csv_path, "train_size", rows, s->cfg.config_hash);
  });
}

}  // extern "C"
