#ifndef MPC_CAPI_H
#define MPC_CAPI_H

/* C interface to the saccadic predictive-coding core. A session wraps one
 * experiment configuration (flat key = value file plus optional overrides);
 * all functions return MPC_OK or a status code, with a human-readable
 * message available from mpc_last_error(). */

#ifdef __cplusplus
extern "C" {
#endif

typedef struct mpc_session mpc_session;

enum {
  MPC_OK = 0,
  MPC_ERR_IO = 1,
  MPC_ERR_FORMAT = 2,
  MPC_ERR_CONSISTENCY = 3,
  MPC_ERR_ARGUMENT = 4,
  MPC_ERR_CONFIG = 5,
  MPC_ERR_DIMENSION = 6,
  MPC_ERR_TOPOLOGY = 7,
  MPC_ERR_DIVERGENCE = 8,
  MPC_ERR_UNKNOWN = 99
};

const char* mpc_version(void);

/* overrides: n "key=value" strings applied on top of the config file;
 * config_path may be NULL to start from defaults. Returns NULL only on
 * allocation failure; configuration errors are reported by mpc_session_ok. */
mpc_session* mpc_session_open(const char* config_path,
                              const char* const* overrides, int n_overrides);
void mpc_session_close(mpc_session* s);

/* MPC_OK when the session configuration parsed cleanly. */
int mpc_session_ok(mpc_session* s);

/* Message for the most recent failure; empty string if none. The pointer is
 * owned by the session and valid until the next call on it. */
const char* mpc_last_error(mpc_session* s);

/* Configured output directory (checkpoints, logs land here). */
const char* mpc_out_dir(mpc_session* s);

/* Train from scratch per the session config; writes per-epoch checkpoints,
 * train_log.csv, and run.json under the output directory. */
int mpc_train(mpc_session* s);

/* Encode train/val/test splits with plasticity off into
 * <out_base>_{train,val,test}.f32/.json. k_override > 0 changes the glimpse
 * count; 0 keeps the configured one. */
int mpc_export_latents(mpc_session* s, const char* checkpoint_base,
                       const char* out_base, int k_override);

/* Bottom-layer prediction weights as tiled PGM grids in out_dir. */
int mpc_export_rfields(mpc_session* s, const char* checkpoint_base,
                       const char* out_dir);

/* Fit a linear classifier head on exported codes (<codes_base>_train etc.),
 * select on validation, return test accuracy in percent. */
int mpc_probe_linear(mpc_session* s, const char* codes_base,
                     double* accuracy_out);

/* Fit the reconstruction head; returns test MSE (summed squared pixel error
 * per image, averaged over images). */
int mpc_probe_decoder(mpc_session* s, const char* codes_base, double* mse_out);

/* Glimpse-count ablation: encode once from the checkpoint at max(k_values),
 * probe truncated codes per K, write a CSV. */
int mpc_sweep_glimpses(mpc_session* s, const char* checkpoint_base,
                       const int* k_values, int n_values,
                       const char* csv_path);

/* Sample-efficiency ablation: retrain on subsampled training sets and probe
 * the full test set per size; writes a CSV. */
int mpc_sweep_samples(mpc_session* s, const int* sizes, int n_sizes,
                      const char* csv_path);

#ifdef __cplusplus
}
#endif

#endif /* MPC_CAPI_H */
