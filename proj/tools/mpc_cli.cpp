#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mpc_capi.h"

namespace {

struct SessionHandle {
  mpc_session* s = nullptr;
  ~SessionHandle() { mpc_session_close(s); }
};

int open_session(SessionHandle& h, const std::string& config,
                 const std::vector<std::string>& overrides) {
  std::vector<const char*> raw;
  raw.reserve(overrides.size());
  for (const auto& o : overrides) raw.push_back(o.c_str());
  h.s = mpc_session_open(config.empty() ? nullptr : config.c_str(),
                         raw.data(), static_cast<int>(raw.size()));
  if (mpc_session_ok(h.s) != MPC_OK) {
    std::cerr << "config error: " << mpc_last_error(h.s) << "\n";
    return 1;
  }
  return 0;
}

int check(mpc_session* s, int status, const char* what) {
  if (status == MPC_OK) return 0;
  std::cerr << what << " failed (status " << status
            << "): " << mpc_last_error(s) << "\n";
  return 1;
}

void dump_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) return;
  std::cout << "--- " << path.string() << "\n" << in.rdbuf() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Saccadic predictive-coding trainer and evaluation harness"};
  app.require_subcommand(1);

  std::string config;
  std::vector<std::string> overrides;
  app.add_option("-c,--config", config, "experiment config file");
  app.add_option("-s,--set", overrides,
                 "override config entries (key=value, repeatable)");

  auto* train = app.add_subcommand("train", "train the configured model");

  std::string ckpt, out_base, out_dir;
  int k_override = 0;
  auto* exl = app.add_subcommand("export-latents",
                                 "encode all splits with plasticity off");
  exl->add_option("--checkpoint", ckpt, "checkpoint base path")->required();
  exl->add_option("--out", out_base, "output base path")->required();
  exl->add_option("--glimpses", k_override, "override glimpse count");

  auto* exr = app.add_subcommand("export-rfields",
                                 "write receptive-field grids as PGM");
  exr->add_option("--checkpoint", ckpt, "checkpoint base path")->required();
  exr->add_option("--out", out_dir, "output directory")->required();

  std::string codes_base;
  auto* pl = app.add_subcommand("probe-linear",
                                "linear classifier head on exported codes");
  pl->add_option("--codes", codes_base, "codes base path")->required();

  auto* pd = app.add_subcommand("probe-decoder",
                                "reconstruction head on exported codes");
  pd->add_option("--codes", codes_base, "codes base path")->required();

  std::vector<int> k_values{2, 4, 6, 8, 10, 12};
  std::string csv_path;
  auto* sg = app.add_subcommand("sweep-glimpses",
                                "probe accuracy vs glimpse count");
  sg->add_option("--checkpoint", ckpt, "checkpoint base path")->required();
  sg->add_option("--k", k_values, "glimpse counts");
  sg->add_option("--csv", csv_path, "output CSV path")->required();

  std::vector<int> sizes{100, 200, 500, 1000, 5000, 10000, 25000, 50000};
  auto* ss = app.add_subcommand("sweep-samples",
                                "probe accuracy vs training-set size");
  ss->add_option("--n", sizes, "training-set sizes");
  ss->add_option("--csv", csv_path, "output CSV path")->required();

  auto* rep = app.add_subcommand("report",
                                 "print run record and metric tables");

  CLI11_PARSE(app, argc, argv);

  SessionHandle h;
  if (open_session(h, config, overrides)) return 1;

  if (train->parsed())
    return check(h.s, mpc_train(h.s), "train");

  if (exl->parsed())
    return check(h.s,
                 mpc_export_latents(h.s, ckpt.c_str(), out_base.c_str(),
                                    k_override),
                 "export-latents");

  if (exr->parsed())
    return check(h.s, mpc_export_rfields(h.s, ckpt.c_str(), out_dir.c_str()),
                 "export-rfields");

  if (pl->parsed()) {
    double acc = 0.0;
    int rc = check(h.s, mpc_probe_linear(h.s, codes_base.c_str(), &acc),
                   "probe-linear");
    if (rc == 0) std::printf("test_accuracy %.4f\n", acc);
    return rc;
  }

  if (pd->parsed()) {
    double mse = 0.0;
    int rc = check(h.s, mpc_probe_decoder(h.s, codes_base.c_str(), &mse),
                   "probe-decoder");
    if (rc == 0) std::printf("test_mse %.6f\n", mse);
    return rc;
  }

  if (sg->parsed())
    return check(h.s,
                 mpc_sweep_glimpses(h.s, ckpt.c_str(), k_values.data(),
                                    static_cast<int>(k_values.size()),
                                    csv_path.c_str()),
                 "sweep-glimpses");

  if (ss->parsed())
    return check(h.s,
                 mpc_sweep_samples(h.s, sizes.data(),
                                   static_cast<int>(sizes.size()),
                                   csv_path.c_str()),
                 "sweep-samples");

  if (rep->parsed()) {
    namespace fs = std::filesystem;
    fs::path dir = mpc_out_dir(h.s);
    if (!fs::exists(dir)) {
      std::cerr << "no output directory: " << dir.string() << "\n";
      return 1;
    }
    dump_file(dir / "run.json");
    dump_file(dir / "train_log.csv");
    for (const auto& entry : fs::directory_iterator(dir))
      if (entry.path().extension() == ".csv" &&
          entry.path().filename() != "train_log.csv")
        dump_file(entry.path());
    return 0;
  }

  return 1;
}
