#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "doctest.h"
#include "mpc/idx.hpp"
#include "mpc_capi.h"

namespace fs = std::filesystem;

namespace {

fs::path work_dir() {
  auto dir = fs::temp_directory_path() / "capi_test";
  fs::create_directories(dir);
  return dir;
}

void write_datasets() {
  static bool written = false;
  if (written) return;
  auto dir = work_dir();
  auto make = [](int n, uint64_t seed) {
    mpc::ImageCorpus c;
    c.side = 28;
    std::mt19937_64 rng(seed);
    c.pixels.resize(std::size_t(n) * 28 * 28);
    for (auto& p : c.pixels) p = float(rng() % 256) / 255.0f;
    c.labels.resize(n);
    for (auto& l : c.labels) l = uint8_t(rng() % 10);
    return c;
  };
  mpc::save_idx(make(30, 1), (dir / "tri.idx").string(),
                (dir / "trl.idx").string());
  mpc::save_idx(make(10, 2), (dir / "tei.idx").string(),
                (dir / "tel.idx").string());
  written = true;
}

mpc_session* open_tiny(const char* out_tag) {
  write_datasets();
  auto dir = work_dir();
  std::vector<std::string> ov = {
      "run.model=mpc",
      "run.epochs=1",
      "run.batch=10",
      "data.val_count=8",
      "glimpse.K=2",
      "mpc.widths=12, 12",
      "mpc.n_winners=3",
      "mpc.T=5",
      "data.train_images=" + (dir / "tri.idx").string(),
      "data.train_labels=" + (dir / "trl.idx").string(),
      "data.test_images=" + (dir / "tei.idx").string(),
      "data.test_labels=" + (dir / "tel.idx").string(),
      "run.out_dir=" + (dir / out_tag).string(),
      "probe.linear_epochs=3",
  };
  std::vector<const char*> raw;
  for (auto& s : ov) raw.push_back(s.c_str());
  return mpc_session_open(nullptr, raw.data(), int(raw.size()));
}

}  // namespace

TEST_CASE("session rejects malformed configuration") {
  const char* bad[] = {"mpc.T=7", "mpc.dt=2"};  // non-integral step count
  mpc_session* s = mpc_session_open(nullptr, bad, 2);
  REQUIRE(s != nullptr);
  CHECK(mpc_session_ok(s) != MPC_OK);
  CHECK(std::string(mpc_last_error(s)).size() > 0);
  CHECK(mpc_train(s) == MPC_ERR_CONFIG);
  mpc_session_close(s);

  const char* noeq[] = {"not-a-pair"};
  mpc_session* s2 = mpc_session_open(nullptr, noeq, 1);
  CHECK(mpc_session_ok(s2) != MPC_OK);
  mpc_session_close(s2);
}

TEST_CASE("missing data paths surface as status codes, not crashes") {
  const char* ov[] = {"run.epochs=0"};
  mpc_session* s = mpc_session_open(nullptr, ov, 1);
  REQUIRE(mpc_session_ok(s) == MPC_OK);
  int rc = mpc_train(s);
  CHECK(rc == MPC_ERR_CONFIG);  // dataset paths unset
  CHECK(std::string(mpc_last_error(s)).find("dataset") != std::string::npos);
  mpc_session_close(s);
}

TEST_CASE("train, export, and probe through the C surface") {
  mpc_session* s = open_tiny("capi_run");
  REQUIRE(s != nullptr);
  REQUIRE(mpc_session_ok(s) == MPC_OK);

  CHECK(mpc_train(s) == MPC_OK);
  std::string out = mpc_out_dir(s);
  CHECK(fs::exists(out + "/checkpoint.f32"));
  CHECK(fs::exists(out + "/run.json"));

  std::string ckpt = out + "/checkpoint";
  std::string codes = out + "/codes";
  CHECK(mpc_export_latents(s, ckpt.c_str(), codes.c_str(), 0) == MPC_OK);
  CHECK(fs::exists(codes + "_test.f32"));

  double acc = -1.0;
  CHECK(mpc_probe_linear(s, codes.c_str(), &acc) == MPC_OK);
  CHECK(acc >= 0.0);
  CHECK(acc <= 100.0);

  CHECK(mpc_export_rfields(s, ckpt.c_str(), (out + "/rf").c_str()) == MPC_OK);
  CHECK(fs::exists(out + "/rf/rf_stream0.pgm"));

  // bad checkpoint path is an io error with a message
  int rc = mpc_export_latents(s, (out + "/nope").c_str(), codes.c_str(), 0);
  CHECK(rc == MPC_ERR_IO);
  CHECK(std::string(mpc_last_error(s)).size() > 0);

  mpc_session_close(s);
}

TEST_CASE("null session handling") {
  CHECK(mpc_session_ok(nullptr) == MPC_ERR_ARGUMENT);
  CHECK(mpc_train(nullptr) == MPC_ERR_ARGUMENT);
  CHECK(std::string(mpc_last_error(nullptr)) == "null session");
  mpc_session_close(nullptr);  // must be a no-op
}
