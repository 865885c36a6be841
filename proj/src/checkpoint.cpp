#include "mpc/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <vector>

#include "json.hpp"
#include "mpc/config.hpp"
#include "mpc/errors.hpp"

namespace mpc {

namespace {

using json = nlohmann::json;

class BlobWriter {
 public:
  void add(const Eigen::MatrixXf& m) {
    const auto* p = reinterpret_cast<const char*>(m.data());
    buf_.insert(buf_.end(), p, p + m.size() * sizeof(float));
  }
  uint64_t hash() const { return fnv1a(buf_.data(), buf_.size()); }
  void write(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorKind::io, "cannot write " + path);
    out.write(buf_.data(), static_cast<std::streamsize>(buf_.size()));
    if (!out) fail(ErrorKind::io, "short write to " + path);
  }

 private:
  std::vector<char> buf_;
};

class BlobReader {
 public:
  explicit BlobReader(const std::string& path) {
    std::ifstream in(path, std::ios::binary | std::ios::ate);
    if (!in) fail(ErrorKind::io, "cannot open " + path);
    buf_.resize(static_cast<std::size_t>(in.tellg()));
    in.seekg(0);
    in.read(buf_.data(), static_cast<std::streamsize>(buf_.size()));
    if (!in) fail(ErrorKind::io, "short read from " + path);
  }
  void take(Eigen::MatrixXf& m, int rows, int cols) {
    std::size_t bytes = std::size_t(rows) * cols * sizeof(float);
    if (pos_ + bytes > buf_.size())
      fail(ErrorKind::format, "checkpoint blob truncated");
    m.resize(rows, cols);
    std::memcpy(m.data(), buf_.data() + pos_, bytes);
    pos_ += bytes;
  }
  void finish() const {
    if (pos_ != buf_.size())
      fail(ErrorKind::format, "checkpoint blob has trailing bytes");
  }
  uint64_t hash() const { return fnv1a(buf_.data(), buf_.size()); }

 private:
  std::vector<char> buf_;
  std::size_t pos_ = 0;
};

json load_manifest(const std::string& base) {
  std::ifstream in(base + ".json");
  if (!in) fail(ErrorKind::io, "cannot open " + base + ".json");
  try {
    return json::parse(in);
  } catch (const json::exception& ex) {
    fail(ErrorKind::format, base + ".json: " + ex.what());
  }
}

void write_manifest(const std::string& base, const json& manifest) {
  std::ofstream out(base + ".json");
  if (!out) fail(ErrorKind::io, "cannot write " + base + ".json");
  out << manifest.dump(2) << "\n";
}

json common_fields(const std::string& kind, uint64_t config_hash,
                   int epochs_done, uint64_t blob_hash) {
  return json{{"kind", kind},
              {"config_hash", config_hash},
              {"epochs_done", epochs_done},
              {"blob_hash", blob_hash}};
}

}  // namespace

uint64_t save_checkpoint(const MpcNetwork<float>& net, const std::string& base,
                         uint64_t config_hash, int epochs_done) {
  const auto& cfg = net.config();
  BlobWriter blob;
  for (const auto& sw : net.intra_weights())
    for (const auto& m : sw)
      if (m.size() > 0) blob.add(m);
  for (const auto& se : net.cross_weights())
    for (const auto& m : se)
      if (m.size() > 0) blob.add(m);
  for (const auto& se : net.action_weights())
    for (const auto& m : se)
      if (m.size() > 0) blob.add(m);
  blob.write(base + ".f32");

  json edges = json::array();
  for (const auto& e : cfg.topology.edges)
    edges.push_back({e.src, e.dst});
  json manifest =
      common_fields("mpc", config_hash, epochs_done, blob.hash());
  manifest["widths"] = cfg.widths;
  manifest["pattern"] = pattern_name(cfg.topology.id);
  manifest["streams"] = cfg.topology.streams;
  manifest["edges"] = edges;
  manifest["n_winners"] = cfg.act.n_winners;
  manifest["seed"] = cfg.seed;
  manifest["dyn"] = {{"tau_z", cfg.dyn.tau_z},     {"dt", cfg.dyn.dt},
                     {"T", cfg.dyn.T},             {"lr_w", cfg.dyn.lr_w},
                     {"lambda_w", cfg.dyn.lambda_w}, {"sigma", cfg.dyn.sigma}};
  write_manifest(base, manifest);
  return blob.hash();
}

uint64_t save_checkpoint(const GpcNetwork<float>& net, const std::string& base,
                         uint64_t config_hash, int epochs_done) {
  const auto& cfg = net.config();
  BlobWriter blob;
  for (const auto& m : net.weights())
    if (m.size() > 0) blob.add(m);
  blob.write(base + ".f32");

  json manifest =
      common_fields("gpc", config_hash, epochs_done, blob.hash());
  manifest["widths"] = cfg.widths;
  manifest["variant"] = gpc_variant_name(cfg.variant);
  manifest["act"] = cfg.act.kind == ActKind::identity ? "identity"
                    : cfg.act.kind == ActKind::relu   ? "relu"
                                                      : "nwta";
  manifest["n_winners"] = cfg.act.n_winners;
  manifest["lambda_l"] = cfg.lambda_l;
  manifest["blocks"] = cfg.blocks;
  manifest["mask_depth"] = cfg.mask_depth;
  manifest["seed"] = cfg.seed;
  manifest["dyn"] = {{"tau_z", cfg.dyn.tau_z},     {"dt", cfg.dyn.dt},
                     {"T", cfg.dyn.T},             {"lr_w", cfg.dyn.lr_w},
                     {"lambda_w", cfg.dyn.lambda_w}, {"sigma", cfg.dyn.sigma}};
  write_manifest(base, manifest);
  return blob.hash();
}

CheckpointMeta peek_checkpoint(const std::string& base) {
  json manifest = load_manifest(base);
  CheckpointMeta meta;
  meta.kind = manifest.at("kind").get<std::string>();
  meta.config_hash = manifest.at("config_hash").get<uint64_t>();
  meta.epochs_done = manifest.at("epochs_done").get<int>();
  meta.blob_hash = manifest.at("blob_hash").get<uint64_t>();
  return meta;
}

namespace {

DynamicsConfig dyn_from_json(const json& d) {
  DynamicsConfig dyn;
  dyn.tau_z = d.at("tau_z").get<double>();
  dyn.dt = d.at("dt").get<double>();
  dyn.T = d.at("T").get<double>();
  dyn.lr_w = d.at("lr_w").get<double>();
  dyn.lambda_w = d.at("lambda_w").get<double>();
  dyn.sigma = d.at("sigma").get<double>();
  return dyn;
}

void fill_meta(CheckpointMeta* meta, const json& manifest) {
  if (!meta) return;
  meta->kind = manifest.at("kind").get<std::string>();
  meta->config_hash = manifest.at("config_hash").get<uint64_t>();
  meta->epochs_done = manifest.at("epochs_done").get<int>();
  meta->blob_hash = manifest.at("blob_hash").get<uint64_t>();
}

}  // namespace

MpcNetwork<float> load_mpc_checkpoint(const std::string& base,
                                      CheckpointMeta* meta) {
  json manifest = load_manifest(base);
  if (manifest.at("kind") != "mpc")
    fail(ErrorKind::format, base + ": not a multi-stream checkpoint");

  MpcNetwork<float>::Config cfg;
  cfg.widths = manifest.at("widths").get<std::vector<int>>();
  std::string pattern = manifest.at("pattern").get<std::string>();
  cfg.topology.id =
      pattern == "custom" ? PatternId::custom : parse_pattern(pattern);
  cfg.topology.streams = manifest.at("streams").get<int>();
  for (const auto& e : manifest.at("edges"))
    cfg.topology.edges.push_back({e.at(0).get<int>(), e.at(1).get<int>()});
  int nw = manifest.at("n_winners").get<int>();
  cfg.act = nw > 0 ? Activation{ActKind::nwta, nw} : Activation{};
  cfg.seed = manifest.at("seed").get<uint64_t>();
  cfg.dyn = dyn_from_json(manifest.at("dyn"));

  MpcNetwork<float> net(cfg);
  BlobReader blob(base + ".f32");
  for (auto& sw : net.intra_weights())
    for (auto& m : sw)
      if (m.size() > 0) blob.take(m, int(m.rows()), int(m.cols()));
  for (auto& se : net.cross_weights())
    for (auto& m : se)
      if (m.size() > 0) blob.take(m, int(m.rows()), int(m.cols()));
  for (auto& se : net.action_weights())
    for (auto& m : se)
      if (m.size() > 0) blob.take(m, int(m.rows()), int(m.cols()));
  blob.finish();
  if (blob.hash() != manifest.at("blob_hash").get<uint64_t>())
    fail(ErrorKind::consistency, base + ": blob hash mismatch");
  fill_meta(meta, manifest);
  return net;
}

GpcNetwork<float> load_gpc_checkpoint(const std::string& base,
                                      CheckpointMeta* meta) {
  json manifest = load_manifest(base);
  if (manifest.at("kind") != "gpc")
    fail(ErrorKind::format, base + ": not a generative checkpoint");

  GpcNetwork<float>::Config cfg;
  cfg.widths = manifest.at("widths").get<std::vector<int>>();
  cfg.variant = parse_gpc_variant(manifest.at("variant").get<std::string>());
  std::string act = manifest.at("act").get<std::string>();
  int nw = manifest.at("n_winners").get<int>();
  if (act == "identity")
    cfg.act = Activation{};
  else if (act == "relu")
    cfg.act = Activation{ActKind::relu, 0};
  else
    cfg.act = Activation{ActKind::nwta, nw};
  cfg.lambda_l = manifest.at("lambda_l").get<double>();
  cfg.blocks = manifest.at("blocks").get<int>();
  cfg.mask_depth = manifest.at("mask_depth").get<int>();
  cfg.seed = manifest.at("seed").get<uint64_t>();
  cfg.dyn = dyn_from_json(manifest.at("dyn"));

  GpcNetwork<float> net(cfg);
  BlobReader blob(base + ".f32");
  for (auto& m : net.weights())
    if (m.size() > 0) blob.take(m, int(m.rows()), int(m.cols()));
  blob.finish();
  if (blob.hash() != manifest.at("blob_hash").get<uint64_t>())
    fail(ErrorKind::consistency, base + ": blob hash mismatch");
  fill_meta(meta, manifest);
  return net;
}

}  // namespace mpc
