#include "mpc/config.hpp"

#include <fstream>
#include <sstream>

#include "mpc/errors.hpp"

namespace mpc {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

KeyValueConfig KeyValueConfig::parse_string(const std::string& text) {
  KeyValueConfig kv;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      fail(ErrorKind::config,
           "config line " + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) fail(ErrorKind::config, "empty config key");
    kv.values_[key] = value;
  }
  return kv;
}

KeyValueConfig KeyValueConfig::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::io, "cannot open config " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_string(buf.str());
}

std::string KeyValueConfig::get(const std::string& key,
                                const std::string& fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

int64_t KeyValueConfig::get_i(const std::string& key, int64_t fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  try {
    return std::stoll(it->second);
  } catch (const std::exception&) {
    fail(ErrorKind::config, "key " + key + ": not an integer: " + it->second);
  }
}

double KeyValueConfig::get_f(const std::string& key, double fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  try {
    return std::stod(it->second);
  } catch (const std::exception&) {
    fail(ErrorKind::config, "key " + key + ": not a number: " + it->second);
  }
}

std::vector<int> KeyValueConfig::get_ints(
    const std::string& key, const std::vector<int>& fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  std::vector<int> out;
  std::istringstream in(it->second);
  std::string tok;
  while (std::getline(in, tok, ',')) {
    tok = trim(tok);
    if (tok.empty()) continue;
    try {
      out.push_back(std::stoi(tok));
    } catch (const std::exception&) {
      fail(ErrorKind::config, "key " + key + ": not an int list: " + it->second);
    }
  }
  if (out.empty()) fail(ErrorKind::config, "key " + key + ": empty list");
  return out;
}

std::string KeyValueConfig::canonical() const {
  std::ostringstream out;
  for (const auto& [k, v] : values_) out << k << " = " << v << "\n";
  return out.str();
}

uint64_t fnv1a(const void* data, std::size_t n, uint64_t seed) {
  const auto* p = static_cast<const unsigned char*>(data);
  uint64_t h = seed;
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

uint64_t KeyValueConfig::hash() const {
  std::string c = canonical();
  return fnv1a(c.data(), c.size());
}

ExperimentConfig ExperimentConfig::from_kv(const KeyValueConfig& kv) {
  ExperimentConfig c;
  c.raw = kv;
  c.config_hash = kv.hash();

  c.model = kv.get("run.model", c.model);
  c.epochs = static_cast<int>(kv.get_i("run.epochs", c.epochs));
  c.batch = static_cast<int>(kv.get_i("run.batch", c.batch));
  c.out_dir = kv.get("run.out_dir", c.out_dir);
  if (c.epochs < 0 || c.batch < 1)
    fail(ErrorKind::config, "run.epochs must be >= 0 and run.batch >= 1");

  c.train_images = kv.get("data.train_images", "");
  c.train_labels = kv.get("data.train_labels", "");
  c.test_images = kv.get("data.test_images", "");
  c.test_labels = kv.get("data.test_labels", "");
  c.val_count = static_cast<int>(kv.get_i("data.val_count", c.val_count));
  c.data_seed = static_cast<uint64_t>(kv.get_i("data.seed", 7));

  auto& g = c.glimpse;
  g.C = static_cast<int>(kv.get_i("glimpse.C", g.C));
  g.F = static_cast<int>(kv.get_i("glimpse.F", g.F));
  g.P = static_cast<int>(kv.get_i("glimpse.P", g.P));
  g.S = static_cast<int>(kv.get_i("glimpse.S", g.S));
  g.S_C = static_cast<int>(kv.get_i("glimpse.S_C", g.S_C));
  g.S_F = static_cast<int>(kv.get_i("glimpse.S_F", g.S_F));
  g.S_P = static_cast<int>(kv.get_i("glimpse.S_P", g.S_P));
  g.K = static_cast<int>(kv.get_i("glimpse.K", g.K));
  g.stride = static_cast<int>(kv.get_i("glimpse.stride", g.stride));
  g.center_lo = static_cast<int>(kv.get_i("glimpse.center_lo", g.center_lo));
  g.center_hi = static_cast<int>(kv.get_i("glimpse.center_hi", g.center_hi));
  g.seed = static_cast<uint64_t>(kv.get_i("glimpse.seed", g.seed));

  c.mpc_widths = kv.get_ints("mpc.widths", c.mpc_widths);
  int L = static_cast<int>(kv.get_i("mpc.L", c.mpc_widths.size()));
  if (L != static_cast<int>(c.mpc_widths.size()))
    fail(ErrorKind::config, "mpc.L does not match mpc.widths");
  c.topology = parse_pattern(kv.get("mpc.topology", "st2"));
  c.n_winners = static_cast<int>(kv.get_i("mpc.n_winners", c.n_winners));
  c.model_seed = static_cast<uint64_t>(kv.get_i("mpc.seed", c.model_seed));

  c.dyn.tau_z = kv.get_f("mpc.tau_z", c.dyn.tau_z);
  c.dyn.dt = kv.get_f("mpc.dt", c.dyn.dt);
  c.dyn.T = kv.get_f("mpc.T", c.dyn.T);
  c.dyn.lr_w = kv.get_f("mpc.tau_w_eff", c.dyn.lr_w);
  c.dyn.lambda_w = kv.get_f("mpc.lambda_w", c.dyn.lambda_w);
  c.dyn.sigma = kv.get_f("mpc.sigma", c.dyn.sigma);
  c.dyn.steps();

  c.gpc_widths = kv.get_ints("gpc.widths", c.gpc_widths);
  c.lambda_l = kv.get_f("gpc.lambda_l", c.lambda_l);
  c.mask_depth = static_cast<int>(kv.get_i("gpc.mask_depth", c.mask_depth));

  auto& p = c.probe;
  p.linear_epochs = static_cast<int>(kv.get_i("probe.linear_epochs", p.linear_epochs));
  p.decoder_epochs = static_cast<int>(kv.get_i("probe.decoder_epochs", p.decoder_epochs));
  p.decoder_hidden = static_cast<int>(kv.get_i("probe.decoder_hidden", p.decoder_hidden));
  p.batch = static_cast<int>(kv.get_i("probe.batch", p.batch));
  p.seed = static_cast<uint64_t>(kv.get_i("probe.seed", p.seed));

  return c;
}

}  // namespace mpc
