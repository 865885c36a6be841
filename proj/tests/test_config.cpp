#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "mpc/config.hpp"
#include "mpc/errors.hpp"

using namespace mpc;

TEST_CASE("key-value parsing with comments and whitespace") {
  auto kv = KeyValueConfig::parse_string(
      "# full-line comment\n"
      "run.model = mpc   # trailing comment\n"
      "  mpc.widths = 256, 256, 256\n"
      "\n"
      "glimpse.K=12\n");
  CHECK(kv.get("run.model", "") == "mpc");
  CHECK(kv.get_i("glimpse.K", 0) == 12);
  CHECK(kv.get_ints("mpc.widths", {}) == std::vector<int>{256, 256, 256});
  CHECK(kv.get("missing.key", "fallback") == "fallback");
  CHECK_FALSE(kv.has("missing.key"));
}

TEST_CASE("malformed lines and values are config errors") {
  CHECK_THROWS_AS(KeyValueConfig::parse_string("no equals sign here"), Error);
  CHECK_THROWS_AS(KeyValueConfig::parse_string("= value"), Error);
  auto kv = KeyValueConfig::parse_string("a = not_a_number\n");
  CHECK_THROWS_AS(kv.get_i("a", 0), Error);
  CHECK_THROWS_AS(kv.get_f("a", 0.0), Error);
  CHECK_THROWS_AS(kv.get_ints("a", {}), Error);
}

TEST_CASE("canonical form and hash are order independent") {
  auto a = KeyValueConfig::parse_string("x = 1\ny = 2\n");
  auto b = KeyValueConfig::parse_string("y = 2\nx = 1\n");
  CHECK(a.canonical() == b.canonical());
  CHECK(a.hash() == b.hash());
  auto c = KeyValueConfig::parse_string("x = 1\ny = 3\n");
  CHECK(a.hash() != c.hash());
}

TEST_CASE("experiment defaults follow the benchmark protocol") {
  auto cfg = ExperimentConfig::from_kv(KeyValueConfig::parse_string(""));
  CHECK(cfg.model == "mpc");
  CHECK(cfg.epochs == 5);
  CHECK(cfg.batch == 100);
  CHECK(cfg.glimpse.K == 10);
  CHECK(cfg.mpc_widths == std::vector<int>{256, 256, 256});
  CHECK(cfg.n_winners == 15);
  CHECK(cfg.topology == PatternId::st2);
  CHECK(cfg.dyn.steps() == 30);
  CHECK(cfg.gpc_widths == std::vector<int>{360, 360, 360});
  CHECK(cfg.val_count == 10000);
  CHECK(cfg.glimpse_driven());
}

TEST_CASE("experiment keys override defaults") {
  auto cfg = ExperimentConfig::from_kv(KeyValueConfig::parse_string(
      "run.model = gpc-nwta\n"
      "run.epochs = 1\n"
      "mpc.topology = st4\n"
      "mpc.n_winners = 12\n"
      "glimpse.K = 6\n"
      "mpc.T = 20\n"));
  CHECK(cfg.model == "gpc-nwta");
  CHECK(cfg.epochs == 1);
  CHECK(cfg.topology == PatternId::st4);
  CHECK(cfg.n_winners == 12);
  CHECK(cfg.glimpse.K == 6);
  CHECK(cfg.dyn.steps() == 20);
  CHECK_FALSE(cfg.glimpse_driven());
  CHECK(cfg.config_hash != 0);
}

TEST_CASE("inconsistent layer declarations are rejected") {
  CHECK_THROWS_AS(ExperimentConfig::from_kv(KeyValueConfig::parse_string(
                      "mpc.widths = 256, 256\nmpc.L = 3\n")),
                  Error);
  CHECK_THROWS_AS(ExperimentConfig::from_kv(KeyValueConfig::parse_string(
                      "run.batch = 0\n")),
                  Error);
  CHECK_THROWS_AS(ExperimentConfig::from_kv(KeyValueConfig::parse_string(
                      "mpc.T = 7\nmpc.dt = 2\n")),
                  Error);
}
