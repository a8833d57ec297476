#include <doctest.h>

#include "specproj/config.hpp"

using namespace specproj;

TEST_CASE("minimal config fills documented defaults") {
  const RunConfig c = parse_config(R"({"command": "verify-clt"})");
  CHECK(c.command == "verify-clt");
  CHECK(c.R == 2000);
  CHECK(c.nodes == 64);
  CHECK(c.cluster_tol == doctest::Approx(1e-8));
  CHECK(c.mode == "projector");
  CHECK(c.model.kind == "spiked");
  CHECK(c.seed == 1);
  REQUIRE(c.directions.size() == 1);
  CHECK(c.directions[0].u == "theta");
  CHECK(c.directions[0].v == "noise");
}

TEST_CASE("unknown keys are rejected by name") {
  CHECK_THROWS_WITH_AS(parse_config(R"({"command": "verify-clt", "sigma2": 1})"),
                       doctest::Contains("sigma2"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(
      parse_config(R"({"command": "verify-clt", "model": {"kind": "spiked", "bogus": 3}})"),
      doctest::Contains("model.bogus"), std::invalid_argument);
}

TEST_CASE("type mismatches and missing fields name the offender") {
  CHECK_THROWS_WITH_AS(parse_config(R"({"command": "verify-clt", "n": "many"})"),
                       doctest::Contains("'n'"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(parse_config(R"({"n": 100})"), doctest::Contains("command"),
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(parse_config(R"({"command": "estimate"})"),
                       doctest::Contains("data"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(parse_config(R"({"command": "fly"})"), doctest::Contains("command"),
                       std::invalid_argument);
  CHECK_THROWS_AS(parse_config("not json at all"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(parse_config(R"({"command": "verify-clt", "n": 0})"),
                       doctest::Contains("'n'"), std::invalid_argument);
}

TEST_CASE("emit then parse is the identity") {
  const RunConfig a = parse_config(R"({
    "command": "recover",
    "seed": 42,
    "t": 2.5,
    "model": {"kind": "sparse-spiked", "p": 120, "k": 4, "spikes": [2.0], "sigma": 1.0},
    "sweep_n": [500, 1000],
    "directions": [{"u": "e3", "v": "file:dirs.csv"}]
  })");
  const nlohmann::json emitted = emit_config(a);
  const RunConfig b = parse_config_json(emitted);
  CHECK(emit_config(b).dump() == emitted.dump());
  CHECK(b.model.p == 120);
  CHECK(b.t == doctest::Approx(2.5));
  CHECK(b.directions[0].v == "file:dirs.csv");
}

TEST_CASE("command-specific defaults") {
  const RunConfig norm = parse_config(R"({"command": "verify-norm"})");
  CHECK(norm.model.kind == "identity");
  CHECK(norm.p_grid == std::vector<int>{10, 20, 50, 100});

  const RunConfig rec = parse_config(R"({"command": "recover"})");
  CHECK(rec.model.kind == "sparse-spiked");
  CHECK(rec.model.p == 200);
  CHECK(rec.model.k == 5);

  const RunConfig bias = parse_config(R"({"command": "verify-bias"})");
  CHECK(bias.mode == "decomposition");
  CHECK_THROWS_AS(parse_config(R"({"command": "verify-bias", "mode": "banana"})"),
                  std::invalid_argument);
}
