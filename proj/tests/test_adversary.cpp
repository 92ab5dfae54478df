#include <doctest.h>

#include "banzkp/adversary.hpp"

using namespace banzkp;

TEST_CASE("forge node: crafted frames never authenticate or deliver") {
  Verdict v = run_attack(AttackKind::ForgeNode, 100, 10);
  CHECK(v.pass);
  CHECK(v.false_accepts == 0);
}

TEST_CASE("forge sink: node aborts against crafted M2 and crafted M4") {
  CHECK(forge_sink(7, 1096, 0).pass);  // crafted M2
  CHECK(forge_sink(7, 1096, 1).pass);  // crafted M4 reveal key
}

TEST_CASE("replay: recorded session is rejected, control succeeds") {
  for (uint64_t seed : {1ull, 2ull, 3ull, 4ull, 5ull}) {
    Verdict v = replay(seed, 1096, 0);
    CHECK(v.pass);
    CHECK(v.detail.find("Rejected") != std::string::npos);
  }
}

TEST_CASE("inject: spliced, tampered and random M5 frames never deliver") {
  Verdict v = run_attack(AttackKind::Inject, 50, 10);
  CHECK(v.pass);
  CHECK(v.false_accepts == 0);
}

TEST_CASE("mitm: pass-through succeeds, any mutation kills the handshake") {
  CHECK(mitm(11, 1096, 0).pass);  // control
  CHECK(mitm(11, 1096, 1).pass);  // M2 mutation
  CHECK(mitm(11, 1096, 2).pass);  // M3 mutation
  CHECK(mitm(11, 1096, 3).pass);  // M4 mutation
}

TEST_CASE("guess: no secret substrings, full session freshness") {
  Verdict v = guess(21, 10, 1096);
  CHECK(v.pass);
  CHECK(v.detail.find("substring_hits=0") != std::string::npos);
  CHECK(v.detail.find("fresh=yes") != std::string::npos);
}

TEST_CASE("verdicts are reproducible offline") {
  Verdict a = replay(42, 1096, 0);
  Verdict b = replay(42, 1096, 0);
  CHECK(a.pass == b.pass);
  CHECK(a.detail == b.detail);
}

TEST_CASE("attack kind parsing") {
  CHECK(parse_attack_kind("replay") == AttackKind::Replay);
  CHECK(parse_attack_kind("forge-node") == AttackKind::ForgeNode);
  CHECK_FALSE(parse_attack_kind("dos").has_value());
}
