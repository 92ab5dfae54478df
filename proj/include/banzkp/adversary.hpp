#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "banzkp/netsim.hpp"

namespace banzkp {

enum class AttackKind {
  ForgeNode,
  ForgeSink,
  Replay,
  Inject,
  MitM,
  Guess,
  Eavesdrop,
};

std::optional<AttackKind> parse_attack_kind(const std::string& name);
const char* to_string(AttackKind k);

struct Verdict {
  AttackKind kind{};
  bool pass = false;
  uint64_t trials = 0;
  uint64_t false_accepts = 0;  // attacker successes observed
  std::string detail;
};

/// Runs `trials` seeded scenarios of the given attack class and grades
/// the final traces. All verdicts are pure functions of the traces.
Verdict run_attack(AttackKind kind, uint64_t seed, uint64_t trials,
                   int modulus_bits = 1096);

/// Hook factory used by Simulator when a Scenario names an adversary.
std::shared_ptr<AdversaryHook> make_adversary(const AdversaryConfig& config,
                                              uint64_t seed);

// Single-scenario verdict helpers, exposed for tests.
Verdict forge_node(uint64_t seed, int modulus_bits);
Verdict forge_sink(uint64_t seed, int modulus_bits, uint64_t variant);
Verdict replay(uint64_t seed, int modulus_bits, uint64_t variant);
Verdict inject(uint64_t seed, int modulus_bits, uint64_t variant);
Verdict mitm(uint64_t seed, int modulus_bits, uint64_t variant);
/// Transcript accumulation over `sessions` seeded runs: syntactic secrecy
/// scan plus (p, q, RI, K_CS) freshness distinctness.
Verdict guess(uint64_t seed, uint64_t sessions, int modulus_bits);

}  // namespace banzkp
