#include "banzkp/adversary.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace banzkp {
namespace {

constexpr uint8_t kAttackerHop = 0xFF;

Scenario attack_base(uint64_t seed, int modulus_bits, uint8_t target,
                     bool with_traffic) {
  Scenario s = Scenario::honest7(seed);
  s.modulus_bits = modulus_bits;
  s.traffic.clear();
  if (with_traffic) {
    Bytes data{'h', 'r', '=', '7', '2'};
    s.traffic.push_back({10.0, target, data});
  }
  return s;
}

uint64_t count_m5_sent_by(const Trace& trace, uint8_t node) {
  uint64_t n = 0;
  for (const auto& r : trace.records) {
    if (r.kind == TraceRecord::Kind::FrameSent && r.hop_from == node &&
        r.frame.src == node && !r.frame.bytes.empty() &&
        r.frame.bytes[0] == static_cast<uint8_t>(MsgTag::M5))
      ++n;
  }
  return n;
}

// Attacker that transmits crafted frames under a victim's id, without
// holding any key material.
class ForgeNodeHook : public AdversaryHook {
 public:
  ForgeNodeHook(uint8_t victim, uint64_t seed) : victim_(victim), rng_(seed) {}

  void on_run_begin(Simulator& sim) override {
    sim.schedule_adversary(10.0, 1);   // crafted M1
    sim.schedule_adversary(300.0, 2);  // crafted M3
    sim.schedule_adversary(600.0, 3);  // crafted M5
  }

  void on_wake(Simulator& sim, double now, uint64_t tag) override {
    const auto& p = sim.params();
    const size_t wb = p.modulus_bytes(), ib = p.interval_bytes();
    Message m{M1{}};
    if (tag == 1) m = M1{victim_, rng_.bytes(1 + wb + kCipherTagBytes)};
    if (tag == 2) m = M3{victim_, rng_.bytes(1 + ib + kCipherTagBytes)};
    if (tag == 3) m = M5{victim_, rng_.bytes(1 + 16 + kCipherTagBytes)};
    sim.inject_frame(now, 4, Frame{victim_, 0, encode(m)});
  }

 private:
  uint8_t victim_;
  Rng rng_;
};

// Attacker impersonating the sink on the victim's uplink.
class ForgeSinkHook : public AdversaryHook {
 public:
  ForgeSinkHook(uint8_t victim, uint64_t variant, uint64_t seed)
      : victim_(victim), variant_(variant), rng_(seed) {}

  void on_transmit(Simulator& sim, double now, uint8_t from, uint8_t to,
                   Frame& frame, bool& drop) override {
    const auto& p = sim.params();
    const size_t wb = p.modulus_bytes();
    if (variant_ == 0) {
      // Swallow the node's M1 and answer with a crafted M2.
      if (from == victim_ && !frame.bytes.empty() &&
          frame.bytes[0] == static_cast<uint8_t>(MsgTag::M1)) {
        drop = true;
        M2 m2;
        m2.ct_a = rng_.bytes(1 + wb + 2 + kCipherTagBytes);
        m2.ct_commit.ciphertext = rng_.bytes(wb + kCipherTagBytes);
        m2.ct_commit.width = p.modulus_bits;
        sim.inject_frame(now + 5.0, victim_, Frame{0, victim_, encode(m2)});
      }
    } else {
      // Let the handshake run, then substitute a random reveal key.
      if (to == victim_ && !frame.bytes.empty() &&
          frame.bytes[0] == static_cast<uint8_t>(MsgTag::M4)) {
        frame.bytes = encode(M4{rng_.bytes(p.kcs_bytes())});
      }
    }
  }

 private:
  uint8_t victim_;
  uint64_t variant_;
  Rng rng_;
};

// Records one full session off the sink's access link and replays it later.
class ReplayHook : public AdversaryHook {
 public:
  ReplayHook(uint8_t victim, uint64_t variant) : victim_(victim), variant_(variant) {}

  void on_run_begin(Simulator& sim) override {
    sim.schedule_adversary(5000.0, 1);
    sim.schedule_adversary(5600.0, 2);
  }

  void on_transmit(Simulator&, double, uint8_t from, uint8_t to, Frame& frame,
                   bool&) override {
    if (from == 4 && to == 0 && frame.src == victim_ && !frame.bytes.empty()) {
      if (frame.bytes[0] == static_cast<uint8_t>(MsgTag::M1)) m1_ = frame.bytes;
      if (frame.bytes[0] == static_cast<uint8_t>(MsgTag::M3)) m3_ = frame.bytes;
    }
  }

  void on_wake(Simulator& sim, double now, uint64_t tag) override {
    if (tag == 1 && variant_ == 0 && !m1_.empty())
      sim.inject_frame(now, 0, Frame{victim_, 0, m1_});
    if (tag == 2 && !m3_.empty())
      sim.inject_frame(now, 0, Frame{victim_, 0, m3_});
  }

 private:
  uint8_t victim_;
  uint64_t variant_;
  Bytes m1_, m3_;
};

// Replays a recorded M5 and sprays random M5 frames.
class InjectHook : public AdversaryHook {
 public:
  InjectHook(uint8_t victim, uint64_t seed) : victim_(victim), rng_(seed) {}

  void on_run_begin(Simulator& sim) override {
    sim.schedule_adversary(5000.0, 1);
    sim.schedule_adversary(5200.0, 2);
    sim.schedule_adversary(5400.0, 3);
  }

  void on_transmit(Simulator&, double, uint8_t from, uint8_t to, Frame& frame,
                   bool&) override {
    if (from == 4 && to == 0 && frame.src == victim_ && !frame.bytes.empty() &&
        frame.bytes[0] == static_cast<uint8_t>(MsgTag::M5))
      m5_ = frame.bytes;
  }

  void on_wake(Simulator& sim, double now, uint64_t tag) override {
    if (tag == 1 && !m5_.empty())
      sim.inject_frame(now, 0, Frame{victim_, 0, m5_});  // spliced replay
    if (tag == 2)
      sim.inject_frame(now, 0,
                       Frame{victim_, 0,
                             encode(M5{victim_, rng_.bytes(1 + 20 + kCipherTagBytes)})});
    if (tag == 3 && !m5_.empty()) {
      Bytes mutated = m5_;
      mutated[mutated.size() / 2] ^= 0x10;  // spliced + tampered
      sim.inject_frame(now, 0, Frame{victim_, 0, mutated});
    }
  }

 private:
  uint8_t victim_;
  Rng rng_;
  Bytes m5_;
};

// On-path attacker on the sink's access link; passes through or mutates
// one message class.
class MitmHook : public AdversaryHook {
 public:
  MitmHook(uint64_t variant, uint64_t seed) : variant_(variant), rng_(seed) {}

  void on_transmit(Simulator&, double, uint8_t from, uint8_t to, Frame& frame,
                   bool&) override {
    if (variant_ == 0) return;  // pass-through
    if (!((from == 4 && to == 0) || (from == 0 && to == 4))) return;
    if (frame.bytes.empty()) return;
    uint8_t target = variant_ == 1   ? static_cast<uint8_t>(MsgTag::M2)
                     : variant_ == 2 ? static_cast<uint8_t>(MsgTag::M3)
                                     : static_cast<uint8_t>(MsgTag::M4);
    if (frame.bytes[0] != target) return;
    // Flip one payload bit; headers start 3-4 bytes in, so aim at the
    // second half of the frame.
    size_t lo = frame.bytes.size() / 2;
    size_t bit = lo * 8 + rng_.below((frame.bytes.size() - lo) * 8);
    frame.bytes[bit / 8] ^= static_cast<uint8_t>(1 << (7 - bit % 8));
  }

 private:
  uint64_t variant_;
  Rng rng_;
};

Trace run_with(Scenario s, std::shared_ptr<AdversaryHook> hook) {
  Simulator sim(std::move(s), std::move(hook));
  return sim.run();
}

bool honest_control_ok(uint64_t seed, int modulus_bits, uint8_t target) {
  Trace t = run_with(attack_base(seed, modulus_bits, target, true), nullptr);
  return t.final_node_states.at(target) == NodeState::Authenticated &&
         t.deliveries.size() == 1;
}

}  // namespace

std::optional<AttackKind> parse_attack_kind(const std::string& name) {
  if (name == "forge_node" || name == "forge-node") return AttackKind::ForgeNode;
  if (name == "forge_sink" || name == "forge-sink") return AttackKind::ForgeSink;
  if (name == "replay") return AttackKind::Replay;
  if (name == "inject") return AttackKind::Inject;
  if (name == "mitm") return AttackKind::MitM;
  if (name == "guess") return AttackKind::Guess;
  if (name == "eavesdrop") return AttackKind::Eavesdrop;
  return std::nullopt;
}

const char* to_string(AttackKind k) {
  switch (k) {
    case AttackKind::ForgeNode: return "forge_node";
    case AttackKind::ForgeSink: return "forge_sink";
    case AttackKind::Replay: return "replay";
    case AttackKind::Inject: return "inject";
    case AttackKind::MitM: return "mitm";
    case AttackKind::Guess: return "guess";
    case AttackKind::Eavesdrop: return "eavesdrop";
  }
  return "?";
}

std::shared_ptr<AdversaryHook> make_adversary(const AdversaryConfig& config,
                                              uint64_t seed) {
  auto kind = parse_attack_kind(config.kind);
  if (!kind) return nullptr;
  uint64_t hook_seed = seed ^ 0xadf0c0de;
  switch (*kind) {
    case AttackKind::ForgeNode:
      return std::make_shared<ForgeNodeHook>(config.target_node, hook_seed);
    case AttackKind::ForgeSink:
      return std::make_shared<ForgeSinkHook>(config.target_node, config.variant,
                                             hook_seed);
    case AttackKind::Replay:
      return std::make_shared<ReplayHook>(config.target_node, config.variant);
    case AttackKind::Inject:
      return std::make_shared<InjectHook>(config.target_node, hook_seed);
    case AttackKind::MitM:
      return std::make_shared<MitmHook>(config.variant, hook_seed);
    default:
      return nullptr;  // guess/eavesdrop are passive trace analyses
  }
}

Verdict forge_node(uint64_t seed, int modulus_bits) {
  const uint8_t victim = 5;
  Scenario s = attack_base(seed, modulus_bits, victim, false);
  s.adversary = {"forge_node", victim, 4, 0, 0};
  Trace t = run_with(s, std::make_shared<ForgeNodeHook>(victim, seed ^ 0xadf0c0de));
  Verdict v{AttackKind::ForgeNode, false, 1, 0, ""};
  bool delivered = !t.deliveries.empty();
  bool sink_auth = t.final_sink_states.at(victim) == SinkState::Authenticated;
  v.false_accepts = (delivered || sink_auth) ? 1 : 0;
  v.pass = v.false_accepts == 0;
  v.detail = "sink=" + std::string(to_string(t.final_sink_states.at(victim))) +
             " deliveries=" + std::to_string(t.deliveries.size());
  return v;
}

Verdict forge_sink(uint64_t seed, int modulus_bits, uint64_t variant) {
  const uint8_t victim = 5;
  Verdict v{AttackKind::ForgeSink, false, 1, 0, ""};
  if (!honest_control_ok(seed, modulus_bits, victim)) {
    v.detail = "control run failed";
    v.false_accepts = 1;
    return v;
  }
  Scenario s = attack_base(seed, modulus_bits, victim, true);
  s.adversary = {"forge_sink", victim, 5, 4, variant};
  Trace t = run_with(
      s, std::make_shared<ForgeSinkHook>(victim, variant, seed ^ 0xadf0c0de));
  bool aborted = t.final_node_states.at(victim) == NodeState::Aborted;
  uint64_t m5 = count_m5_sent_by(t, victim);
  v.false_accepts = (!aborted || m5 > 0) ? 1 : 0;
  v.pass = v.false_accepts == 0;
  v.detail = "node=" + std::string(to_string(t.final_node_states.at(victim))) +
             " m5_sent=" + std::to_string(m5);
  return v;
}

Verdict replay(uint64_t seed, int modulus_bits, uint64_t variant) {
  const uint8_t victim = 5;
  Scenario s = attack_base(seed, modulus_bits, victim, true);
  s.adversary = {"replay", victim, 4, 0, variant};
  Trace t = run_with(s, std::make_shared<ReplayHook>(victim, variant));
  Verdict v{AttackKind::Replay, false, 1, 0, ""};
  bool phase1_ok = t.deliveries.size() == 1 &&
                   t.final_node_states.at(victim) == NodeState::Authenticated;
  bool rejected = t.final_sink_states.at(victim) == SinkState::Rejected;
  bool extra_delivery = t.deliveries.size() > 1;
  v.false_accepts = (extra_delivery || !rejected) ? 1 : 0;
  if (!phase1_ok) v.false_accepts = 1;  // control session must succeed
  v.pass = v.false_accepts == 0;
  v.detail = "sink=" + std::string(to_string(t.final_sink_states.at(victim))) +
             " deliveries=" + std::to_string(t.deliveries.size());
  return v;
}

Verdict inject(uint64_t seed, int modulus_bits, uint64_t variant) {
  (void)variant;
  const uint8_t victim = 5;
  Scenario s = attack_base(seed, modulus_bits, victim, true);
  s.adversary = {"inject", victim, 4, 0, 0};
  Trace t = run_with(s, std::make_shared<InjectHook>(victim, seed ^ 0xadf0c0de));
  Verdict v{AttackKind::Inject, false, 1, 0, ""};
  // Exactly the one honest DATA delivery; nothing injected sticks.
  v.false_accepts = t.deliveries.size() > 1 ? t.deliveries.size() - 1 : 0;
  if (t.deliveries.size() != 1) v.false_accepts = std::max<uint64_t>(v.false_accepts, 1);
  v.pass = t.deliveries.size() == 1;
  v.detail = "deliveries=" + std::to_string(t.deliveries.size());
  return v;
}

Verdict mitm(uint64_t seed, int modulus_bits, uint64_t variant) {
  const uint8_t victim = 5;
  Scenario s = attack_base(seed, modulus_bits, victim, true);
  s.adversary = {"mitm", victim, 4, 0, variant};
  Trace t = run_with(s, std::make_shared<MitmHook>(variant, seed ^ 0xadf0c0de));
  Verdict v{AttackKind::MitM, false, 1, 0, ""};
  if (variant == 0) {
    v.pass = t.final_node_states.at(victim) == NodeState::Authenticated &&
             t.deliveries.size() == 1;
  } else {
    v.pass = t.final_node_states.at(victim) == NodeState::Aborted &&
             t.deliveries.empty();
  }
  v.false_accepts = v.pass ? 0 : 1;
  v.detail = "variant=" + std::to_string(variant) +
             " node=" + std::string(to_string(t.final_node_states.at(victim))) +
             " deliveries=" + std::to_string(t.deliveries.size());
  return v;
}

Verdict guess(uint64_t seed, uint64_t sessions, int modulus_bits) {
  Verdict v{AttackKind::Guess, false, sessions, 0, ""};
  uint64_t substring_hits = 0;
  std::set<std::string> kcs_seen;
  std::set<std::string> pqri_seen;
  std::map<uint8_t, std::set<std::string>> tuples_per_node;
  uint64_t tuples = 0;
  bool fresh = true;

  for (uint64_t i = 0; i < sessions; ++i) {
    Scenario s = Scenario::honest7(seed + i);
    s.modulus_bits = modulus_bits;
    Trace t = run_with(std::move(s), nullptr);

    std::vector<Bytes> secrets;
    for (const auto& [id, k] : t.node_keys) secrets.push_back(k);
    for (const auto& [id, sec] : t.node_secrets) secrets.push_back(sec);
    for (const auto& tup : t.sessions) {
      if (!tup.p.empty()) secrets.push_back(tup.p);
      if (!tup.q.empty()) secrets.push_back(tup.q);
    }
    for (const auto& r : t.records) {
      if (r.kind != TraceRecord::Kind::FrameSent) continue;
      for (const auto& sec : secrets)
        if (contains(r.frame.bytes, sec)) ++substring_hits;
    }
    for (const auto& tup : t.sessions) {
      if (tup.p.empty() || tup.q.empty()) continue;
      ++tuples;
      std::string pq = to_hex(tup.p) + "|" + to_hex(tup.q) + "|" +
                       std::to_string(tup.ri);
      std::string full = pq + "|" + to_hex(tup.kcs);
      if (!kcs_seen.insert(to_hex(tup.kcs)).second) fresh = false;
      if (!pqri_seen.insert(pq).second) fresh = false;
      if (!tuples_per_node[tup.node].insert(full).second) fresh = false;
    }
  }
  v.false_accepts = substring_hits + (fresh ? 0 : 1);
  v.pass = substring_hits == 0 && fresh;
  v.detail = "substring_hits=" + std::to_string(substring_hits) +
             " tuples=" + std::to_string(tuples) +
             " fresh=" + (fresh ? std::string("yes") : std::string("no"));
  return v;
}

Verdict run_attack(AttackKind kind, uint64_t seed, uint64_t trials,
                   int modulus_bits) {
  if (kind == AttackKind::Guess || kind == AttackKind::Eavesdrop) {
    Verdict v = guess(seed, trials, modulus_bits);
    v.kind = kind;
    return v;
  }
  Verdict total{kind, true, trials, 0, ""};
  for (uint64_t i = 0; i < trials; ++i) {
    Verdict v;
    switch (kind) {
      case AttackKind::ForgeNode: v = forge_node(seed + i, modulus_bits); break;
      case AttackKind::ForgeSink: v = forge_sink(seed + i, modulus_bits, i % 2); break;
      case AttackKind::Replay: v = replay(seed + i, modulus_bits, 0); break;
      case AttackKind::Inject: v = inject(seed + i, modulus_bits, 0); break;
      case AttackKind::MitM: v = mitm(seed + i, modulus_bits, i % 4); break;
      default: v = Verdict{kind, false, 1, 1, "unsupported"}; break;
    }
    total.false_accepts += v.false_accepts;
    if (!v.pass) {
      total.pass = false;
      if (total.detail.empty()) total.detail = "trial " + std::to_string(i) + ": " + v.detail;
    }
  }
  return total;
}

}  // namespace banzkp
