#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "banzkp/crypto.hpp"
#include "banzkp/message.hpp"
#include "banzkp/params.hpp"
#include "banzkp/rng.hpp"

namespace banzkp {

struct NodeIdentity {
  uint8_t id = 0;  // 0 is the sink
  SessionKey session_key;
  SharedSecret secret;
};

enum class NodeState { Idle, SentM1, SentM3, Authenticated, Aborted };
enum class SinkState { Idle, SentM2, Authenticated, Rejected };

const char* to_string(NodeState s);
const char* to_string(SinkState s);

struct StepResult {
  std::vector<Message> out;
  uint64_t modmuls = 0;
  bool arm_retry_timer = false;           // node side only
  std::optional<Bytes> delivered;         // sink side: DATA from a valid M5
  std::vector<std::string> audit;         // drops, failures, resets
};

inline constexpr int kMaxRetries = 3;

/// Sensor-node half of the handshake. Pure step function over events;
/// the host owns timers and message transport.
class NodeFsm {
 public:
  NodeFsm(NodeIdentity identity, const ProtocolParams& params)
      : id_(std::move(identity)), params_(params) {}

  /// Begin a session carrying `data`. Resets any in-flight session.
  StepResult start(const Bytes& data, Rng& rng);
  StepResult on_message(const Message& m);
  StepResult on_timeout();

  NodeState state() const { return state_; }
  const BigInt& session_p() const { return p_; }
  uint8_t id() const { return id_.id; }
  int retries() const { return retries_; }

 private:
  StepResult abort(std::string reason);

  NodeIdentity id_;
  ProtocolParams params_;
  NodeState state_ = NodeState::Idle;

  BigInt p_ = 0;
  BigInt v_p_ = 0;                    // V^p
  BigInt v_q_ = 0;                    // V^q as received
  BigInt v_qp_ = 0;                   // (V^q)^p
  int ri_ = 0;
  CommitmentEnvelope commitment_;     // stored unopened until M4
  Bytes own_interval_;
  Bytes pending_data_;
  Bytes last_sent_;                   // frame to re-send on timeout
  Message last_msg_{M1{}};
  int retries_ = 0;
};

/// Per-node session values, exposed for trace freshness accounting.
struct SinkSessionInfo {
  BigInt q;
  int ri = 0;
  Bytes kcs;
};

/// Sink half: one session slot per registered node.
class SinkFsm {
 public:
  explicit SinkFsm(const ProtocolParams& params) : params_(params) {}

  void register_node(uint8_t id, SessionKey key, SharedSecret secret);
  bool is_registered(uint8_t id) const { return registry_.count(id) > 0; }

  /// `sender_id` comes from the frame header (M1/M3/M5 carry one).
  StepResult on_message(uint8_t sender_id, const Message& m, Rng& rng);

  SinkState session_state(uint8_t id) const;
  std::optional<SinkSessionInfo> session_info(uint8_t id) const;

 private:
  struct Registered {
    SessionKey key;
    SharedSecret secret;
  };
  struct Session {
    SinkState state = SinkState::Idle;
    BigInt q = 0;
    int ri = 0;
    CommitKey kcs;
    BigInt v_q = 0;
    Bytes expected_interval;  // fixed at M2 time, never recomputed
    uint16_t data_seq = 0;
  };

  StepResult handle_m1(uint8_t sender_id, const M1& m, Rng& rng);
  StepResult handle_m3(uint8_t sender_id, const M3& m);
  StepResult handle_m5(uint8_t sender_id, const M5& m);

  ProtocolParams params_;
  std::map<uint8_t, Registered> registry_;
  std::map<uint8_t, Session> sessions_;
};

// Cipher-context builders shared by both sides.
CipherContext ctx_m1(uint8_t node_id);
CipherContext ctx_m2(uint8_t node_id, const BigInt& v_p);
CipherContext ctx_commit(uint8_t node_id);
CipherContext ctx_m3(uint8_t node_id, int ri, const BigInt& v_q);
CipherContext ctx_m5(uint8_t node_id, int ri, const BigInt& v_q, uint16_t seq);

}  // namespace banzkp
