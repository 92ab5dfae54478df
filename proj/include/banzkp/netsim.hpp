#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

#include "banzkp/costmodel.hpp"
#include "banzkp/fsm.hpp"
#include "banzkp/message.hpp"
#include "banzkp/params.hpp"
#include "banzkp/rng.hpp"

namespace banzkp {

struct NodeSpec {
  uint8_t id = 0;
  std::string label;
};

struct LinkSpec {
  uint8_t a = 0;
  uint8_t b = 0;
  double delay_ms = 5.0;
  double loss = 0.0;
};

struct Topology {
  std::vector<NodeSpec> nodes;
  std::vector<LinkSpec> links;

  bool has_node(uint8_t id) const;
  const LinkSpec* find_link(uint8_t a, uint8_t b) const;
  std::vector<uint8_t> neighbors(uint8_t id) const;  // ascending id
};

/// The paper's 7-node body layout: sink on the chest, ankles two hops
/// away through the waist.
Topology honest7_topology();

struct RouteError : std::runtime_error {
  explicit RouteError(std::vector<uint8_t> ids);
  std::vector<uint8_t> unreachable;
};

struct RoutingTable {
  // parent[id] toward the sink; hop_count[id] from the sink.
  std::map<uint8_t, uint8_t> parent;
  std::map<uint8_t, int> hop_count;

  /// Next hop from `at` toward `dst` over the tree (dst may be 0).
  uint8_t next_hop(uint8_t at, uint8_t dst) const;
  /// Tree path from `from` to `to`, endpoints included.
  std::vector<uint8_t> path(uint8_t from, uint8_t to) const;
};

/// Breadth-first flood from node 0; every node adopts the first-heard
/// minimum-hop parent. Throws RouteError listing unreachable ids.
RoutingTable build_routes(const Topology& topology);

struct TrafficItem {
  double time_ms = 0.0;
  uint8_t node = 0;
  Bytes data;
};

struct AdversaryConfig {
  std::string kind;        // empty: no adversary
  uint8_t target_node = 5;
  uint8_t tap_a = 4;       // tapped link endpoints
  uint8_t tap_b = 0;
  uint64_t variant = 0;    // per-kind sub-behavior selector
};

struct Scenario {
  std::string name = "honest7";
  Topology topology;
  uint64_t seed = 0;
  int modulus_bits = 1096;
  std::vector<TrafficItem> traffic;
  AdversaryConfig adversary;
  double horizon_ms = 120000.0;
  double retry_timeout_ms = 200.0;

  static Scenario honest7(uint64_t seed);
};

Scenario load_scenario(const std::string& path);
std::string scenario_to_json(const Scenario& s);

/// A simulator-level frame: addressing envelope around an encoded Message.
struct Frame {
  uint8_t src = 0;
  uint8_t dst = 0;
  Bytes bytes;
};

struct TraceRecord {
  enum class Kind {
    FrameSent,       // one link transmission attempt
    FrameDelivered,  // arrived at a hop
    FrameDropped,    // loss, adversary, no-route, decode failure
    NodeTransition,
    SinkTransition,
    DataDelivered,
    Audit,
  };
  double time_ms = 0.0;
  Kind kind{};
  uint8_t hop_from = 0;
  uint8_t hop_to = 0;
  Frame frame;
  std::string detail;
};

/// Per-session values for freshness accounting (simulator-side
/// observability, not attacker knowledge).
struct SessionTuple {
  uint8_t node = 0;
  Bytes p;    // node exponent, fixed-width
  Bytes q;    // sink exponent
  int ri = -1;
  Bytes kcs;
};

struct Trace {
  std::vector<TraceRecord> records;
  std::map<uint8_t, NodeState> final_node_states;
  std::map<uint8_t, SinkState> final_sink_states;
  std::vector<std::pair<uint8_t, Bytes>> deliveries;  // (node, DATA)
  std::vector<SessionTuple> sessions;
  // Registered secret material, for the syntactic secrecy scan.
  std::map<uint8_t, Bytes> node_keys;
  std::map<uint8_t, Bytes> node_secrets;
  CostLedger ledger;
  uint64_t frames_sent = 0;
  uint64_t frames_delivered = 0;
  uint64_t frames_dropped = 0;

  std::string serialize() const;  // line-delimited records + summary block
  uint64_t hash() const;          // FNV-1a over serialize()
};

class Simulator;

/// Attacker surface: sees and may alter frames in transit on its tapped
/// link, and may transmit frames of its own. Never sees FSM internals.
class AdversaryHook {
 public:
  virtual ~AdversaryHook() = default;
  /// Called for every link transmission. Set drop, or mutate frame.
  virtual void on_transmit(Simulator& sim, double now, uint8_t from,
                           uint8_t to, Frame& frame, bool& drop) {
    (void)sim; (void)now; (void)from; (void)to; (void)frame; (void)drop;
  }
  /// Scheduled wake-up requested via Simulator::schedule_adversary().
  virtual void on_wake(Simulator& sim, double now, uint64_t tag) {
    (void)sim; (void)now; (void)tag;
  }
  virtual void on_run_begin(Simulator& sim) { (void)sim; }
};

class Simulator {
 public:
  explicit Simulator(Scenario scenario,
                     std::shared_ptr<AdversaryHook> adversary = nullptr);

  Trace run();

  // Adversary API.
  void schedule_adversary(double time_ms, uint64_t tag);
  /// Transmit `frame` into `at_node` as if from a radio neighbor.
  void inject_frame(double time_ms, uint8_t at_node, Frame frame);

  const ProtocolParams& params() const { return params_; }
  const RoutingTable& routes() const { return routing_; }
  double now() const { return now_; }

 private:
  struct Event {
    double time = 0.0;
    uint64_t seq = 0;
    enum class Kind { Deliver, AppStart, TimerFire, AdversaryWake, Inject } kind{};
    uint8_t at_node = 0;
    uint8_t from_node = 0;
    Frame frame;
    Bytes data;
    uint32_t timer_epoch = 0;
    uint64_t adv_tag = 0;
  };
  struct EventOrder {
    bool operator()(const Event& a, const Event& b) const {
      return a.time > b.time || (a.time == b.time && a.seq > b.seq);
    }
  };

  void schedule(Event ev);
  void transmit(uint8_t from, uint8_t to, const Frame& frame);
  void send_from_endpoint(uint8_t endpoint, const Frame& frame);
  void handle_deliver(const Event& ev);
  void endpoint_receive(uint8_t at, const Frame& frame);
  void emit_node_output(uint8_t node, StepResult&& res);
  void emit_sink_output(uint8_t node, StepResult&& res);
  void record_transition(uint8_t node, const std::string& role,
                         const std::string& from, const std::string& to);
  void record(TraceRecord rec);

  Scenario scenario_;
  ProtocolParams params_;
  RoutingTable routing_;
  std::shared_ptr<AdversaryHook> adversary_;
  Rng channel_rng_;
  Rng proto_rng_;
  std::priority_queue<Event, std::vector<Event>, EventOrder> queue_;
  uint64_t next_seq_ = 0;
  double now_ = 0.0;

  std::map<uint8_t, NodeFsm> nodes_;
  std::map<uint8_t, std::string> node_state_names_;
  std::map<uint8_t, uint32_t> timer_epochs_;
  std::map<uint8_t, int> timer_backoff_;
  std::unique_ptr<SinkFsm> sink_;
  std::map<uint8_t, std::string> sink_state_names_;
  std::map<uint8_t, size_t> open_session_tuple_;  // node -> index in sessions

  Trace trace_;
};

}  // namespace banzkp
