#include "banzkp/netsim.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace banzkp {
namespace {

uint64_t mix_seed(uint64_t seed, uint64_t stream) {
  uint64_t x = seed + 0x9e3779b97f4a7c15ull * (stream + 1);
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ull;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebull;
  x ^= x >> 31;
  return x;
}

std::string fmt_time(double t) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", t);
  return buf;
}

const char* kind_name(TraceRecord::Kind k) {
  switch (k) {
    case TraceRecord::Kind::FrameSent: return "frame_sent";
    case TraceRecord::Kind::FrameDelivered: return "frame_delivered";
    case TraceRecord::Kind::FrameDropped: return "frame_dropped";
    case TraceRecord::Kind::NodeTransition: return "node_transition";
    case TraceRecord::Kind::SinkTransition: return "sink_transition";
    case TraceRecord::Kind::DataDelivered: return "data_delivered";
    case TraceRecord::Kind::Audit: return "audit";
  }
  return "?";
}

}  // namespace

// ---------------------------------------------------------------------------
// Topology and routing

bool Topology::has_node(uint8_t id) const {
  return std::any_of(nodes.begin(), nodes.end(),
                     [id](const NodeSpec& n) { return n.id == id; });
}

const LinkSpec* Topology::find_link(uint8_t a, uint8_t b) const {
  for (const auto& l : links) {
    if ((l.a == a && l.b == b) || (l.a == b && l.b == a)) return &l;
  }
  return nullptr;
}

std::vector<uint8_t> Topology::neighbors(uint8_t id) const {
  std::vector<uint8_t> out;
  for (const auto& l : links) {
    if (l.a == id) out.push_back(l.b);
    if (l.b == id) out.push_back(l.a);
  }
  std::sort(out.begin(), out.end());
  return out;
}

Topology honest7_topology() {
  Topology t;
  t.nodes = {{0, "chest"},      {1, "head"},       {2, "left_wrist"},
             {3, "right_wrist"}, {4, "waist"},      {5, "left_ankle"},
             {6, "right_ankle"}};
  t.links = {{0, 1}, {0, 2}, {0, 3}, {0, 4}, {4, 5}, {4, 6}};
  return t;
}

RouteError::RouteError(std::vector<uint8_t> ids)
    : std::runtime_error([&ids] {
        std::string msg = "unreachable nodes:";
        for (uint8_t id : ids) msg += " " + std::to_string(id);
        return msg;
      }()),
      unreachable(std::move(ids)) {}

RoutingTable build_routes(const Topology& topology) {
  RoutingTable rt;
  if (!topology.has_node(0)) throw std::invalid_argument("no sink in topology");
  rt.hop_count[0] = 0;
  std::deque<uint8_t> frontier{0};
  while (!frontier.empty()) {
    uint8_t at = frontier.front();
    frontier.pop_front();
    for (uint8_t nb : topology.neighbors(at)) {
      if (rt.hop_count.count(nb)) continue;  // first heard wins
      rt.parent[nb] = at;
      rt.hop_count[nb] = rt.hop_count[at] + 1;
      frontier.push_back(nb);
    }
  }
  std::vector<uint8_t> unreachable;
  for (const auto& n : topology.nodes) {
    if (!rt.hop_count.count(n.id)) unreachable.push_back(n.id);
  }
  if (!unreachable.empty()) throw RouteError(std::move(unreachable));
  return rt;
}

std::vector<uint8_t> RoutingTable::path(uint8_t from, uint8_t to) const {
  auto chain_to_root = [this](uint8_t id) {
    std::vector<uint8_t> chain{id};
    while (id != 0) {
      id = parent.at(id);
      chain.push_back(id);
    }
    return chain;
  };
  std::vector<uint8_t> up = chain_to_root(from);
  std::vector<uint8_t> down = chain_to_root(to);
  std::set<uint8_t> up_set(up.begin(), up.end());
  // Lowest common ancestor: first node of `down` also on `up`.
  size_t meet = 0;
  while (!up_set.count(down[meet])) ++meet;
  std::vector<uint8_t> result;
  for (uint8_t id : up) {
    result.push_back(id);
    if (id == down[meet]) break;
  }
  for (size_t i = meet; i-- > 0;) result.push_back(down[i]);
  return result;
}

uint8_t RoutingTable::next_hop(uint8_t at, uint8_t dst) const {
  if (at == dst) throw std::invalid_argument("next_hop: already at destination");
  if (!hop_count.count(at) || !hop_count.count(dst))
    throw RouteError({hop_count.count(at) ? dst : at});
  return path(at, dst)[1];
}

// ---------------------------------------------------------------------------
// Scenario

Scenario Scenario::honest7(uint64_t seed) {
  Scenario s;
  s.name = "honest7";
  s.topology = honest7_topology();
  s.seed = seed;
  for (uint8_t n = 1; n <= 6; ++n) {
    std::string data = "hr=72;spo2=98;node=" + std::to_string(n);
    s.traffic.push_back({10.0 * n, n, Bytes(data.begin(), data.end())});
  }
  return s;
}

std::string scenario_to_json(const Scenario& s) {
  nlohmann::json j;
  j["name"] = s.name;
  j["seed"] = s.seed;
  j["modulus_bits"] = s.modulus_bits;
  j["horizon_ms"] = s.horizon_ms;
  j["retry_timeout_ms"] = s.retry_timeout_ms;
  for (const auto& n : s.topology.nodes)
    j["topology"]["nodes"].push_back({{"id", n.id}, {"label", n.label}});
  for (const auto& l : s.topology.links)
    j["topology"]["links"].push_back(
        {{"a", l.a}, {"b", l.b}, {"delay_ms", l.delay_ms}, {"loss", l.loss}});
  for (const auto& t : s.traffic)
    j["traffic"].push_back({{"time_ms", t.time_ms},
                            {"node", t.node},
                            {"data", std::string(t.data.begin(), t.data.end())}});
  if (!s.adversary.kind.empty()) {
    j["adversary"] = {{"kind", s.adversary.kind},
                      {"target_node", s.adversary.target_node},
                      {"tap_a", s.adversary.tap_a},
                      {"tap_b", s.adversary.tap_b},
                      {"variant", s.adversary.variant}};
  }
  return j.dump(2);
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open scenario file");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
  Scenario s;
  s.topology.nodes.clear();
  try {
    s.name = j.value("name", "scenario");
    s.seed = j.value("seed", 0ull);
    s.modulus_bits = j.value("modulus_bits", 1096);
    s.horizon_ms = j.value("horizon_ms", 120000.0);
    s.retry_timeout_ms = j.value("retry_timeout_ms", 200.0);
    for (const auto& n : j.at("topology").at("nodes"))
      s.topology.nodes.push_back({n.at("id").get<uint8_t>(), n.value("label", "")});
    for (const auto& l : j.at("topology").at("links"))
      s.topology.links.push_back({l.at("a").get<uint8_t>(), l.at("b").get<uint8_t>(),
                                  l.value("delay_ms", 5.0), l.value("loss", 0.0)});
    for (const auto& t : j.value("traffic", nlohmann::json::array())) {
      std::string data = t.value("data", "");
      s.traffic.push_back({t.at("time_ms").get<double>(), t.at("node").get<uint8_t>(),
                           Bytes(data.begin(), data.end())});
    }
    if (j.contains("adversary")) {
      const auto& a = j.at("adversary");
      s.adversary.kind = a.value("kind", "");
      s.adversary.target_node = a.value("target_node", 5);
      s.adversary.tap_a = a.value("tap_a", 4);
      s.adversary.tap_b = a.value("tap_b", 0);
      s.adversary.variant = a.value("variant", 0ull);
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
  for (const auto& t : s.traffic) {
    if (!s.topology.has_node(t.node))
      throw std::runtime_error(path + ": traffic references unknown node " +
                               std::to_string(t.node));
  }
  return s;
}

// ---------------------------------------------------------------------------
// Trace

std::string Trace::serialize() const {
  std::ostringstream out;
  for (const auto& r : records) {
    out << "t=" << fmt_time(r.time_ms) << " kind=" << kind_name(r.kind);
    switch (r.kind) {
      case TraceRecord::Kind::FrameSent:
      case TraceRecord::Kind::FrameDelivered:
      case TraceRecord::Kind::FrameDropped:
        out << " hop=" << int(r.hop_from) << ">" << int(r.hop_to)
            << " src=" << int(r.frame.src) << " dst=" << int(r.frame.dst)
            << " len=" << r.frame.bytes.size() << " bytes=" << to_hex(r.frame.bytes);
        break;
      default:
        break;
    }
    if (!r.detail.empty()) out << " detail=\"" << r.detail << "\"";
    out << "\n";
  }
  out << "--- summary ---\n";
  out << "frames sent=" << frames_sent << " delivered=" << frames_delivered
      << " dropped=" << frames_dropped << "\n";
  for (const auto& [id, st] : final_node_states)
    out << "node " << int(id) << " state=" << to_string(st) << "\n";
  for (const auto& [id, st] : final_sink_states)
    out << "sink session " << int(id) << " state=" << to_string(st) << "\n";
  for (const auto& [id, data] : deliveries)
    out << "delivered node=" << int(id) << " data=" << to_hex(data) << "\n";
  for (const auto& [id, c] : ledger.per_node) {
    std::ostringstream e;
    e.precision(6);
    e << std::fixed << c.energy_mJ;
    out << "ledger node=" << int(id) << " bits_tx=" << c.bits_tx
        << " bits_rx=" << c.bits_rx << " modmuls=" << c.modmuls
        << " mem_bytes=" << c.mem_bytes << " energy_mJ=" << e.str() << "\n";
  }
  return out.str();
}

uint64_t Trace::hash() const {
  std::string s = serialize();
  uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

// ---------------------------------------------------------------------------
// Simulator

Simulator::Simulator(Scenario scenario, std::shared_ptr<AdversaryHook> adversary)
    : scenario_(std::move(scenario)),
      params_(make_params(scenario_.modulus_bits)),
      routing_(build_routes(scenario_.topology)),
      adversary_(std::move(adversary)),
      channel_rng_(mix_seed(scenario_.seed, 1)),
      proto_rng_(mix_seed(scenario_.seed, 2)) {
  for (const auto& t : scenario_.traffic) {
    if (!scenario_.topology.has_node(t.node))
      throw std::runtime_error("traffic references unknown node " +
                               std::to_string(t.node));
  }
}

void Simulator::schedule(Event ev) {
  ev.seq = next_seq_++;
  queue_.push(std::move(ev));
}

void Simulator::record(TraceRecord rec) {
  switch (rec.kind) {
    case TraceRecord::Kind::FrameSent: ++trace_.frames_sent; break;
    case TraceRecord::Kind::FrameDelivered: ++trace_.frames_delivered; break;
    case TraceRecord::Kind::FrameDropped: ++trace_.frames_dropped; break;
    default: break;
  }
  trace_.records.push_back(std::move(rec));
}

void Simulator::record_transition(uint8_t node, const std::string& role,
                                  const std::string& from, const std::string& to) {
  if (from == to) return;
  TraceRecord rec;
  rec.time_ms = now_;
  rec.kind = role == "node" ? TraceRecord::Kind::NodeTransition
                            : TraceRecord::Kind::SinkTransition;
  rec.detail = role + " " + std::to_string(node) + ": " + from + " -> " + to;
  record(std::move(rec));
}

void Simulator::schedule_adversary(double time_ms, uint64_t tag) {
  Event ev;
  ev.time = time_ms;
  ev.kind = Event::Kind::AdversaryWake;
  ev.adv_tag = tag;
  schedule(std::move(ev));
}

void Simulator::inject_frame(double time_ms, uint8_t at_node, Frame frame) {
  Event ev;
  ev.time = time_ms;
  ev.kind = Event::Kind::Inject;
  ev.at_node = at_node;
  ev.frame = std::move(frame);
  schedule(std::move(ev));
}

void Simulator::transmit(uint8_t from, uint8_t to, const Frame& frame) {
  const LinkSpec* link = scenario_.topology.find_link(from, to);
  Frame f = frame;
  TraceRecord sent;
  sent.time_ms = now_;
  sent.kind = TraceRecord::Kind::FrameSent;
  sent.hop_from = from;
  sent.hop_to = to;
  sent.frame = f;
  record(std::move(sent));
  trace_.ledger.at(from).bits_tx += 8 * f.bytes.size();

  if (!link) {
    TraceRecord drop;
    drop.time_ms = now_;
    drop.kind = TraceRecord::Kind::FrameDropped;
    drop.hop_from = from;
    drop.hop_to = to;
    drop.frame = f;
    drop.detail = "no-link";
    record(std::move(drop));
    return;
  }

  bool dropped = false;
  if (adversary_) adversary_->on_transmit(*this, now_, from, to, f, dropped);
  if (!dropped && channel_rng_.chance(link->loss)) {
    dropped = true;
    TraceRecord drop;
    drop.time_ms = now_;
    drop.kind = TraceRecord::Kind::FrameDropped;
    drop.hop_from = from;
    drop.hop_to = to;
    drop.frame = f;
    drop.detail = "loss";
    record(std::move(drop));
  } else if (dropped) {
    TraceRecord drop;
    drop.time_ms = now_;
    drop.kind = TraceRecord::Kind::FrameDropped;
    drop.hop_from = from;
    drop.hop_to = to;
    drop.frame = f;
    drop.detail = "adversary";
    record(std::move(drop));
  }
  if (dropped) return;

  Event ev;
  ev.time = now_ + link->delay_ms;
  ev.kind = Event::Kind::Deliver;
  ev.at_node = to;
  ev.from_node = from;
  ev.frame = std::move(f);
  schedule(std::move(ev));
}

void Simulator::send_from_endpoint(uint8_t endpoint, const Frame& frame) {
  try {
    uint8_t next = routing_.next_hop(endpoint, frame.dst);
    transmit(endpoint, next, frame);
  } catch (const std::exception& e) {
    TraceRecord drop;
    drop.time_ms = now_;
    drop.kind = TraceRecord::Kind::FrameDropped;
    drop.hop_from = endpoint;
    drop.hop_to = endpoint;
    drop.frame = frame;
    drop.detail = std::string("no-route: ") + e.what();
    record(std::move(drop));
  }
}

void Simulator::emit_node_output(uint8_t node, StepResult&& res) {
  trace_.ledger.at(node).modmuls += res.modmuls;
  for (const auto& a : res.audit) {
    TraceRecord rec;
    rec.time_ms = now_;
    rec.kind = TraceRecord::Kind::Audit;
    rec.detail = "node " + std::to_string(node) + ": " + a;
    record(std::move(rec));
  }
  for (const auto& m : res.out) {
    send_from_endpoint(node, Frame{node, 0, encode(m)});
  }
  if (res.arm_retry_timer) {
    auto& fsm = nodes_.at(node);
    uint32_t epoch = ++timer_epochs_[node];
    Event ev;
    ev.time = now_ + scenario_.retry_timeout_ms * (1 + fsm.retries());
    ev.kind = Event::Kind::TimerFire;
    ev.at_node = node;
    ev.timer_epoch = epoch;
    schedule(std::move(ev));
  }
}

void Simulator::emit_sink_output(uint8_t node, StepResult&& res) {
  trace_.ledger.at(0).modmuls += res.modmuls;
  for (const auto& a : res.audit) {
    TraceRecord rec;
    rec.time_ms = now_;
    rec.kind = TraceRecord::Kind::Audit;
    rec.detail = "sink: " + a;
    record(std::move(rec));
  }
  for (const auto& m : res.out) {
    send_from_endpoint(0, Frame{0, node, encode(m)});
  }
  if (res.delivered) {
    trace_.deliveries.emplace_back(node, *res.delivered);
    TraceRecord rec;
    rec.time_ms = now_;
    rec.kind = TraceRecord::Kind::DataDelivered;
    rec.detail = "node " + std::to_string(node) + " data=" + to_hex(*res.delivered);
    record(std::move(rec));
  }
}

void Simulator::endpoint_receive(uint8_t at, const Frame& frame) {
  DecodeResult dec = decode(frame.bytes, params_);
  if (!dec.ok()) {
    TraceRecord drop;
    drop.time_ms = now_;
    drop.kind = TraceRecord::Kind::FrameDropped;
    drop.hop_from = at;
    drop.hop_to = at;
    drop.frame = frame;
    drop.detail = "decode error at offset " + std::to_string(dec.error.offset) +
                  ": " + dec.error.reason;
    record(std::move(drop));
    return;
  }
  const Message& msg = *dec.message;

  if (at == 0) {
    uint8_t sender = 0;
    if (const M1* m = std::get_if<M1>(&msg)) sender = m->sender_id;
    else if (const M3* m3 = std::get_if<M3>(&msg)) sender = m3->sender_id;
    else if (const M5* m5 = std::get_if<M5>(&msg)) sender = m5->sender_id;
    else return;  // sink ignores M2/M4/RouteFlood

    std::string before = sink_state_names_.count(sender)
                             ? sink_state_names_[sender]
                             : std::string("Idle");
    StepResult res = sink_->on_message(sender, msg, proto_rng_);
    std::string after = to_string(sink_->session_state(sender));
    record_transition(sender, "sink", before, after);
    sink_state_names_[sender] = after;

    if (std::holds_alternative<M1>(msg)) {
      if (auto info = sink_->session_info(sender)) {
        // Attach (q, RI, K_CS) to the node's open session tuple, or open a
        // sender-only tuple for sessions the sink saw without an AppStart.
        size_t idx;
        auto it = open_session_tuple_.find(sender);
        if (it != open_session_tuple_.end() &&
            trace_.sessions[it->second].q.empty()) {
          idx = it->second;
        } else {
          trace_.sessions.push_back(SessionTuple{sender, {}, {}, -1, {}});
          idx = trace_.sessions.size() - 1;
          open_session_tuple_[sender] = idx;
        }
        trace_.sessions[idx].q = to_fixed_bytes(info->q, params_.exponent_bits);
        trace_.sessions[idx].ri = info->ri;
        trace_.sessions[idx].kcs = info->kcs;
      }
    }
    emit_sink_output(sender, std::move(res));
    return;
  }

  auto it = nodes_.find(at);
  if (it == nodes_.end()) return;
  std::string before = node_state_names_[at];
  StepResult res = it->second.on_message(msg);
  std::string after = to_string(it->second.state());
  record_transition(at, "node", before, after);
  node_state_names_[at] = after;
  emit_node_output(at, std::move(res));
}

void Simulator::handle_deliver(const Event& ev) {
  TraceRecord del;
  del.time_ms = now_;
  del.kind = TraceRecord::Kind::FrameDelivered;
  del.hop_from = ev.from_node;
  del.hop_to = ev.at_node;
  del.frame = ev.frame;
  record(std::move(del));
  trace_.ledger.at(ev.at_node).bits_rx += 8 * ev.frame.bytes.size();

  if (ev.at_node == ev.frame.dst) {
    endpoint_receive(ev.at_node, ev.frame);
    return;
  }
  // Relay: forward the ciphertext frame unmodified and unread.
  try {
    uint8_t next = routing_.next_hop(ev.at_node, ev.frame.dst);
    transmit(ev.at_node, next, ev.frame);
  } catch (const std::exception& e) {
    TraceRecord drop;
    drop.time_ms = now_;
    drop.kind = TraceRecord::Kind::FrameDropped;
    drop.hop_from = ev.at_node;
    drop.hop_to = ev.at_node;
    drop.frame = ev.frame;
    drop.detail = std::string("no-route: ") + e.what();
    record(std::move(drop));
  }
}

Trace Simulator::run() {
  trace_ = Trace{};
  params_.validate();

  // Registration phase: the operator uploads (K, V) pairs into sink and
  // nodes before deployment.
  Rng setup(mix_seed(scenario_.seed, 0));
  sink_ = std::make_unique<SinkFsm>(params_);
  nodes_.clear();
  std::vector<uint8_t> ids;
  for (const auto& n : scenario_.topology.nodes)
    if (n.id != 0) ids.push_back(n.id);
  std::sort(ids.begin(), ids.end());
  for (uint8_t id : ids) {
    SessionKey key{setup.bytes(kSessionKeyBytes), id};
    BigInt v;
    do {
      v = setup.bits(params_.modulus_bits);
    } while (v < 2 || v >= params_.modulus);
    SharedSecret secret{v};
    sink_->register_node(id, key, secret);
    nodes_.emplace(id, NodeFsm(NodeIdentity{id, key, secret}, params_));
    node_state_names_[id] = "Idle";
    trace_.node_keys[id] = key.key;
    trace_.node_secrets[id] = to_fixed_bytes(v, params_.modulus_bits);
    trace_.ledger.at(id);  // materialize ledger row
  }
  trace_.ledger.at(0);

  for (const auto& t : scenario_.traffic) {
    Event ev;
    ev.time = t.time_ms;
    ev.kind = Event::Kind::AppStart;
    ev.at_node = t.node;
    ev.data = t.data;
    schedule(std::move(ev));
  }
  if (adversary_) adversary_->on_run_begin(*this);

  while (!queue_.empty()) {
    Event ev = queue_.top();
    queue_.pop();
    if (ev.time > scenario_.horizon_ms) break;
    now_ = ev.time;
    switch (ev.kind) {
      case Event::Kind::AppStart: {
        auto it = nodes_.find(ev.at_node);
        if (it == nodes_.end())
          throw std::runtime_error("AppStart for unknown node");
        std::string before = node_state_names_[ev.at_node];
        StepResult res = it->second.start(ev.data, proto_rng_);
        std::string after = to_string(it->second.state());
        record_transition(ev.at_node, "node", before, after);
        node_state_names_[ev.at_node] = after;
        trace_.sessions.push_back(SessionTuple{
            ev.at_node,
            to_fixed_bytes(it->second.session_p(), params_.exponent_bits),
            {}, -1, {}});
        open_session_tuple_[ev.at_node] = trace_.sessions.size() - 1;
        emit_node_output(ev.at_node, std::move(res));
        break;
      }
      case Event::Kind::Deliver:
        handle_deliver(ev);
        break;
      case Event::Kind::TimerFire: {
        if (timer_epochs_[ev.at_node] != ev.timer_epoch) break;  // stale
        auto it = nodes_.find(ev.at_node);
        if (it == nodes_.end()) break;
        std::string before = node_state_names_[ev.at_node];
        StepResult res = it->second.on_timeout();
        std::string after = to_string(it->second.state());
        record_transition(ev.at_node, "node", before, after);
        node_state_names_[ev.at_node] = after;
        emit_node_output(ev.at_node, std::move(res));
        break;
      }
      case Event::Kind::AdversaryWake:
        if (adversary_) adversary_->on_wake(*this, now_, ev.adv_tag);
        break;
      case Event::Kind::Inject: {
        // The attacker's own transmission into at_node's radio.
        TraceRecord sent;
        sent.time_ms = now_;
        sent.kind = TraceRecord::Kind::FrameSent;
        sent.hop_from = 0xFF;
        sent.hop_to = ev.at_node;
        sent.frame = ev.frame;
        record(std::move(sent));
        Event deliver;
        deliver.time = now_;
        deliver.kind = Event::Kind::Deliver;
        deliver.at_node = ev.at_node;
        deliver.from_node = 0xFF;
        deliver.frame = ev.frame;
        handle_deliver(deliver);
        break;
      }
    }
  }

  for (const auto& [id, fsm] : nodes_)
    trace_.final_node_states[id] = fsm.state();
  for (uint8_t id : ids)
    trace_.final_sink_states[id] = sink_->session_state(id);

  // Memory and energy columns of the ledger.
  MemoryFootprint mem = banzkp_memory(params_, static_cast<int>(ids.size()));
  for (auto& [id, c] : trace_.ledger.per_node)
    c.mem_bytes = (id == 0) ? mem.sink_bytes : mem.node_bytes;
  energy_cost(trace_.ledger, RadioModel{});
  return trace_;
}

}  // namespace banzkp
