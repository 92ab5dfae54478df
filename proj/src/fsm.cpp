#include "banzkp/fsm.hpp"

namespace banzkp {
namespace {

Bytes u64_bytes(uint64_t v) {
  Bytes out(8);
  for (int i = 0; i < 8; ++i) out[i] = static_cast<uint8_t>(v >> (56 - 8 * i));
  return out;
}

Bytes session_material(int ri, const BigInt& v_q) {
  Bytes s;
  put_u16be(s, static_cast<uint16_t>(ri));
  append(s, u64_bytes(low_u64(v_q)));
  return s;
}

}  // namespace

const char* to_string(NodeState s) {
  switch (s) {
    case NodeState::Idle: return "Idle";
    case NodeState::SentM1: return "SentM1";
    case NodeState::SentM3: return "SentM3";
    case NodeState::Authenticated: return "Authenticated";
    case NodeState::Aborted: return "Aborted";
  }
  return "?";
}

const char* to_string(SinkState s) {
  switch (s) {
    case SinkState::Idle: return "Idle";
    case SinkState::SentM2: return "SentM2";
    case SinkState::Authenticated: return "Authenticated";
    case SinkState::Rejected: return "Rejected";
  }
  return "?";
}

CipherContext ctx_m1(uint8_t node_id) {
  return CipherContext{0x01, node_id, {}, 0};
}
CipherContext ctx_m2(uint8_t node_id, const BigInt& v_p) {
  return CipherContext{0x02, node_id, u64_bytes(low_u64(v_p)), 0};
}
CipherContext ctx_commit(uint8_t node_id) {
  return CipherContext{0x22, node_id, {}, 0};
}
CipherContext ctx_m3(uint8_t node_id, int ri, const BigInt& v_q) {
  return CipherContext{0x03, node_id, session_material(ri, v_q), 0};
}
CipherContext ctx_m5(uint8_t node_id, int ri, const BigInt& v_q, uint16_t seq) {
  return CipherContext{0x05, node_id, session_material(ri, v_q), seq};
}

// ---------------------------------------------------------------------------
// Node side

StepResult NodeFsm::start(const Bytes& data, Rng& rng) {
  StepResult res;
  // A new Start resets any in-flight session.
  state_ = NodeState::SentM1;
  retries_ = 0;
  pending_data_ = data;
  p_ = rng.draw_exponent(params_);
  v_p_ = modexp(id_.secret.v, p_, params_);
  res.modmuls += modmul_estimate(p_);

  Bytes pt{id_.id};
  append(pt, to_fixed_bytes(v_p_, params_.modulus_bits));
  last_msg_ = M1{id_.id, seal(id_.session_key.key, pt, ctx_m1(id_.id))};
  res.out.push_back(last_msg_);
  res.arm_retry_timer = true;
  return res;
}

StepResult NodeFsm::abort(std::string reason) {
  StepResult res;
  state_ = NodeState::Aborted;
  res.audit.push_back(std::move(reason));
  return res;
}

StepResult NodeFsm::on_timeout() {
  StepResult res;
  if (state_ != NodeState::SentM1 && state_ != NodeState::SentM3) return res;
  if (retries_ >= kMaxRetries) return abort("retry budget exhausted");
  ++retries_;
  res.out.push_back(last_msg_);
  res.arm_retry_timer = true;
  return res;
}

StepResult NodeFsm::on_message(const Message& m) {
  const int wb = params_.modulus_bytes();

  if (state_ == NodeState::SentM1 && std::holds_alternative<M2>(m)) {
    const M2& m2 = std::get<M2>(m);
    auto pt = open(id_.session_key.key, m2.ct_a, ctx_m2(id_.id, v_p_));
    if (!pt) return abort("M2 decrypt failure");
    if (pt->size() != static_cast<size_t>(1 + wb + 2)) return abort("M2 malformed");
    if ((*pt)[0] != 0) return abort("M2 wrong sink id");
    v_q_ = from_bytes(Bytes(pt->begin() + 1, pt->begin() + 1 + wb));
    ri_ = get_u16be(pt->data() + 1 + wb);
    if (ri_ + params_.interval_bits > params_.modulus_bits)
      return abort("RI out of range");
    if (v_q_ >= params_.modulus) return abort("M2 value out of group");
    commitment_ = m2.ct_commit;  // stored as-is, opened only at M4

    StepResult res;
    v_qp_ = modexp(v_q_, p_, params_);
    res.modmuls += modmul_estimate(p_);
    own_interval_ =
        extract_interval(v_qp_, params_.modulus_bits, ri_, params_.interval_bits);
    Bytes pt3{id_.id};
    append(pt3, own_interval_);
    last_msg_ = M3{id_.id, seal(id_.session_key.key, pt3, ctx_m3(id_.id, ri_, v_q_))};
    res.out.push_back(last_msg_);
    state_ = NodeState::SentM3;
    retries_ = 0;
    res.arm_retry_timer = true;
    return res;
  }

  if (state_ == NodeState::SentM3 && std::holds_alternative<M4>(m)) {
    const M4& m4 = std::get<M4>(m);
    auto committed_pt = open(m4.kcs, commitment_.ciphertext, ctx_commit(id_.id));
    if (!committed_pt) return abort("commitment open failure");
    if (committed_pt->size() != static_cast<size_t>(wb))
      return abort("commitment malformed");
    Bytes committed_interval = extract_interval(
        from_bytes(*committed_pt), params_.modulus_bits, ri_, params_.interval_bits);
    if (committed_interval != own_interval_)
      return abort("commitment interval mismatch");

    StepResult res;
    Bytes pt5{id_.id};
    append(pt5, pending_data_);
    res.out.push_back(
        M5{id_.id, seal(id_.session_key.key, pt5, ctx_m5(id_.id, ri_, v_q_, 0))});
    state_ = NodeState::Authenticated;
    return res;
  }

  // Out-of-order or duplicate: ignored, state unchanged.
  return {};
}

// ---------------------------------------------------------------------------
// Sink side

void SinkFsm::register_node(uint8_t id, SessionKey key, SharedSecret secret) {
  if (id == 0) throw std::invalid_argument("id 0 is the sink");
  if (secret.v < 2 || secret.v >= params_.modulus)
    throw std::invalid_argument("degenerate shared secret");
  registry_[id] = Registered{std::move(key), std::move(secret)};
}

SinkState SinkFsm::session_state(uint8_t id) const {
  auto it = sessions_.find(id);
  return it == sessions_.end() ? SinkState::Idle : it->second.state;
}

std::optional<SinkSessionInfo> SinkFsm::session_info(uint8_t id) const {
  auto it = sessions_.find(id);
  if (it == sessions_.end()) return std::nullopt;
  return SinkSessionInfo{it->second.q, it->second.ri, it->second.kcs.key};
}

StepResult SinkFsm::on_message(uint8_t sender_id, const Message& m, Rng& rng) {
  if (!registry_.count(sender_id)) {
    StepResult res;
    res.audit.push_back("drop: unregistered sender " + std::to_string(sender_id));
    return res;
  }
  if (std::holds_alternative<M1>(m)) return handle_m1(sender_id, std::get<M1>(m), rng);
  if (std::holds_alternative<M3>(m)) return handle_m3(sender_id, std::get<M3>(m));
  if (std::holds_alternative<M5>(m)) return handle_m5(sender_id, std::get<M5>(m));
  return {};
}

StepResult SinkFsm::handle_m1(uint8_t sender_id, const M1& m, Rng& rng) {
  StepResult res;
  const Registered& reg = registry_.at(sender_id);
  const int wb = params_.modulus_bytes();
  // Any M1 opens a fresh session; this is the only reset out of Rejected.
  Session& s = sessions_[sender_id];
  s = Session{};

  auto pt = open(reg.key.key, m.ct, ctx_m1(sender_id));
  if (!pt || pt->size() != static_cast<size_t>(1 + wb) || (*pt)[0] != sender_id) {
    s.state = SinkState::Rejected;
    res.audit.push_back("M1 rejected for node " + std::to_string(sender_id));
    return res;
  }
  BigInt v_p = from_bytes(Bytes(pt->begin() + 1, pt->end()));
  if (v_p >= params_.modulus) {
    s.state = SinkState::Rejected;
    res.audit.push_back("M1 value out of group");
    return res;
  }

  s.q = rng.draw_exponent(params_);
  s.ri = rng.draw_ri(params_);
  s.kcs = rng.draw_commit_key(params_);
  s.v_q = modexp(reg.secret.v, s.q, params_);
  BigInt v_pq = modexp(v_p, s.q, params_);
  res.modmuls += 2 * modmul_estimate(s.q);
  s.expected_interval =
      extract_interval(v_pq, params_.modulus_bits, s.ri, params_.interval_bits);

  Bytes pt_a{0};  // ID_0
  append(pt_a, to_fixed_bytes(s.v_q, params_.modulus_bits));
  put_u16be(pt_a, static_cast<uint16_t>(s.ri));
  M2 m2;
  m2.ct_a = seal(reg.key.key, pt_a, ctx_m2(sender_id, v_p));
  m2.ct_commit.ciphertext = seal(
      s.kcs.key, to_fixed_bytes(v_pq, params_.modulus_bits), ctx_commit(sender_id));
  m2.ct_commit.width = params_.modulus_bits;
  res.out.push_back(std::move(m2));
  s.state = SinkState::SentM2;
  return res;
}

StepResult SinkFsm::handle_m3(uint8_t sender_id, const M3& m) {
  StepResult res;
  auto it = sessions_.find(sender_id);
  if (it == sessions_.end() || it->second.state != SinkState::SentM2) return res;
  Session& s = it->second;
  const Registered& reg = registry_.at(sender_id);

  auto pt = open(reg.key.key, m.ct, ctx_m3(sender_id, s.ri, s.v_q));
  if (!pt || pt->empty() || (*pt)[0] != sender_id) {
    s.state = SinkState::Rejected;
    res.audit.push_back("M3 rejected for node " + std::to_string(sender_id));
    return res;
  }
  Bytes interval(pt->begin() + 1, pt->end());
  if (interval != s.expected_interval) {
    s.state = SinkState::Rejected;
    res.audit.push_back("M3 interval mismatch for node " + std::to_string(sender_id));
    return res;
  }
  res.out.push_back(M4{s.kcs.key});
  s.state = SinkState::Authenticated;
  return res;
}

StepResult SinkFsm::handle_m5(uint8_t sender_id, const M5& m) {
  StepResult res;
  auto it = sessions_.find(sender_id);
  if (it == sessions_.end() || it->second.state != SinkState::Authenticated) {
    res.audit.push_back("M5 dropped: node " + std::to_string(sender_id) +
                        " not authenticated");
    return res;
  }
  Session& s = it->second;
  const Registered& reg = registry_.at(sender_id);
  auto pt = open(reg.key.key, m.ct, ctx_m5(sender_id, s.ri, s.v_q, s.data_seq));
  if (!pt || pt->empty() || (*pt)[0] != sender_id) {
    res.audit.push_back("M5 dropped: bad tag for node " + std::to_string(sender_id));
    return res;
  }
  ++s.data_seq;
  res.delivered = Bytes(pt->begin() + 1, pt->end());
  return res;
}

}  // namespace banzkp
