#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "banzkp/params.hpp"

namespace banzkp {

struct NodeCost {
  uint64_t bits_tx = 0;
  uint64_t bits_rx = 0;
  uint64_t modmuls = 0;
  uint64_t mem_bytes = 0;
  double energy_mJ = 0.0;
};

struct CostLedger {
  std::map<uint8_t, NodeCost> per_node;

  NodeCost& at(uint8_t id) { return per_node[id]; }
  uint64_t total_bits() const;
  uint64_t total_modmuls() const;
};

enum class AccountingMode { PaperFields, Wire };

/// Field widths used by paper-fields accounting (bits).
struct FieldBits {
  int v_power = 200;
  int interval = 200;
  int kcs = 200;
};

/// ZigBee-flavored radio constants plus a per-modular-multiplication
/// energy charge.
struct RadioModel {
  double voltage_v = 3.3;
  double current_a = 0.010;
  double data_rate_bps = 250000.0;
  double energy_per_modmul_uj = 1.0;

  double energy_per_bit_j() const { return voltage_v * current_a / data_rate_bps; }
};

/// TinyZKP modeled as cost constants only; never executed.
struct TinyZkpBaseline {
  int private_keys_per_node = 20;
  int public_keys_per_node = 20;
  int key_bytes = 20;          // 160-bit ECDSA keys
  int signature_bits = 320;
  int sha1_bits = 160;
  int session_key_bytes = 16;
  uint64_t comm_bits = 1710;
  int modmul_T = 1;
  int modmul_k = 20;

  int keys_per_node() const { return private_keys_per_node + public_keys_per_node; }
  int sink_public_keys(int n_nodes) const { return public_keys_per_node * n_nodes; }
};

/// Paper-fields communication cost of one BANZKP authentication:
/// 2*L(V^p/q) + 2*L(interval) + L(K_CS).
uint64_t banzkp_paper_comm_bits(const FieldBits& fields = {});

/// T*(k+2)/2; exact when T*(k+2) is even.
uint64_t modmul_cost(uint64_t t, uint64_t k);

struct MemoryFootprint {
  uint64_t node_bytes = 0;          // per node, including session buffers
  uint64_t node_static_bytes = 0;   // pre-distributed items only (K, V)
  uint64_t sink_bytes = 0;
  int n_nodes = 0;
  uint64_t total() const { return node_bytes * n_nodes + sink_bytes; }
};

/// BANZKP storage: node holds K, V, the unopened commitment envelope and
/// session scalars; sink holds (K,V) per node plus per-session state.
MemoryFootprint banzkp_memory(const ProtocolParams& params, int n_nodes);
MemoryFootprint tinyzkp_memory(const TinyZkpBaseline& baseline, int n_nodes);

/// Fills energy_mJ per node from bits and modmuls; returns the total mJ.
double energy_cost(CostLedger& ledger, const RadioModel& radio);

/// Modeled scheme-vs-scheme comparison under paper-fields accounting.
/// data_bits is the per-session application payload, identical for both
/// schemes; the calibration is printed with every report.
struct EnergyComparison {
  double banzkp_mj = 0.0;
  double tinyzkp_mj = 0.0;
  uint64_t data_bits = 0;
  double delta_percent = 0.0;  // (tinyzkp - banzkp) / tinyzkp * 100
};
EnergyComparison compare_energy(const RadioModel& radio, int n_nodes = 6,
                                uint64_t data_bits = 6000);

struct MemoryComparison {
  MemoryFootprint banzkp;
  MemoryFootprint tinyzkp;
  double delta_percent = 0.0;  // reduction of total, percent
};
MemoryComparison compare_memory(const ProtocolParams& params,
                                const TinyZkpBaseline& baseline, int n_nodes = 6);

}  // namespace banzkp
