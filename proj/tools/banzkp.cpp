#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "banzkp/adversary.hpp"
#include "banzkp/costmodel.hpp"
#include "banzkp/netsim.hpp"

using namespace banzkp;

namespace {

std::string ledger_csv(const CostLedger& ledger, const std::string& mode) {
  std::ostringstream out;
  out << "role,bits_tx,bits_rx,modmuls,mem_bytes,energy_mJ,mode\n";
  for (const auto& [id, c] : ledger.per_node) {
    out << (id == 0 ? "sink" : "node" + std::to_string(id)) << "," << c.bits_tx
        << "," << c.bits_rx << "," << c.modmuls << "," << c.mem_bytes << ",";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", c.energy_mJ);
    out << buf << "," << mode << "\n";
  }
  return out.str();
}

void write_output(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  out << content;
}

int cmd_run(const std::string& scenario_arg, uint64_t seed, int modulus_bits,
            const std::string& output, const std::string& format) {
  Scenario s;
  if (scenario_arg == "honest7" || scenario_arg.empty()) {
    s = Scenario::honest7(seed);
  } else {
    s = load_scenario(scenario_arg);
    s.seed = seed;
  }
  if (modulus_bits > 0) s.modulus_bits = modulus_bits;

  auto hook = make_adversary(s.adversary, seed);
  Simulator sim(s, hook);
  Trace trace = sim.run();

  std::ostringstream out;
  if (format == "csv") {
    out << ledger_csv(trace.ledger, "wire");
  } else if (format == "lines") {
    out << trace.serialize();
  } else {  // table
    out << trace.serialize();
    out << "--- ledger ---\n" << ledger_csv(trace.ledger, "wire");
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(trace.hash()));
    out << "trace_hash=" << buf << "\n";
  }

  std::string path = output;
  if (path.empty()) {
    if (const char* dir = std::getenv("BANZKP_OUT_DIR")) {
      path = std::string(dir) + "/" + s.name + "_" + std::to_string(seed) + ".trace";
    }
  }
  write_output(path, out.str());
  return 0;
}

int cmd_attack(const std::string& kind_name, uint64_t seed, uint64_t trials,
               int modulus_bits, unsigned jobs) {
  std::vector<AttackKind> kinds;
  if (kind_name == "all") {
    kinds = {AttackKind::Replay, AttackKind::ForgeNode, AttackKind::ForgeSink,
             AttackKind::Inject, AttackKind::MitM, AttackKind::Guess};
  } else {
    auto k = parse_attack_kind(kind_name);
    if (!k) {
      std::cerr << "unknown attack kind: " << kind_name << "\n";
      return 2;
    }
    kinds = {*k};
  }

  bool all_pass = true;
  for (AttackKind k : kinds) {
    Verdict v;
    if (jobs > 1 && k != AttackKind::Guess && k != AttackKind::Eavesdrop) {
      // Independent seeded trials split across workers.
      std::vector<Verdict> parts(jobs);
      std::vector<std::thread> workers;
      uint64_t chunk = (trials + jobs - 1) / jobs;
      for (unsigned w = 0; w < jobs; ++w) {
        uint64_t lo = w * chunk;
        uint64_t n = lo >= trials ? 0 : std::min(chunk, trials - lo);
        workers.emplace_back([&, w, lo, n] {
          parts[w] = n ? run_attack(k, seed + lo, n, modulus_bits)
                       : Verdict{k, true, 0, 0, ""};
        });
      }
      for (auto& t : workers) t.join();
      v = Verdict{k, true, trials, 0, ""};
      for (const auto& p : parts) {
        v.false_accepts += p.false_accepts;
        if (!p.pass) {
          v.pass = false;
          if (v.detail.empty()) v.detail = p.detail;
        }
      }
    } else {
      v = run_attack(k, seed, trials, modulus_bits);
    }
    std::cout << to_string(k) << ": " << (v.pass ? "PASS" : "FAIL") << " ("
              << v.false_accepts << "/" << v.trials << " accepted";
    if (!v.detail.empty()) std::cout << "; " << v.detail;
    std::cout << ")\n";
    all_pass = all_pass && v.pass;
  }
  return all_pass ? 0 : 1;
}

int cmd_cost(const std::string& mode, int modulus_bits, uint64_t data_bits,
             uint64_t seed) {
  ProtocolParams params = make_params(modulus_bits);
  TinyZkpBaseline tiny;
  RadioModel radio;

  uint64_t banzkp_bits = banzkp_paper_comm_bits();
  std::cout << "communication cost (" << mode << " accounting)\n";
  if (mode == "wire") {
    Scenario s = Scenario::honest7(seed);
    s.modulus_bits = modulus_bits;
    Simulator sim(s, nullptr);
    Trace t = sim.run();
    std::cout << "  BANZKP wire bits (honest7 trace, W=" << modulus_bits
              << "): " << t.ledger.total_bits() << "\n";
    std::cout << "  BANZKP paper-fields bits: " << banzkp_bits << "\n";
  } else {
    std::cout << "  BANZKP:  " << banzkp_bits << " bits\n";
    std::cout << "  TinyZKP: " << tiny.comm_bits << " bits\n";
  }

  std::cout << "modular multiplications\n";
  std::cout << "  TinyZKP T*(k+2)/2, T=" << tiny.modmul_T << " k=" << tiny.modmul_k
            << ": " << modmul_cost(tiny.modmul_T, tiny.modmul_k) << "\n";
  std::cout << "  BANZKP (keys pre-distributed): 0\n";

  MemoryComparison mem = compare_memory(params, tiny, 6);
  char buf[64];
  std::cout << "memory footprint (n=6)\n";
  std::cout << "  TinyZKP: node " << mem.tinyzkp.node_bytes << " B ("
            << tiny.keys_per_node() << " keys), sink " << mem.tinyzkp.sink_bytes
            << " B (" << tiny.sink_public_keys(6) << " public keys), total "
            << mem.tinyzkp.total() << " B\n";
  std::cout << "  BANZKP:  node " << mem.banzkp.node_bytes << " B, sink "
            << mem.banzkp.sink_bytes << " B, total " << mem.banzkp.total()
            << " B\n";
  std::snprintf(buf, sizeof buf, "%.2f", mem.delta_percent);
  std::cout << "  reduction: " << buf << " %\n";

  EnergyComparison en = compare_energy(radio, 6, data_bits);
  std::cout << "energy (paper-fields bits + " << data_bits
            << " data bits per session, n=6)\n";
  std::snprintf(buf, sizeof buf, "%.4f", en.banzkp_mj);
  std::cout << "  BANZKP:  " << buf << " mJ\n";
  std::snprintf(buf, sizeof buf, "%.4f", en.tinyzkp_mj);
  std::cout << "  TinyZKP: " << buf << " mJ\n";
  std::snprintf(buf, sizeof buf, "%.2f", en.delta_percent);
  std::cout << "  BANZKP uses " << buf << " % less energy\n";

  std::cout << "calibration: W=" << modulus_bits << " bits, session key "
            << kSessionKeyBytes << " B, ECDSA key " << tiny.key_bytes
            << " B, signature " << tiny.signature_bits << " bits, radio "
            << radio.voltage_v << " V x " << radio.current_a * 1000.0
            << " mA / " << radio.data_rate_bps / 1000.0 << " kbps ("
            << radio.energy_per_bit_j() * 1e9 << " nJ/bit), modmul "
            << radio.energy_per_modmul_uj << " uJ, data "
            << data_bits << " bits/session\n";
  return 0;
}

int cmd_selftest() {
  bool ok = true;
  auto check = [&ok](const std::string& name, bool pass) {
    std::cout << name << ": " << (pass ? "PASS" : "FAIL") << "\n";
    ok = ok && pass;
  };

  // Commutativity against brute-force multiplication, small moduli.
  {
    Rng rng(7);
    bool pass = true;
    for (int i = 0; i < 2000 && pass; ++i) {
      uint64_t m = rng.range(3, (1u << 16) - 1) | 1;
      uint64_t v = rng.below(m);
      uint64_t p = rng.range(1, 40), q = rng.range(1, 40);
      auto brute = [m](uint64_t base, uint64_t e) {
        uint64_t r = 1 % m;
        for (uint64_t i2 = 0; i2 < e; ++i2) r = r * base % m;
        return r;
      };
      pass = brute(brute(v, p), q) == brute(brute(v, q), p);
    }
    check("modexp commutativity oracle", pass);
  }

  // Honest completeness over a few seeds.
  {
    bool pass = true;
    for (uint64_t seed = 1; seed <= 5 && pass; ++seed) {
      Simulator sim(Scenario::honest7(seed), nullptr);
      Trace t = sim.run();
      pass = t.deliveries.size() == 6;
      for (const auto& [id, st] : t.final_node_states)
        pass = pass && st == NodeState::Authenticated;
    }
    check("honest completeness (5 seeds)", pass);
  }

  // Determinism: equal seeds, equal trace hashes.
  {
    Simulator a(Scenario::honest7(42), nullptr);
    Simulator b(Scenario::honest7(42), nullptr);
    check("determinism", a.run().hash() == b.run().hash());
  }

  // One trial of each attack class.
  for (AttackKind k : {AttackKind::Replay, AttackKind::ForgeNode,
                       AttackKind::ForgeSink, AttackKind::Inject, AttackKind::MitM}) {
    check(std::string("attack ") + to_string(k), run_attack(k, 11, 4).pass);
  }
  check("guess scan", run_attack(AttackKind::Guess, 11, 5).pass);

  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"BANZKP authentication scheme simulator"};
  app.require_subcommand(1);

  std::string scenario = "honest7", output, format = "table";
  uint64_t seed = 0, trials = 100, data_bits = 6000;
  int modulus_bits = 0;
  std::string kind, cost_mode = "paper";
  unsigned jobs = 1;

  auto* run = app.add_subcommand("run", "run a scenario and emit its trace");
  run->add_option("--scenario", scenario, "scenario file or preset 'honest7'");
  run->add_option("--seed", seed, "run seed")->required();
  run->add_option("--modulus-bits", modulus_bits, "override modulus width (>=1096)")
      ->check(CLI::Range(1096, 16384));
  run->add_option("--output,-o", output, "output path ('-' for stdout)");
  run->add_option("--format", format, "table | csv | lines")
      ->check(CLI::IsMember({"table", "csv", "lines"}));

  auto* attack = app.add_subcommand("attack", "run an adversary suite");
  attack->add_option("--kind", kind, "replay | forge_node | forge_sink | inject | mitm | guess | all")
      ->required();
  attack->add_option("--seed", seed, "base seed")->required();
  attack->add_option("--trials", trials, "seeded trials per attack");
  attack->add_option("--modulus-bits", modulus_bits, "modulus width")
      ->check(CLI::Range(1096, 16384));
  attack->add_option("--jobs", jobs, "parallel workers for independent trials");

  auto* cost = app.add_subcommand("cost", "BANZKP vs TinyZKP cost comparison");
  cost->add_option("--mode", cost_mode, "paper | wire")
      ->check(CLI::IsMember({"paper", "wire"}));
  cost->add_option("--modulus-bits", modulus_bits, "modulus width")
      ->check(CLI::Range(1096, 16384));
  cost->add_option("--data-bits", data_bits, "application payload bits per session");
  cost->add_option("--seed", seed, "seed for wire-mode trace");

  auto* selftest = app.add_subcommand("selftest", "run the invariant suites");
  (void)selftest;

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (run->parsed())
      return cmd_run(scenario, seed, modulus_bits, output, format);
    if (attack->parsed())
      return cmd_attack(kind, seed, trials,
                        modulus_bits > 0 ? modulus_bits : 1096, jobs);
    if (cost->parsed())
      return cmd_cost(cost_mode, modulus_bits > 0 ? modulus_bits : 1096,
                      data_bits, seed ? seed : 1);
    return cmd_selftest();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
