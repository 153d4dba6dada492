// Batch front end for the multiparty rate-region toolkit. Every subcommand
// reads a builtin state spec or a JSON state file, writes JSON or CSV, and is
// deterministic for a fixed --seed.
#include <bit>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qregion/classical.hpp"
#include "qregion/decouple.hpp"
#include "qregion/entropy.hpp"
#include "qregion/rateregion.hpp"
#include "qregion/rescalc.hpp"
#include "qregion/serialization.hpp"
#include "qregion/squashed.hpp"
#include "qregion/states.hpp"

using namespace qregion;
using nlohmann::json;

namespace {

constexpr std::uint64_t kDefaultSeed = 42424242;  // documented default; QREGION_SEED overrides

struct Common {
  std::string output;           // empty: stdout
  std::string format = "json";  // json | csv
  std::uint64_t seed = kDefaultSeed;
  int threads = 1;
  bool selftest = false;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("-o,--output", c.output, "Output file (default: stdout)");
  cmd->add_option("--format", c.format, "Output format: json or csv")->check(CLI::IsMember({"json", "csv"}));
  cmd->add_option("--seed", c.seed, "RNG seed")->envname("QREGION_SEED");
  cmd->add_option("--threads", c.threads, "Worker threads for Monte Carlo loops")->check(CLI::PositiveNumber);
  cmd->add_flag("--selftest", c.selftest, "Run this subcommand's built-in checks and exit");
}

void emit(const Common& c, const std::string& text) {
  if (c.output.empty()) {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << "\n";
    return;
  }
  std::ofstream out(c.output, std::ios::binary);
  if (!out) throw std::invalid_argument("cannot open output file '" + c.output + "'");
  out << text;
}

std::string fmt9(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9f", v);
  return buf;
}

std::vector<int> parse_ints(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    out.push_back(std::stoi(item));
  }
  return out;
}

std::vector<double> parse_doubles(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    out.push_back(std::stod(item));
  }
  return out;
}

std::vector<std::string> labels_at(const MultipartiteState& s, const std::vector<int>& idx) {
  std::vector<std::string> out;
  for (int i : idx) {
    if (i < 0 || i >= s.subsystem_count())
      throw std::invalid_argument("subsystem index " + std::to_string(i) + " out of range");
    out.push_back(s.labels[i]);
  }
  return out;
}

/// Parts spec: semicolon-separated groups of comma-separated indices,
/// e.g. "0;1;2" or "0,1;2".
PartyPartition parse_parts(const MultipartiteState& s, const std::string& text) {
  PartyPartition parts;
  std::stringstream ss(text);
  std::string group;
  while (std::getline(ss, group, ';')) {
    if (group.empty()) continue;
    parts.parts.push_back(labels_at(s, parse_ints(group)));
  }
  if (parts.parts.empty()) throw std::invalid_argument("empty parts spec");
  return parts;
}

Distribution parse_distribution(const std::string& text) {
  auto values = parse_doubles(text);
  RealVector p(static_cast<long>(values.size()));
  for (size_t i = 0; i < values.size(); ++i) p[static_cast<long>(i)] = values[i];
  return Distribution(p);
}

int check(bool ok, const char* what) {
  std::cerr << (ok ? "[ok] " : "[FAIL] ") << what << "\n";
  return ok ? 0 : 1;
}

// --------------------------------------------------------------------------
// selftests: each subcommand rechecks its module's simplest pinned examples

int selftest_entropy() {
  int bad = 0;
  auto bell = bell_state().to_density();
  bad += check(std::abs(von_neumann(bell, {"A"}) - 1.0) < 1e-9, "Bell marginal entropy = 1");
  RealVector fair(2);
  fair << 0.5, 0.5;
  bad += check(std::abs(shannon(Distribution(fair)) - 1.0) < 1e-12, "fair coin entropy = 1");
  RealVector sure(2);
  sure << 1.0, 0.0;
  bad += check(shannon(Distribution(sure)) == 0.0, "deterministic source entropy = 0");
  return bad;
}

int selftest_mpinfo() {
  int bad = 0;
  auto ghz = ghz_state(3);
  bad += check(std::abs(multiparty_info(ghz, PartyPartition::singles(ghz.labels)) - 3.0) < 1e-9,
               "GHZ(3) multiparty information = 3");
  auto prod = build_named_state("product:3");
  bad += check(std::abs(multiparty_info(*prod.ket, PartyPartition::singles(prod.ket->labels))) < 1e-9,
               "product state multiparty information = 0");
  return bad;
}

int selftest_esq() {
  int bad = 0;
  auto ghz = ghz_state(4);
  bad += check(std::abs(esq_pure(ghz, PartyPartition::singles(ghz.labels)) - 2.0) < 1e-9, "GHZ(4) E_sq = 2");
  auto prod = build_named_state("product:2");
  bad += check(std::abs(esq_pure(*prod.ket, PartyPartition::singles(prod.ket->labels))) < 1e-12,
               "product pure state E_sq = 0");
  return bad;
}

int selftest_region() {
  int bad = 0;
  auto built = build_named_state("bell-plus-idle");
  PartyPartition senders;
  senders.parts = {{"A1"}, {"A2"}};
  auto f = inner_constants(*built.ket, senders, "R");
  bad += check(std::abs(f.at(1) - 1.0) < 1e-9 && std::abs(f.at(2)) < 1e-9 && std::abs(f.at(3) - 1.0) < 1e-9,
               "bell-plus-idle constants (1, 0, 1)");
  auto outer = outer_constants(f, {{3u, 0.0}});
  bad += check(outer.at(3) == f.at(3), "zero E_sq keeps the inner region");
  return bad;
}

int selftest_vertices() {
  SetFunction f(2);
  f.at(1) = 0.0;
  f.at(2) = 0.0;
  f.at(3) = 1.0;
  auto v = vertices_bruteforce(f);
  return check(v.size() == 2, "correlated pair has two corner vertices");
}

int selftest_merge_region() {
  auto bell = bell_state().to_density();
  auto f = merging_region(bell, PartyPartition::singles({"A", "B"}));
  return check(std::abs(f.at(1) + 1.0) < 1e-9 && std::abs(f.at(3)) < 1e-9, "Bell merging constants (-1, -1, 0)");
}

int selftest_sw_region() {
  RealVector joint(4);
  joint << 0.25, 0.25, 0.25, 0.25;
  auto f = classical_sw_setfunction(Distribution(joint, {2, 2}));
  return check(std::abs(f.at(1) - 1.0) < 1e-12 && std::abs(f.at(3) - 2.0) < 1e-12,
               "independent fair bits need 1 + 1 bits");
}

int selftest_typical() {
  int bad = 0;
  RealVector sure(2);
  sure << 1.0, 0.0;
  auto rep = typical_stats(Distribution(sure), 12, 0.1);
  bad += check(rep.mass == 1.0 && rep.log_count == 0.0, "deterministic source: mass 1, one sequence");
  RealVector fair(2);
  fair << 0.5, 0.5;
  auto rep2 = typical_stats(Distribution(fair), 10, 0.1);
  bad += check(std::abs(rep2.mass - 1.0) < 1e-12 && std::abs(rep2.log_count - 10.0) < 1e-12,
               "uniform source: all sequences typical");
  return bad;
}

int selftest_decouple() {
  Rng rng(kDefaultSeed);
  auto psi = haar_pure_state({4, 2}, {"A", "R"}, rng);
  DecouplingTrialConfig cfg;
  cfg.state = psi.to_density();
  cfg.system_label = "A";
  cfg.d_A1 = 4;
  cfg.d_A2 = 1;
  auto u = haar_unitary(4, rng);
  return check(decoupling_trial(cfg, u) < 1e-12, "trivial kept system decouples exactly");
}

int selftest_fqsw() {
  int bad = 0;
  auto bell = bell_state();
  auto rep = fqsw_chain_sim(bell, {"A"}, {0}, "B", {1}, 40, kDefaultSeed);
  bad += check(rep.steps[0].mean_transfer_sq < 1e-12, "sending the whole Bell qubit leaves zero residual");
  bad += check(std::abs(fqsw_min_rate(bell.to_density(), "A", {}, "B") - 1.0) < 1e-9, "Bell min rate = 1");
  return bad;
}

int selftest_rescalc() {
  int bad = 0;
  auto tp = builtin(Builtin::Teleportation);
  bad += check(tp.lhs.weight(Token::ebit()) == 1.0 && tp.lhs.weight(Token::cbit()) == 2.0 &&
                   tp.rhs.weight(Token::qbit()) == 1.0,
               "teleportation tokens");
  auto scaled = scale(tp, 2.0);
  bad += check(scaled.lhs.weight(Token::cbit()) == 4.0, "scaling doubles the weights");
  auto unchanged = compose(tp, scale(tp, 0.0));
  bad += check(unchanged.lhs.weight(Token::ebit()) == 1.0, "composing with a zero-scaled inequality");
  return bad;
}

int selftest_blackhole() {
  int bad = 0;
  auto bell = bell_state().to_density();
  bad += check(std::abs(blackhole_threshold(bell, {"A"}) - 1.0) < 1e-9, "one dropped ebit: threshold 1");
  auto prod = build_named_state("product:2");
  bad += check(blackhole_threshold(prod.rho, {"X1"}) < 1e-12, "uncorrelated pure system: threshold 0");
  return bad;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qregion: multiparty quantum-information quantities and distributed-compression rate regions"};
  app.require_subcommand(1);

  // ---- entropy ----
  Common c_entropy;
  std::string ent_state, ent_subset, ent_p;
  auto* cmd_entropy = app.add_subcommand("entropy", "Shannon or von Neumann entropy (bits)");
  cmd_entropy->add_option("--state", ent_state,
                          "State spec (bell, ghz:m, w:m, product:m, bell-plus-idle, file:path)");
  cmd_entropy->add_option("--subset", ent_subset, "Comma-separated subsystem indices");
  cmd_entropy->add_option("--p", ent_p, "Classical distribution, e.g. 0.5,0.5");
  add_common(cmd_entropy, c_entropy);

  // ---- mpinfo ----
  Common c_mpinfo;
  std::string mp_state, mp_parts, mp_cond;
  auto* cmd_mpinfo = app.add_subcommand("mpinfo", "Multiparty information, optionally conditioned");
  cmd_mpinfo->add_option("--state", mp_state, "State spec");
  cmd_mpinfo->add_option("--parts", mp_parts, "Party groups, e.g. 0;1;2 or 0,1;2");
  cmd_mpinfo->add_option("--cond", mp_cond, "Conditioning subsystem indices");
  add_common(cmd_mpinfo, c_mpinfo);

  // ---- esq ----
  Common c_esq;
  std::string esq_state, esq_parts;
  bool esq_pure_flag = false;
  int esq_de = 0, esq_df = 0, esq_restarts = 16;
  double esq_tol = 1e-7;
  auto* cmd_esq = app.add_subcommand("esq", "Squashed-entanglement value (pure) or upper bound (optimizer)");
  cmd_esq->add_option("--state", esq_state, "State spec");
  cmd_esq->add_option("--parts", esq_parts, "Party groups (default: one per subsystem)");
  cmd_esq->add_flag("--pure", esq_pure_flag, "Use the pure-state closed form");
  cmd_esq->add_option("--d-e", esq_de, "Extension dimension (default: dim of the state)");
  cmd_esq->add_option("--d-f", esq_df, "Environment dimension (default: dim of the state)");
  cmd_esq->add_option("--restarts", esq_restarts, "Optimizer restarts");
  cmd_esq->add_option("--tol", esq_tol, "Optimizer tolerance");
  add_common(cmd_esq, c_esq);

  // ---- region ----
  Common c_region;
  std::string rg_state, rg_emit = "h,v";
  int rg_ref = -1;
  bool rg_outer = false;
  int rg_de = 0, rg_restarts = 4;
  auto* cmd_region = app.add_subcommand("region", "Inner (and outer) distributed-compression rate region");
  cmd_region->add_option("--state", rg_state, "Pure state spec on senders + reference");
  cmd_region->add_option("--ref", rg_ref, "Reference subsystem index (default: last)");
  cmd_region->add_flag("--outer", rg_outer, "Derive outer-bound constants via squashed entanglement");
  cmd_region->add_option("--emit", rg_emit, "Which representations to emit: h, v, or h,v");
  cmd_region->add_option("--d-e", rg_de, "Extension dimension for the outer-bound optimizer (default 2)");
  cmd_region->add_option("--restarts", rg_restarts, "Optimizer restarts for the outer bound");
  add_common(cmd_region, c_region);

  // ---- vertices ----
  Common c_vertices;
  std::string vx_state;
  int vx_ref = -1;
  auto* cmd_vertices = app.add_subcommand("vertices", "Brute-force vertex enumeration (m <= 5)");
  cmd_vertices->add_option("--state", vx_state, "Pure state spec on senders + reference");
  cmd_vertices->add_option("--ref", vx_ref, "Reference subsystem index (default: last)");
  add_common(cmd_vertices, c_vertices);

  // ---- merge-region ----
  Common c_merge;
  std::string mg_state, mg_parts;
  auto* cmd_merge = app.add_subcommand("merge-region", "State-merging constants H(A_K | A_complement)");
  cmd_merge->add_option("--state", mg_state, "State spec");
  cmd_merge->add_option("--parts", mg_parts, "Party groups (default: one per subsystem)");
  add_common(cmd_merge, c_merge);

  // ---- sw-region ----
  Common c_sw;
  std::string sw_joint;
  auto* cmd_sw = app.add_subcommand("sw-region", "Classical Slepian-Wolf region of a joint distribution");
  cmd_sw->add_option("--joint", sw_joint, "JSON file: {\"shape\":[...], \"probs\":[...]}");
  add_common(cmd_sw, c_sw);

  // ---- typical ----
  Common c_typical;
  std::string ty_p, ty_schedule, ty_state, ty_subset;
  int ty_n = 0;
  double ty_eps = 0.1;
  auto* cmd_typical = app.add_subcommand("typical", "Exact typical-set statistics over type classes");
  cmd_typical->add_option("--p", ty_p, "Source distribution, e.g. 0.9,0.1");
  cmd_typical->add_option("--state", ty_state, "State spec; uses the spectrum of a reduced state");
  cmd_typical->add_option("--subset", ty_subset, "Subsystem indices for the spectrum (default: all)");
  cmd_typical->add_option("--n", ty_n, "Block length");
  cmd_typical->add_option("--epsilon", ty_eps, "Typicality slack in bits");
  cmd_typical->add_option("--schedule", ty_schedule, "Comma-separated block lengths (overrides --n)");
  add_common(cmd_typical, c_typical);

  // ---- decouple ----
  Common c_dec;
  int dc_das = 16, dc_dr = 2, dc_samples = 200;
  std::string dc_da1, dc_kind = "random";
  auto* cmd_dec = app.add_subcommand("decouple", "Monte Carlo decoupling sweep over split dimensions");
  cmd_dec->add_option("--das", dc_das, "System dimension d_AS");
  cmd_dec->add_option("--dr", dc_dr, "Reference dimension d_R");
  cmd_dec->add_option("--da1", dc_da1, "Comma-separated sent dimensions (default: power-of-2 divisors)");
  cmd_dec->add_option("--samples", dc_samples, "Haar samples per configuration");
  cmd_dec->add_option("--state-kind", dc_kind, "random | maxent")->check(CLI::IsMember({"random", "maxent"}));
  add_common(cmd_dec, c_dec);

  // ---- fqsw-rates ----
  Common c_fq;
  std::string fq_state, fq_order, fq_qubits;
  int fq_ref = -1, fq_samples = 100;
  bool fq_sim = false;
  auto* cmd_fq = app.add_subcommand("fqsw-rates", "Per-sender minimum rates; optional chain simulation");
  cmd_fq->add_option("--state", fq_state, "Pure state spec on senders + reference");
  cmd_fq->add_option("--ref", fq_ref, "Reference subsystem index (default: last)");
  cmd_fq->add_option("--order", fq_order, "Transmission order over sender indices (default: 0,1,...)");
  cmd_fq->add_flag("--sim", fq_sim, "Run the Monte Carlo chain simulation");
  cmd_fq->add_option("--qubits", fq_qubits, "Qubits sent per sender (required with --sim)");
  cmd_fq->add_option("--samples", fq_samples, "Haar samples per step");
  add_common(cmd_fq, c_fq);

  // ---- rescalc ----
  Common c_rc;
  std::string rc_builtin, rc_state, rc_derive;
  auto* cmd_rc = app.add_subcommand("rescalc", "Resource-inequality calculus on a concrete state");
  cmd_rc->add_option("--builtin", rc_builtin, "tp | sc | mother | father | fqsw | schumacher | merging");
  cmd_rc->add_option("--state", rc_state, "State spec for entropic coefficients");
  cmd_rc->add_option("--derive", rc_derive, "hashing | merging: compose with teleportation and report");
  add_common(cmd_rc, c_rc);

  // ---- blackhole ----
  Common c_bh;
  std::string bh_state, bh_a, bh_b2, bh_l;
  bool bh_lost = false;
  auto* cmd_bh = app.add_subcommand("blackhole", "Radiated-qubit thresholds");
  cmd_bh->add_option("--state", bh_state, "State spec");
  cmd_bh->add_option("--a", bh_a, "Subsystem indices of the dropped-in system A");
  cmd_bh->add_flag("--lost", bh_lost, "Lost-subsystem mode");
  cmd_bh->add_option("--b2", bh_b2, "Indices of the retained black-hole part B2 (lost mode)");
  cmd_bh->add_option("--l", bh_l, "Indices of the lost part L (lost mode)");
  add_common(cmd_bh, c_bh);

  try {
    app.parse(argc, argv);

    if (cmd_entropy->parsed()) {
      if (c_entropy.selftest) return selftest_entropy();
      if (ent_state.empty() == ent_p.empty())
        throw std::invalid_argument("entropy: give exactly one of --state or --p");
      double value;
      if (!ent_p.empty()) {
        value = shannon(parse_distribution(ent_p));
      } else {
        auto built = build_named_state(ent_state);
        if (ent_subset.empty()) throw std::invalid_argument("entropy: --subset is required with --state");
        value = von_neumann(built.rho, labels_at(built.rho, parse_ints(ent_subset)));
      }
      emit(c_entropy, fmt9(value));
      return 0;
    }

    if (cmd_mpinfo->parsed()) {
      if (c_mpinfo.selftest) return selftest_mpinfo();
      if (mp_state.empty()) throw std::invalid_argument("mpinfo: --state is required");
      auto built = build_named_state(mp_state);
      PartyPartition parts =
          mp_parts.empty() ? PartyPartition::singles(built.rho.labels) : parse_parts(built.rho, mp_parts);
      double value = mp_cond.empty()
                         ? multiparty_info(built.rho, parts)
                         : cond_multiparty_info(built.rho, parts, labels_at(built.rho, parse_ints(mp_cond)));
      emit(c_mpinfo, fmt9(value));
      return 0;
    }

    if (cmd_esq->parsed()) {
      if (c_esq.selftest) return selftest_esq();
      if (esq_state.empty()) throw std::invalid_argument("esq: --state is required");
      auto built = build_named_state(esq_state);
      PartyPartition parts =
          esq_parts.empty() ? PartyPartition::singles(built.rho.labels) : parse_parts(built.rho, esq_parts);
      if (esq_pure_flag) {
        emit(c_esq, fmt9(esq_pure(built.rho, parts)));
        return 0;
      }
      EsqOptions opts;
      opts.d_E = esq_de;
      opts.d_F = esq_df;
      opts.restarts = esq_restarts;
      opts.tol = esq_tol;
      opts.seed = c_esq.seed;
      opts.threads = c_esq.threads;
      auto res = esq_optimize(built.rho, parts, opts);
      if (c_esq.format == "json" && !c_esq.output.empty()) {
        json j;
        j["upper_bound"] = res.upper_bound;
        j["d_E"] = res.extension.d_out;
        j["d_F"] = res.extension.d_env;
        j["restarts_used"] = res.restarts_used;
        j["converged"] = res.converged;
        emit(c_esq, j.dump());
      } else {
        emit(c_esq, fmt9(res.upper_bound));
      }
      return 0;
    }

    auto region_inputs = [&](const std::string& spec, int ref_idx) {
      auto built = build_named_state(spec);
      const auto rho = built.rho;
      int m_total = rho.subsystem_count();
      int ref = ref_idx < 0 ? m_total - 1 : ref_idx;
      if (ref < 0 || ref >= m_total) throw std::invalid_argument("reference index out of range");
      PartyPartition senders;
      for (int i = 0; i < m_total; ++i)
        if (i != ref) senders.parts.push_back({rho.labels[i]});
      return std::make_tuple(rho, senders, rho.labels[ref]);
    };

    if (cmd_region->parsed()) {
      if (c_region.selftest) return selftest_region();
      if (rg_state.empty()) throw std::invalid_argument("region: --state is required");
      auto [rho, senders, ref_label] = region_inputs(rg_state, rg_ref);
      auto inner = inner_constants(rho, senders, ref_label);

      std::map<unsigned, bool> exactness;
      SetFunction chosen = inner;
      if (rg_outer) {
        std::map<unsigned, double> esq;
        int m = static_cast<int>(senders.parts.size());
        for (unsigned mask = 1; mask < (1u << m); ++mask) {
          if (std::popcount(mask) < 2) continue;
          std::vector<std::string> keep;
          PartyPartition sub;
          for (int i = 0; i < m; ++i)
            if (mask & (1u << i)) {
              keep.push_back(senders.parts[i][0]);
              sub.parts.push_back(senders.parts[i]);
            }
          auto marginal = partial_trace(rho, keep);
          if (marginal.purity() >= 1.0 - 1e-9) {
            esq[mask] = esq_pure(marginal, sub);
            exactness[mask] = true;
          } else if (multiparty_info(marginal, sub) < 1e-9) {
            esq[mask] = 0.0;  // product marginal
            exactness[mask] = true;
          } else {
            EsqOptions opts;
            opts.d_E = rg_de > 0 ? rg_de : 2;  // small default keeps the search tractable
            opts.restarts = rg_restarts;
            opts.seed = c_region.seed;
            opts.threads = c_region.threads;
            esq[mask] = esq_optimize(marginal, sub, opts).upper_bound;
            exactness[mask] = false;  // upper bound only: constants not certified
          }
        }
        chosen = outer_constants(inner, esq);
        for (int i = 0; i < static_cast<int>(senders.parts.size()); ++i) exactness[1u << i] = true;
      }

      // Outer constants built from optimizer upper bounds can lose
      // supermodularity; the permutation corners are then not the vertices,
      // so fall back to the brute-force oracle for the V-representation.
      RegionDescription region;
      if (superadditivity_check(chosen).holds) {
        region = export_region(chosen, exactness);
      } else {
        region.m = chosen.m;
        for (unsigned mask = 1; mask <= chosen.full_mask(); ++mask) {
          HalfSpace h;
          h.subset = mask;
          h.c = chosen.at(mask);
          auto it = exactness.find(mask);
          if (it != exactness.end()) h.exact = it->second ? 1 : 0;
          region.h_rep.push_back(h);
        }
        region.vertices = vertices_bruteforce(chosen);
        for (int i = 0; i < chosen.m; ++i) {
          RateTuple e = RateTuple::Zero(chosen.m);
          e[i] = 1.0;
          region.cone.push_back(e);
        }
      }
      if (c_region.format == "csv") {
        emit(c_region, region_to_csv(region));
      } else {
        json j = json::parse(region_to_json(region));
        bool want_h = rg_emit.find('h') != std::string::npos;
        bool want_v = rg_emit.find('v') != std::string::npos;
        if (!want_h) j.erase("h_rep");
        if (!want_v) {
          j.erase("vertices");
          j.erase("cone");
        }
        emit(c_region, j.dump());
      }
      return 0;
    }

    if (cmd_vertices->parsed()) {
      if (c_vertices.selftest) return selftest_vertices();
      if (vx_state.empty()) throw std::invalid_argument("vertices: --state is required");
      auto [rho, senders, ref_label] = region_inputs(vx_state, vx_ref);
      auto f = inner_constants(rho, senders, ref_label);
      auto verts = vertices_bruteforce(f);
      if (c_vertices.format == "csv") {
        RegionDescription region;
        region.m = f.m;
        region.vertices = verts;
        emit(c_vertices, region_to_csv(region));
      } else {
        json j;
        j["m"] = f.m;
        json vs = json::array();
        for (const auto& v : verts) {
          json row = json::array();
          for (int i = 0; i < f.m; ++i) row.push_back(v[i]);
          vs.push_back(row);
        }
        j["vertices"] = vs;
        emit(c_vertices, j.dump());
      }
      return 0;
    }

    if (cmd_merge->parsed()) {
      if (c_merge.selftest) return selftest_merge_region();
      if (mg_state.empty()) throw std::invalid_argument("merge-region: --state is required");
      auto built = build_named_state(mg_state);
      PartyPartition parts =
          mg_parts.empty() ? PartyPartition::singles(built.rho.labels) : parse_parts(built.rho, mg_parts);
      auto f = merging_region(built.rho, parts);
      auto region = export_region(f);
      emit(c_merge, c_merge.format == "csv" ? region_to_csv(region) : region_to_json(region));
      return 0;
    }

    if (cmd_sw->parsed()) {
      if (c_sw.selftest) return selftest_sw_region();
      if (sw_joint.empty()) throw std::invalid_argument("sw-region: --joint is required");
      std::ifstream in(sw_joint);
      if (!in) throw FormatError("cannot open joint file '" + sw_joint + "'");
      json j;
      try {
        j = json::parse(in);
      } catch (const json::parse_error& e) {
        throw FormatError(std::string("joint file: not valid JSON: ") + e.what());
      }
      if (!j.contains("shape") || !j.contains("probs")) throw FormatError("joint file: needs shape and probs");
      std::vector<int> shape = j["shape"].get<std::vector<int>>();
      std::vector<double> probs = j["probs"].get<std::vector<double>>();
      RealVector p(static_cast<long>(probs.size()));
      for (size_t i = 0; i < probs.size(); ++i) p[static_cast<long>(i)] = probs[i];
      auto f = classical_sw_setfunction(Distribution(p, shape));
      auto region = export_region(f);
      emit(c_sw, c_sw.format == "csv" ? region_to_csv(region) : region_to_json(region));
      return 0;
    }

    if (cmd_typical->parsed()) {
      if (c_typical.selftest) return selftest_typical();
      if (ty_p.empty() == ty_state.empty())
        throw std::invalid_argument("typical: give exactly one of --p or --state");
      Distribution source;
      if (!ty_p.empty()) {
        source = parse_distribution(ty_p);
      } else {
        auto built = build_named_state(ty_state);
        auto reduced =
            ty_subset.empty() ? built.rho : partial_trace(built.rho, labels_at(built.rho, parse_ints(ty_subset)));
        RealVector spectrum = clipped_spectrum(reduced.rho);
        source = Distribution(spectrum);
      }
      std::vector<int> schedule = ty_schedule.empty() ? std::vector<int>{ty_n} : parse_ints(ty_schedule);
      if (schedule.empty() || (schedule.size() == 1 && schedule[0] == 0))
        throw std::invalid_argument("typical: give --n or --schedule");
      if (c_typical.format == "csv") {
        std::ostringstream out;
        out << "n,mass,log_count,bound_log_count\n";
        for (int n : schedule) {
          auto rep = typical_stats(source, n, ty_eps);
          out << n << "," << fmt9(rep.mass) << "," << fmt9(rep.log_count) << "," << fmt9(rep.bound_log_count)
              << "\n";
        }
        emit(c_typical, out.str());
      } else {
        json arr = json::array();
        for (int n : schedule) {
          auto rep = typical_stats(source, n, ty_eps);
          json e;
          e["n"] = rep.n;
          e["epsilon"] = rep.epsilon;
          e["mass"] = rep.mass;
          e["log_count"] = rep.log_count;
          e["bound_log_count"] = rep.bound_log_count;
          arr.push_back(e);
        }
        emit(c_typical, arr.dump());
      }
      return 0;
    }

    if (cmd_dec->parsed()) {
      if (c_dec.selftest) return selftest_decouple();
      std::vector<int> splits;
      if (!dc_da1.empty()) {
        splits = parse_ints(dc_da1);
      } else {
        for (int d = 1; d <= dc_das; d *= 2)
          if (dc_das % d == 0) splits.push_back(d);
      }
      PureState psi;
      if (dc_kind == "maxent") {
        if (dc_das != dc_dr) throw std::invalid_argument("decouple: maxent needs --das equal to --dr");
        Vector amps = Vector::Zero(static_cast<long>(dc_das) * dc_dr);
        for (int i = 0; i < dc_das; ++i)
          amps[static_cast<long>(i) * dc_dr + i] = 1.0 / std::sqrt(static_cast<double>(dc_das));
        psi = PureState({dc_das, dc_dr}, {"A", "R"}, std::move(amps));
      } else {
        Rng rng(c_dec.seed);
        psi = haar_pure_state({dc_das, dc_dr}, {"A", "R"}, rng);
      }
      std::ostringstream csv;
      csv << "d_A1,mean_sq_td,rhs_bound,stderr\n";
      json arr = json::array();
      for (int d1 : splits) {
        DecouplingTrialConfig cfg;
        cfg.state = psi.to_density();
        cfg.system_label = "A";
        cfg.d_A1 = d1;
        cfg.d_A2 = dc_das / d1;
        cfg.samples = dc_samples;
        cfg.seed = c_dec.seed + static_cast<std::uint64_t>(d1);
        cfg.threads = c_dec.threads;
        auto rep = decoupling_mc(cfg);
        csv << d1 << "," << fmt9(rep.mean_sq_td) << "," << fmt9(rep.rhs_bound) << "," << fmt9(rep.std_error)
            << "\n";
        json e;
        e["d_A1"] = d1;
        e["mean_sq_td"] = rep.mean_sq_td;
        e["max_sq_td"] = rep.max_sq_td;
        e["rhs_bound"] = rep.rhs_bound;
        e["std_error"] = rep.std_error;
        e["holds"] = rep.holds;
        arr.push_back(e);
      }
      emit(c_dec, c_dec.format == "csv" ? csv.str() : arr.dump());
      return 0;
    }

    if (cmd_fq->parsed()) {
      if (c_fq.selftest) return selftest_fqsw();
      if (fq_state.empty()) throw std::invalid_argument("fqsw-rates: --state is required");
      auto built = build_named_state(fq_state);
      const auto& rho = built.rho;
      int m_total = rho.subsystem_count();
      int ref = fq_ref < 0 ? m_total - 1 : fq_ref;
      if (ref < 0 || ref >= m_total) throw std::invalid_argument("reference index out of range");
      std::vector<std::string> senders;
      for (int i = 0; i < m_total; ++i)
        if (i != ref) senders.push_back(rho.labels[i]);
      int m = static_cast<int>(senders.size());
      std::vector<int> order(m);
      if (fq_order.empty()) {
        for (int i = 0; i < m; ++i) order[i] = i;
      } else {
        order = parse_ints(fq_order);
      }

      if (fq_sim) {
        if (!built.ket.has_value()) throw std::invalid_argument("fqsw-rates --sim needs a pure state");
        if (fq_qubits.empty()) throw std::invalid_argument("fqsw-rates --sim needs --qubits");
        auto rep = fqsw_chain_sim(*built.ket, senders, order, rho.labels[ref], parse_ints(fq_qubits), fq_samples,
                                  c_fq.seed, c_fq.threads);
        json arr = json::array();
        for (const auto& step : rep.steps) {
          json e;
          e["sender"] = step.sender;
          e["min_rate"] = step.min_rate;
          e["qubits_sent"] = step.qubits_sent;
          e["at_or_above"] = step.at_or_above;
          e["mean_sq_td"] = step.mean_sq_td;
          e["mean_transfer_sq"] = step.mean_transfer_sq;
          e["rhs_bound"] = step.rhs_bound;
          e["std_error"] = step.std_error;
          arr.push_back(e);
        }
        json j;
        j["steps"] = arr;
        j["chained_residual"] = rep.chained_residual;
        emit(c_fq, j.dump());
      } else {
        std::ostringstream out;
        for (size_t k = 0; k < order.size(); ++k) {
          int who = order[k];
          if (who < 0 || who >= m) throw std::invalid_argument("order index out of range");
          std::vector<std::string> after;
          for (size_t j2 = k + 1; j2 < order.size(); ++j2) after.push_back(senders[order[j2]]);
          out << senders[who] << " " << fmt9(fqsw_min_rate(rho, senders[who], after, rho.labels[ref])) << "\n";
        }
        emit(c_fq, out.str());
      }
      return 0;
    }

    if (cmd_rc->parsed()) {
      if (c_rc.selftest) return selftest_rescalc();
      MultipartiteState state;
      bool have_state = !rc_state.empty();
      if (have_state) state = build_named_state(rc_state).rho;

      if (!rc_derive.empty()) {
        if (!have_state) throw std::invalid_argument("rescalc --derive needs --state");
        if (rc_derive != "hashing" && rc_derive != "merging")
          throw std::invalid_argument("rescalc: --derive must be hashing or merging");
        auto which = rc_derive == "hashing" ? Identity::HashingCoeff : Identity::MergingCoeff;
        auto rep = verify_identity(state, which);
        std::ostringstream out;
        out << "derived " << fmt9(rep.derived) << "\nexpected " << fmt9(rep.expected) << "\nholds "
            << (rep.holds ? "yes" : "no") << "\n";
        emit(c_rc, out.str());
        return rep.holds ? 0 : 1;
      }

      Builtin which;
      if (rc_builtin == "tp") which = Builtin::Teleportation;
      else if (rc_builtin == "sc") which = Builtin::SuperdenseCoding;
      else if (rc_builtin == "mother") which = Builtin::Mother;
      else if (rc_builtin == "father") which = Builtin::Father;
      else if (rc_builtin == "fqsw") which = Builtin::Fqsw;
      else if (rc_builtin == "schumacher") which = Builtin::Schumacher;
      else if (rc_builtin == "merging") which = Builtin::StateMerging;
      else throw std::invalid_argument("rescalc: unknown --builtin '" + rc_builtin + "'");
      auto ri = builtin(which, have_state ? &state : nullptr);
      emit(c_rc, pretty(ri));
      return 0;
    }

    if (cmd_bh->parsed()) {
      if (c_bh.selftest) return selftest_blackhole();
      if (bh_state.empty() || bh_a.empty()) throw std::invalid_argument("blackhole: --state and --a are required");
      auto built = build_named_state(bh_state);
      auto a = labels_at(built.rho, parse_ints(bh_a));
      double value;
      if (bh_lost) {
        if (bh_b2.empty() || bh_l.empty()) throw std::invalid_argument("blackhole --lost needs --b2 and --l");
        value = blackhole_threshold_lost(built.rho, a, labels_at(built.rho, parse_ints(bh_b2)),
                                         labels_at(built.rho, parse_ints(bh_l)));
      } else {
        value = blackhole_threshold(built.rho, a);
      }
      emit(c_bh, fmt9(value));
      return 0;
    }
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const CapacityError& e) {
    std::cerr << "capacity error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
