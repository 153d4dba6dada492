#include "qregion/decouple.hpp"

#include <algorithm>
#include <cmath>

#include <unsupported/Eigen/KroneckerProduct>

#include "parallel.hpp"
#include "qregion/entropy.hpp"

namespace qregion {

namespace {

std::vector<std::string> reference_labels(const MultipartiteState& s, const std::string& system) {
  std::vector<std::string> refs;
  for (const auto& l : s.labels)
    if (l != system) refs.push_back(l);
  if (refs.empty()) throw LabelError("decoupling: state needs at least one reference subsystem");
  return refs;
}

std::string fresh(const std::vector<std::string>& taken, const std::string& base) {
  if (std::find(taken.begin(), taken.end(), base) == taken.end()) return base;
  for (int k = 1;; ++k) {
    std::string cand = base + "_" + std::to_string(k);
    if (std::find(taken.begin(), taken.end(), cand) == taken.end()) return cand;
  }
}

}  // namespace

namespace {

struct TrialValues {
  double mixed_form_sq = 0;    // against 1/d_A2 (x) sigma^R
  double product_form_sq = 0;  // against sigma^{A2}(U) (x) sigma^R
};

double trace_norm(const Matrix& hermitian) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().sum();
}

TrialValues decoupling_trial_values(const DecouplingTrialConfig& cfg, const UnitaryMatrix& u) {
  const auto& s = cfg.state;
  int d_as = s.dim_of(cfg.system_label);
  if (static_cast<long>(cfg.d_A1) * cfg.d_A2 != d_as)
    throw DimensionError("decoupling_trial: d_A1 * d_A2 must equal the system dimension");
  if (u.dim != d_as) throw DimensionError("decoupling_trial: unitary does not fit the system");

  auto refs = reference_labels(s, cfg.system_label);
  MultipartiteState rotated = apply_unitary(s, cfg.system_label, u.matrix);
  std::string a1 = fresh(s.labels, "A1_split");
  std::string a2 = fresh(s.labels, "A2_split");
  MultipartiteState split = split_subsystem(rotated, cfg.system_label, cfg.d_A1, cfg.d_A2, a1, a2);

  std::vector<std::string> keep{a2};
  keep.insert(keep.end(), refs.begin(), refs.end());
  MultipartiteState sigma = partial_trace(split, keep);
  // Bring A2 to the front so the comparison operators are plain Kronecker
  // products.
  sigma = permute_subsystems(sigma, keep);
  MultipartiteState sigma_r = partial_trace(sigma, refs);
  MultipartiteState sigma_a2 = partial_trace(sigma, {a2});

  TrialValues out;
  Matrix mixed = Eigen::kroneckerProduct(Matrix::Identity(cfg.d_A2, cfg.d_A2) * (1.0 / cfg.d_A2), sigma_r.rho);
  double td = trace_norm(sigma.rho - mixed);
  out.mixed_form_sq = td * td;
  Matrix prod = Eigen::kroneckerProduct(sigma_a2.rho, sigma_r.rho);
  double tp = trace_norm(sigma.rho - prod);
  out.product_form_sq = tp * tp;
  return out;
}

}  // namespace

double decoupling_trial(const DecouplingTrialConfig& cfg, const UnitaryMatrix& u) {
  return decoupling_trial_values(cfg, u).mixed_form_sq;
}

DecouplingReport decoupling_mc(const DecouplingTrialConfig& cfg) {
  if (cfg.samples < 30) throw std::invalid_argument("decoupling_mc: needs at least 30 samples");
  const auto& s = cfg.state;
  int d_as = s.dim_of(cfg.system_label);
  if (static_cast<long>(cfg.d_A1) * cfg.d_A2 != d_as)
    throw DimensionError("decoupling_mc: d_A1 * d_A2 must equal the system dimension");
  long d_r = s.dim() / d_as;

  std::vector<double> values(cfg.samples);
  detail::parallel_for(cfg.samples, cfg.threads, [&](int i) {
    Rng rng(detail::stream_seed(cfg.seed, i));
    UnitaryMatrix u = haar_unitary(d_as, rng);
    values[i] = decoupling_trial(cfg, u);
  });

  DecouplingReport rep;
  rep.samples = cfg.samples;
  double sum = 0, max = 0;
  for (double v : values) {
    sum += v;
    max = std::max(max, v);
  }
  rep.mean_sq_td = sum / cfg.samples;
  rep.max_sq_td = max;
  double var = 0;
  for (double v : values) var += (v - rep.mean_sq_td) * (v - rep.mean_sq_td);
  var /= cfg.samples > 1 ? cfg.samples - 1 : 1;
  rep.std_error = std::sqrt(var / cfg.samples);
  rep.rhs_bound = static_cast<double>(d_as) * d_r / (static_cast<double>(cfg.d_A1) * cfg.d_A1) * s.purity();
  rep.holds = rep.mean_sq_td <= rep.rhs_bound + 3.0 * rep.std_error;
  return rep;
}

double fqsw_min_rate(const MultipartiteState& s, const std::string& sender,
                     const std::vector<std::string>& peers_after, const std::string& ref) {
  std::vector<std::string> rest = peers_after;
  rest.push_back(ref);
  return 0.5 * mutual_info(s, {sender}, rest);
}

double fqsw_min_rate(const PureState& s, const std::string& sender, const std::vector<std::string>& peers_after,
                     const std::string& ref) {
  std::vector<std::string> keep = peers_after;
  keep.push_back(ref);
  keep.push_back(sender);
  return fqsw_min_rate(reduced_state(s, keep), sender, peers_after, ref);
}

FqswChainReport fqsw_chain_sim(const PureState& s, const std::vector<std::string>& senders,
                               const std::vector<int>& order, const std::string& ref,
                               const std::vector<int>& qubits_sent, int samples, std::uint64_t seed,
                               int threads) {
  int m = static_cast<int>(senders.size());
  if (static_cast<int>(order.size()) != m || static_cast<int>(qubits_sent.size()) != m)
    throw std::invalid_argument("fqsw_chain_sim: order and qubits_sent must list every sender");
  if (s.dim() > (1L << 10)) throw CapacityError("fqsw_chain_sim: total dimension above 2^10");
  std::vector<bool> seen(m, false);
  for (int p : order) {
    if (p < 0 || p >= m || seen[p]) throw std::invalid_argument("fqsw_chain_sim: order is not a permutation");
    seen[p] = true;
  }

  FqswChainReport rep;
  for (int step = 0; step < m; ++step) {
    int who = order[step];
    const std::string& sender = senders[who];
    std::vector<std::string> after;
    for (int j = step + 1; j < m; ++j) after.push_back(senders[order[j]]);

    FqswStepReport sr;
    sr.sender = sender;
    sr.qubits_sent = qubits_sent[who];
    sr.min_rate = fqsw_min_rate(s, sender, after, ref);
    sr.at_or_above = sr.qubits_sent >= static_cast<int>(std::ceil(sr.min_rate - 1e-9));

    // Marginal on (sender, still-unsent senders, reference); earlier steps
    // act on disjoint systems and leave this marginal unchanged.
    std::vector<std::string> keep{sender};
    keep.insert(keep.end(), after.begin(), after.end());
    keep.push_back(ref);

    DecouplingTrialConfig cfg;
    cfg.state = reduced_state(s, keep);
    cfg.system_label = sender;
    int d = cfg.state.dim_of(sender);
    cfg.d_A1 = 1 << sr.qubits_sent;
    if (cfg.d_A1 > d || d % cfg.d_A1 != 0)
      throw DimensionError("fqsw_chain_sim: 2^qubits_sent must divide the sender dimension");
    cfg.d_A2 = d / cfg.d_A1;
    cfg.seed = detail::stream_seed(seed, static_cast<std::uint64_t>(step));

    if (samples < 30) throw std::invalid_argument("fqsw_chain_sim: needs at least 30 samples");
    long d_ref = cfg.state.dim() / d;
    std::vector<TrialValues> values(samples);
    detail::parallel_for(samples, threads, [&](int i) {
      Rng rng(detail::stream_seed(cfg.seed, i));
      UnitaryMatrix u = haar_unitary(d, rng);
      values[i] = decoupling_trial_values(cfg, u);
    });
    double sum_thm = 0, sum_thm_sq = 0, sum_tr = 0;
    for (const auto& v : values) {
      sum_thm += v.mixed_form_sq;
      sum_thm_sq += v.mixed_form_sq * v.mixed_form_sq;
      sum_tr += v.product_form_sq;
    }
    sr.mean_sq_td = sum_thm / samples;
    sr.mean_transfer_sq = sum_tr / samples;
    double var = (sum_thm_sq / samples - sr.mean_sq_td * sr.mean_sq_td) * samples / (samples - 1);
    sr.std_error = std::sqrt(std::max(0.0, var) / samples);
    sr.rhs_bound =
        static_cast<double>(d) * d_ref / (static_cast<double>(cfg.d_A1) * cfg.d_A1) * cfg.state.purity();
    rep.steps.push_back(sr);
    rep.chained_residual += std::sqrt(sr.mean_transfer_sq);
  }
  return rep;
}

double blackhole_threshold(const MultipartiteState& s, const std::vector<std::string>& a) {
  return von_neumann(s, a);
}

double blackhole_threshold_lost(const MultipartiteState& s, const std::vector<std::string>& a,
                                const std::vector<std::string>& b2, const std::vector<std::string>& l) {
  double h_a = von_neumann(s, a);
  double i_b2l = mutual_info(s, b2, l);
  return std::max(h_a, h_a + 0.5 * i_b2l);
}

}  // namespace qregion
