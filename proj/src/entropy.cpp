#include "qregion/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace qregion {

namespace {

void check_disjoint(std::initializer_list<const std::vector<std::string>*> groups, const char* what) {
  std::set<std::string> seen;
  for (const auto* g : groups)
    for (const auto& l : *g)
      if (!seen.insert(l).second) throw LabelError(std::string(what) + ": label '" + l + "' appears in two groups");
}

std::vector<std::string> joined(std::initializer_list<const std::vector<std::string>*> groups) {
  std::vector<std::string> out;
  for (const auto* g : groups) out.insert(out.end(), g->begin(), g->end());
  return out;
}

double entropy_of_spectrum(const RealVector& ev) {
  double h = 0;
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    if (ev[i] > tol::spectrum_cut) h -= ev[i] * std::log2(ev[i]);
  return h;
}

}  // namespace

Distribution::Distribution(RealVector probs_, std::vector<int> shape_)
    : probs(std::move(probs_)), shape(std::move(shape_)) {
  double sum = 0;
  for (Eigen::Index i = 0; i < probs.size(); ++i) {
    if (probs[i] < -1e-10) throw InvariantViolation("distribution has a negative probability");
    if (probs[i] < 0) probs[i] = 0;
    sum += probs[i];
  }
  if (std::abs(sum - 1.0) > 1e-10) throw InvariantViolation("distribution does not sum to 1 within 1e-10");
  if (!shape.empty()) {
    long d = 1;
    for (int a : shape) {
      if (a < 1) throw DimensionError("distribution shape entries must be positive");
      d *= a;
    }
    if (d != probs.size()) throw DimensionError("distribution shape does not match its length");
  }
}

Distribution Distribution::marginal(const std::vector<int>& keep_vars) const {
  if (shape.empty()) throw DimensionError("marginal: distribution has no joint shape");
  std::vector<long> strides(shape.size());
  long acc = 1;
  for (int k = static_cast<int>(shape.size()) - 1; k >= 0; --k) {
    strides[k] = acc;
    acc *= shape[k];
  }
  std::vector<int> kept = keep_vars;
  std::sort(kept.begin(), kept.end());
  long dk = 1;
  std::vector<int> new_shape;
  for (int v : kept) {
    if (v < 0 || v >= static_cast<int>(shape.size())) throw DimensionError("marginal: variable index out of range");
    dk *= shape[v];
    new_shape.push_back(shape[v]);
  }
  RealVector out = RealVector::Zero(dk);
  for (long i = 0; i < probs.size(); ++i) {
    long idx = 0;
    for (int v : kept) idx = idx * shape[v] + (i / strides[v]) % shape[v];
    out[idx] += probs[i];
  }
  return Distribution(std::move(out), std::move(new_shape));
}

PartyPartition PartyPartition::singles(const std::vector<std::string>& labels) {
  PartyPartition p;
  for (const auto& l : labels) p.parts.push_back({l});
  return p;
}

double shannon(const Distribution& p) { return entropy_of_spectrum(p.probs); }

double binary_entropy(double p) {
  if (p < 0 || p > 1) throw std::domain_error("binary_entropy: argument outside [0, 1]");
  double h = 0;
  if (p > tol::spectrum_cut) h -= p * std::log2(p);
  if (1 - p > tol::spectrum_cut) h -= (1 - p) * std::log2(1 - p);
  return h;
}

double von_neumann(const MultipartiteState& s, const std::vector<std::string>& subset) {
  if (subset.empty()) throw LabelError("von_neumann: empty subset");
  if (subset.size() == s.labels.size()) {
    std::set<std::string> a(subset.begin(), subset.end()), b(s.labels.begin(), s.labels.end());
    if (a == b) return entropy_of_spectrum(clipped_spectrum(s.rho));
  }
  return entropy_of_spectrum(clipped_spectrum(partial_trace(s, subset).rho));
}

double von_neumann(const PureState& s, const std::vector<std::string>& subset) {
  if (subset.empty()) throw LabelError("von_neumann: empty subset");
  if (subset.size() == s.labels.size()) return 0.0;
  return entropy_of_spectrum(clipped_spectrum(reduced_state(s, subset).rho));
}

double cond_entropy(const MultipartiteState& s, const std::vector<std::string>& a,
                    const std::vector<std::string>& b) {
  check_disjoint({&a, &b}, "cond_entropy");
  if (b.empty()) return von_neumann(s, a);
  return von_neumann(s, joined({&a, &b})) - von_neumann(s, b);
}

double mutual_info(const MultipartiteState& s, const std::vector<std::string>& a,
                   const std::vector<std::string>& b) {
  check_disjoint({&a, &b}, "mutual_info");
  return von_neumann(s, a) + von_neumann(s, b) - von_neumann(s, joined({&a, &b}));
}

double cond_mutual_info(const MultipartiteState& s, const std::vector<std::string>& a,
                        const std::vector<std::string>& b, const std::vector<std::string>& c) {
  check_disjoint({&a, &b, &c}, "cond_mutual_info");
  if (c.empty()) return mutual_info(s, a, b);
  return von_neumann(s, joined({&a, &c})) + von_neumann(s, joined({&b, &c})) -
         von_neumann(s, joined({&a, &b, &c})) - von_neumann(s, c);
}

namespace {

template <typename State>
double multiparty_info_impl(const State& s, const PartyPartition& parts) {
  if (parts.parts.size() < 2) throw LabelError("multiparty_info: needs at least 2 parts");
  std::vector<const std::vector<std::string>*> ptrs;
  for (const auto& p : parts.parts) {
    if (p.empty()) throw LabelError("multiparty_info: empty part");
    ptrs.push_back(&p);
  }
  {
    std::set<std::string> seen;
    for (const auto* g : ptrs)
      for (const auto& l : *g)
        if (!seen.insert(l).second) throw LabelError("multiparty_info: parts overlap on '" + l + "'");
  }
  std::vector<std::string> all;
  double sum = 0;
  for (const auto& p : parts.parts) {
    sum += von_neumann(s, p);
    all.insert(all.end(), p.begin(), p.end());
  }
  return sum - von_neumann(s, all);
}

template <typename State>
double cond_multiparty_info_impl(const State& s, const PartyPartition& parts, const std::vector<std::string>& e) {
  if (e.empty()) return multiparty_info_impl(s, parts);
  if (parts.parts.size() < 2) throw LabelError("cond_multiparty_info: needs at least 2 parts");
  std::vector<std::string> all = e;
  double sum = 0;
  for (const auto& p : parts.parts) {
    if (p.empty()) throw LabelError("cond_multiparty_info: empty part");
    for (const auto& l : p)
      if (std::find(e.begin(), e.end(), l) != e.end())
        throw LabelError("cond_multiparty_info: conditioning label '" + l + "' overlaps a part");
    std::vector<std::string> pe = p;
    pe.insert(pe.end(), e.begin(), e.end());
    sum += von_neumann(s, pe);
    all.insert(all.end(), p.begin(), p.end());
  }
  // sum H(XiE) - H(X1...XmE) - (m-1) H(E)
  double m = static_cast<double>(parts.parts.size());
  return sum - von_neumann(s, all) - (m - 1.0) * von_neumann(s, e);
}

}  // namespace

double multiparty_info(const MultipartiteState& s, const PartyPartition& parts) {
  return multiparty_info_impl(s, parts);
}
double multiparty_info(const PureState& s, const PartyPartition& parts) { return multiparty_info_impl(s, parts); }

double cond_multiparty_info(const MultipartiteState& s, const PartyPartition& parts,
                            const std::vector<std::string>& e) {
  return cond_multiparty_info_impl(s, parts, e);
}
double cond_multiparty_info(const PureState& s, const PartyPartition& parts, const std::vector<std::string>& e) {
  return cond_multiparty_info_impl(s, parts, e);
}

ContinuityReport af_conditional_continuity_check(const MultipartiteState& rho, const MultipartiteState& sigma,
                                                 const std::vector<std::string>& a,
                                                 const std::vector<std::string>& b) {
  if (rho.dims != sigma.dims) throw DimensionError("continuity check: dimension mismatch");
  // The bound is stated for the 1/2-normalized trace distance; the library
  // convention is unnormalized, so convert here.
  double eps = 0.5 * trace_distance(rho, sigma);
  eps = std::min(eps, 1.0);
  double lhs = std::abs(cond_entropy(rho, a, b) - cond_entropy(sigma, a, b));
  double log_da = std::log2(static_cast<double>(rho.dim_of(a)));
  double bound = 4.0 * eps * log_da + 2.0 * binary_entropy(eps);
  return ContinuityReport{eps, lhs, bound, lhs <= bound + 1e-9};
}

}  // namespace qregion
