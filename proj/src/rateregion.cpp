#include "qregion/rateregion.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <sstream>

#include <json.hpp>

namespace qregion {

namespace {

constexpr double kDedupTol = 1e-8;
constexpr double kMembershipSlack = 1e-9;

bool same_tuple(const RateTuple& a, const RateTuple& b) {
  return (a - b).cwiseAbs().maxCoeff() <= kDedupTol;
}

void push_unique(std::vector<RateTuple>& out, const RateTuple& q) {
  for (const auto& v : out)
    if (same_tuple(v, q)) return;
  out.push_back(q);
}

void require_superadditive(const SetFunction& f, const char* what) {
  auto rep = superadditivity_check(f);
  if (!rep.holds)
    throw std::invalid_argument(std::string(what) + ": set function is not superadditive (worst margin " +
                                std::to_string(rep.worst_margin) + ")");
}

}  // namespace

SuperadditivityReport superadditivity_check(const SetFunction& f) {
  SuperadditivityReport rep;
  rep.worst_margin = std::numeric_limits<double>::infinity();
  unsigned full = f.full_mask();
  for (unsigned k = 1; k <= full; ++k)
    for (unsigned l = 1; l <= full; ++l) {
      double margin = f.at(k | l) + f.at(k & l) - f.at(k) - f.at(l);
      if (margin < rep.worst_margin) {
        rep.worst_margin = margin;
        rep.worst_k = k;
        rep.worst_l = l;
      }
    }
  rep.holds = rep.worst_margin >= -1e-9;
  return rep;
}

namespace {

template <typename State>
SetFunction inner_constants_impl(const State& s, const PartyPartition& senders, const std::string& ref_label) {
  int m = static_cast<int>(senders.parts.size());
  if (m < 1) throw LabelError("inner_constants: needs at least one sender");
  if (m > 16) throw CapacityError("inner_constants: too many senders");
  std::vector<std::string> ref{ref_label};

  // The achievable-rate constants assume a globally pure state on
  // senders + reference.
  double global_purity;
  if constexpr (std::is_same_v<State, PureState>) {
    global_purity = 1.0;
  } else {
    global_purity = s.purity();
  }
  if (global_purity < 1.0 - 1e-9)
    throw InvariantViolation("inner_constants: global state on senders + reference must be pure");

  double h_r = von_neumann(s, ref);
  std::vector<double> h_single(m);
  for (int i = 0; i < m; ++i) h_single[i] = von_neumann(s, senders.parts[i]);

  SetFunction f(m);
  for (unsigned mask = 1; mask <= f.full_mask(); ++mask) {
    std::vector<std::string> ra = ref;
    double sum = 0;
    PartyPartition cross;  // K members plus R as one more party, for the cross-check
    for (int i = 0; i < m; ++i)
      if (mask & (1u << i)) {
        sum += h_single[i];
        ra.insert(ra.end(), senders.parts[i].begin(), senders.parts[i].end());
        cross.parts.push_back(senders.parts[i]);
      }
    double c = 0.5 * (sum + h_r - von_neumann(s, ra));
    cross.parts.push_back(ref);
    double c_mi = 0.5 * multiparty_info(s, cross);
    if (std::abs(c - c_mi) > 1e-9)
      throw InvariantViolation("inner_constants: entropy form and multiparty-information form disagree");
    f.at(mask) = c;
  }
  return f;
}

}  // namespace

SetFunction inner_constants(const MultipartiteState& s, const PartyPartition& senders,
                            const std::string& ref_label) {
  return inner_constants_impl(s, senders, ref_label);
}
SetFunction inner_constants(const PureState& s, const PartyPartition& senders, const std::string& ref_label) {
  return inner_constants_impl(s, senders, ref_label);
}

SetFunction outer_constants(const SetFunction& inner, const std::map<unsigned, double>& esq_per_subset) {
  SetFunction out = inner;
  for (unsigned mask = 1; mask <= inner.full_mask(); ++mask) {
    if (std::popcount(mask) < 2) continue;
    auto it = esq_per_subset.find(mask);
    if (it == esq_per_subset.end())
      throw std::invalid_argument("outer_constants: missing squashed-entanglement value for subset mask " +
                                  std::to_string(mask));
    out.at(mask) = inner.at(mask) - it->second;
  }
  return out;
}

RateTuple corner_point(const SetFunction& f, const std::vector<int>& perm) {
  if (static_cast<int>(perm.size()) != f.m) throw std::invalid_argument("corner_point: permutation length mismatch");
  std::vector<bool> seen(f.m, false);
  for (int p : perm) {
    if (p < 0 || p >= f.m || seen[p]) throw std::invalid_argument("corner_point: not a permutation");
    seen[p] = true;
  }
  require_superadditive(f, "corner_point");

  RateTuple q(f.m);
  unsigned suffix = 0;
  // Build suffix sets from the back: the last party in the order pays only
  // its singleton constant, earlier parties pay telescoping differences.
  for (int i = f.m - 1; i >= 0; --i) {
    unsigned prev = suffix;
    suffix |= 1u << perm[i];
    q[perm[i]] = f.at(suffix) - f.at(prev);
  }
  return q;
}

std::vector<RateTuple> corner_points_all(const SetFunction& f) {
  if (f.m > 7) throw CapacityError("corner_points_all: m > 7");
  require_superadditive(f, "corner_points_all");
  std::vector<int> perm(f.m);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<RateTuple> out;
  do {
    RateTuple q(f.m);
    unsigned suffix = 0;
    for (int i = f.m - 1; i >= 0; --i) {
      unsigned prev = suffix;
      suffix |= 1u << perm[i];
      q[perm[i]] = f.at(suffix) - f.at(prev);
    }
    push_unique(out, q);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

MembershipReport membership(const SetFunction& f, const RateTuple& q) {
  if (q.size() != f.m) throw DimensionError("membership: rate tuple has wrong length");
  MembershipReport rep;
  rep.worst_slack = std::numeric_limits<double>::infinity();
  for (unsigned mask = 1; mask <= f.full_mask(); ++mask) {
    double sum = 0;
    for (int i = 0; i < f.m; ++i)
      if (mask & (1u << i)) sum += q[i];
    double slack = sum - f.at(mask);
    rep.worst_slack = std::min(rep.worst_slack, slack);
    if (slack < -kMembershipSlack) rep.violated.push_back(mask);
    if (std::abs(slack) <= kDedupTol) rep.tight.push_back(mask);
  }
  rep.member = rep.violated.empty();
  return rep;
}

std::vector<RateTuple> vertices_bruteforce(const SetFunction& f) {
  if (f.m > 5) throw CapacityError("vertices_bruteforce: m > 5");
  int m = f.m;
  unsigned n_constraints = f.full_mask();
  std::vector<unsigned> masks;
  for (unsigned mask = 1; mask <= n_constraints; ++mask) masks.push_back(mask);

  std::vector<RateTuple> out;
  std::vector<int> pick(m);
  // Iterate over all m-subsets of the constraint hyperplanes.
  std::vector<int> idx(m);
  std::iota(idx.begin(), idx.end(), 0);
  while (true) {
    Eigen::MatrixXd a(m, m);
    Eigen::VectorXd b(m);
    for (int r = 0; r < m; ++r) {
      unsigned mask = masks[idx[r]];
      for (int c = 0; c < m; ++c) a(r, c) = (mask & (1u << c)) ? 1.0 : 0.0;
      b[r] = f.at(mask);
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
    lu.setThreshold(1e-10);
    if (lu.rank() == m) {
      RateTuple q = lu.solve(b);
      if (membership(f, q).member) push_unique(out, q);
    }
    // next combination
    int k = m - 1;
    while (k >= 0 && idx[k] == static_cast<int>(masks.size()) - m + k) --k;
    if (k < 0) break;
    ++idx[k];
    for (int j = k + 1; j < m; ++j) idx[j] = idx[j - 1] + 1;
  }
  return out;
}

SetFunction merging_region(const MultipartiteState& s, const PartyPartition& parts) {
  int m = static_cast<int>(parts.parts.size());
  if (m < 2) throw LabelError("merging_region: needs at least 2 parts");
  std::vector<std::string> all;
  for (const auto& p : parts.parts) all.insert(all.end(), p.begin(), p.end());
  double h_all = von_neumann(s, all);

  SetFunction f(m);
  for (unsigned mask = 1; mask <= f.full_mask(); ++mask) {
    std::vector<std::string> complement;
    for (int i = 0; i < m; ++i)
      if (!(mask & (1u << i))) complement.insert(complement.end(), parts.parts[i].begin(), parts.parts[i].end());
    double h_comp = complement.empty() ? 0.0 : von_neumann(s, complement);
    f.at(mask) = h_all - h_comp;  // H(A_K | A_complement)
  }
  return f;
}

RegionDescription export_region(const SetFunction& f, const std::map<unsigned, bool>& exactness) {
  require_superadditive(f, "export_region");
  RegionDescription r;
  r.m = f.m;
  for (unsigned mask = 1; mask <= f.full_mask(); ++mask) {
    HalfSpace h;
    h.subset = mask;
    h.c = f.at(mask);
    auto it = exactness.find(mask);
    if (it != exactness.end()) h.exact = it->second ? 1 : 0;
    r.h_rep.push_back(h);
  }
  r.vertices = corner_points_all(f);
  for (int i = 0; i < f.m; ++i) {
    RateTuple e = RateTuple::Zero(f.m);
    e[i] = 1.0;
    r.cone.push_back(e);
  }
  for (const auto& v : r.vertices) {
    auto rep = membership(f, v);
    if (rep.worst_slack < -kDedupTol)
      throw InvariantViolation("export_region: vertex violates a halfspace beyond 1e-8");
  }
  return r;
}

std::string region_to_json(const RegionDescription& r) {
  nlohmann::json j;
  j["m"] = r.m;
  nlohmann::json hs = nlohmann::json::array();
  for (const auto& h : r.h_rep) {
    nlohmann::json e;
    nlohmann::json subset = nlohmann::json::array();
    for (int i = 0; i < r.m; ++i)
      if (h.subset & (1u << i)) subset.push_back(i);
    e["subset"] = std::move(subset);
    e["c"] = h.c;
    if (h.exact >= 0) e["exact"] = (h.exact == 1);
    hs.push_back(std::move(e));
  }
  j["h_rep"] = std::move(hs);
  nlohmann::json vs = nlohmann::json::array();
  for (const auto& v : r.vertices) {
    nlohmann::json row = nlohmann::json::array();
    for (int i = 0; i < r.m; ++i) row.push_back(v[i]);
    vs.push_back(std::move(row));
  }
  j["vertices"] = std::move(vs);
  nlohmann::json cs = nlohmann::json::array();
  for (const auto& c : r.cone) {
    nlohmann::json row = nlohmann::json::array();
    for (int i = 0; i < r.m; ++i) row.push_back(c[i]);
    cs.push_back(std::move(row));
  }
  j["cone"] = std::move(cs);
  return j.dump();
}

std::string region_to_csv(const RegionDescription& r) {
  std::ostringstream out;
  for (int i = 0; i < r.m; ++i) out << (i ? "," : "") << "Q" << i;
  out << "\n";
  out.setf(std::ios::fixed);
  out.precision(9);
  for (const auto& v : r.vertices) {
    for (int i = 0; i < r.m; ++i) out << (i ? "," : "") << v[i];
    out << "\n";
  }
  return out.str();
}

}  // namespace qregion
