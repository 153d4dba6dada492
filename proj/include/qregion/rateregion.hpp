#pragma once

#include <map>
#include <string>
#include <vector>

#include "qregion/entropy.hpp"
#include "qregion/states.hpp"

namespace qregion {

using RateTuple = Eigen::VectorXd;

/// Constants C_K for every nonempty K of {0..m-1}, indexed by bitmask.
struct SetFunction {
  int m = 0;
  std::vector<double> values;  // size 1<<m, values[0] = 0

  SetFunction() = default;
  explicit SetFunction(int m_) : m(m_), values(static_cast<size_t>(1) << m_, 0.0) {
    if (m_ < 1 || m_ > 16) throw DimensionError("SetFunction: party count out of range");
  }

  unsigned full_mask() const { return (1u << m) - 1; }
  double at(unsigned mask) const { return values[mask]; }
  double& at(unsigned mask) { return values[mask]; }
};

struct SuperadditivityReport {
  bool holds = true;
  double worst_margin = 0;  // min over pairs of C_{K|L} + C_{K&L} - C_K - C_L
  unsigned worst_k = 0;
  unsigned worst_l = 0;
};

/// Exhaustive check of C_{K|L} + C_{K&L} >= C_K + C_L - 1e-9 over all pairs.
SuperadditivityReport superadditivity_check(const SetFunction& f);

/// Achievable-rate constants of a pure state on senders + reference:
/// C_K = (1/2)[sum_{k in K} H(A_k) + H(R) - H(R A_K)]. Cross-checked
/// internally against the multiparty-information form (1/2) I(A_{;K};R).
SetFunction inner_constants(const MultipartiteState& s, const PartyPartition& senders,
                            const std::string& ref_label);
SetFunction inner_constants(const PureState& s, const PartyPartition& senders, const std::string& ref_label);

/// Outer-bound constants: C'_K = C_K - E_sq(K) for |K| >= 2, singletons copied.
SetFunction outer_constants(const SetFunction& inner, const std::map<unsigned, double>& esq_per_subset);

/// Corner point of a supermodular region: perm[0] transmits first and
/// pays the full-conditioning constant, Q_{perm[i]} = C_{suffix(i)} -
/// C_{suffix(i+1)} over the suffix chain of the permutation.
RateTuple corner_point(const SetFunction& f, const std::vector<int>& perm);

/// All corner points over the m! permutations, deduplicated at 1e-8.
std::vector<RateTuple> corner_points_all(const SetFunction& f);

struct MembershipReport {
  bool member = true;
  double worst_slack = 0;            // min over K of sum_K q - C_K
  std::vector<unsigned> violated;    // slack < -1e-9
  std::vector<unsigned> tight;       // |slack| <= 1e-8
};
MembershipReport membership(const SetFunction& f, const RateTuple& q);

/// Independent vertex oracle: solve every linearly independent m-subset of
/// constraint hyperplanes, keep feasible solutions, deduplicate. m <= 5.
std::vector<RateTuple> vertices_bruteforce(const SetFunction& f);

/// State-merging constants f(K) = H(A_K | A_complement); entries may be
/// negative for entangled states.
SetFunction merging_region(const MultipartiteState& s, const PartyPartition& parts);

struct HalfSpace {
  unsigned subset = 0;   // bitmask over parties
  double c = 0;
  int exact = -1;        // -1 unknown, 0 upper-bounded constant, 1 exact
};

struct RegionDescription {
  int m = 0;
  std::vector<HalfSpace> h_rep;
  std::vector<RateTuple> vertices;
  std::vector<RateTuple> cone;  // the m coordinate axes
};

/// H-representation plus the corner-point V-representation; every vertex is
/// checked against every halfspace within 1e-8.
RegionDescription export_region(const SetFunction& f, const std::map<unsigned, bool>& exactness = {});

std::string region_to_json(const RegionDescription& r);
std::string region_to_csv(const RegionDescription& r);

}  // namespace qregion
