#pragma once

#include <vector>

#include "qregion/states.hpp"

namespace qregion {

/// Probability distribution; `shape` carries per-variable alphabet sizes for
/// multi-variable joints (empty for a single variable).
struct Distribution {
  RealVector probs;
  std::vector<int> shape;

  Distribution() = default;
  explicit Distribution(RealVector probs_, std::vector<int> shape_ = {});

  int variable_count() const { return shape.empty() ? 1 : static_cast<int>(shape.size()); }
  /// Marginal over the given variable positions (joint distributions only).
  Distribution marginal(const std::vector<int>& keep_vars) const;
};

/// Ordered disjoint label groups, one per party, with an optional
/// conditioning group.
struct PartyPartition {
  std::vector<std::vector<std::string>> parts;
  std::vector<std::string> conditioning;

  static PartyPartition singles(const std::vector<std::string>& labels);
};

/// All entropies are base-2, in bits; eigenvalues below 1e-12 are dropped.
double shannon(const Distribution& p);
double binary_entropy(double p);

double von_neumann(const MultipartiteState& s, const std::vector<std::string>& subset);
double von_neumann(const PureState& s, const std::vector<std::string>& subset);

/// H(A|B) = H(AB) - H(B); may be negative for entangled states.
double cond_entropy(const MultipartiteState& s, const std::vector<std::string>& a,
                    const std::vector<std::string>& b);
/// I(A;B) = H(A) + H(B) - H(AB).
double mutual_info(const MultipartiteState& s, const std::vector<std::string>& a,
                   const std::vector<std::string>& b);
/// I(A;B|C) = H(AC) + H(BC) - H(ABC) - H(C); nonnegative by strong
/// subadditivity.
double cond_mutual_info(const MultipartiteState& s, const std::vector<std::string>& a,
                        const std::vector<std::string>& b, const std::vector<std::string>& c);

/// I(X1;...;Xm) = sum_i H(Xi) - H(X1...Xm); zero exactly for full tensor
/// products. (The intersection-style alternative with alternating signs is
/// computable from the same entropies but can go negative and is not
/// exposed as a named operation.)
double multiparty_info(const MultipartiteState& s, const PartyPartition& parts);
double multiparty_info(const PureState& s, const PartyPartition& parts);

/// I(X1;...;Xm|E) = sum_i H(XiE) - H(X1...XmE) - (m-1)H(E).
double cond_multiparty_info(const MultipartiteState& s, const PartyPartition& parts,
                            const std::vector<std::string>& e);
double cond_multiparty_info(const PureState& s, const PartyPartition& parts,
                            const std::vector<std::string>& e);

/// Conditional-entropy continuity check: with eps = (1/2)Tr|rho - sigma|,
/// |H(A|B)_rho - H(A|B)_sigma| <= 4 eps log2(dA) + 2 h(eps).
struct ContinuityReport {
  double epsilon;
  double lhs;
  double bound;
  bool holds;
};
ContinuityReport af_conditional_continuity_check(const MultipartiteState& rho, const MultipartiteState& sigma,
                                                 const std::vector<std::string>& a,
                                                 const std::vector<std::string>& b);

}  // namespace qregion
