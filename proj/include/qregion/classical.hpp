#pragma once

#include "qregion/entropy.hpp"
#include "qregion/rateregion.hpp"

namespace qregion {

/// Exact typical-set statistics computed over type classes.
struct TypicalReport {
  int n = 0;
  double epsilon = 0;
  double mass = 0;             // probability of the typical set
  double log_count = 0;        // log2 of the typical-set cardinality (-inf if empty)
  double bound_log_count = 0;  // n (H + epsilon)
};

/// A sequence is typical iff 2^{-n(H+eps)} <= p(x^n) <= 2^{-n(H-eps)};
/// p(x^n) depends only on the sequence's type, so mass and cardinality are
/// exact sums of multinomial terms (accumulated in log space).
TypicalReport typical_stats(const Distribution& p, int n, double epsilon);

/// 1 - mass: the probability that |-(1/n) log2 p(X^n) - H| exceeds epsilon.
double aep_tail(const Distribution& p, int n, double epsilon);

/// Typical-projector statistics of a spectrum: Tr[rho^n Pi] is the typical
/// mass of the eigenvalue distribution and Tr[Pi] its cardinality.
TypicalReport schumacher_rate_demo(const Distribution& eigvals, int n, double epsilon);

/// Classical Slepian-Wolf constants f(K) = H(X_K | X_complement) for every
/// nonempty K; checked supermodular before returning.
SetFunction classical_sw_setfunction(const Distribution& joint);

}  // namespace qregion
