#include "qregion/classical.hpp"

#include <cmath>
#include <limits>
#include <numeric>

namespace qregion {

namespace {

constexpr double kLog2E = 1.4426950408889634;  // log2(e)
constexpr int kMaxBlock = 60;
constexpr long kMaxTypes = 4000;

double log2_multinomial(int n, const std::vector<int>& counts) {
  double lg = std::lgamma(n + 1.0);
  for (int c : counts) lg -= std::lgamma(c + 1.0);
  return lg * kLog2E;
}

long type_count(int n, int k) {
  // C(n + k - 1, k - 1), saturating
  double lg = std::lgamma(n + k + 0.0) - std::lgamma(n + 1.0) - std::lgamma(k + 0.0);
  double v = std::exp(lg);
  return v > 1e18 ? std::numeric_limits<long>::max() : static_cast<long>(v + 0.5);
}

template <typename Fn>
void for_each_type(int n, int k, std::vector<int>& counts, int pos, int left, Fn&& fn) {
  if (pos == k - 1) {
    counts[pos] = left;
    fn(counts);
    return;
  }
  for (int c = 0; c <= left; ++c) {
    counts[pos] = c;
    for_each_type(n, k, counts, pos + 1, left - c, fn);
  }
}

}  // namespace

TypicalReport typical_stats(const Distribution& p, int n, double epsilon) {
  if (n < 1) throw std::domain_error("typical_stats: block length must be at least 1");
  if (epsilon < 0) throw std::domain_error("typical_stats: epsilon must be nonnegative");

  // Zero-probability symbols can never appear in a typical sequence (the
  // lower probability bound is strictly positive), so drop them up front.
  std::vector<double> probs;
  for (Eigen::Index i = 0; i < p.probs.size(); ++i)
    if (p.probs[i] > 0) probs.push_back(p.probs[i]);
  int k = static_cast<int>(probs.size());
  if (n > kMaxBlock || type_count(n, k) > kMaxTypes)
    throw CapacityError("typical_stats: type-class enumeration infeasible at this alphabet/block size");

  double h = shannon(p);
  double lo = -n * (h + epsilon);
  double hi = -n * (h - epsilon);
  const double slop = 1e-9;  // sequences exactly on the boundary count as typical

  double mass = 0;
  double count = 0;
  std::vector<int> counts(k);
  for_each_type(n, k, counts, 0, n, [&](const std::vector<int>& type) {
    double log2p = 0;
    for (int i = 0; i < k; ++i) log2p += type[i] * std::log2(probs[i]);
    if (log2p < lo - slop || log2p > hi + slop) return;
    double log2mult = log2_multinomial(n, type);
    count += std::exp2(log2mult);
    mass += std::exp2(log2mult + log2p);
  });

  TypicalReport rep;
  rep.n = n;
  rep.epsilon = epsilon;
  rep.mass = std::min(mass, 1.0);
  rep.log_count = count > 0 ? std::log2(count) : -std::numeric_limits<double>::infinity();
  rep.bound_log_count = n * (h + epsilon);
  return rep;
}

double aep_tail(const Distribution& p, int n, double epsilon) {
  return 1.0 - typical_stats(p, n, epsilon).mass;
}

TypicalReport schumacher_rate_demo(const Distribution& eigvals, int n, double epsilon) {
  return typical_stats(eigvals, n, epsilon);
}

SetFunction classical_sw_setfunction(const Distribution& joint) {
  if (joint.shape.empty()) throw DimensionError("classical_sw_setfunction: joint needs a shape");
  int m = static_cast<int>(joint.shape.size());
  if (m > 6) throw CapacityError("classical_sw_setfunction: more than 6 variables");

  double h_all = shannon(joint);
  SetFunction f(m);
  for (unsigned mask = 1; mask <= f.full_mask(); ++mask) {
    std::vector<int> complement;
    for (int v = 0; v < m; ++v)
      if (!(mask & (1u << v))) complement.push_back(v);
    double h_comp = complement.empty() ? 0.0 : shannon(joint.marginal(complement));
    f.at(mask) = h_all - h_comp;
  }
  auto rep = superadditivity_check(f);
  if (!rep.holds) throw InvariantViolation("classical_sw_setfunction: constants are not supermodular");
  return f;
}

}  // namespace qregion
