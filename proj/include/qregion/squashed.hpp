#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "qregion/entropy.hpp"
#include "qregion/states.hpp"

namespace qregion {

/// Stinespring channel from the purifying system R to an extension system E
/// with discarded environment F. The isometry is exp(i H) restricted to the
/// first d_input columns, where H is a Hermitian generator on the padded
/// space E (x) F parameterized by an unconstrained real vector.
struct ExtensionChannel {
  int d_input = 0;  // purifying system R
  int d_out = 0;    // extension system E
  int d_env = 0;    // discarded environment F
  RealVector params;

  ExtensionChannel() = default;
  ExtensionChannel(int d_input_, int d_out_, int d_env_, RealVector params_);

  int padded_dim() const { return d_out * d_env; }
  /// Realized isometry, (d_out * d_env) x d_input with V^dag V = 1.
  Matrix isometry() const;

  static ExtensionChannel random(int d_input, int d_out, int d_env, Rng& rng);
  /// Recover generator parameters whose realized isometry reproduces V
  /// (columns must be orthonormal).
  static ExtensionChannel from_isometry(const Matrix& v, int d_out, int d_env);
  /// Embed into a larger extension system by zero-padding E.
  ExtensionChannel embed(int new_d_out) const;
};

struct EsqOptions {
  int d_E = 0;    // 0: use dim(s)
  int d_F = 0;    // 0: use the purifying dimension
  int restarts = 16;
  double tol = 1e-7;
  int max_iters = 0;  // 0: scale with the padded dimension
  std::uint64_t seed = 7;
  int threads = 1;
  std::vector<ExtensionChannel> warm_starts;
};

struct EsqResult {
  double upper_bound = 0;  // bits; an upper bound at extension dimension d_E
  ExtensionChannel extension;
  int restarts_used = 0;
  bool converged = false;
};

/// For a pure state the infimum is attained by any extension, so the value
/// is (1/2) of the unconditioned multiparty information.
double esq_pure(const PureState& s, const PartyPartition& parts);
double esq_pure(const MultipartiteState& s, const PartyPartition& parts);

/// Classical-flag extension of a product-state ensemble; returns the
/// resulting (1/2) conditional multiparty information, which vanishes for
/// separable inputs.
double esq_flag_upper(const std::vector<std::pair<double, PureState>>& ensemble, const PartyPartition& parts);

/// Derivative-free search over bounded-dimension extensions. The result is
/// labeled an upper bound at extension dimension d_E: the true infimum may
/// require an arbitrarily large extension system.
EsqResult esq_optimize(const MultipartiteState& s, const PartyPartition& parts, const EsqOptions& opts = {});

/// Realize the extension on a state: purify, push R through the channel,
/// trace out the environment. The result carries one extra subsystem E.
MultipartiteState extended_state(const MultipartiteState& s, const ExtensionChannel& ext,
                                 const std::string& e_label = "E");

/// (1/2) I(parts | E) evaluated on the realized extension of s.
double esq_objective(const MultipartiteState& s, const PartyPartition& parts, const ExtensionChannel& ext);

}  // namespace qregion
