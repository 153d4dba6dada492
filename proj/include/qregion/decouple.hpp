#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qregion/states.hpp"

namespace qregion {

/// One decoupling experiment: a state on the encoded system A^S plus one or
/// more reference subsystems (everything that is not the system counts as
/// the reference), with A^S split as A1 (sent) x A2 (kept).
struct DecouplingTrialConfig {
  MultipartiteState state;
  std::string system_label = "A";
  int d_A1 = 1;
  int d_A2 = 1;
  int samples = 200;
  std::uint64_t seed = 7;
  int threads = 1;
};

/// Squared trace norm of the decoupling residual
/// || sigma^{A2 R}(U) - 1/d_A2 (x) sigma^R ||_1^2 for one unitary.
double decoupling_trial(const DecouplingTrialConfig& cfg, const UnitaryMatrix& u);

struct DecouplingReport {
  double mean_sq_td = 0;
  double max_sq_td = 0;
  double rhs_bound = 0;  // (d_AS d_R / d_A1^2) Tr[psi^2]
  double std_error = 0;
  int samples = 0;
  bool holds = false;  // mean <= rhs + 3 standard errors
};

/// Estimate the Haar average of the squared residual by Monte Carlo and
/// compare against the one-shot decoupling bound.
DecouplingReport decoupling_mc(const DecouplingTrialConfig& cfg);

/// (1/2) I(sender ; peers_after + ref): the minimum qubit rate of one FQSW
/// step against the senders still to transmit plus the reference.
double fqsw_min_rate(const MultipartiteState& s, const std::string& sender,
                     const std::vector<std::string>& peers_after, const std::string& ref);
double fqsw_min_rate(const PureState& s, const std::string& sender, const std::vector<std::string>& peers_after,
                     const std::string& ref);

struct FqswStepReport {
  std::string sender;
  double min_rate = 0;       // (1/2) I(A_i ; A_after R)
  int qubits_sent = 0;
  bool at_or_above = false;  // qubits_sent >= ceil(min_rate)
  double mean_sq_td = 0;     // residual against 1/d_A2 (x) sigma^R, comparable to rhs_bound
  double rhs_bound = 0;
  double std_error = 0;
  /// State-transfer residual || sigma^{A2 R}(U) - sigma^{A2}(U) (x) sigma^R ||_1^2:
  /// zero exactly when the kept system carries no reference correlations.
  double mean_transfer_sq = 0;
};

struct FqswChainReport {
  std::vector<FqswStepReport> steps;
  double chained_residual = 0;  // sum over steps of sqrt(mean_transfer_sq)
};

/// Simulate the sequential multiparty protocol at fixed small dimensions:
/// each sender applies a random unitary and keeps all but 2^{q_i} of her
/// system; the step residual is measured against the still-unsent senders
/// plus the reference. Prior steps do not disturb a later step's marginal,
/// so each step is sampled from the input state directly.
FqswChainReport fqsw_chain_sim(const PureState& s, const std::vector<std::string>& senders,
                               const std::vector<int>& order, const std::string& ref,
                               const std::vector<int>& qubits_sent, int samples, std::uint64_t seed,
                               int threads = 1);

/// Radiated-qubit threshold log d_R >= H(A) for the simple black-hole model.
double blackhole_threshold(const MultipartiteState& s, const std::vector<std::string>& a);

/// Lost-subsystem variant: max{H(A), H(A) + (1/2) I(B2;L)}.
double blackhole_threshold_lost(const MultipartiteState& s, const std::vector<std::string>& a,
                                const std::vector<std::string>& b2, const std::vector<std::string>& l);

}  // namespace qregion
