#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "qregion/errors.hpp"

namespace qregion {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Rng = std::mt19937_64;

/// Shared numeric tolerances. Entropic quantities downstream are quoted in
/// bits, so the state-level tolerances sit two to three orders below the
/// 1e-9 test tolerances.
namespace tol {
inline constexpr double hermiticity = 1e-10;
inline constexpr double trace_one = 1e-10;
inline constexpr double positivity = 1e-10;
inline constexpr double unitarity = 1e-9;
inline constexpr double unit_norm = 1e-10;
/// Eigenvalues at or below this count as zero in entropies and ranks.
inline constexpr double spectrum_cut = 1e-12;
}  // namespace tol

/// Dense matrices only; desk-scale cap on the total Hilbert-space dimension.
inline constexpr long kMaxTotalDim = 1L << 12;

/// Labeled multipartite density operator. The matrix is stored over the
/// tensor product of the subsystems in label order, first subsystem most
/// significant (Kronecker convention).
struct MultipartiteState {
  std::vector<int> dims;
  std::vector<std::string> labels;
  Matrix rho;

  MultipartiteState() = default;
  /// Validates Hermiticity and unit trace (1e-10 each) plus shape; the
  /// positivity invariant is enforced wherever the spectrum is consumed
  /// (see clipped_spectrum) and by validate().
  MultipartiteState(std::vector<int> dims_, std::vector<std::string> labels_, Matrix rho_);

  long dim() const { return rho.rows(); }
  int subsystem_count() const { return static_cast<int>(dims.size()); }
  int position_of(const std::string& label) const;
  int dim_of(const std::string& label) const { return dims[position_of(label)]; }
  long dim_of(const std::vector<std::string>& subset) const;

  double purity() const { return (rho * rho).trace().real(); }

  /// Full invariant check, including positivity of the spectrum.
  void validate() const;
};

/// Labeled multipartite ket (unit-norm amplitude vector, same index
/// convention as MultipartiteState).
struct PureState {
  std::vector<int> dims;
  std::vector<std::string> labels;
  Vector amplitudes;

  PureState() = default;
  PureState(std::vector<int> dims_, std::vector<std::string> labels_, Vector amplitudes_);

  long dim() const { return amplitudes.size(); }
  int subsystem_count() const;
  MultipartiteState to_density() const;
};

struct UnitaryMatrix {
  int dim = 0;
  Matrix matrix;

  UnitaryMatrix() = default;
  UnitaryMatrix(int dim_, Matrix matrix_);
};

// ---------------------------------------------------------------------------
// Spectrum helpers

/// Eigenvalues of a Hermitian operator with the positivity policy applied:
/// values in [-1e-10, 0] are clipped to 0, anything more negative is an
/// invariant violation.
RealVector clipped_spectrum(const Matrix& hermitian);

/// Hermitian square root via eigendecomposition, negative drift clipped.
Matrix matrix_sqrt_psd(const Matrix& hermitian);

// ---------------------------------------------------------------------------
// Core operations

/// Kronecker product of two states; labels must be disjoint.
MultipartiteState tensor(const MultipartiteState& a, const MultipartiteState& b);
PureState tensor(const PureState& a, const PureState& b);

/// Trace out everything not in `keep`; the kept subsystems retain their
/// original relative order.
MultipartiteState partial_trace(const MultipartiteState& s, const std::vector<std::string>& keep);

/// Marginal of a pure state on `keep`, computed without forming the full
/// density operator.
MultipartiteState reduced_state(const PureState& s, const std::vector<std::string>& keep);

/// Reorder the subsystems of a state to the given label order.
MultipartiteState permute_subsystems(const MultipartiteState& s, const std::vector<std::string>& order);
PureState permute_subsystems(const PureState& s, const std::vector<std::string>& order);

/// Merge adjacent-after-permutation subsystems into one labeled subsystem.
MultipartiteState merge_subsystems(const MultipartiteState& s, const std::vector<std::string>& group,
                                   const std::string& merged_label);

/// Split the subsystem `label` of dimension d1*d2 into two subsystems.
/// The first factor is the most significant index, matching the Kronecker
/// convention.
MultipartiteState split_subsystem(const MultipartiteState& s, const std::string& label, int d1, int d2,
                                  const std::string& label1, const std::string& label2);

/// Conjugate the state by a unitary acting on a single subsystem.
MultipartiteState apply_unitary(const MultipartiteState& s, const std::string& label, const Matrix& u);

/// Standard purification: eigendecompose, append a reference of the full
/// input dimension as the last subsystem.
PureState purify(const MultipartiteState& s, const std::string& ref_label);

/// Uhlmann fidelity F = (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2 in [0, 1].
double fidelity(const MultipartiteState& rho, const MultipartiteState& sigma);

/// Trace distance Tr|rho - sigma| in [0, 2]. Unnormalized: no 1/2 factor, so
/// orthogonal pure states are at distance 2.
double trace_distance(const MultipartiteState& rho, const MultipartiteState& sigma);

/// Haar-distributed random unitary (Ginibre + QR with phase fixing).
UnitaryMatrix haar_unitary(int d, Rng& rng);

/// Haar-random pure state on the given subsystem dimensions.
PureState haar_pure_state(std::vector<int> dims, std::vector<std::string> labels, Rng& rng);

// ---------------------------------------------------------------------------
// Named states

PureState bell_state();
PureState ghz_state(int m);
PureState w_state(int m);
PureState product_bell_pairs(int pairs);
/// Mixture of pure states over identical subsystems.
MultipartiteState mixture(const std::vector<std::pair<double, PureState>>& ensemble);

/// Builtin-state spec used by the CLI and tests: "bell", "ghz:m", "w:m",
/// "product:m", "bell-plus-idle", "file:path".
struct BuiltState {
  std::optional<PureState> ket;
  MultipartiteState rho;
};
BuiltState build_named_state(const std::string& spec);

}  // namespace qregion
