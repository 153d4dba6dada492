#include "qregion/squashed.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <unsupported/Eigen/KroneckerProduct>

#include "nelder_mead.hpp"
#include "parallel.hpp"

namespace qregion {

namespace {

std::string fresh_label(const std::vector<std::string>& taken, const std::string& base) {
  if (std::find(taken.begin(), taken.end(), base) == taken.end()) return base;
  for (int k = 1;; ++k) {
    std::string cand = base + "_" + std::to_string(k);
    if (std::find(taken.begin(), taken.end(), cand) == taken.end()) return cand;
  }
}

Matrix hermitian_from_params(int d, const RealVector& params) {
  Matrix h = Matrix::Zero(d, d);
  int idx = 0;
  for (int i = 0; i < d; ++i) h(i, i) = params[idx++];
  int n_off = d * (d - 1) / 2;
  int re = idx, im = idx + n_off;
  for (int r = 0; r < d; ++r)
    for (int c = r + 1; c < d; ++c) {
      h(r, c) = Complex(params[re], params[im]);
      h(c, r) = std::conj(h(r, c));
      ++re;
      ++im;
    }
  return h;
}

RealVector params_from_hermitian(const Matrix& h) {
  int d = static_cast<int>(h.rows());
  RealVector params(d * d);
  int idx = 0;
  for (int i = 0; i < d; ++i) params[idx++] = h(i, i).real();
  int n_off = d * (d - 1) / 2;
  int re = idx, im = idx + n_off;
  for (int r = 0; r < d; ++r)
    for (int c = r + 1; c < d; ++c) {
      params[re++] = h(r, c).real();
      params[im++] = h(r, c).imag();
    }
  return params;
}

/// Apply the channel isometry to the purifying leg of |psi>^{X R} and return
/// the global pure state on X (x) E (x) F.
PureState push_through(const PureState& psi, const ExtensionChannel& ext, const std::string& e_label,
                       const std::string& f_label) {
  long d_r = ext.d_input;
  long d_x = psi.dim() / d_r;
  Matrix v = ext.isometry();
  long big = ext.padded_dim();
  Vector out(d_x * big);
  // psi is laid out with R last: psi[x * d_r + r].
  for (long x = 0; x < d_x; ++x) {
    auto block = psi.amplitudes.segment(x * d_r, d_r);
    out.segment(x * big, big) = v * block;
  }
  std::vector<int> dims(psi.dims.begin(), psi.dims.end() - 1);
  dims.push_back(ext.d_out);
  dims.push_back(ext.d_env);
  std::vector<std::string> labels(psi.labels.begin(), psi.labels.end() - 1);
  labels.push_back(e_label);
  labels.push_back(f_label);
  return PureState(std::move(dims), std::move(labels), std::move(out));
}

struct Workspace {
  PureState psi;  // purification of the input, reference last
  std::string e_label, f_label;
};

Workspace make_workspace(const MultipartiteState& s) {
  Workspace w;
  std::string ref = fresh_label(s.labels, "R");
  w.psi = purify(s, ref);
  w.e_label = fresh_label(s.labels, "E");
  w.f_label = fresh_label(s.labels, "F");
  return w;
}

double objective_on(const Workspace& w, const PartyPartition& parts, const ExtensionChannel& ext) {
  PureState big = push_through(w.psi, ext, w.e_label, w.f_label);
  return 0.5 * cond_multiparty_info(big, parts, {w.e_label});
}

}  // namespace

ExtensionChannel::ExtensionChannel(int d_input_, int d_out_, int d_env_, RealVector params_)
    : d_input(d_input_), d_out(d_out_), d_env(d_env_), params(std::move(params_)) {
  if (d_input < 1 || d_out < 1 || d_env < 1) throw DimensionError("ExtensionChannel: dimensions must be positive");
  long padded = static_cast<long>(d_out) * d_env;
  if (padded < d_input)
    throw DimensionError("ExtensionChannel: E (x) F must be at least as large as the input system");
  if (params.size() != padded * padded)
    throw DimensionError("ExtensionChannel: parameter vector must have (d_out*d_env)^2 entries");
}

Matrix ExtensionChannel::isometry() const {
  int d = padded_dim();
  Matrix h = hermitian_from_params(d, params);
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  Vector phases(d);
  for (int i = 0; i < d; ++i) phases[i] = std::polar(1.0, es.eigenvalues()[i]);
  Matrix u = es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
  return u.leftCols(d_input);
}

ExtensionChannel ExtensionChannel::random(int d_input, int d_out, int d_env, Rng& rng) {
  long padded = static_cast<long>(d_out) * d_env;
  std::normal_distribution<double> gauss(0.0, 1.0);
  RealVector params(padded * padded);
  for (Eigen::Index i = 0; i < params.size(); ++i) params[i] = gauss(rng);
  return ExtensionChannel(d_input, d_out, d_env, std::move(params));
}

ExtensionChannel ExtensionChannel::from_isometry(const Matrix& v, int d_out, int d_env) {
  long d = v.rows();
  long d_in = v.cols();
  if (d != static_cast<long>(d_out) * d_env) throw DimensionError("from_isometry: rows must equal d_out*d_env");
  if ((v.adjoint() * v - Matrix::Identity(d_in, d_in)).cwiseAbs().maxCoeff() > tol::unitarity)
    throw InvariantViolation("from_isometry: columns are not orthonormal within 1e-9");

  // Complete the columns to a unitary, then take the matrix logarithm via a
  // Schur decomposition (exact for normal matrices).
  Matrix u(d, d);
  u.leftCols(d_in) = v;
  if (d_in < d) {
    Eigen::HouseholderQR<Matrix> qr(v);
    Matrix q = qr.householderQ();
    u.rightCols(d - d_in) = q.rightCols(d - d_in);
  }
  Eigen::ComplexSchur<Matrix> schur(u);
  Vector angles(d);
  for (long i = 0; i < d; ++i) angles[i] = std::arg(schur.matrixT()(i, i));
  Matrix h = schur.matrixU() * angles.real().asDiagonal() * schur.matrixU().adjoint();
  h = (h + h.adjoint()) / 2.0;
  return ExtensionChannel(static_cast<int>(d_in), d_out, d_env, params_from_hermitian(h));
}

ExtensionChannel ExtensionChannel::embed(int new_d_out) const {
  if (new_d_out < d_out) throw DimensionError("embed: extension dimension cannot shrink");
  Matrix v = isometry();
  Matrix padded = Matrix::Zero(static_cast<long>(new_d_out) * d_env, d_input);
  padded.topRows(v.rows()) = v;  // E index is the most significant factor
  return from_isometry(padded, new_d_out, d_env);
}

double esq_pure(const PureState& s, const PartyPartition& parts) {
  std::set<std::string> used;
  for (const auto& p : parts.parts) used.insert(p.begin(), p.end());
  if (used != std::set<std::string>(s.labels.begin(), s.labels.end()))
    throw LabelError("esq_pure: parts must cover exactly the state's subsystems");
  return 0.5 * multiparty_info(s, parts);
}

double esq_pure(const MultipartiteState& s, const PartyPartition& parts) {
  if (s.purity() < 1.0 - 1e-9) throw InvariantViolation("esq_pure: input state is not pure");
  std::set<std::string> used;
  for (const auto& p : parts.parts) used.insert(p.begin(), p.end());
  if (used != std::set<std::string>(s.labels.begin(), s.labels.end()))
    throw LabelError("esq_pure: parts must cover exactly the state's subsystems");
  return 0.5 * multiparty_info(s, parts);
}

double esq_flag_upper(const std::vector<std::pair<double, PureState>>& ensemble, const PartyPartition& parts) {
  if (ensemble.empty()) throw std::invalid_argument("esq_flag_upper: empty ensemble");
  double total = 0;
  for (const auto& [p, ket] : ensemble) total += p;
  if (std::abs(total - 1.0) > 1e-9) throw InvariantViolation("esq_flag_upper: probabilities must sum to 1");

  const auto& first = ensemble.front().second;
  for (const auto& [p, ket] : ensemble) {
    if (ket.dims != first.dims || ket.labels != first.labels)
      throw LabelError("esq_flag_upper: ensemble members live on different systems");
    // A pure state is a product across the parts iff every part marginal is
    // itself pure.
    for (const auto& part : parts.parts) {
      MultipartiteState marg = reduced_state(ket, part);
      if (marg.purity() < 1.0 - 1e-9)
        throw InvariantViolation("esq_flag_upper: ensemble member is not a product across the parts");
    }
  }

  int j_dim = static_cast<int>(ensemble.size());
  long d = first.dim();
  Matrix rho = Matrix::Zero(d * j_dim, d * j_dim);
  for (int j = 0; j < j_dim; ++j) {
    Matrix proj = ensemble[j].second.amplitudes * ensemble[j].second.amplitudes.adjoint();
    Matrix flag = Matrix::Zero(j_dim, j_dim);
    flag(j, j) = 1.0;
    rho += ensemble[j].first * Eigen::kroneckerProduct(proj, flag);
  }
  std::string flag_label = fresh_label(first.labels, "E");
  std::vector<int> dims = first.dims;
  dims.push_back(j_dim);
  std::vector<std::string> labels = first.labels;
  labels.push_back(flag_label);
  MultipartiteState flagged(std::move(dims), std::move(labels), std::move(rho));
  return 0.5 * cond_multiparty_info(flagged, parts, {flag_label});
}

MultipartiteState extended_state(const MultipartiteState& s, const ExtensionChannel& ext,
                                 const std::string& e_label) {
  if (ext.d_input != s.dim()) throw DimensionError("extended_state: channel input must match the purifying system");
  if (std::find(s.labels.begin(), s.labels.end(), e_label) != s.labels.end())
    throw LabelError("extended_state: label '" + e_label + "' already in use");
  Workspace w = make_workspace(s);
  PureState big = push_through(w.psi, ext, e_label, w.f_label);
  std::vector<std::string> keep = s.labels;
  keep.push_back(e_label);
  return reduced_state(big, keep);
}

double esq_objective(const MultipartiteState& s, const PartyPartition& parts, const ExtensionChannel& ext) {
  if (ext.d_input != s.dim()) throw DimensionError("esq_objective: channel input must match the purifying system");
  Workspace w = make_workspace(s);
  return objective_on(w, parts, ext);
}

EsqResult esq_optimize(const MultipartiteState& s, const PartyPartition& parts, const EsqOptions& opts) {
  int d_r = static_cast<int>(s.dim());
  int d_e = opts.d_E > 0 ? opts.d_E : d_r;
  int d_f = opts.d_F > 0 ? opts.d_F : d_r;
  long padded = static_cast<long>(d_e) * d_f;
  if (padded < d_r) throw DimensionError("esq_optimize: d_E * d_F must be at least dim(s)");
  if (s.dim() * padded > kMaxTotalDim)
    throw CapacityError("esq_optimize: extended system exceeds the dense cap");
  for (const auto& ws : opts.warm_starts)
    if (ws.d_input != d_r || ws.d_out != d_e || ws.d_env != d_f)
      throw DimensionError("esq_optimize: warm start has mismatched dimensions");

  Workspace w = make_workspace(s);
  auto objective = [&](const RealVector& params) {
    return objective_on(w, parts, ExtensionChannel(d_r, d_e, d_f, params));
  };

  // Seed the search with the trivial extension (E fixed pure, R copied into
  // F) whenever it exists; it evaluates to the unconditioned multiparty
  // information, so the result can never exceed that value.
  std::vector<ExtensionChannel> starts;
  if (d_f >= d_r) {
    Matrix v = Matrix::Zero(padded, d_r);
    for (int r = 0; r < d_r; ++r) v(r, r) = 1.0;  // e = 0 block
    starts.push_back(ExtensionChannel::from_isometry(v, d_e, d_f));
  }
  starts.insert(starts.end(), opts.warm_starts.begin(), opts.warm_starts.end());

  int total = std::max<int>(opts.restarts, static_cast<int>(starts.size()));
  if (total < 1) total = 1;
  int max_iters = opts.max_iters > 0 ? opts.max_iters : 200 + 30 * static_cast<int>(padded);

  struct RestartOutcome {
    double value;
    RealVector params;
    bool converged;
  };
  std::vector<RestartOutcome> outcomes(total);
  detail::parallel_for(total, opts.threads, [&](int r) {
    RealVector start;
    if (r < static_cast<int>(starts.size())) {
      start = starts[r].params;
    } else {
      Rng rng(detail::stream_seed(opts.seed, r));
      start = ExtensionChannel::random(d_r, d_e, d_f, rng).params;
    }
    auto nm = detail::nelder_mead(objective, start, 0.15, opts.tol, max_iters);
    outcomes[r] = RestartOutcome{nm.value, nm.x, nm.converged};
  });

  EsqResult best;
  best.restarts_used = total;
  best.upper_bound = std::numeric_limits<double>::infinity();
  for (const auto& o : outcomes) {
    if (o.value < best.upper_bound) {
      best.upper_bound = o.value;
      best.extension = ExtensionChannel(d_r, d_e, d_f, o.params);
      best.converged = o.converged;
    }
  }
  if (best.upper_bound < 0 && best.upper_bound > -1e-9) best.upper_bound = 0;
  return best;
}

}  // namespace qregion
