#include "qregion/states.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include <unsupported/Eigen/KroneckerProduct>

#include "qregion/serialization.hpp"

namespace qregion {

namespace {

long product_of(const std::vector<int>& dims) {
  long p = 1;
  for (int d : dims) p *= d;
  return p;
}

void check_layout(const std::vector<int>& dims, const std::vector<std::string>& labels, long side,
                  const char* what) {
  if (dims.size() != labels.size()) throw LabelError(std::string(what) + ": dims/labels length mismatch");
  if (dims.empty()) throw LabelError(std::string(what) + ": state needs at least one subsystem");
  for (int d : dims)
    if (d < 1) throw DimensionError(std::string(what) + ": subsystem dimensions must be positive");
  std::set<std::string> seen(labels.begin(), labels.end());
  if (seen.size() != labels.size()) throw LabelError(std::string(what) + ": duplicate subsystem label");
  long total = product_of(dims);
  if (total != side) throw DimensionError(std::string(what) + ": matrix side does not match product of dims");
  if (total > kMaxTotalDim) throw CapacityError(std::string(what) + ": total dimension exceeds the dense cap");
}

/// Strides of each subsystem index, first subsystem most significant.
std::vector<long> strides_of(const std::vector<int>& dims) {
  std::vector<long> s(dims.size());
  long acc = 1;
  for (int k = static_cast<int>(dims.size()) - 1; k >= 0; --k) {
    s[k] = acc;
    acc *= dims[k];
  }
  return s;
}

/// Flat offsets of a subsystem group: offsets[j] = full-space offset of the
/// j-th joint index over `positions`, first listed position most significant.
std::vector<long> group_offsets(const std::vector<int>& dims, const std::vector<int>& positions) {
  auto strides = strides_of(dims);
  long total = 1;
  for (int p : positions) total *= dims[p];
  std::vector<long> offsets(total, 0);
  long suffix = total;
  for (int p : positions) {
    suffix /= dims[p];
    for (long i = 0; i < total; ++i) {
      long digit = (i / suffix) % dims[p];
      offsets[i] += digit * strides[p];
    }
  }
  return offsets;
}

std::vector<int> positions_of(const std::vector<std::string>& labels, const std::vector<std::string>& subset,
                              const char* what) {
  std::vector<int> pos;
  pos.reserve(subset.size());
  std::set<std::string> seen;
  for (const auto& l : subset) {
    auto it = std::find(labels.begin(), labels.end(), l);
    if (it == labels.end()) throw LabelError(std::string(what) + ": unknown label '" + l + "'");
    if (!seen.insert(l).second) throw LabelError(std::string(what) + ": label '" + l + "' repeated");
    pos.push_back(static_cast<int>(it - labels.begin()));
  }
  return pos;
}

}  // namespace

MultipartiteState::MultipartiteState(std::vector<int> dims_, std::vector<std::string> labels_, Matrix rho_)
    : dims(std::move(dims_)), labels(std::move(labels_)), rho(std::move(rho_)) {
  if (rho.rows() != rho.cols()) throw DimensionError("density matrix must be square");
  check_layout(dims, labels, rho.rows(), "MultipartiteState");
  double herm = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
  if (herm > tol::hermiticity) throw InvariantViolation("density matrix is not Hermitian within 1e-10");
  double tr = rho.trace().real();
  if (std::abs(tr - 1.0) > tol::trace_one) throw InvariantViolation("density matrix trace differs from 1 beyond 1e-10");
}

int MultipartiteState::position_of(const std::string& label) const {
  auto it = std::find(labels.begin(), labels.end(), label);
  if (it == labels.end()) throw LabelError("unknown label '" + label + "'");
  return static_cast<int>(it - labels.begin());
}

long MultipartiteState::dim_of(const std::vector<std::string>& subset) const {
  long d = 1;
  for (const auto& l : subset) d *= dims[position_of(l)];
  return d;
}

void MultipartiteState::validate() const {
  clipped_spectrum(rho);  // throws on eigenvalues below -1e-10
}

PureState::PureState(std::vector<int> dims_, std::vector<std::string> labels_, Vector amplitudes_)
    : dims(std::move(dims_)), labels(std::move(labels_)), amplitudes(std::move(amplitudes_)) {
  check_layout(dims, labels, amplitudes.size(), "PureState");
  if (std::abs(amplitudes.norm() - 1.0) > tol::unit_norm)
    throw InvariantViolation("ket norm differs from 1 beyond 1e-10");
}

MultipartiteState PureState::to_density() const {
  Matrix rho = amplitudes * amplitudes.adjoint();
  return MultipartiteState(dims, labels, std::move(rho));
}

UnitaryMatrix::UnitaryMatrix(int dim_, Matrix matrix_) : dim(dim_), matrix(std::move(matrix_)) {
  if (dim < 1) throw DimensionError("unitary dimension must be positive");
  if (matrix.rows() != dim || matrix.cols() != dim) throw DimensionError("unitary matrix has wrong shape");
  double dev = (matrix.adjoint() * matrix - Matrix::Identity(dim, dim)).cwiseAbs().maxCoeff();
  if (dev > tol::unitarity) throw InvariantViolation("matrix is not unitary within 1e-9");
}

RealVector clipped_spectrum(const Matrix& hermitian) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian, Eigen::EigenvaluesOnly);
  RealVector ev = es.eigenvalues();
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev[i] < -tol::positivity)
      throw InvariantViolation("operator has an eigenvalue below -1e-10: " + std::to_string(ev[i]));
    if (ev[i] < 0) ev[i] = 0;
  }
  return ev;
}

Matrix matrix_sqrt_psd(const Matrix& hermitian) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian);
  RealVector ev = es.eigenvalues();
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev[i] < -tol::positivity)
      throw InvariantViolation("operator has an eigenvalue below -1e-10: " + std::to_string(ev[i]));
    ev[i] = ev[i] > 0 ? std::sqrt(ev[i]) : 0.0;
  }
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

MultipartiteState tensor(const MultipartiteState& a, const MultipartiteState& b) {
  for (const auto& l : b.labels)
    if (std::find(a.labels.begin(), a.labels.end(), l) != a.labels.end())
      throw LabelError("tensor: duplicate label '" + l + "'");
  std::vector<int> dims = a.dims;
  dims.insert(dims.end(), b.dims.begin(), b.dims.end());
  std::vector<std::string> labels = a.labels;
  labels.insert(labels.end(), b.labels.begin(), b.labels.end());
  Matrix rho = Eigen::kroneckerProduct(a.rho, b.rho);
  return MultipartiteState(std::move(dims), std::move(labels), std::move(rho));
}

PureState tensor(const PureState& a, const PureState& b) {
  for (const auto& l : b.labels)
    if (std::find(a.labels.begin(), a.labels.end(), l) != a.labels.end())
      throw LabelError("tensor: duplicate label '" + l + "'");
  std::vector<int> dims = a.dims;
  dims.insert(dims.end(), b.dims.begin(), b.dims.end());
  std::vector<std::string> labels = a.labels;
  labels.insert(labels.end(), b.labels.begin(), b.labels.end());
  Vector amps = Eigen::kroneckerProduct(a.amplitudes, b.amplitudes);
  return PureState(std::move(dims), std::move(labels), std::move(amps));
}

MultipartiteState partial_trace(const MultipartiteState& s, const std::vector<std::string>& keep) {
  if (keep.empty()) throw LabelError("partial_trace: keep set must be nonempty");
  std::vector<int> keep_pos = positions_of(s.labels, keep, "partial_trace");
  std::sort(keep_pos.begin(), keep_pos.end());  // kept subsystems keep their original order
  std::vector<int> tr_pos;
  for (int p = 0; p < s.subsystem_count(); ++p)
    if (!std::binary_search(keep_pos.begin(), keep_pos.end(), p)) tr_pos.push_back(p);

  if (tr_pos.empty()) return s;

  auto keep_off = group_offsets(s.dims, keep_pos);
  auto tr_off = group_offsets(s.dims, tr_pos);
  long dk = static_cast<long>(keep_off.size());
  long dt = static_cast<long>(tr_off.size());

  Matrix out = Matrix::Zero(dk, dk);
  for (long r = 0; r < dk; ++r)
    for (long c = 0; c < dk; ++c) {
      Complex acc(0, 0);
      for (long t = 0; t < dt; ++t) acc += s.rho(keep_off[r] + tr_off[t], keep_off[c] + tr_off[t]);
      out(r, c) = acc;
    }

  std::vector<int> dims;
  std::vector<std::string> labels;
  for (int p : keep_pos) {
    dims.push_back(s.dims[p]);
    labels.push_back(s.labels[p]);
  }
  return MultipartiteState(std::move(dims), std::move(labels), std::move(out));
}

MultipartiteState reduced_state(const PureState& s, const std::vector<std::string>& keep) {
  if (keep.empty()) throw LabelError("reduced_state: keep set must be nonempty");
  std::vector<int> keep_pos = positions_of(s.labels, keep, "reduced_state");
  std::sort(keep_pos.begin(), keep_pos.end());
  std::vector<int> tr_pos;
  for (int p = 0; p < s.subsystem_count(); ++p)
    if (!std::binary_search(keep_pos.begin(), keep_pos.end(), p)) tr_pos.push_back(p);

  auto keep_off = group_offsets(s.dims, keep_pos);
  auto tr_off = group_offsets(s.dims, tr_pos);
  long dk = static_cast<long>(keep_off.size());
  long dt = static_cast<long>(tr_off.size());

  // M(k, t) = amplitude at kept index k, traced index t; marginal = M M^dag.
  Matrix m(dk, dt);
  for (long k = 0; k < dk; ++k)
    for (long t = 0; t < dt; ++t) m(k, t) = s.amplitudes[keep_off[k] + tr_off[t]];
  Matrix out = m * m.adjoint();

  std::vector<int> dims;
  std::vector<std::string> labels;
  for (int p : keep_pos) {
    dims.push_back(s.dims[p]);
    labels.push_back(s.labels[p]);
  }
  return MultipartiteState(std::move(dims), std::move(labels), std::move(out));
}

int PureState::subsystem_count() const { return static_cast<int>(dims.size()); }

namespace {

std::vector<long> permutation_map(const std::vector<int>& dims, const std::vector<int>& order) {
  // new flat index -> old flat index
  std::vector<int> new_dims(order.size());
  for (size_t k = 0; k < order.size(); ++k) new_dims[k] = dims[order[k]];
  auto old_strides = strides_of(dims);
  auto new_strides = strides_of(new_dims);
  long total = product_of(dims);
  std::vector<long> map(total);
  for (long i = 0; i < total; ++i) {
    long rem = i, old_index = 0;
    for (size_t k = 0; k < order.size(); ++k) {
      long digit = rem / new_strides[k];
      rem %= new_strides[k];
      old_index += digit * old_strides[order[k]];
    }
    map[i] = old_index;
  }
  return map;
}

}  // namespace

MultipartiteState permute_subsystems(const MultipartiteState& s, const std::vector<std::string>& order) {
  if (order.size() != s.labels.size()) throw LabelError("permute_subsystems: order must list every label");
  std::vector<int> pos = positions_of(s.labels, order, "permute_subsystems");
  auto map = permutation_map(s.dims, pos);
  long d = s.dim();
  Matrix out(d, d);
  for (long r = 0; r < d; ++r)
    for (long c = 0; c < d; ++c) out(r, c) = s.rho(map[r], map[c]);
  std::vector<int> dims(pos.size());
  for (size_t k = 0; k < pos.size(); ++k) dims[k] = s.dims[pos[k]];
  return MultipartiteState(std::move(dims), order, std::move(out));
}

PureState permute_subsystems(const PureState& s, const std::vector<std::string>& order) {
  if (order.size() != s.labels.size()) throw LabelError("permute_subsystems: order must list every label");
  std::vector<int> pos = positions_of(s.labels, order, "permute_subsystems");
  auto map = permutation_map(s.dims, pos);
  long d = s.dim();
  Vector out(d);
  for (long i = 0; i < d; ++i) out[i] = s.amplitudes[map[i]];
  std::vector<int> dims(pos.size());
  for (size_t k = 0; k < pos.size(); ++k) dims[k] = s.dims[pos[k]];
  return PureState(std::move(dims), order, std::move(out));
}

MultipartiteState merge_subsystems(const MultipartiteState& s, const std::vector<std::string>& group,
                                   const std::string& merged_label) {
  if (group.empty()) throw LabelError("merge_subsystems: empty group");
  // Bring the group together (in the given order) ahead of the rest.
  std::vector<std::string> order = group;
  for (const auto& l : s.labels)
    if (std::find(group.begin(), group.end(), l) == group.end()) order.push_back(l);
  MultipartiteState p = permute_subsystems(s, order);
  int merged_dim = 1;
  for (size_t k = 0; k < group.size(); ++k) merged_dim *= p.dims[k];
  std::vector<int> dims{merged_dim};
  std::vector<std::string> labels{merged_label};
  for (size_t k = group.size(); k < p.dims.size(); ++k) {
    dims.push_back(p.dims[k]);
    labels.push_back(p.labels[k]);
  }
  return MultipartiteState(std::move(dims), std::move(labels), std::move(p.rho));
}

MultipartiteState split_subsystem(const MultipartiteState& s, const std::string& label, int d1, int d2,
                                  const std::string& label1, const std::string& label2) {
  int p = s.position_of(label);
  if (static_cast<long>(d1) * d2 != s.dims[p])
    throw DimensionError("split_subsystem: d1*d2 must equal the subsystem dimension");
  std::vector<int> dims = s.dims;
  std::vector<std::string> labels = s.labels;
  dims[p] = d1;
  labels[p] = label1;
  dims.insert(dims.begin() + p + 1, d2);
  labels.insert(labels.begin() + p + 1, label2);
  return MultipartiteState(std::move(dims), std::move(labels), s.rho);
}

MultipartiteState apply_unitary(const MultipartiteState& s, const std::string& label, const Matrix& u) {
  int p = s.position_of(label);
  int du = s.dims[p];
  if (u.rows() != du || u.cols() != du) throw DimensionError("apply_unitary: operator does not fit the subsystem");
  auto strides = strides_of(s.dims);
  long stride = strides[p];
  long d = s.dim();
  long outer = d / (stride * du);  // joint dimension of subsystems before p

  // Left multiply by (I (x) u (x) I), then right multiply by its adjoint.
  Matrix tmp = Matrix::Zero(d, d);
  for (long a = 0; a < outer; ++a)
    for (long b = 0; b < stride; ++b) {
      long base = a * stride * du + b;
      for (int v = 0; v < du; ++v)
        for (int w = 0; w < du; ++w) {
          if (u(v, w) == Complex(0, 0)) continue;
          tmp.row(base + v * stride) += u(v, w) * s.rho.row(base + w * stride);
        }
    }
  Matrix out = Matrix::Zero(d, d);
  for (long a = 0; a < outer; ++a)
    for (long b = 0; b < stride; ++b) {
      long base = a * stride * du + b;
      for (int v = 0; v < du; ++v)
        for (int w = 0; w < du; ++w) {
          if (u(v, w) == Complex(0, 0)) continue;
          out.col(base + v * stride) += std::conj(u(v, w)) * tmp.col(base + w * stride);
        }
    }
  return MultipartiteState(s.dims, s.labels, std::move(out));
}

PureState purify(const MultipartiteState& s, const std::string& ref_label) {
  if (std::find(s.labels.begin(), s.labels.end(), ref_label) != s.labels.end())
    throw LabelError("purify: reference label '" + ref_label + "' already in use");
  long d = s.dim();
  if (d * d > kMaxTotalDim) throw CapacityError("purify: purified dimension exceeds the dense cap");
  Eigen::SelfAdjointEigenSolver<Matrix> es(s.rho);
  RealVector ev = es.eigenvalues();
  Vector amps = Vector::Zero(d * d);
  for (long r = 0; r < d; ++r) {
    double lambda = ev[r];
    if (lambda < -tol::positivity)
      throw InvariantViolation("purify: input has an eigenvalue below -1e-10");
    if (lambda <= 0) continue;
    double w = std::sqrt(lambda);
    for (long x = 0; x < d; ++x) amps[x * d + r] = w * es.eigenvectors()(x, r);
  }
  amps /= amps.norm();
  std::vector<int> dims = s.dims;
  dims.push_back(static_cast<int>(d));
  std::vector<std::string> labels = s.labels;
  labels.push_back(ref_label);
  return PureState(std::move(dims), std::move(labels), std::move(amps));
}

double fidelity(const MultipartiteState& rho, const MultipartiteState& sigma) {
  if (rho.dims != sigma.dims) throw DimensionError("fidelity: dimension mismatch");
  Matrix sr = matrix_sqrt_psd(rho.rho);
  Matrix m = sr * sigma.rho * sr;
  m = (m + m.adjoint()) / 2.0;  // hermitize numerical drift
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  double f = 0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    double ev = es.eigenvalues()[i];
    if (ev > 0) f += std::sqrt(ev);
  }
  f = f * f;
  return std::clamp(f, 0.0, 1.0);
}

double trace_distance(const MultipartiteState& rho, const MultipartiteState& sigma) {
  if (rho.dims != sigma.dims) throw DimensionError("trace_distance: dimension mismatch");
  Matrix diff = rho.rho - sigma.rho;
  Eigen::SelfAdjointEigenSolver<Matrix> es(diff, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().sum();
}

UnitaryMatrix haar_unitary(int d, Rng& rng) {
  if (d < 1) throw std::domain_error("haar_unitary: dimension must be at least 1");
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix g(d, d);
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c) g(r, c) = Complex(gauss(rng), gauss(rng));
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  // Fix the phase ambiguity so the distribution is exactly Haar.
  for (int c = 0; c < d; ++c) {
    Complex rc = r(c, c);
    double mag = std::abs(rc);
    q.col(c) *= (mag > 0) ? rc / mag : Complex(1, 0);
  }
  return UnitaryMatrix(d, std::move(q));
}

PureState haar_pure_state(std::vector<int> dims, std::vector<std::string> labels, Rng& rng) {
  long d = product_of(dims);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vector v(d);
  for (long i = 0; i < d; ++i) v[i] = Complex(gauss(rng), gauss(rng));
  v /= v.norm();
  return PureState(std::move(dims), std::move(labels), std::move(v));
}

PureState bell_state() {
  Vector amps = Vector::Zero(4);
  amps[0] = amps[3] = 1.0 / std::sqrt(2.0);
  return PureState({2, 2}, {"A", "B"}, std::move(amps));
}

namespace {
std::vector<std::string> party_labels(int m) {
  std::vector<std::string> labels;
  for (int i = 1; i <= m; ++i) labels.push_back("X" + std::to_string(i));
  return labels;
}
}  // namespace

PureState ghz_state(int m) {
  if (m < 2) throw std::domain_error("ghz_state: needs at least 2 parties");
  long d = 1L << m;
  if (d > kMaxTotalDim) throw CapacityError("ghz_state: too many parties");
  Vector amps = Vector::Zero(d);
  amps[0] = amps[d - 1] = 1.0 / std::sqrt(2.0);
  return PureState(std::vector<int>(m, 2), party_labels(m), std::move(amps));
}

PureState w_state(int m) {
  if (m < 2) throw std::domain_error("w_state: needs at least 2 parties");
  long d = 1L << m;
  if (d > kMaxTotalDim) throw CapacityError("w_state: too many parties");
  Vector amps = Vector::Zero(d);
  for (int j = 0; j < m; ++j) amps[1L << j] = 1.0 / std::sqrt(static_cast<double>(m));
  return PureState(std::vector<int>(m, 2), party_labels(m), std::move(amps));
}

PureState product_bell_pairs(int pairs) {
  if (pairs < 1) throw std::domain_error("product_bell_pairs: needs at least 1 pair");
  PureState out;
  for (int k = 1; k <= pairs; ++k) {
    PureState b = bell_state();
    b.labels = {"A" + std::to_string(k), "B" + std::to_string(k)};
    out = (k == 1) ? b : tensor(out, b);
  }
  return out;
}

MultipartiteState mixture(const std::vector<std::pair<double, PureState>>& ensemble) {
  if (ensemble.empty()) throw std::invalid_argument("mixture: empty ensemble");
  double total = 0;
  for (const auto& [p, ket] : ensemble) {
    if (p < -1e-12) throw InvariantViolation("mixture: negative ensemble probability");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) throw InvariantViolation("mixture: ensemble probabilities must sum to 1");
  const auto& first = ensemble.front().second;
  Matrix rho = Matrix::Zero(first.dim(), first.dim());
  for (const auto& [p, ket] : ensemble) {
    if (ket.dims != first.dims || ket.labels != first.labels)
      throw LabelError("mixture: ensemble members live on different systems");
    rho += p * (ket.amplitudes * ket.amplitudes.adjoint());
  }
  return MultipartiteState(first.dims, first.labels, std::move(rho));
}

BuiltState build_named_state(const std::string& spec) {
  auto with_ket = [](PureState ket) {
    BuiltState b;
    b.rho = ket.to_density();
    b.ket = std::move(ket);
    return b;
  };
  if (spec == "bell") return with_ket(bell_state());
  if (spec == "product") return build_named_state("product:2");
  if (spec == "bell-plus-idle") {
    // |Phi>^{A1 R} (x) |0>^{A2}, laid out as (A1, A2, R) with the reference last.
    Vector amps = Vector::Zero(8);
    amps[0] = 1.0 / std::sqrt(2.0);  // |0 0 0>
    amps[5] = 1.0 / std::sqrt(2.0);  // |1 0 1>
    return with_ket(PureState({2, 2, 2}, {"A1", "A2", "R"}, std::move(amps)));
  }
  auto colon = spec.find(':');
  if (colon != std::string::npos) {
    std::string head = spec.substr(0, colon);
    std::string arg = spec.substr(colon + 1);
    if (head == "file") {
      std::ifstream in(arg);
      if (!in) throw FormatError("cannot open state file '" + arg + "'");
      std::stringstream buf;
      buf << in.rdbuf();
      return load_state_json(buf.str());
    }
    int m = 0;
    try {
      m = std::stoi(arg);
    } catch (const std::exception&) {
      throw FormatError("state spec '" + spec + "' has a malformed count");
    }
    if (head == "ghz") return with_ket(ghz_state(m));
    if (head == "w") return with_ket(w_state(m));
    if (head == "product") {
      if (m < 1) throw std::domain_error("product state needs at least 1 qubit");
      if ((1L << m) > kMaxTotalDim) throw CapacityError("product: too many qubits");
      Vector amps = Vector::Zero(1L << m);
      amps[0] = 1.0;
      return with_ket(PureState(std::vector<int>(m, 2), party_labels(m), std::move(amps)));
    }
  }
  throw FormatError("unknown state spec '" + spec + "'");
}

}  // namespace qregion
