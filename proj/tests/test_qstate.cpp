#include <doctest.h>

#include <cmath>

#include <unsupported/Eigen/KroneckerProduct>

#include "qregion/serialization.hpp"
#include "qregion/states.hpp"
#include "test_helpers.hpp"

using namespace qregion;
using qtest::random_density;
using qtest::random_pure_qubits;

TEST_SUITE_BEGIN("qstate");

TEST_CASE("tensor concatenates systems and preserves trace") {
  auto bell = bell_state().to_density();
  auto b2 = bell_state();
  b2.labels = {"C", "D"};
  auto prod = tensor(bell, b2.to_density());
  CHECK(prod.dim() == 16);
  CHECK(prod.rho.trace().real() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(prod.labels == std::vector<std::string>{"A", "B", "C", "D"});

  CHECK_THROWS_AS(tensor(bell, bell_state().to_density()), LabelError);
}

TEST_CASE("tensor purity: rho (x) pure has purity of rho") {
  Rng rng(11);
  auto rho = random_density({2, 3}, {"a", "b"}, rng);
  Vector v = Vector::Zero(2);
  v[0] = 1.0;
  auto ket = PureState({2}, {"z"}, v).to_density();
  auto prod = tensor(rho, ket);
  CHECK(prod.purity() == doctest::Approx(rho.purity()).epsilon(1e-10));
}

TEST_CASE("tensor of diagonal mixed qubits has flat spectrum") {
  Matrix half = Matrix::Identity(2, 2) * 0.5;
  MultipartiteState a({2}, {"a"}, half), b({2}, {"b"}, half);
  auto prod = tensor(a, b);
  auto ev = clipped_spectrum(prod.rho);
  for (int i = 0; i < 4; ++i) CHECK(ev[i] == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("partial trace of the Bell state is maximally mixed") {
  auto bell = bell_state().to_density();
  auto a = partial_trace(bell, {"A"});
  CHECK((a.rho - Matrix::Identity(2, 2) * 0.5).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(a.rho.trace().real() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(partial_trace(bell, {"nope"}), LabelError);
}

TEST_CASE("partial trace of a product recovers the factor") {
  Rng rng(5);
  auto rho = random_density({2, 2}, {"a", "b"}, rng);
  auto sigma = random_density({3}, {"c"}, rng);
  auto prod = tensor(rho, sigma);
  auto back = partial_trace(prod, {"a", "b"});
  CHECK((back.rho - rho.rho).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("W-state single-qubit marginal is diag((m-1)/m, 1/m)") {
  auto w = w_state(3).to_density();
  for (const auto& l : w.labels) {
    auto red = partial_trace(w, {l});
    CHECK(red.rho(0, 0).real() == doctest::Approx(2.0 / 3).epsilon(1e-12));
    CHECK(red.rho(1, 1).real() == doctest::Approx(1.0 / 3).epsilon(1e-12));
    CHECK(std::abs(red.rho(0, 1)) < 1e-12);
  }
}

TEST_CASE("property: tracing b out of a (x) b recovers a") {
  Rng rng(17);
  for (int round = 0; round < 40; ++round) {
    std::uniform_int_distribution<int> dim(2, 8);
    auto a = random_density({dim(rng)}, {"a"}, rng);
    auto b = random_density({dim(rng)}, {"b"}, rng);
    auto back = partial_trace(tensor(a, b), {"a"});
    CHECK((back.rho - a.rho).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("purify appends a reference and traces back") {
  SUBCASE("maximally mixed qubit") {
    Matrix half = Matrix::Identity(2, 2) * 0.5;
    MultipartiteState s({2}, {"a"}, half);
    auto psi = purify(s, "R");
    CHECK(psi.labels.back() == "R");
    CHECK(psi.dim() == 4);
    auto back = reduced_state(psi, {"a"});
    CHECK((back.rho - half).cwiseAbs().maxCoeff() < 1e-9);
  }
  SUBCASE("pure input stays effectively rank one") {
    auto ghz = ghz_state(3).to_density();
    auto psi = purify(ghz, "R");
    auto ref = reduced_state(psi, {"R"});
    CHECK(ref.purity() == doctest::Approx(1.0).epsilon(1e-9));
  }
  SUBCASE("random rank-3 qutrit-pair marginal") {
    Rng rng(23);
    auto probe = haar_pure_state({3, 3, 3}, {"x", "y", "r"}, rng);
    auto marg = reduced_state(probe, {"x", "y"});  // rank <= 3
    auto psi = purify(marg, "ref");
    auto back = reduced_state(psi, {"x", "y"});
    CHECK((back.rho - marg.rho).cwiseAbs().maxCoeff() < 1e-9);
  }
  SUBCASE("label clash") {
    auto bell = bell_state().to_density();
    CHECK_THROWS_AS(purify(bell, "A"), LabelError);
  }
}

TEST_CASE("property: purify then trace is the identity") {
  Rng rng(29);
  for (int round = 0; round < 20; ++round) {
    std::uniform_int_distribution<int> dim(2, 6);
    auto s = random_density({dim(rng), 2}, {"a", "b"}, rng);
    auto psi = purify(s, "R");
    auto back = reduced_state(psi, {"a", "b"});
    CHECK((back.rho - s.rho).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("haar unitaries are unitary and reproducible") {
  Rng rng(123);
  for (int d : {1, 2, 3, 8, 17, 64}) {
    auto u = haar_unitary(d, rng);
    CHECK((u.matrix.adjoint() * u.matrix - Matrix::Identity(d, d)).cwiseAbs().maxCoeff() < 1e-9);
  }
  Rng r1(99), r2(99);
  auto u1 = haar_unitary(4, r1), u2 = haar_unitary(4, r2);
  CHECK((u1.matrix - u2.matrix).cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(haar_unitary(0, rng), std::domain_error);
  auto u = haar_unitary(1, rng);
  CHECK(std::abs(std::abs(u.matrix(0, 0)) - 1.0) < 1e-12);
}

TEST_CASE("haar moment E|U00|^2 = 1/d") {
  const int d = 8, samples = 2000;
  Rng rng(2024);
  double sum = 0, sumsq = 0;
  for (int i = 0; i < samples; ++i) {
    auto u = haar_unitary(d, rng);
    double x = std::norm(u.matrix(0, 0));
    sum += x;
    sumsq += x * x;
  }
  double mean = sum / samples;
  double var = sumsq / samples - mean * mean;
  double se = std::sqrt(var / samples);
  CHECK(std::abs(mean - 1.0 / d) < 3 * se);
}

TEST_CASE("fidelity basics") {
  Rng rng(31);
  auto rho = random_density({2, 2}, {"a", "b"}, rng);
  CHECK(fidelity(rho, rho) == doctest::Approx(1.0).epsilon(1e-9));

  Vector e0 = Vector::Zero(2), e1 = Vector::Zero(2);
  e0[0] = 1;
  e1[1] = 1;
  auto p0 = PureState({2}, {"a"}, e0).to_density();
  auto p1 = PureState({2}, {"a"}, e1).to_density();
  CHECK(fidelity(p0, p1) == doctest::Approx(0.0).epsilon(1e-12));

  auto sigma = random_density({2, 2}, {"a", "b"}, rng);
  CHECK(fidelity(rho, sigma) == doctest::Approx(fidelity(sigma, rho)).epsilon(1e-9));
  CHECK_THROWS_AS(fidelity(p0, rho), DimensionError);
}

TEST_CASE("pure-pair fidelity equals squared inner product") {
  Rng rng(37);
  for (int round = 0; round < 25; ++round) {
    auto psi = random_pure_qubits(2, rng);
    auto phi = random_pure_qubits(2, rng);
    double direct = std::norm((psi.amplitudes.adjoint() * phi.amplitudes)(0, 0));
    CHECK(fidelity(psi.to_density(), phi.to_density()) == doctest::Approx(direct).epsilon(1e-8));
  }
}

TEST_CASE("trace distance basics and metric properties") {
  Rng rng(41);
  auto rho = random_density({2, 2}, {"a", "b"}, rng);
  CHECK(trace_distance(rho, rho) == doctest::Approx(0.0).epsilon(1e-12));

  Vector e0 = Vector::Zero(2), e1 = Vector::Zero(2);
  e0[0] = 1;
  e1[1] = 1;
  auto p0 = PureState({2}, {"a"}, e0).to_density();
  auto p1 = PureState({2}, {"a"}, e1).to_density();
  CHECK(trace_distance(p0, p1) == doctest::Approx(2.0).epsilon(1e-12));  // no 1/2 normalization

  for (int round = 0; round < 20; ++round) {
    auto a = random_density({4}, {"x"}, rng);
    auto b = random_density({4}, {"x"}, rng);
    auto c = random_density({4}, {"x"}, rng);
    double ab = trace_distance(a, b), ba = trace_distance(b, a);
    CHECK(ab == doctest::Approx(ba).epsilon(1e-10));
    CHECK(trace_distance(a, c) <= ab + trace_distance(b, c) + 1e-10);
  }
}

TEST_CASE("Fuchs-van de Graaf inequalities, both printed forms") {
  Rng rng(43);
  int checked = 0;
  for (int round = 0; round < 500; ++round) {
    auto a = random_density({2, 2}, {"x", "y"}, rng);
    auto b = random_density({2, 2}, {"x", "y"}, rng);
    double f = fidelity(a, b);
    double td = trace_distance(a, b);
    double sf = std::sqrt(f);
    CHECK(1 - sf <= 0.5 * td + 1e-9);
    CHECK(0.5 * td <= std::sqrt(1 - f) + 1e-9);
    CHECK(1 - td <= f + 1e-9);
    CHECK(f <= 1 - td * td / 4 + 1e-9);
    ++checked;
  }
  CHECK(checked == 500);
}

TEST_CASE("named states") {
  auto ghz = ghz_state(3);
  CHECK(ghz.dim() == 8);
  CHECK(std::abs(ghz.amplitudes[0] - Complex(1 / std::sqrt(2.0), 0)) < 1e-12);
  CHECK(std::abs(ghz.amplitudes[7] - Complex(1 / std::sqrt(2.0), 0)) < 1e-12);
  for (int i = 1; i < 7; ++i) CHECK(std::abs(ghz.amplitudes[i]) == 0.0);

  auto w = w_state(3);
  for (long i : {1L, 2L, 4L}) CHECK(std::abs(w.amplitudes[i] - Complex(1 / std::sqrt(3.0), 0)) < 1e-12);
  CHECK(std::abs(w.amplitudes[0]) == 0.0);

  CHECK_THROWS_AS(ghz_state(1), std::domain_error);

  // separable mixture over {|00>, |11>} is diagonal
  Vector k00 = Vector::Zero(4), k11 = Vector::Zero(4);
  k00[0] = 1;
  k11[3] = 1;
  auto sep = mixture({{0.5, PureState({2, 2}, {"a", "b"}, k00)}, {0.5, PureState({2, 2}, {"a", "b"}, k11)}});
  CHECK(sep.rho(0, 0).real() == doctest::Approx(0.5));
  CHECK(sep.rho(3, 3).real() == doctest::Approx(0.5));
  CHECK(std::abs(sep.rho(0, 3)) == 0.0);

  CHECK_THROWS_AS(mixture({{0.7, ghz}, {0.7, ghz}}), InvariantViolation);

  auto pairs = product_bell_pairs(2);
  CHECK(pairs.labels == std::vector<std::string>{"A1", "B1", "A2", "B2"});
  CHECK(pairs.dim() == 16);
}

TEST_CASE("state invariants are enforced") {
  Matrix bad = Matrix::Identity(2, 2);
  CHECK_THROWS_AS(MultipartiteState({2}, {"a"}, bad), InvariantViolation);  // trace 2
  Matrix nonherm = Matrix::Zero(2, 2);
  nonherm(0, 0) = 0.5;
  nonherm(1, 1) = 0.5;
  nonherm(0, 1) = Complex(0.3, 0);
  CHECK_THROWS_AS(MultipartiteState({2}, {"a"}, nonherm), InvariantViolation);
  CHECK_THROWS_AS(MultipartiteState({2, 2}, {"a", "b"}, Matrix::Identity(2, 2) * 0.5), DimensionError);
  CHECK_THROWS_AS(MultipartiteState({2, 2}, {"a", "a"}, Matrix::Identity(4, 4) * 0.25), LabelError);

  Matrix negative = Matrix::Zero(2, 2);
  negative(0, 0) = 1.5;
  negative(1, 1) = -0.5;
  MultipartiteState s({2}, {"a"}, negative);  // Hermitian, trace 1
  CHECK_THROWS_AS(s.validate(), InvariantViolation);
}

TEST_CASE("permute, merge and split are consistent") {
  Rng rng(53);
  auto s = random_density({2, 3, 2}, {"a", "b", "c"}, rng);
  auto p = permute_subsystems(s, {"c", "a", "b"});
  CHECK(p.labels == std::vector<std::string>{"c", "a", "b"});
  auto back = permute_subsystems(p, {"a", "b", "c"});
  CHECK((back.rho - s.rho).cwiseAbs().maxCoeff() < 1e-14);

  auto merged = merge_subsystems(s, {"a", "b"}, "ab");
  CHECK(merged.dims == std::vector<int>{6, 2});
  auto split = split_subsystem(merged, "ab", 2, 3, "a", "b");
  CHECK((split.rho - s.rho).cwiseAbs().maxCoeff() < 1e-14);

  auto ket = qtest::random_pure_qubits(3, rng);
  auto kperm = permute_subsystems(ket, {"q2", "q0", "q1"});
  CHECK((permute_subsystems(kperm, ket.labels).amplitudes - ket.amplitudes).cwiseAbs().maxCoeff() == 0.0);
  CHECK((reduced_state(kperm, {"q0"}).rho - reduced_state(ket, {"q0"}).rho).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("apply_unitary matches explicit Kronecker conjugation") {
  Rng rng(59);
  auto s = random_density({2, 3, 2}, {"a", "b", "c"}, rng);
  auto u = haar_unitary(3, rng);
  auto fast = apply_unitary(s, "b", u.matrix);
  Matrix mid = Eigen::kroneckerProduct(u.matrix, Matrix::Identity(2, 2));
  Matrix big = Eigen::kroneckerProduct(Matrix::Identity(2, 2), mid);
  Matrix slow = big * s.rho * big.adjoint();
  CHECK((fast.rho - slow).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("json round trip is lossless") {
  Rng rng(61);
  auto ket = random_pure_qubits(2, rng);
  auto loaded = load_state_json(state_to_json(ket));
  REQUIRE(loaded.ket.has_value());
  CHECK((loaded.ket->amplitudes - ket.amplitudes).cwiseAbs().maxCoeff() == 0.0);
  CHECK(loaded.ket->labels == ket.labels);

  auto rho = random_density({2, 2}, {"a", "b"}, rng);
  auto loaded2 = load_state_json(state_to_json(rho));
  CHECK((loaded2.rho.rho - rho.rho).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("json rejects malformed input with a field path") {
  CHECK_THROWS_AS(load_state_json("not json"), FormatError);
  CHECK_THROWS_AS(load_state_json(R"({"dims":[2],"labels":["a"],"kind":"ket"})"), FormatError);
  try {
    load_state_json(R"({"dims":[2],"labels":["a"],"kind":"ket","data":[[1,0],[0]]})");
    FAIL("expected FormatError");
  } catch (const FormatError& e) {
    CHECK(std::string(e.what()).find("data[1]") != std::string::npos);
  }
  // wrong normalization is rejected on load
  CHECK_THROWS_AS(load_state_json(R"({"dims":[2],"labels":["a"],"kind":"ket","data":[[1,0],[1,0]]})"),
                  FormatError);
}

TEST_CASE("dense capacity cap is enforced") { CHECK_THROWS_AS(ghz_state(13), CapacityError); }

TEST_SUITE_END();
