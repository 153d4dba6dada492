#include <doctest.h>

#include <cmath>

#include "qregion/entropy.hpp"
#include "qregion/rescalc.hpp"
#include "test_helpers.hpp"

using namespace qregion;
using qtest::random_density;

TEST_SUITE_BEGIN("rescalc");

namespace {

/// Half the mutual information with the purifying reference.
double half_i_ar(const MultipartiteState& s) {
  auto psi = purify(s, "_ref");
  std::vector<std::string> a{s.labels[0]}, r{"_ref"};
  double v = 0.5 * (von_neumann(psi, a) + von_neumann(psi, r) - von_neumann(psi, {s.labels[0], "_ref"}));
  return std::max(0.0, v);
}

bool expr_equal(const ResourceExpr& a, const ResourceExpr& b) {
  if (a.terms.size() != b.terms.size()) return false;
  for (const auto& [t, w] : a.terms) {
    auto it = b.terms.find(t);
    if (it == b.terms.end() || std::abs(it->second - w) > 1e-9) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("teleportation and superdense coding structure") {
  auto tp = builtin(Builtin::Teleportation);
  CHECK(tp.lhs.weight(Token::ebit()) == 1.0);
  CHECK(tp.lhs.weight(Token::cbit()) == 2.0);
  CHECK(tp.rhs.weight(Token::qbit()) == 1.0);
  CHECK(pretty(tp) == "1.000 [qq] + 2.000 [c→c] ≥ 1.000 [q→q]");

  auto sc = builtin(Builtin::SuperdenseCoding);
  CHECK(sc.lhs.weight(Token::qbit()) == 1.0);
  CHECK(sc.rhs.weight(Token::cbit()) == 2.0);

  CHECK_THROWS_AS(builtin(Builtin::Mother), std::invalid_argument);
}

TEST_CASE("mother on a Bell pair distills one ebit for free") {
  auto bell = bell_state().to_density();
  auto mother = builtin(Builtin::Mother, &bell);
  CHECK(mother.lhs.weight(Token::qbit()) == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(mother.rhs.weight(Token::ebit()) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(mother.lhs.weight(Token::named("rho^{AB}")) == 1.0);
}

TEST_CASE("fqsw on the idle-extended Bell instance charges half the reference information") {
  // rho^{AB}: A = the Bell half entangled with the reference, B idle
  auto built = build_named_state("bell-plus-idle");
  auto rho = reduced_state(*built.ket, {"A1", "A2"});
  auto fqsw = builtin(Builtin::Fqsw, &rho);
  CHECK(fqsw.lhs.weight(Token::qbit()) == doctest::Approx(1.0).epsilon(1e-9));  // (1/2) I(A;R) = 1
  CHECK(fqsw.rhs.weight(Token::named("id^{S->Bhat}:phi^S")) == 1.0);
}

TEST_CASE("scale multiplies weights and rejects negative coefficients") {
  auto tp = builtin(Builtin::Teleportation);
  auto doubled = scale(tp, 2.0);
  CHECK(doubled.lhs.weight(Token::ebit()) == 2.0);
  CHECK(doubled.lhs.weight(Token::cbit()) == 4.0);
  CHECK(doubled.rhs.weight(Token::qbit()) == 2.0);

  auto zero = scale(tp, 0.0);
  CHECK(zero.lhs.terms.empty());
  CHECK(zero.rhs.terms.empty());

  CHECK_THROWS_AS(scale(tp, -1.0), std::domain_error);

  // the recycling step: (1/2)I(A;R)( [qq] + 2[c->c] >= [q->q] )
  auto recycled = scale(tp, 0.75);
  CHECK(recycled.lhs.weight(Token::ebit()) == doctest::Approx(0.75));
  CHECK(recycled.lhs.weight(Token::cbit()) == doctest::Approx(1.5));
  CHECK(recycled.rhs.weight(Token::qbit()) == doctest::Approx(0.75));
}

TEST_CASE("compose cancels matched tokens and leaves the rest") {
  auto tp = builtin(Builtin::Teleportation);
  auto sc = builtin(Builtin::SuperdenseCoding);
  auto loop = compose(tp, sc);
  // [qq] appears on both lhs's; [q->q] and 2[c->c] cancel across sides
  CHECK(loop.lhs.weight(Token::ebit()) == doctest::Approx(2.0));
  CHECK(loop.lhs.weight(Token::cbit()) == doctest::Approx(0.0));
  CHECK(loop.rhs.weight(Token::qbit()) == doctest::Approx(0.0));

  auto unchanged = compose(tp, scale(sc, 0.0));
  CHECK(expr_equal(unchanged.lhs, tp.lhs));
  CHECK(expr_equal(unchanged.rhs, tp.rhs));
}

TEST_CASE("composition is associative and commutative on the token algebra") {
  Rng rng(7);
  auto s = random_density({2, 2}, {"A", "B"}, rng);
  auto a = builtin(Builtin::Mother, &s);
  auto b = scale(builtin(Builtin::Teleportation), 0.35);
  auto c = builtin(Builtin::SuperdenseCoding);

  auto left = compose(compose(a, b), c);
  auto right = compose(a, compose(b, c));
  CHECK(expr_equal(left.lhs, right.lhs));
  CHECK(expr_equal(left.rhs, right.rhs));

  auto ab = compose(a, b);
  auto ba = compose(b, a);
  CHECK(expr_equal(ab.lhs, ba.lhs));
  CHECK(expr_equal(ab.rhs, ba.rhs));
}

TEST_CASE("hashing derivation: mother plus teleportation") {
  auto bell = bell_state().to_density();
  auto mother = builtin(Builtin::Mother, &bell);
  double x = half_i_ar(bell);  // 0 for a pure input
  auto hashing = compose(mother, scale(builtin(Builtin::Teleportation), x));
  // I_c(A>B) = H(B) - H(AB) = 1 for the Bell pair
  CHECK(-net_cost(hashing, Token::ebit()) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(hashing.lhs.weight(Token::cbit()) == doctest::Approx(2.0 * x).epsilon(1e-9));

  // maximally mixed two qubits: I_c = -1, an ebit cost rather than a yield
  Matrix mm = Matrix::Identity(4, 4) * 0.25;
  MultipartiteState mixed({2, 2}, {"A", "B"}, mm);
  auto rep = verify_identity(mixed, Identity::HashingCoeff);
  CHECK(rep.holds);
  CHECK(rep.expected == doctest::Approx(-1.0).epsilon(1e-9));
}

TEST_CASE("merging derivation: fqsw plus teleportation gives H(A|B) ebits") {
  auto bell = bell_state().to_density();
  auto rep = verify_identity(bell, Identity::MergingCoeff);
  CHECK(rep.holds);
  CHECK(rep.expected == doctest::Approx(-1.0).epsilon(1e-9));  // Bell: H(A|B) = -1, merging yields ebits

  Rng rng(11);
  auto s = random_density({2, 2}, {"A", "B"}, rng);
  auto fqsw = builtin(Builtin::Fqsw, &s);
  double x = half_i_ar(s);
  auto merging = compose(fqsw, scale(builtin(Builtin::Teleportation), x));
  auto psi = purify(s, "_ref");
  double h_ab = von_neumann(psi, {"A", "B"});
  double h_b = von_neumann(psi, {"B"});
  CHECK(net_cost(merging, Token::ebit()) == doctest::Approx(h_ab - h_b).epsilon(1e-9));
  CHECK(merging.lhs.weight(Token::cbit()) == doctest::Approx(2.0 * x).epsilon(1e-9));
}

TEST_CASE("property: hashing and merging identities on random states") {
  Rng rng(13);
  for (int round = 0; round < 500; ++round) {
    auto s = random_density({2, 2}, {"A", "B"}, rng);
    CHECK(verify_identity(s, Identity::HashingCoeff).holds);
    CHECK(verify_identity(s, Identity::MergingCoeff).holds);
  }
}

TEST_CASE("merging ebit coefficient is negative exactly when H(A|B) < 0") {
  Rng rng(17);
  int seen_negative = 0, seen_positive = 0;
  for (int round = 0; round < 60; ++round) {
    MultipartiteState s = round % 2 == 0 ? qtest::random_density_qubits(2, rng)
                                         : [&] {
                                             auto psi = qtest::random_pure_qubits(2, rng);
                                             return psi.to_density();
                                           }();
    s.labels = {"A", "B"};
    double h_cond = cond_entropy(s, {"A"}, {"B"});
    auto rep = verify_identity(s, Identity::MergingCoeff);
    CHECK(rep.holds);
    CHECK((rep.derived < 0) == (h_cond < -1e-12));
    (h_cond < 0 ? seen_negative : seen_positive)++;
  }
  CHECK(seen_negative > 0);
  CHECK(seen_positive > 0);
}

TEST_CASE("named tokens never cancel across different conditioning") {
  ResourceInequality a, b;
  a.lhs.add(Token::named("N:rho"), 1.0);
  a.rhs.add(Token::ebit(), 1.0);
  b.lhs.add(Token::ebit(), 1.0);
  b.rhs.add(Token::named("N:sigma"), 1.0);
  auto c = compose(a, b);
  CHECK(c.lhs.weight(Token::named("N:rho")) == 1.0);
  CHECK(c.rhs.weight(Token::named("N:sigma")) == 1.0);
  CHECK(c.lhs.weight(Token::ebit()) == 0.0);
  CHECK(c.rhs.weight(Token::ebit()) == 0.0);
}

TEST_CASE("schumacher and state merging builtins") {
  Rng rng(19);
  auto s = random_density({2, 2}, {"A", "B"}, rng);
  auto schu = builtin(Builtin::Schumacher, &s);
  CHECK(schu.lhs.weight(Token::qbit()) == doctest::Approx(von_neumann(s, s.labels)).epsilon(1e-9));

  auto merging = builtin(Builtin::StateMerging, &s);
  CHECK(merging.lhs.weight(Token::qbit()) == doctest::Approx(cond_entropy(s, {"A"}, {"B"})).epsilon(1e-9));
  CHECK(merging.note.find("classical") != std::string::npos);

  auto father_state = haar_pure_state({2, 2, 2}, {"B", "E", "R"}, rng);
  auto fs = father_state.to_density();
  auto father = builtin(Builtin::Father, &fs);
  CHECK(father.lhs.weight(Token::ebit()) == doctest::Approx(0.5 * mutual_info(fs, {"R"}, {"E"})).epsilon(1e-9));
  CHECK(father.rhs.weight(Token::qbit()) == doctest::Approx(0.5 * mutual_info(fs, {"R"}, {"B"})).epsilon(1e-9));
}

TEST_SUITE_END();
