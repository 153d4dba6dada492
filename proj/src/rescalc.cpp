#include "qregion/rescalc.hpp"

#include <cmath>
#include <sstream>

#include "qregion/entropy.hpp"

namespace qregion {

namespace {

constexpr double kWeightCut = 1e-12;

/// Purify a bipartite state and return (psi, A labels, B labels, R label).
struct Purified {
  PureState psi;
  std::vector<std::string> a, b;
  std::string r;
};

Purified purified_bipartite(const MultipartiteState& s, const char* what) {
  if (s.subsystem_count() != 2) throw LabelError(std::string(what) + ": expects a bipartite state");
  Purified p;
  p.a = {s.labels[0]};
  p.b = {s.labels[1]};
  p.r = s.labels[0] + s.labels[1] + "_ref";
  p.psi = purify(s, p.r);
  return p;
}

double half_mi(const PureState& psi, const std::vector<std::string>& x, const std::vector<std::string>& y) {
  std::vector<std::string> xy = x;
  xy.insert(xy.end(), y.begin(), y.end());
  return 0.5 * (von_neumann(psi, x) + von_neumann(psi, y) - von_neumann(psi, xy));
}

}  // namespace

std::string token_symbol(const Token& t) {
  switch (t.kind) {
    case TokenKind::Ebit:
      return "[qq]";
    case TokenKind::CChannel:
      return "[c→c]";
    case TokenKind::QChannel:
      return "[q→q]";
    case TokenKind::Named:
      return "⟨" + t.name + "⟩";
  }
  return "?";
}

void ResourceExpr::add(const Token& t, double w) {
  terms[t] += w;
  if (std::abs(terms[t]) <= kWeightCut) terms.erase(t);
}

double ResourceExpr::weight(const Token& t) const {
  auto it = terms.find(t);
  return it == terms.end() ? 0.0 : it->second;
}

ResourceInequality builtin(Builtin which, const MultipartiteState* s) {
  ResourceInequality ri;
  auto need_state = [&](const char* name) {
    if (s == nullptr) throw std::invalid_argument(std::string(name) + " inequality needs a state");
  };
  switch (which) {
    case Builtin::Teleportation:
      ri.name = "teleportation";
      ri.lhs.add(Token::ebit(), 1);
      ri.lhs.add(Token::cbit(), 2);
      ri.rhs.add(Token::qbit(), 1);
      return ri;
    case Builtin::SuperdenseCoding:
      ri.name = "superdense coding";
      ri.lhs.add(Token::ebit(), 1);
      ri.lhs.add(Token::qbit(), 1);
      ri.rhs.add(Token::cbit(), 2);
      return ri;
    case Builtin::Mother: {
      need_state("mother");
      auto p = purified_bipartite(*s, "mother");
      ri.name = "mother";
      ri.note = "delta slack dropped (valid for any delta > 0)";
      ri.lhs.add(Token::named("rho^{AB}"), 1);
      ri.lhs.add(Token::qbit(), half_mi(p.psi, p.a, {p.r}));
      ri.rhs.add(Token::ebit(), half_mi(p.psi, p.a, p.b));
      return ri;
    }
    case Builtin::Father: {
      need_state("father");
      if (s->subsystem_count() != 3) throw LabelError("father: expects the realized tripartite state on B, E, R");
      if (s->purity() < 1.0 - 1e-9) throw InvariantViolation("father: the B,E,R state must be pure");
      std::vector<std::string> b{s->labels[0]}, e{s->labels[1]}, r{s->labels[2]};
      ri.name = "father";
      ri.note = "delta slack dropped (valid for any delta > 0)";
      ri.lhs.add(Token::named("N^{A->B}"), 1);
      ri.lhs.add(Token::ebit(), 0.5 * mutual_info(*s, r, e));
      ri.rhs.add(Token::qbit(), 0.5 * mutual_info(*s, r, b));
      return ri;
    }
    case Builtin::Fqsw: {
      need_state("fqsw");
      auto p = purified_bipartite(*s, "fqsw");
      ri.name = "fully quantum Slepian-Wolf";
      ri.note = "delta slack dropped (valid for any delta > 0)";
      ri.lhs.add(Token::named("U^{S->AB}:phi^S"), 1);
      ri.lhs.add(Token::qbit(), half_mi(p.psi, p.a, {p.r}));
      ri.rhs.add(Token::ebit(), half_mi(p.psi, p.a, p.b));
      ri.rhs.add(Token::named("id^{S->Bhat}:phi^S"), 1);
      return ri;
    }
    case Builtin::Schumacher: {
      need_state("schumacher");
      ri.name = "schumacher compression";
      ri.note = "delta slack dropped (valid for any delta > 0)";
      ri.lhs.add(Token::qbit(), von_neumann(*s, s->labels));
      ri.rhs.add(Token::named("id^{A->B}:rho^A"), 1);
      return ri;
    }
    case Builtin::StateMerging: {
      need_state("state merging");
      auto p = purified_bipartite(*s, "state merging");
      ri.name = "state merging";
      ri.note = "classical communication free; delta slack dropped";
      ri.lhs.add(Token::named("U^{S->AB}:rho^S"), 1);
      ri.lhs.add(Token::qbit(), von_neumann(p.psi, {p.a[0], p.b[0]}) - von_neumann(p.psi, p.b));
      ri.rhs.add(Token::named("id^{S->B}:rho^S"), 1);
      return ri;
    }
  }
  throw std::invalid_argument("unknown builtin inequality");
}

ResourceInequality compose(const ResourceInequality& a, const ResourceInequality& b) {
  ResourceInequality out;
  out.name = a.name.empty() ? b.name : (b.name.empty() ? a.name : a.name + " + " + b.name);
  if (!a.note.empty()) out.note = a.note;
  if (!b.note.empty()) out.note = out.note.empty() ? b.note : out.note + "; " + b.note;
  out.lhs = a.lhs;
  out.rhs = a.rhs;
  for (const auto& [t, w] : b.lhs.terms) out.lhs.add(t, w);
  for (const auto& [t, w] : b.rhs.terms) out.rhs.add(t, w);
  // Cancel whatever appears on both sides. Named tokens must match by name
  // exactly; differently-conditioned relative resources never cancel.
  for (auto it = out.lhs.terms.begin(); it != out.lhs.terms.end();) {
    const Token t = it->first;
    double l = it->second;
    double r = out.rhs.weight(t);
    ++it;
    if (r == 0) continue;
    double c = std::min(l, r);
    out.lhs.add(t, -c);
    out.rhs.add(t, -c);
  }
  return out;
}

ResourceInequality scale(const ResourceInequality& a, double c) {
  if (c < 0) throw std::domain_error("scale: coefficient must be nonnegative");
  ResourceInequality out;
  out.name = a.name;
  out.note = a.note;
  for (const auto& [t, w] : a.lhs.terms) out.lhs.add(t, c * w);
  for (const auto& [t, w] : a.rhs.terms) out.rhs.add(t, c * w);
  return out;
}

double net_cost(const ResourceInequality& ri, const Token& t) { return ri.lhs.weight(t) - ri.rhs.weight(t); }

IdentityReport verify_identity(const MultipartiteState& s, Identity which) {
  auto p = purified_bipartite(s, "verify_identity");
  double i_ar = std::max(0.0, 2.0 * half_mi(p.psi, p.a, {p.r}));  // clamp numeric drift
  double h_b = von_neumann(p.psi, p.b);
  double h_ab = von_neumann(p.psi, {p.a[0], p.b[0]});

  ResourceInequality tp = builtin(Builtin::Teleportation);
  IdentityReport rep;
  if (which == Identity::HashingCoeff) {
    ResourceInequality hashing = compose(builtin(Builtin::Mother, &s), scale(tp, 0.5 * i_ar));
    rep.derived = -net_cost(hashing, Token::ebit());  // yield
    rep.expected = h_b - h_ab;                        // I_c(A>B)
  } else {
    ResourceInequality merging = compose(builtin(Builtin::Fqsw, &s), scale(tp, 0.5 * i_ar));
    rep.derived = net_cost(merging, Token::ebit());  // cost
    rep.expected = h_ab - h_b;                       // H(A|B)
  }
  rep.holds = std::abs(rep.derived - rep.expected) <= 1e-9;
  return rep;
}

std::string pretty(const ResourceInequality& ri) {
  auto side = [](const ResourceExpr& e) {
    if (e.terms.empty()) return std::string("0");
    std::ostringstream out;
    out.setf(std::ios::fixed);
    out.precision(3);
    bool first = true;
    for (const auto& [t, w] : e.terms) {
      if (!first) out << " + ";
      first = false;
      out << w << " " << token_symbol(t);
    }
    return out.str();
  };
  return side(ri.lhs) + " ≥ " + side(ri.rhs);
}

}  // namespace qregion
