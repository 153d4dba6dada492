#pragma once

#include <map>
#include <string>

#include "qregion/states.hpp"

namespace qregion {

/// Resource tokens in bracket notation. Named tokens stand for opaque
/// state/channel resources and compare by name only.
enum class TokenKind { Named, Ebit, CChannel, QChannel };

struct Token {
  TokenKind kind = TokenKind::Ebit;
  std::string name;  // used only for Named tokens

  static Token ebit() { return {TokenKind::Ebit, ""}; }
  static Token cbit() { return {TokenKind::CChannel, ""}; }
  static Token qbit() { return {TokenKind::QChannel, ""}; }
  static Token named(std::string n) { return {TokenKind::Named, std::move(n)}; }

  bool operator==(const Token& o) const { return kind == o.kind && name == o.name; }
  bool operator<(const Token& o) const {
    if (kind != o.kind) return kind < o.kind;
    return name < o.name;
  }
};

std::string token_symbol(const Token& t);

/// Weighted multiset of tokens; weights are bits/qubits per copy.
struct ResourceExpr {
  std::map<Token, double> terms;

  void add(const Token& t, double w);
  double weight(const Token& t) const;
};

struct ResourceInequality {
  ResourceExpr lhs;
  ResourceExpr rhs;
  std::string name;
  std::string note;  // provenance, e.g. dropped "for any delta > 0" slack
};

enum class Builtin { Teleportation, SuperdenseCoding, Mother, Father, Fqsw, Schumacher, StateMerging };

/// Builtin protocol inequalities. Entropic coefficients are evaluated on the
/// supplied state (purified internally when the reference is absent):
///   teleportation  [qq] + 2[c->c] >= [q->q]
///   superdense     [qq] + [q->q] >= 2[c->c]
///   mother         <rho^{AB}> + (1/2)I(A;R)[q->q] >= (1/2)I(A;B)[qq]
///   father         <N> + (1/2)I(R;E)[qq] >= (1/2)I(R;B)[q->q]   (state on B,E,R)
///   fqsw           <U:phi> + (1/2)I(A;R)[q->q] >= (1/2)I(A;B)[qq] + <id:phi>
///   schumacher     H(B)[q->q] >= <id:rho>
///   state merging  <U:rho> + H(A|B)[q->q] >= <id:rho>  (free classical)
ResourceInequality builtin(Builtin which, const MultipartiteState* s = nullptr);

/// Sum both sides, then cancel tokens appearing on both (min of weights).
/// Named tokens cancel only on exact name equality.
ResourceInequality compose(const ResourceInequality& a, const ResourceInequality& b);

ResourceInequality scale(const ResourceInequality& a, double c);

/// Signed net consumption of a token: lhs weight minus rhs weight.
double net_cost(const ResourceInequality& ri, const Token& t);

enum class Identity { HashingCoeff, MergingCoeff };

struct IdentityReport {
  double derived = 0;   // coefficient obtained from the composed inequality
  double expected = 0;  // closed form from the state's entropies
  bool holds = false;
};

/// hashing: derived ebit yield of mother + (1/2)I(A;R) TP vs H(B) - H(AB);
/// merging: derived ebit cost of FQSW + (1/2)I(A;R) TP vs H(A|B).
IdentityReport verify_identity(const MultipartiteState& s, Identity which);

/// Bracket-notation rendering, e.g. "1.000 [qq] + 2.000 [c→c] ≥ 1.000 [q→q]".
std::string pretty(const ResourceInequality& ri);

}  // namespace qregion
