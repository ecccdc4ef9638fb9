#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "quotrep/rational.hpp"

namespace quotrep {

/// Basis letter of the cohomology of a genus-g curve, encoded as an integer:
///   0            -> unit class (degree 0)
///   1 .. g       -> alpha_i    (degree 1)
///   g+1 .. 2g    -> beta_i     (degree 1)
///   2g+1         -> point class omega (degree 2)
using LetterId = int;

struct LetterProduct {
  int coeff = 0;  // -1, 0 or +1
  LetterId letter = 0;
};

/// A class in H*(C^L) for a finite ordered label set L: a sparse rational
/// combination of tensor monomials, one letter per label. Labels are kept
/// sorted; reordering tensor factors is the algebra's job (Koszul signs).
struct CurveClass {
  int genus = 0;
  std::vector<std::string> labels;  // strictly increasing
  std::map<std::vector<LetterId>, Rational> terms;

  bool operator==(const CurveClass& o) const {
    return genus == o.genus && labels == o.labels && terms == o.terms;
  }
  bool is_zero_class() const { return terms.empty(); }
};

struct DualPair {
  LetterId u;
  LetterId u_dual;
  int sign;  // diagonal_class == sum over pairs of sign * (u tensor u_dual)
};

/// Exact model of H*(C) and its tensor powers for a fixed genus.
class CurveAlgebra {
 public:
  explicit CurveAlgebra(int genus);

  int genus() const { return genus_; }
  int letter_count() const { return 2 * genus_ + 2; }

  LetterId unit() const { return 0; }
  LetterId point() const { return 2 * genus_ + 1; }
  LetterId alpha(int i) const;  // 1-based, 1 <= i <= g
  LetterId beta(int i) const;

  int degree(LetterId a) const;
  bool is_odd(LetterId a) const { return degree(a) == 1; }
  void validate_letter(LetterId a) const;

  std::string letter_name(LetterId a) const;  // "1", "w", "al3", "be1"
  std::optional<LetterId> letter_from_name(const std::string& name) const;

  /// Product of two letters within one curve factor (order matters for the
  /// odd letters: beta_i * alpha_i = -omega).
  LetterProduct letter_mul(LetterId x, LetterId y) const;

  int monomial_degree(const std::vector<LetterId>& mono) const;
  int monomial_parity(const std::vector<LetterId>& mono) const;  // 0 or 1

  // --- class constructors ---
  CurveClass scalar(const Rational& c) const;  // empty label set
  CurveClass letter_class(const std::string& label, LetterId a,
                          const Rational& c = 1) const;
  CurveClass zero(const std::vector<std::string>& labels) const;

  // --- ring operations ---
  CurveClass add(const CurveClass& x, const CurveClass& y) const;
  CurveClass scale(const CurveClass& x, const Rational& c) const;
  /// Graded product; throws on label-set or genus mismatch.
  CurveClass mul(const CurveClass& x, const CurveClass& y) const;
  /// Extends x to a larger label set by unit letters (sign-free).
  CurveClass extend(const CurveClass& x, const std::vector<std::string>& labels) const;
  /// Pairs off the point component of the given label and deletes the label.
  CurveClass integrate(const CurveClass& x, const std::string& label) const;
  CurveClass integrate_all(const CurveClass& x) const;
  /// Relabels tensor factors; Koszul sign of reordering the odd letters.
  CurveClass permute_labels(const CurveClass& x,
                            const std::map<std::string, std::string>& relabel) const;

  /// Kuenneth class of the diagonal of C x C on the two given labels.
  CurveClass diagonal_class(const std::string& l1, const std::string& l2) const;
  /// Canonical class (2g-2) * omega on one label.
  CurveClass canonical_class(const std::string& label) const;

  /// The 2g+2 pairs (u, u^dual, sign) with
  ///   diagonal_class = sum sign * u (x) u^dual,
  /// used for all open-label / Kuenneth transfers. integrate(mul(u, u_dual))
  /// equals +1 on the even pairs and -sign on the odd ones.
  const std::vector<DualPair>& dual_pairs() const { return pairs_; }

 private:
  int genus_;
  std::vector<DualPair> pairs_;
};

}  // namespace quotrep
