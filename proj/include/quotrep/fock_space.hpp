#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "quotrep/curve_algebra.hpp"
#include "quotrep/rational.hpp"

namespace quotrep {

/// One creation slot of a canonical basis vector: level k (0 <= k < r) and a
/// decoration letter from H*(C).
struct Slot {
  int k = 0;
  LetterId dec = 0;
  auto operator<=>(const Slot&) const = default;
};

/// Canonical basis vector of H*(Quot_d): slots sorted by k descending, and by
/// decoration id ascending within a block of equal k. An equal-k block never
/// carries two identical odd decorations (such vectors are zero).
struct FockVector {
  std::vector<Slot> slots;
  auto operator<=>(const FockVector&) const = default;
  int charge() const { return static_cast<int>(slots.size()); }
};

int vector_degree(const CurveAlgebra& alg, const FockVector& v);
int vector_parity(const CurveAlgebra& alg, const FockVector& v);

struct CanonResult {
  FockVector vec;
  int sign = 0;  // 0 means the vector is zero in coinvariants
};

/// Sorts raw slots into canonical order with the Koszul sign of the
/// permutation acting on decoration degrees. Kills repeated odd decorations
/// within an equal-k block.
CanonResult canonicalize_slots(const CurveAlgebra& alg, std::vector<Slot> raw);

struct TermKey {
  FockVector vec;
  std::vector<LetterId> ext;  // one letter per open label, in label order
  auto operator<=>(const TermKey&) const = default;
};

/// Sparse rational combination of basis vectors, optionally tensored with a
/// curve-class monomial on a set of open labels. Values are immutable in
/// spirit: every operation returns a fresh state.
struct FockState {
  int genus = 0;
  std::vector<std::string> labels;  // strictly increasing
  std::map<TermKey, Rational> terms;

  bool operator==(const FockState& o) const {
    return genus == o.genus && labels == o.labels && terms == o.terms;
  }
  bool empty() const { return terms.empty(); }

  void add_term(const TermKey& key, const Rational& c);
  void add_scaled(const FockState& other, const Rational& c);
  void scale(const Rational& c);

  std::set<int> charges() const;
  bool homogeneous_charge() const { return charges().size() <= 1; }
};

FockState vacuum_state(int genus);
FockState basis_state(int genus, const FockVector& v, const Rational& c = 1);

/// All canonical basis vectors of charge d for rank r, genus g, listed in a
/// fixed deterministic order.
std::vector<FockVector> enumerate_basis(int r, int g, int d);

/// Dimensions per cohomological degree 0..2rd of the enumerated basis.
std::vector<long long> degree_histogram(const CurveAlgebra& alg, int r, int d,
                                        const std::vector<FockVector>& basis);

/// Coefficient table of
///   prod_{i=0}^{r-1} (1 + t z^{2i+1})^{2g} / ((1 - t z^{2i})(1 - t z^{2i+2}))
/// up to t^{d_max}; entry [d][j] is the coefficient of t^d z^j.
std::vector<std::vector<long long>> poincare_closed_form(int r, int g, int d_max);

}  // namespace quotrep
