#include <doctest.h>

#include <algorithm>
#include <random>

#include "quotrep/fock_space.hpp"

using namespace quotrep;

TEST_CASE("canonicalize spec cases") {
  CurveAlgebra alg(1);
  // even decoration past an odd one: no sign
  auto c1 = canonicalize_slots(alg, {{0, alg.alpha(1)}, {1, alg.unit()}});
  REQUIRE(c1.sign == 1);
  CHECK(c1.vec == FockVector{{{1, alg.unit()}, {0, alg.alpha(1)}}});
  // repeated odd decoration in one block dies
  auto c2 = canonicalize_slots(alg, {{0, alg.alpha(1)}, {0, alg.alpha(1)}});
  CHECK(c2.sign == 0);
  // same multiset, same canonical vector
  auto c3 = canonicalize_slots(alg, {{0, alg.point()}, {0, alg.unit()}});
  auto c4 = canonicalize_slots(alg, {{0, alg.unit()}, {0, alg.point()}});
  CHECK(c3.vec == c4.vec);
  CHECK(c3.sign == 1);
  CHECK(c4.sign == 1);
}

TEST_CASE("canonicalize is idempotent and permutation covariant") {
  CurveAlgebra alg(2);
  std::mt19937 rng(23);
  std::uniform_int_distribution<int> kd(0, 2);
  std::uniform_int_distribution<LetterId> dd(0, alg.point());
  std::uniform_int_distribution<int> len(0, 5);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<Slot> raw(static_cast<std::size_t>(len(rng)));
    for (auto& s : raw) s = {kd(rng), dd(rng)};
    auto base = canonicalize_slots(alg, raw);
    if (base.sign != 0) {
      auto again = canonicalize_slots(alg, base.vec.slots);
      CHECK(again.sign == 1);
      CHECK(again.vec == base.vec);
    }
    // a shuffled copy canonicalizes to the same vector, with the sign of the
    // permutation acting on the odd decorations
    std::vector<std::size_t> perm(raw.size());
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<Slot> shuffled(raw.size());
    for (std::size_t i = 0; i < perm.size(); ++i) shuffled[i] = raw[perm[i]];
    int koszul = 1;
    for (std::size_t i = 0; i < perm.size(); ++i) {
      for (std::size_t j = i + 1; j < perm.size(); ++j) {
        if (perm[i] > perm[j] && alg.is_odd(raw[perm[i]].dec) &&
            alg.is_odd(raw[perm[j]].dec))
          koszul = -koszul;
      }
    }
    auto moved = canonicalize_slots(alg, shuffled);
    CHECK(moved.sign == base.sign * koszul);
    if (base.sign != 0) CHECK(moved.vec == base.vec);
  }
}

TEST_CASE("enumerate spec cases") {
  // r=2, g=0, d=1: (0;1),(0;w),(1;1),(1;w) with degrees 0,2,2,4
  CurveAlgebra alg0(0);
  auto b = enumerate_basis(2, 0, 1);
  REQUIRE(b.size() == 4);
  auto hist = degree_histogram(alg0, 2, 1, b);
  CHECK(hist == std::vector<long long>{1, 0, 2, 0, 1});

  auto b0 = enumerate_basis(2, 0, 0);
  REQUIRE(b0.size() == 1);
  CHECK(b0[0].slots.empty());
}

TEST_CASE("poincare closed form spec values") {
  // r=2, g=0: t^1 coefficient 1 + 2 z^2 + z^4
  auto t1 = poincare_closed_form(2, 0, 1);
  CHECK(t1[1] == std::vector<long long>{1, 0, 2, 0, 1});
  // r=1, g=1: t^2 coefficient 1 + 2z + 2z^2 + 2z^3 + z^4
  auto t2 = poincare_closed_form(1, 1, 2);
  CHECK(t2[2] == std::vector<long long>{1, 2, 2, 2, 1});
  // r=1, g=0: t^3 coefficient 1 + z^2 + z^4 + z^6
  auto t3 = poincare_closed_form(1, 0, 3);
  CHECK(t3[3] == std::vector<long long>{1, 0, 1, 0, 1, 0, 1});
}

TEST_CASE("enumeration matches the closed form on a small grid") {
  for (int r = 1; r <= 2; ++r) {
    for (int g = 0; g <= 2; ++g) {
      CurveAlgebra alg(g);
      const int dmax = 3;
      auto closed = poincare_closed_form(r, g, dmax);
      for (int d = 0; d <= dmax; ++d) {
        CAPTURE(r);
        CAPTURE(g);
        CAPTURE(d);
        auto basis = enumerate_basis(r, g, d);
        auto hist = degree_histogram(alg, r, d, basis);
        for (std::size_t z = 0; z < closed[static_cast<std::size_t>(d)].size(); ++z) {
          long long lhs = z < hist.size() ? hist[z] : 0;
          CHECK(lhs == closed[static_cast<std::size_t>(d)][z]);
        }
      }
    }
  }
}

TEST_CASE("degree parity matches decoration parity") {
  CurveAlgebra alg(2);
  for (const FockVector& v : enumerate_basis(2, 2, 2)) {
    int odd = 0;
    for (const Slot& s : v.slots) odd += alg.is_odd(s.dec) ? 1 : 0;
    CHECK((vector_degree(alg, v) % 2) == (odd % 2));
  }
}

TEST_CASE("rank one basis is the symmetric product") {
  // for r=1 all slots sit at level 0 and the basis is indexed by coinvariant
  // decoration multisets
  auto b = enumerate_basis(1, 1, 2);
  CurveAlgebra alg(1);
  auto closed = poincare_closed_form(1, 1, 2);
  auto hist = degree_histogram(alg, 1, 2, b);
  CHECK(hist == closed[2]);
  for (const FockVector& v : b) {
    for (const Slot& s : v.slots) CHECK(s.k == 0);
  }
}

TEST_CASE("state term bookkeeping") {
  FockState s = vacuum_state(1);
  CHECK(s.homogeneous_charge());
  FockVector v{{{0, 0}}};
  s.add_term(TermKey{v, {}}, 1);
  CHECK_FALSE(s.homogeneous_charge());
  s.add_term(TermKey{v, {}}, -1);
  CHECK(s.homogeneous_charge());
  s.add_term(TermKey{}, -1);
  CHECK(s.empty());
}
