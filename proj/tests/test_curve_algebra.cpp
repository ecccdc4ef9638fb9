#include <doctest.h>

#include <random>

#include "quotrep/curve_algebra.hpp"

using namespace quotrep;

namespace {

std::vector<std::vector<LetterId>> all_monomials(const CurveAlgebra& alg, int nlabels) {
  std::vector<std::vector<LetterId>> out{{}};
  for (int i = 0; i < nlabels; ++i) {
    std::vector<std::vector<LetterId>> next;
    for (const auto& m : out) {
      for (LetterId a = 0; a <= alg.point(); ++a) {
        auto mm = m;
        mm.push_back(a);
        next.push_back(std::move(mm));
      }
    }
    out = std::move(next);
  }
  return out;
}

CurveClass mono_class(const CurveAlgebra& alg, const std::vector<std::string>& labels,
                      const std::vector<LetterId>& mono, const Rational& c = 1) {
  CurveClass out = alg.zero(labels);
  out.terms[mono] = c;
  return out;
}

}  // namespace

TEST_CASE("letter products on one label") {
  CurveAlgebra alg(1);
  auto a = [&](LetterId x) { return alg.letter_class("a", x); };
  CHECK(alg.mul(a(alg.alpha(1)), a(alg.beta(1))) == a(alg.point()));
  CHECK(alg.mul(a(alg.beta(1)), a(alg.alpha(1))) == alg.scale(a(alg.point()), -1));
  CHECK(alg.mul(a(alg.alpha(1)), a(alg.alpha(1))).is_zero_class());
  CHECK(alg.mul(a(alg.point()), a(alg.point())).is_zero_class());
  CHECK(alg.mul(a(alg.point()), a(alg.alpha(1))).is_zero_class());
}

TEST_CASE("Koszul sign across labels") {
  CurveAlgebra alg(1);
  // (al1 (x) be1) * (be1 (x) al1) = + w (x) w
  CurveClass x = mono_class(alg, {"a", "b"}, {alg.alpha(1), alg.beta(1)});
  CurveClass y = mono_class(alg, {"a", "b"}, {alg.beta(1), alg.alpha(1)});
  CurveClass expect = mono_class(alg, {"a", "b"}, {alg.point(), alg.point()});
  CHECK(alg.mul(x, y) == expect);
}

TEST_CASE("mul errors") {
  CurveAlgebra alg(1);
  CurveClass x = alg.letter_class("a", alg.point());
  CurveClass y = alg.letter_class("b", alg.point());
  CHECK_THROWS_AS(alg.mul(x, y), std::invalid_argument);
  CurveClass z = CurveAlgebra(2).letter_class("a", alg.point());
  CHECK_THROWS_AS(alg.mul(x, z), std::invalid_argument);
}

TEST_CASE("integrate") {
  CurveAlgebra alg(1);
  CHECK(alg.integrate(alg.letter_class("a", alg.point()), "a") == alg.scalar(1));
  CHECK(alg.integrate(alg.letter_class("a", alg.alpha(1)), "a").is_zero_class());
  CurveClass ww = mono_class(alg, {"a", "b"}, {alg.point(), alg.point()});
  CHECK(alg.integrate(ww, "a") == alg.letter_class("b", alg.point()));
  CHECK_THROWS_AS(alg.integrate(ww, "c"), std::invalid_argument);
}

TEST_CASE("permute labels") {
  CurveAlgebra alg(1);
  std::map<std::string, std::string> swap{{"a", "b"}, {"b", "a"}};
  CHECK(alg.permute_labels(mono_class(alg, {"a", "b"}, {alg.point(), alg.unit()}), swap) ==
        mono_class(alg, {"a", "b"}, {alg.unit(), alg.point()}));
  CHECK(alg.permute_labels(mono_class(alg, {"a", "b"}, {alg.alpha(1), alg.beta(1)}), swap) ==
        mono_class(alg, {"a", "b"}, {alg.beta(1), alg.alpha(1)}, -1));
  CHECK(alg.permute_labels(mono_class(alg, {"a", "b"}, {alg.alpha(1), alg.alpha(1)}), swap) ==
        mono_class(alg, {"a", "b"}, {alg.alpha(1), alg.alpha(1)}, -1));
}

TEST_CASE("diagonal class at genus 0") {
  CurveAlgebra alg(0);
  CurveClass d = alg.diagonal_class("a", "b");
  CurveClass expect = alg.add(mono_class(alg, {"a", "b"}, {alg.unit(), alg.point()}),
                              mono_class(alg, {"a", "b"}, {alg.point(), alg.unit()}));
  CHECK(d == expect);
  // one point on the diagonal
  CurveClass capped = alg.mul(d, alg.extend(alg.letter_class("a", alg.point()), {"a", "b"}));
  CHECK(alg.integrate_all(capped) == alg.scalar(1));
  // delta * delta = 2 w (x) w = -delta * (K_C (x) 1)
  CurveClass dd = alg.mul(d, d);
  CHECK(dd == mono_class(alg, {"a", "b"}, {alg.point(), alg.point()}, 2));
  CurveClass kc1 = alg.extend(alg.canonical_class("a"), {"a", "b"});
  CHECK(dd == alg.scale(alg.mul(d, kc1), -1));
}

TEST_CASE("diagonal invariants for genus <= 2") {
  for (int g = 0; g <= 2; ++g) {
    CAPTURE(g);
    CurveAlgebra alg(g);
    CurveClass d = alg.diagonal_class("a", "b");
    // delta (delta + K_C (x) 1) = 0
    CurveClass kc = alg.extend(alg.canonical_class("a"), {"a", "b"});
    CHECK(alg.mul(d, alg.add(d, kc)).is_zero_class());
    // top degree of a curve: K^2 = w^2 = 0
    CHECK(alg.mul(alg.canonical_class("a"), alg.canonical_class("a")).is_zero_class());
    for (LetterId c = 0; c <= alg.point(); ++c) {
      // correspondence identity: p_2* (delta . p_1^* c) = c
      CurveClass cc = alg.extend(alg.letter_class("a", c), {"a", "b"});
      CurveClass img = alg.integrate(alg.mul(d, cc), "a");
      CHECK(img == alg.letter_class("b", c));
      // restriction to the diagonal is label symmetric
      CurveClass cb = alg.extend(alg.letter_class("b", c), {"a", "b"});
      CHECK(alg.mul(d, cc) == alg.mul(d, cb));
    }
    // dual pairs reproduce the diagonal exactly
    CHECK(static_cast<int>(alg.dual_pairs().size()) == 2 * g + 2);
    CurveClass rebuilt = alg.zero({"a", "b"});
    for (const DualPair& p : alg.dual_pairs()) {
      rebuilt = alg.add(rebuilt, mono_class(alg, {"a", "b"}, {p.u, p.u_dual},
                                            Rational(p.sign)));
    }
    CHECK(rebuilt == d);
  }
}

TEST_CASE("dual pairs at genus 1 carry opposite odd signs") {
  CurveAlgebra alg(1);
  int sign_ab = 0, sign_ba = 0;
  for (const DualPair& p : alg.dual_pairs()) {
    if (p.u == alg.alpha(1) && p.u_dual == alg.beta(1)) sign_ab = p.sign;
    if (p.u == alg.beta(1) && p.u_dual == alg.alpha(1)) sign_ba = p.sign;
  }
  CHECK(sign_ab != 0);
  CHECK(sign_ba != 0);
  CHECK(sign_ab == -sign_ba);
}

TEST_CASE("genus 0 dual pairs") {
  CurveAlgebra alg(0);
  REQUIRE(alg.dual_pairs().size() == 2);
  for (const DualPair& p : alg.dual_pairs()) {
    CHECK(p.sign == 1);
    CHECK(alg.integrate_all(alg.mul(alg.letter_class("a", p.u),
                                    alg.letter_class("a", p.u_dual))) == alg.scalar(1));
  }
}

TEST_CASE("super commutativity and associativity") {
  for (int g = 0; g <= 2; ++g) {
    CAPTURE(g);
    CurveAlgebra alg(g);
    const std::vector<std::string> labels{"a", "b"};
    auto monos = all_monomials(alg, 2);
    for (const auto& xm : monos) {
      for (const auto& ym : monos) {
        CurveClass x = mono_class(alg, labels, xm);
        CurveClass y = mono_class(alg, labels, ym);
        CurveClass xy = alg.mul(x, y);
        CurveClass yx = alg.mul(y, x);
        int sgn = (alg.monomial_parity(xm) && alg.monomial_parity(ym)) ? -1 : 1;
        CHECK(xy == alg.scale(yx, sgn));
      }
    }
    // associativity: exhaustive over two-label monomial triples
    auto check_triple = [&](const std::vector<LetterId>& am,
                            const std::vector<LetterId>& bm,
                            const std::vector<LetterId>& cm) {
      CurveClass a = mono_class(alg, labels, am);
      CurveClass b = mono_class(alg, labels, bm);
      CurveClass c = mono_class(alg, labels, cm);
      CHECK(alg.mul(alg.mul(a, b), c) == alg.mul(a, alg.mul(b, c)));
    };
    for (const auto& am : monos)
      for (const auto& bm : monos)
        for (const auto& cm : monos) check_triple(am, bm, cm);
  }
}

TEST_CASE("associativity on three labels") {
  // exhaustive at genus zero; sampled above that, where exhausting the
  // 10^7 monomial triples stops being desk scale
  {
    CurveAlgebra alg(0);
    const std::vector<std::string> labels{"a", "b", "c"};
    auto monos = all_monomials(alg, 3);
    for (const auto& am : monos)
      for (const auto& bm : monos)
        for (const auto& cm : monos) {
          CurveClass a = mono_class(alg, labels, am);
          CurveClass b = mono_class(alg, labels, bm);
          CurveClass c = mono_class(alg, labels, cm);
          CHECK(alg.mul(alg.mul(a, b), c) == alg.mul(a, alg.mul(b, c)));
        }
  }
  for (int g = 1; g <= 2; ++g) {
    CurveAlgebra alg(g);
    const std::vector<std::string> labels{"a", "b", "c"};
    auto monos = all_monomials(alg, 3);
    std::mt19937 rng(11 + static_cast<unsigned>(g));
    std::uniform_int_distribution<std::size_t> pick(0, monos.size() - 1);
    for (int t = 0; t < 4000; ++t) {
      CurveClass a = mono_class(alg, labels, monos[pick(rng)]);
      CurveClass b = mono_class(alg, labels, monos[pick(rng)]);
      CurveClass c = mono_class(alg, labels, monos[pick(rng)]);
      CHECK(alg.mul(alg.mul(a, b), c) == alg.mul(a, alg.mul(b, c)));
    }
  }
}

TEST_CASE("diagonal class label handling") {
  CurveAlgebra alg(2);
  CHECK_THROWS_AS(alg.diagonal_class("a", "a"), std::invalid_argument);
  // the diagonal is invariant under swapping its two factors
  CHECK(alg.diagonal_class("a", "b") == alg.diagonal_class("b", "a"));
}

TEST_CASE("permute_labels rejects non-injective relabelings") {
  CurveAlgebra alg(1);
  CurveClass x = alg.zero({"a", "b"});
  x.terms[{alg.unit(), alg.point()}] = 1;
  std::map<std::string, std::string> collapse{{"a", "c"}, {"b", "c"}};
  CHECK_THROWS_AS(alg.permute_labels(x, collapse), std::invalid_argument);
}

TEST_CASE("letters respect the genus") {
  CurveAlgebra alg(0);
  CHECK_THROWS_AS(alg.alpha(1), std::out_of_range);
  CHECK(alg.letter_count() == 2);
  CHECK_FALSE(alg.letter_from_name("al1").has_value());
  CurveAlgebra alg2(2);
  CHECK(alg2.letter_from_name("be2").value() == alg2.beta(2));
  CHECK(alg2.letter_name(alg2.beta(2)) == "be2");
}
